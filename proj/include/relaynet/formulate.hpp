#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "relaynet/costs.hpp"
#include "relaynet/demand.hpp"
#include "relaynet/model.hpp"
#include "relaynet/network.hpp"
#include "relaynet/services.hpp"

namespace relaynet {

enum class Pattern { FluMcp, FluScp, Hs };

const char* to_string(Pattern p);
Pattern parse_pattern(const std::string& text);  // flu-mcp | flu-scp | hs
const char* to_string(Consistency c);
Consistency parse_consistency(const std::string& text);  // weekly | daily

inline bool is_flu(Pattern p) { return p != Pattern::Hs; }

struct HaulerOption {
    int size = 8;
    double hourly_rate = 10.0;
};

// Everything needed to (re)build an instance. Comparisons copy this, change a
// field and rebuild.
struct InstanceSpec {
    PhysicalNetwork pnet;
    TimeGrid grid;
    HosPolicy hos;
    CostParams costs;
    std::vector<int> hauler_sizes{8};
    Pattern pattern = Pattern::FluMcp;
    Consistency consistency = Consistency::Weekly;
    std::vector<Commodity> commodities;
    ScenarioSet scenarios;
    std::vector<ServiceOverride> overrides;
    bool overrides_listed_only = false;
    // Charge outsourcing once per outsourced commodity instead of per vehicle.
    bool fixed_outsourcing_cost = false;
    // Add valid inequalities that tighten the LP relaxation without changing
    // the integer optimum (rows named eq4k_*, eq4pk_*, eq4ppc_*).
    bool strengthen = true;
};

struct Instance {
    InstanceSpec spec;
    TimeSpaceNetwork tsn;
    ServiceCatalog catalog;
    std::vector<HaulerOption> haulers;

    const std::vector<Commodity>& commodities() const { return spec.commodities; }
    const ScenarioSet& scenarios() const { return spec.scenarios; }
    const CostParams& costs() const { return spec.costs; }
    Pattern pattern() const { return spec.pattern; }
    Consistency consistency() const { return spec.consistency; }
};

// Validates the spec, prices commodities, builds the time-space network and
// the service catalog (with overrides applied).
Instance build_instance(InstanceSpec spec);

// Same instance with a different catalog (e.g. a hand-picked subset).
Instance with_catalog(const Instance& inst, ServiceCatalog catalog);

std::vector<HaulerOption> hauler_options(const CostParams& costs, const std::vector<int>& sizes);

// Contract cost of one unit of X_s. FLU contracts drivers; HS contracts
// driver-tractor pairs and pays the tractor as well.
double first_stage_cost(const Instance& inst, const Service& s);
// Per-unit rental cost of Y_su (FLU) or Y_ku (HS), before probability weighting.
double flu_truck_cost(const Instance& inst, const Service& s, const HaulerOption& h);
double hs_hauler_cost(const Instance& inst, const Commodity& k, const HaulerOption& h);
// Cost of outsourcing commodity k in scenario w (Z_k(w) = 1).
double outsource_cost(const Instance& inst, const Commodity& k, const Scenario& w);

enum class VarKind { X, Y, Z, F };

struct VarKey {
    VarKind kind = VarKind::X;
    int a = -1;  // X: service; Y: service (FLU) or commodity (HS); Z, F: commodity
    int b = -1;  // Y: hauler option index; F: TS arc
    int w = -1;  // scenario index (position in the scenario set)
};

struct VarMap {
    std::vector<VarKey> keys;  // by variable id
    std::vector<int> x;        // by service, -1 when absent
    std::vector<std::vector<int>> z;                 // [w][k]
    std::map<std::tuple<int, int, int>, int> y;      // (owner, hauler, w)
    std::map<std::tuple<int, int, int>, int> f;      // (k, arc, w)

    int find_y(int owner, int hauler, int w) const;
    int find_f(int k, int arc, int w) const;
};

struct Formulation {
    MilpModel model;
    VarMap vars;
};

// Deterministic equivalent over all scenarios.
Formulation formulate(const Instance& inst);

// First-stage decision: contracted count per service.
struct DesignSolution {
    std::vector<int> x;
};

// Recourse model of scenario index `w` with X fixed to `design` (moved to the
// right-hand side). The objective is the unweighted recourse cost.
Formulation formulate_second_stage(const Instance& inst, const DesignSolution& design, int w);

// Arcs commodity k may use: moving arcs covered by an allowed service and
// holding arcs, inside [entry, due], forward reachable from the origin node
// and backward reachable from the destination node. Sorted by arc id.
std::vector<int> usable_arcs(const TimeSpaceNetwork& tsn, const ServiceCatalog& catalog, const Commodity& k,
                             const std::vector<char>& service_allowed);

}  // namespace relaynet
