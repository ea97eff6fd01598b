#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relaynet/formulate.hpp"
#include "relaynet/milp_solver.hpp"

namespace relaynet {

// Second-stage decisions of one scenario.
struct ScenarioRecourse {
    int w = 0;                                  // scenario index
    std::vector<int> z;                         // by commodity
    std::map<std::pair<int, int>, int> y;       // (service or commodity, hauler index) -> count, nonzero only
    std::map<std::pair<int, int>, double> f;    // (commodity, arc) -> flow, nonzero only
    double cost = 0.0;                          // unweighted recourse cost
};

struct Recourse {
    std::vector<ScenarioRecourse> scenarios;  // one per scenario, in scenario order
};

enum class OutsourcingRate { Volume, Count };

struct KpiReport {
    double total_contracted_driver_hours = 0.0;
    double avg_tractor_rental_hours = 0.0;
    double avg_hauler_rental_hours = 0.0;
    double avg_outsourcing_rate = 0.0;
    double total_expected_cost = 0.0;
    double contract_cost = 0.0;
    double expected_recourse_cost = 0.0;
    int opened_services = 0;
    int contracted_units = 0;
};

DesignSolution extract_design(const Instance& inst, const Formulation& f, const std::vector<double>& values);
// Scenario `w` of a model built by formulate (all scenarios) or formulate_second_stage (w only).
ScenarioRecourse extract_scenario(const Instance& inst, const Formulation& f, const std::vector<double>& values, int w);
Recourse extract_recourse(const Instance& inst, const Formulation& f, const std::vector<double>& values);

double recourse_cost(const Instance& inst, const ScenarioRecourse& r);
double contract_cost(const Instance& inst, const DesignSolution& design);

KpiReport compute_kpis(const Instance& inst, const DesignSolution& design, const Recourse& recourse,
                       OutsourcingRate rate = OutsourcingRate::Volume);

// Independent check of a design plus recourse against the pattern's
// constraints, recomputed from the instance rather than from model rows.
struct AuditReport {
    double max_residual = 0.0;       // capacity / linking / sizing rows
    double max_flow_residual = 0.0;  // flow conservation
    bool hos_ok = true;
    bool bounds_ok = true;
    bool consistency_ok = true;
    std::vector<std::string> issues;

    bool ok(double tol = 1e-6, double flow_tol = 1e-9) const {
        return hos_ok && bounds_ok && consistency_ok && max_residual <= tol && max_flow_residual <= flow_tol;
    }
};

AuditReport audit_solution(const Instance& inst, const DesignSolution& design, const Recourse& recourse);

struct InstanceSolution {
    MilpStatus status = MilpStatus::Infeasible;
    bool has_solution = false;
    double objective = 0.0;  // as reported by the solver
    double bound = -kInf;    // proven lower bound (solve_instance only)
    SolveStats stats;
    DesignSolution design;
    Recourse recourse;
    KpiReport kpis;
};

// Branching priority by variable kind unless `opts` already carries one.
SolveOptions with_default_priority(const Formulation& f, SolveOptions opts);

InstanceSolution solve_instance(const Instance& inst, const SolveOptions& opts);

// Second stage of every scenario with `design` fixed. Scenarios are solved
// concurrently when opts.threads > 1; results are keyed by scenario.
InstanceSolution evaluate_design(const Instance& inst, const DesignSolution& design, const SolveOptions& opts);

// Instance with the scenario set replaced by its mean scenario.
Instance mean_value_instance(const Instance& inst);

struct VssReport {
    double stochastic_cost = 0.0;
    double deterministic_design_cost = 0.0;
    double vss = 0.0;
    bool conclusive = true;  // false when any phase stopped short of optimality
    DesignSolution stochastic_design;
    DesignSolution deterministic_design;
    KpiReport stochastic_kpis;
    KpiReport deterministic_kpis;
};

VssReport make_vss_report(double deterministic_design_cost, double stochastic_cost);
VssReport compute_vss(const Instance& inst, const SolveOptions& opts);

struct ComparisonRow {
    std::string label;
    Pattern pattern = Pattern::FluMcp;
    Consistency consistency = Consistency::Weekly;
    std::vector<int> hauler_sizes;
    MilpStatus status = MilpStatus::Infeasible;
    KpiReport kpis;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    // compare_patterns: cost(FLU-MCP) <= cost(FLU-SCP) + 1e-6.
    // compare_consistency: various sizes never cost more than the fixed size.
    bool ordering_holds = true;
};

ComparisonReport compare_patterns(const Instance& inst, const SolveOptions& opts);
// {Weekly, Daily} x {fixed sizes, various sizes}; instances are rebuilt from the spec.
ComparisonReport compare_consistency(const Instance& inst, const SolveOptions& opts, const std::vector<int>& fixed_sizes = {8},
                                     const std::vector<int>& various_sizes = {4, 8});

}  // namespace relaynet
