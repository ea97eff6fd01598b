#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "relaynet/network.hpp"

namespace relaynet {

struct Commodity {
    int id = 0;
    HubId origin = 0;
    HubId destination = 0;
    int entry_step = 0;
    int due_step = 0;
    double distance_miles = 0.0;              // shortest origin-destination distance
    double outsource_cost_per_vehicle = 0.0;  // rate x distance
};

struct Scenario {
    int id = 0;
    double probability = 1.0;
    std::vector<double> volumes;  // indexed by commodity id, vehicles
};

struct ScenarioSet {
    std::vector<Scenario> scenarios;
    std::uint64_t seed = 0;  // 0 for ingested data

    int size() const { return static_cast<int>(scenarios.size()); }
    bool empty() const { return scenarios.empty(); }
};

// Shape of the synthetic demand law.
struct DemandSpec {
    std::map<std::pair<HubId, HubId>, double> mean_volume;  // lambda per OD
    double dispersion = 0.0;   // variance = mean + dispersion * mean^2
    double east_share = 0.5;   // used by demand_spec_from_geography
    std::vector<int> entry_steps;
    int demand_days = 4;

    double mean_for(HubId o, HubId d) const;
};

void validate(const DemandSpec& spec);

// Throws ValidationError for bad hubs/windows and unreachable ODs.
void validate_commodities(const std::vector<Commodity>& commodities, const PhysicalNetwork& pnet, const TimeGrid& grid);
void validate(const ScenarioSet& set, int num_commodities);

// Fills distance and outsourcing cost fields from the network.
void price_commodities(std::vector<Commodity>& commodities, const PhysicalNetwork& pnet, double rate_per_vehicle_mile);

// One commodity per ordered hub pair and entry step, due `window_steps` later
// (clipped to the horizon).
std::vector<Commodity> make_commodities(const PhysicalNetwork& pnet, const std::vector<int>& entry_steps, int window_steps,
                                        int horizon_steps, double rate_per_vehicle_mile);

// Per-OD means: base_mean scaled by east_share for eastbound pairs (destination
// longitude greater than origin) and by 1 - east_share otherwise, so that the
// average over both directions stays base_mean.
DemandSpec demand_spec_from_geography(const PhysicalNetwork& pnet, double base_mean, double east_share, double dispersion);

// n equiprobable scenarios; volumes are gamma-Poisson (negative binomial) draws.
ScenarioSet generate_scenarios(const DemandSpec& spec, const std::vector<Commodity>& commodities, int n, std::uint64_t seed);

Scenario mean_scenario(const ScenarioSet& set);

double outsourcing_cost(const Commodity& k, const Scenario& w, double rate_per_vehicle_mile, const PhysicalNetwork& pnet);

// Commodity document: id,origin,destination,entry_step,due_step
std::vector<Commodity> read_commodities(const std::string& csv_text, const PhysicalNetwork& pnet);
std::string write_commodities(const std::vector<Commodity>& commodities, const PhysicalNetwork& pnet);

// Scenario document: scenario_id,probability,commodity_id,volume
ScenarioSet read_scenarios(const std::string& csv_text, int num_commodities);
std::string write_scenarios(const ScenarioSet& set);

}  // namespace relaynet
