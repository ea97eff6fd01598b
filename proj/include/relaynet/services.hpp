#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relaynet/costs.hpp"
#include "relaynet/network.hpp"

namespace relaynet {

enum class Consistency { Weekly, Daily };

// How the driving time of a leg is measured. `Grid` charges the full step
// allotment (travel plus buffer); `Mileage` charges distance / avg_mph.
enum class DrivingTime { Grid, Mileage };

struct HosPolicy {
    double max_on_duty_hours = 14.0;
    double max_driving_hours = 11.0;
    DrivingTime driving_time = DrivingTime::Grid;
};

void validate(const HosPolicy& hos);

struct TemplateKey {
    HubId home = 0;
    HubId away = 0;
    int start_in_cycle = 0;
    int dwell_steps = 0;  // away-hub wait between arrival and return departure

    friend bool operator==(const TemplateKey&, const TemplateKey&) = default;
    friend auto operator<=>(const TemplateKey&, const TemplateKey&) = default;
};

// A round trip home -> away -> home offered for trucker contracting.
struct Service {
    int id = 0;
    HubId home_hub = 0;
    HubId away_hub = 0;
    std::vector<int> legs;  // moving TS arc ids in travel order
    int cycle = 0;
    int start_in_cycle = 0;
    int start_step = 0;
    int end_step = 0;
    double on_duty_hours = 0.0;
    double driving_hours = 0.0;
    double contract_fee = 0.0;
    int capacity = 0;
    TemplateKey template_key;
};

class ServiceCatalog {
public:
    ServiceCatalog() = default;
    // Services are renumbered 0..n-1 in the given order.
    ServiceCatalog(std::vector<Service> services, int num_ts_arcs);

    const std::vector<Service>& services() const { return services_; }
    const Service& service(int id) const;
    int size() const { return static_cast<int>(services_.size()); }
    bool empty() const { return services_.empty(); }
    int num_ts_arcs() const { return static_cast<int>(arc_index_.size()); }

    // Services whose legs include TS arc `arc` (no check on arc kind).
    const std::vector<int>& covering(int arc) const;
    const std::map<TemplateKey, std::vector<int>>& templates() const { return template_index_; }

    // Copy keeping only the services for which `keep` returns true.
    ServiceCatalog filtered(const std::function<bool(const Service&)>& keep) const;

private:
    std::vector<Service> services_;
    std::vector<std::vector<int>> arc_index_;
    std::map<TemplateKey, std::vector<int>> template_index_;
};

// Contract fee of one occurrence of a service. FLU contracts drivers only;
// HS contracts driver-tractor pairs, so the tractor rate is added.
double contract_fee(const CostParams& costs, Consistency consistency, double on_duty_hours, bool include_tractor);

ServiceCatalog enumerate_services(const TimeSpaceNetwork& tsn, const PhysicalNetwork& pnet, const HosPolicy& hos,
                                  const CostParams& costs, Consistency consistency, bool include_tractor_in_fee = false);

// Throws UsageError for holding arcs or out-of-range ids.
const std::vector<int>& services_on_arc(const ServiceCatalog& catalog, const TimeSpaceNetwork& tsn, int arc);

// All services sharing the template of `service_id` (itself included), sorted by cycle.
std::vector<int> consistency_partners(const ServiceCatalog& catalog, int service_id);

// Row of a service-override document. Matches every service with this route,
// cycle and start_in_cycle (and dwell, when given).
struct ServiceOverride {
    std::string home;
    std::string away;
    int cycle = 0;
    int start_in_cycle = 0;
    std::optional<int> dwell_steps;
    std::optional<int> capacity;
    std::optional<double> contract_fee;
    bool prune = false;
};

// Override documents are CSV: route,cycle,start_in_cycle[,dwell_steps][,capacity][,contract_fee][,action]
// where route is "HOME-AWAY-HOME" and action is "keep" (default) or "prune".
std::vector<ServiceOverride> read_service_overrides(const std::string& csv_text);

// Applies the rows. With `listed_only`, unmatched services are dropped.
ServiceCatalog apply_overrides(const ServiceCatalog& catalog, const PhysicalNetwork& pnet,
                               const std::vector<ServiceOverride>& rows, bool listed_only);

}  // namespace relaynet
