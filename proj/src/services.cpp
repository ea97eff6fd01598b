#include "relaynet/services.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relaynet/csv.hpp"
#include "relaynet/error.hpp"

namespace relaynet {

double CostParams::hauler_hourly(int size) const {
    const auto it = hauler_hourly_by_size.find(size);
    if (it == hauler_hourly_by_size.end())
        throw ValidationError("no hourly rate for hauler size " + std::to_string(size), "costs");
    return it->second;
}

void validate(const CostParams& c) {
    const auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
    if (!positive(c.driver_hourly)) throw ValidationError("driver_hourly must be positive", "costs");
    if (!positive(c.tractor_hourly)) throw ValidationError("tractor_hourly must be positive", "costs");
    if (!positive(c.outsource_per_vehicle_mile)) throw ValidationError("outsource_per_vehicle_mile must be positive", "costs");
    if (!positive(c.avg_mph)) throw ValidationError("avg_mph must be positive", "costs");
    if (!(c.consistency_discount > 0.0 && c.consistency_discount <= 1.0))
        throw ValidationError("consistency_discount must be in (0, 1]", "costs");
    if (c.default_capacity < 0) throw ValidationError("default_capacity must be >= 0", "costs");
    for (const auto& [size, rate] : c.hauler_hourly_by_size) {
        if (size <= 0) throw ValidationError("hauler sizes must be positive", "costs");
        if (!positive(rate)) throw ValidationError("hauler rates must be positive", "costs");
    }
}

void validate(const HosPolicy& hos) {
    if (!(hos.max_driving_hours > 0.0) || !(hos.max_on_duty_hours >= hos.max_driving_hours))
        throw ValidationError("HOS limits need 0 < max_driving_hours <= max_on_duty_hours", "hos");
}

ServiceCatalog::ServiceCatalog(std::vector<Service> services, int num_ts_arcs) : services_(std::move(services)) {
    arc_index_.assign(static_cast<size_t>(num_ts_arcs), {});
    for (size_t i = 0; i < services_.size(); ++i) {
        auto& s = services_[i];
        s.id = static_cast<int>(i);
        for (int a : s.legs) {
            if (a < 0 || a >= num_ts_arcs) throw ValidationError("leg arc id out of range", "service " + std::to_string(i));
            arc_index_[static_cast<size_t>(a)].push_back(s.id);
        }
        template_index_[s.template_key].push_back(s.id);
    }
    for (auto& [key, ids] : template_index_)
        std::stable_sort(ids.begin(), ids.end(), [&](int x, int y) { return services_[static_cast<size_t>(x)].cycle < services_[static_cast<size_t>(y)].cycle; });
}

const Service& ServiceCatalog::service(int id) const {
    if (id < 0 || id >= size()) throw UsageError("unknown service id " + std::to_string(id));
    return services_[static_cast<size_t>(id)];
}

const std::vector<int>& ServiceCatalog::covering(int arc) const {
    static const std::vector<int> none;
    if (arc < 0 || arc >= num_ts_arcs()) return none;
    return arc_index_[static_cast<size_t>(arc)];
}

ServiceCatalog ServiceCatalog::filtered(const std::function<bool(const Service&)>& keep) const {
    std::vector<Service> kept;
    for (const auto& s : services_)
        if (keep(s)) kept.push_back(s);
    return ServiceCatalog(std::move(kept), num_ts_arcs());
}

double contract_fee(const CostParams& costs, Consistency consistency, double on_duty_hours, bool include_tractor) {
    double driver_rate = costs.driver_hourly;
    if (consistency == Consistency::Daily) driver_rate *= costs.consistency_discount;
    const double rate = driver_rate + (include_tractor ? costs.tractor_hourly : 0.0);
    return rate * on_duty_hours;
}

ServiceCatalog enumerate_services(const TimeSpaceNetwork& tsn, const PhysicalNetwork& pnet, const HosPolicy& hos,
                                  const CostParams& costs, Consistency consistency, bool include_tractor_in_fee) {
    validate(hos);
    const auto& grid = tsn.grid();
    const int T = grid.num_steps;
    const int window = std::min(grid.start_window(), T);
    // HOS comparisons tolerate floating noise in hours arithmetic.
    constexpr double eps = 1e-9;

    const auto leg_driving = [&](const PhysicalArc& pa) {
        return hos.driving_time == DrivingTime::Grid ? pa.travel_steps * grid.step_hours : pa.distance_miles / costs.avg_mph;
    };

    std::vector<int> parcs(static_cast<size_t>(pnet.num_arcs()));
    for (int i = 0; i < pnet.num_arcs(); ++i) parcs[static_cast<size_t>(i)] = i;
    std::sort(parcs.begin(), parcs.end(), [&](int x, int y) {
        const auto& a = pnet.arcs()[static_cast<size_t>(x)];
        const auto& b = pnet.arcs()[static_cast<size_t>(y)];
        return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });

    std::vector<Service> services;
    for (int out_parc : parcs) {
        const auto& out = pnet.arcs()[static_cast<size_t>(out_parc)];
        const auto back_parc = pnet.find_arc(out.to, out.from);
        if (!back_parc) continue;
        const auto& back = pnet.arcs()[static_cast<size_t>(*back_parc)];
        const double driving = leg_driving(out) + leg_driving(back);
        if (driving > hos.max_driving_hours + eps) continue;

        for (int t0 = 0; t0 < window; ++t0) {
            const auto leg1 = tsn.moving_arc(out_parc, t0);
            if (!leg1) continue;
            const int arrive = t0 + out.travel_steps;
            for (int t2 = arrive; t2 + back.travel_steps <= T; ++t2) {
                const int end = t2 + back.travel_steps;
                const double on_duty = (end - t0) * grid.step_hours;
                if (on_duty > hos.max_on_duty_hours + eps) break;
                const auto leg2 = tsn.moving_arc(*back_parc, t2);
                if (!leg2) continue;
                Service s;
                s.home_hub = out.from;
                s.away_hub = out.to;
                s.legs = {*leg1, *leg2};
                s.start_step = t0;
                s.end_step = end;
                if (consistency == Consistency::Daily) {
                    s.cycle = t0 / grid.cycle_steps;
                    s.start_in_cycle = t0 % grid.cycle_steps;
                } else {
                    s.cycle = 0;
                    s.start_in_cycle = t0;
                }
                s.on_duty_hours = on_duty;
                s.driving_hours = driving;
                s.contract_fee = contract_fee(costs, consistency, on_duty, include_tractor_in_fee);
                s.capacity = costs.default_capacity;
                s.template_key = {s.home_hub, s.away_hub, s.start_in_cycle, t2 - arrive};
                services.push_back(std::move(s));
            }
        }
    }
    return ServiceCatalog(std::move(services), tsn.num_arcs());
}

const std::vector<int>& services_on_arc(const ServiceCatalog& catalog, const TimeSpaceNetwork& tsn, int arc) {
    if (arc < 0 || arc >= tsn.num_arcs()) throw UsageError("arc id " + std::to_string(arc) + " out of range");
    if (!tsn.arc(arc).is_moving()) throw UsageError("arc " + std::to_string(arc) + " is a holding arc");
    return catalog.covering(arc);
}

std::vector<int> consistency_partners(const ServiceCatalog& catalog, int service_id) {
    const auto& s = catalog.service(service_id);
    return catalog.templates().at(s.template_key);
}

std::vector<ServiceOverride> read_service_overrides(const std::string& csv_text) {
    const auto table = csv::parse(csv_text);
    const std::string doc = "service overrides";
    const int c_route = table.require("route", doc);
    const int c_cycle = table.require("cycle", doc);
    const int c_start = table.require("start_in_cycle", doc);
    const int c_dwell = table.column("dwell_steps");
    const int c_cap = table.column("capacity");
    const int c_fee = table.column("contract_fee");
    const int c_action = table.column("action");

    std::vector<ServiceOverride> rows;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const std::string where = doc + " row " + std::to_string(i + 1);
        ServiceOverride o;
        std::vector<std::string> parts;
        std::stringstream ss(r[static_cast<size_t>(c_route)]);
        for (std::string p; std::getline(ss, p, '-');) parts.push_back(p);
        if (parts.size() != 3 || parts[0] != parts[2]) throw ValidationError("route must look like HOME-AWAY-HOME", where);
        o.home = parts[0];
        o.away = parts[1];
        o.cycle = csv::to_int(r[static_cast<size_t>(c_cycle)], where);
        o.start_in_cycle = csv::to_int(r[static_cast<size_t>(c_start)], where);
        const auto field = [&](int c) -> const std::string* {
            if (c < 0 || r[static_cast<size_t>(c)].empty()) return nullptr;
            return &r[static_cast<size_t>(c)];
        };
        if (const auto* f = field(c_dwell)) o.dwell_steps = csv::to_int(*f, where);
        if (const auto* f = field(c_cap)) {
            o.capacity = csv::to_int(*f, where);
            if (*o.capacity < 0) throw ValidationError("capacity must be >= 0", where);
        }
        if (const auto* f = field(c_fee)) {
            o.contract_fee = csv::to_double(*f, where);
            if (*o.contract_fee < 0.0) throw ValidationError("contract_fee must be >= 0", where);
        }
        if (const auto* f = field(c_action)) {
            if (*f == "prune") {
                o.prune = true;
            } else if (*f != "keep") {
                throw ValidationError("action must be 'keep' or 'prune'", where);
            }
        }
        rows.push_back(o);
    }
    return rows;
}

ServiceCatalog apply_overrides(const ServiceCatalog& catalog, const PhysicalNetwork& pnet,
                               const std::vector<ServiceOverride>& rows, bool listed_only) {
    struct Resolved {
        HubId home;
        HubId away;
        const ServiceOverride* row;
    };
    std::vector<Resolved> resolved;
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto home = pnet.find_hub(rows[i].home);
        const auto away = pnet.find_hub(rows[i].away);
        if (!home || !away) throw ValidationError("unknown hub in route", "service overrides row " + std::to_string(i + 1));
        resolved.push_back({*home, *away, &rows[i]});
    }

    std::vector<Service> kept;
    for (auto s : catalog.services()) {
        bool matched = false;
        bool pruned = false;
        for (const auto& r : resolved) {
            const auto& o = *r.row;
            if (r.home != s.home_hub || r.away != s.away_hub || o.cycle != s.cycle || o.start_in_cycle != s.start_in_cycle)
                continue;
            if (o.dwell_steps && *o.dwell_steps != s.template_key.dwell_steps) continue;
            matched = true;
            if (o.prune) pruned = true;
            if (o.capacity) s.capacity = *o.capacity;
            if (o.contract_fee) s.contract_fee = *o.contract_fee;
        }
        if (pruned || (listed_only && !matched)) continue;
        kept.push_back(std::move(s));
    }
    return ServiceCatalog(std::move(kept), catalog.num_ts_arcs());
}

}  // namespace relaynet
