#pragma once

// Small instance builders shared by unit and acceptance tests.

#include <random>
#include <string>
#include <vector>

#include "relaynet/formulate.hpp"

namespace testing_support {

using namespace relaynet;

inline PhysicalNetwork line_network(int hubs, double miles = 275.0, int steps = 1) {
    std::vector<Hub> hv;
    for (int i = 0; i < hubs; ++i) hv.push_back({i, std::string(1, static_cast<char>('A' + i)), std::nullopt, std::nullopt});
    std::vector<PhysicalArc> arcs;
    for (int i = 0; i + 1 < hubs; ++i) {
        arcs.push_back({i, i + 1, steps, miles});
        arcs.push_back({i + 1, i, steps, miles});
    }
    return PhysicalNetwork(hv, arcs);
}

inline Commodity commodity(int id, int o, int d, int entry, int due) {
    Commodity k;
    k.id = id;
    k.origin = o;
    k.destination = d;
    k.entry_step = entry;
    k.due_step = due;
    return k;
}

inline ScenarioSet scenarios(const std::vector<std::vector<double>>& volumes) {
    ScenarioSet set;
    for (size_t i = 0; i < volumes.size(); ++i)
        set.scenarios.push_back({static_cast<int>(i), 1.0 / static_cast<double>(volumes.size()), volumes[i]});
    return set;
}

// Line A-B-C, 1-step 275 mi arcs, 6h steps, one A->B commodity with v = 5,
// hauler size 8, HOS driving measured by mileage (5.5h per leg).
inline InstanceSpec l3_spec(int horizon = 2) {
    InstanceSpec spec;
    spec.pnet = line_network(3);
    spec.grid = {6.0, horizon, 1, horizon};
    spec.hos.driving_time = DrivingTime::Mileage;
    spec.hauler_sizes = {8};
    spec.commodities = {commodity(0, 0, 1, 0, horizon)};
    spec.scenarios = scenarios({{5.0}});
    return spec;
}

struct RandomInstanceOptions {
    int min_hubs = 2;
    int max_hubs = 4;
    int min_commodities = 1;
    int max_commodities = 3;
    int min_scenarios = 1;
    int max_scenarios = 2;
    int horizon = 4;
    int max_volume = 10;
    int capacity = 2;
    int max_services = -1;  // keep a random subset of at most this many services
};

// Random connected network with 1-step arcs of 100-275 mi so every
// immediate-turnaround round trip passes the mileage-based HOS check.
inline InstanceSpec random_spec(std::mt19937_64& rng, const RandomInstanceOptions& o) {
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); };
    InstanceSpec spec;
    const int nh = pick(o.min_hubs, o.max_hubs);
    std::vector<Hub> hubs;
    for (int i = 0; i < nh; ++i) hubs.push_back({i, "H" + std::to_string(i), static_cast<double>(-90 + i), 33.0});
    std::vector<PhysicalArc> arcs;
    auto add = [&](int a, int b) {
        const double miles = 100.0 + 25.0 * pick(0, 7);
        arcs.push_back({a, b, 1, miles});
        arcs.push_back({b, a, 1, miles});
    };
    for (int i = 1; i < nh; ++i) add(pick(0, i - 1), i);
    for (int i = 0; i < nh; ++i)
        for (int j = i + 1; j < nh; ++j) {
            bool present = false;
            for (const auto& a : arcs) present = present || (a.from == i && a.to == j);
            if (!present && rng() % 3 == 0) add(i, j);
        }
    spec.pnet = PhysicalNetwork(hubs, arcs);
    spec.grid = {6.0, o.horizon, 1, o.horizon};
    spec.hos.driving_time = DrivingTime::Mileage;
    spec.costs.default_capacity = o.capacity;
    spec.hauler_sizes = {8};
    const int nk = pick(o.min_commodities, o.max_commodities);
    for (int k = 0; k < nk; ++k) {
        const int a = pick(0, nh - 1);
        int b = pick(0, nh - 2);
        if (b >= a) ++b;
        const int entry = pick(0, 1);
        const int due = pick(std::min(entry + 2, o.horizon), o.horizon);
        spec.commodities.push_back(commodity(k, a, b, entry, due));
    }
    const int nw = pick(o.min_scenarios, o.max_scenarios);
    std::vector<std::vector<double>> vols(static_cast<size_t>(nw));
    for (auto& v : vols)
        for (int k = 0; k < nk; ++k) v.push_back(static_cast<double>(pick(0, o.max_volume)));
    spec.scenarios = scenarios(vols);
    if (o.max_services > 0) {
        // Keep a random subset through a listed-only override document.
        Instance probe = build_instance(spec);
        std::vector<int> ids;
        for (const auto& s : probe.catalog.services()) ids.push_back(s.id);
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(std::min<size_t>(ids.size(), static_cast<size_t>(pick(1, o.max_services))));
        std::sort(ids.begin(), ids.end());
        for (int id : ids) {
            const auto& s = probe.catalog.service(id);
            ServiceOverride row;
            row.home = spec.pnet.hub(s.home_hub).name;
            row.away = spec.pnet.hub(s.away_hub).name;
            row.cycle = s.cycle;
            row.start_in_cycle = s.start_in_cycle;
            row.dwell_steps = s.template_key.dwell_steps;
            spec.overrides.push_back(row);
        }
        spec.overrides_listed_only = true;
    }
    return spec;
}

}  // namespace testing_support
