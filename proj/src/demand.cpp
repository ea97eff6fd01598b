#include "relaynet/demand.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "relaynet/csv.hpp"
#include "relaynet/error.hpp"

namespace relaynet {

double DemandSpec::mean_for(HubId o, HubId d) const {
    const auto it = mean_volume.find({o, d});
    return it == mean_volume.end() ? 0.0 : it->second;
}

void validate(const DemandSpec& spec) {
    for (const auto& [od, lambda] : spec.mean_volume)
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("mean volumes must be finite and >= 0", "demand");
    if (!(spec.dispersion >= 0.0) || !std::isfinite(spec.dispersion)) throw ValidationError("dispersion must be >= 0", "demand");
    if (!(spec.east_share >= 0.0 && spec.east_share <= 1.0)) throw ValidationError("east_share must be in [0, 1]", "demand");
}

void validate_commodities(const std::vector<Commodity>& commodities, const PhysicalNetwork& pnet, const TimeGrid& grid) {
    for (size_t i = 0; i < commodities.size(); ++i) {
        const auto& k = commodities[i];
        const std::string where = "commodity " + std::to_string(i);
        if (k.id != static_cast<int>(i)) throw ValidationError("commodity ids must be dense 0..n-1", where);
        if (k.origin < 0 || k.origin >= pnet.num_hubs() || k.destination < 0 || k.destination >= pnet.num_hubs())
            throw ValidationError("unknown hub", where);
        if (k.origin == k.destination) throw ValidationError("origin equals destination", where);
        if (!(0 <= k.entry_step && k.entry_step < k.due_step && k.due_step <= grid.num_steps))
            throw ValidationError("window must satisfy 0 <= entry < due <= T", where);
        try {
            shortest_distance_miles(pnet, k.origin, k.destination);
        } catch (const UnreachableError& e) {
            throw ValidationError(e.what(), where);
        }
    }
}

void validate(const ScenarioSet& set, int num_commodities) {
    if (set.empty()) throw ValidationError("scenario set is empty", "scenarios");
    double total = 0.0;
    std::map<int, int> ids;
    for (const auto& w : set.scenarios) {
        const std::string where = "scenario " + std::to_string(w.id);
        if (!ids.emplace(w.id, 0).second) throw ValidationError("duplicate scenario id", where);
        if (!(w.probability > 0.0 && w.probability <= 1.0)) throw ValidationError("probability must be in (0, 1]", where);
        if (static_cast<int>(w.volumes.size()) != num_commodities) throw ValidationError("volume count does not match commodities", where);
        for (double v : w.volumes)
            if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("volumes must be finite and >= 0", where);
        total += w.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("probabilities must sum to 1", "scenarios");
}

void price_commodities(std::vector<Commodity>& commodities, const PhysicalNetwork& pnet, double rate) {
    const auto dist = all_pairs_distance_miles(pnet);
    for (auto& k : commodities) {
        const double d = dist.at(static_cast<size_t>(k.origin)).at(static_cast<size_t>(k.destination));
        if (!std::isfinite(d)) throw UnreachableError(k.origin, k.destination);
        k.distance_miles = d;
        k.outsource_cost_per_vehicle = rate * d;
    }
}

std::vector<Commodity> make_commodities(const PhysicalNetwork& pnet, const std::vector<int>& entry_steps, int window_steps,
                                        int horizon_steps, double rate) {
    const auto dist = all_pairs_distance_miles(pnet);
    std::vector<Commodity> out;
    for (int te : entry_steps) {
        for (HubId o = 0; o < pnet.num_hubs(); ++o) {
            for (HubId d = 0; d < pnet.num_hubs(); ++d) {
                if (o == d || !std::isfinite(dist[static_cast<size_t>(o)][static_cast<size_t>(d)])) continue;
                Commodity k;
                k.id = static_cast<int>(out.size());
                k.origin = o;
                k.destination = d;
                k.entry_step = te;
                k.due_step = std::min(te + window_steps, horizon_steps);
                if (k.due_step <= k.entry_step) continue;
                out.push_back(k);
            }
        }
    }
    price_commodities(out, pnet, rate);
    return out;
}

DemandSpec demand_spec_from_geography(const PhysicalNetwork& pnet, double base_mean, double east_share, double dispersion) {
    DemandSpec spec;
    spec.dispersion = dispersion;
    spec.east_share = east_share;
    for (HubId o = 0; o < pnet.num_hubs(); ++o) {
        for (HubId d = 0; d < pnet.num_hubs(); ++d) {
            if (o == d) continue;
            const auto& ho = pnet.hub(o);
            const auto& hd = pnet.hub(d);
            double share = 0.5;
            if (ho.lon && hd.lon && *hd.lon != *ho.lon) share = *hd.lon > *ho.lon ? east_share : 1.0 - east_share;
            spec.mean_volume[{o, d}] = 2.0 * share * base_mean;
        }
    }
    validate(spec);
    return spec;
}

ScenarioSet generate_scenarios(const DemandSpec& spec, const std::vector<Commodity>& commodities, int n, std::uint64_t seed) {
    if (n <= 0) throw UsageError("scenario count must be >= 1");
    validate(spec);
    std::mt19937_64 rng(seed);
    ScenarioSet set;
    set.seed = seed;
    for (int w = 0; w < n; ++w) {
        Scenario sc;
        sc.id = w;
        sc.probability = 1.0 / n;
        sc.volumes.reserve(commodities.size());
        for (const auto& k : commodities) {
            const double lambda = spec.mean_for(k.origin, k.destination);
            double v = 0.0;
            if (lambda <= 0.0) {
                v = 0.0;
            } else if (spec.dispersion == 0.0) {
                v = std::round(lambda);
            } else {
                // Gamma(shape r, scale lambda / r) mixed into a Poisson: mean lambda,
                // variance lambda + dispersion * lambda^2.
                const double r = 1.0 / spec.dispersion;
                std::gamma_distribution<double> gamma(r, lambda / r);
                const double rate = gamma(rng);
                std::poisson_distribution<long long> poisson(rate);
                v = rate > 0.0 ? static_cast<double>(poisson(rng)) : 0.0;
            }
            sc.volumes.push_back(v);
        }
        set.scenarios.push_back(std::move(sc));
    }
    return set;
}

Scenario mean_scenario(const ScenarioSet& set) {
    if (set.empty()) throw UsageError("mean of an empty scenario set");
    Scenario mean;
    mean.id = 0;
    mean.probability = 1.0;
    mean.volumes.assign(set.scenarios.front().volumes.size(), 0.0);
    if (set.size() == 1) {
        mean.volumes = set.scenarios.front().volumes;
        return mean;
    }
    for (const auto& w : set.scenarios)
        for (size_t k = 0; k < mean.volumes.size(); ++k) mean.volumes[k] += w.probability * w.volumes.at(k);
    return mean;
}

double outsourcing_cost(const Commodity& k, const Scenario& w, double rate, const PhysicalNetwork& pnet) {
    const double v = w.volumes.at(static_cast<size_t>(k.id));
    if (v == 0.0) return 0.0;
    return rate * shortest_distance_miles(pnet, k.origin, k.destination) * v;
}

namespace {

HubId hub_ref(const std::string& field, const PhysicalNetwork& pnet, const std::string& where) {
    if (const auto h = pnet.find_hub(field)) return *h;
    const int id = csv::to_int(field, where);
    if (id < 0 || id >= pnet.num_hubs()) throw ValidationError("unknown hub '" + field + "'", where);
    return id;
}

}  // namespace

std::vector<Commodity> read_commodities(const std::string& csv_text, const PhysicalNetwork& pnet) {
    const auto table = csv::parse(csv_text);
    const std::string doc = "commodities";
    const int c_id = table.require("id", doc);
    const int c_o = table.require("origin", doc);
    const int c_d = table.require("destination", doc);
    const int c_e = table.require("entry_step", doc);
    const int c_due = table.require("due_step", doc);
    std::vector<Commodity> out;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const std::string where = doc + " row " + std::to_string(i + 1);
        Commodity k;
        k.id = csv::to_int(r[static_cast<size_t>(c_id)], where);
        if (k.id != static_cast<int>(i)) throw ValidationError("ids must be 0..n-1 in order", where);
        k.origin = hub_ref(r[static_cast<size_t>(c_o)], pnet, where);
        k.destination = hub_ref(r[static_cast<size_t>(c_d)], pnet, where);
        k.entry_step = csv::to_int(r[static_cast<size_t>(c_e)], where);
        k.due_step = csv::to_int(r[static_cast<size_t>(c_due)], where);
        out.push_back(k);
    }
    return out;
}

std::string write_commodities(const std::vector<Commodity>& commodities, const PhysicalNetwork& pnet) {
    std::ostringstream out;
    out << "id,origin,destination,entry_step,due_step\n";
    for (const auto& k : commodities)
        out << k.id << ',' << pnet.hub(k.origin).name << ',' << pnet.hub(k.destination).name << ',' << k.entry_step << ','
            << k.due_step << '\n';
    return out.str();
}

ScenarioSet read_scenarios(const std::string& csv_text, int num_commodities) {
    const auto table = csv::parse(csv_text);
    const std::string doc = "scenarios";
    const int c_w = table.require("scenario_id", doc);
    const int c_p = table.require("probability", doc);
    const int c_k = table.require("commodity_id", doc);
    const int c_v = table.require("volume", doc);
    std::map<int, Scenario> by_id;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        const std::string where = doc + " row " + std::to_string(i + 1);
        const int w = csv::to_int(r[static_cast<size_t>(c_w)], where);
        const double p = csv::to_double(r[static_cast<size_t>(c_p)], where);
        const int k = csv::to_int(r[static_cast<size_t>(c_k)], where);
        const double v = csv::to_double(r[static_cast<size_t>(c_v)], where);
        if (k < 0 || k >= num_commodities) throw ValidationError("unknown commodity id", where);
        if (v < 0.0) throw ValidationError("negative volume", where);
        auto [it, fresh] = by_id.try_emplace(w);
        if (fresh) {
            it->second.id = w;
            it->second.probability = p;
            it->second.volumes.assign(static_cast<size_t>(num_commodities), 0.0);
        } else if (it->second.probability != p) {
            throw ValidationError("probability differs between rows of one scenario", where);
        }
        it->second.volumes[static_cast<size_t>(k)] = v;
    }
    ScenarioSet set;
    for (auto& [id, w] : by_id) set.scenarios.push_back(std::move(w));
    validate(set, num_commodities);
    return set;
}

std::string write_scenarios(const ScenarioSet& set) {
    std::ostringstream out;
    out << "scenario_id,probability,commodity_id,volume\n";
    for (const auto& w : set.scenarios)
        for (size_t k = 0; k < w.volumes.size(); ++k)
            out << w.id << ',' << csv::format_number(w.probability) << ',' << k << ',' << csv::format_number(w.volumes[k]) << '\n';
    return out.str();
}

}  // namespace relaynet
