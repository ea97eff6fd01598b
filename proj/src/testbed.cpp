#include "relaynet/testbed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <tuple>

#include "relaynet/error.hpp"

namespace relaynet {

double great_circle_miles(double lon1, double lat1, double lon2, double lat2) {
    constexpr double kEarthMiles = 3958.8;
    constexpr double kRad = 3.14159265358979323846 / 180.0;
    const double dlat = (lat2 - lat1) * kRad;
    const double dlon = (lon2 - lon1) * kRad;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2.0 * kEarthMiles * std::asin(std::min(1.0, std::sqrt(a)));
}

PhysicalNetwork make_synthetic_network(const TestbedOptions& o) {
    if (o.hubs < 2) throw ValidationError("need at least 2 hubs", "testbed");
    const int max_pairs = o.hubs * (o.hubs - 1) / 2;
    if (o.arcs < o.hubs - 1 || o.arcs > max_pairs)
        throw ValidationError("arc count must lie in [hubs-1, hubs*(hubs-1)/2]", "testbed");
    if (!(o.max_arc_miles > 0.0)) throw ValidationError("max_arc_miles must be positive", "testbed");

    // Integer grid draws keep placement identical across standard libraries.
    std::mt19937_64 rng(o.seed);
    auto draw = [&](double lo, double hi) {
        const double u = static_cast<double>(rng() % 1000000) / 1000000.0;
        return std::round((lo + u * (hi - lo)) * 1e4) / 1e4;
    };
    std::vector<Hub> hubs;
    for (int i = 0; i < o.hubs; ++i) {
        const double lon = draw(o.lon_min, o.lon_max);
        const double lat = draw(o.lat_min, o.lat_max);
        hubs.push_back({i, "H" + std::string(i < 10 ? "0" : "") + std::to_string(i), lon, lat});
    }

    std::vector<std::tuple<double, int, int>> pairs;
    for (int i = 0; i < o.hubs; ++i)
        for (int j = i + 1; j < o.hubs; ++j)
            pairs.emplace_back(great_circle_miles(*hubs[i].lon, *hubs[i].lat, *hubs[j].lon, *hubs[j].lat), i, j);
    std::sort(pairs.begin(), pairs.end());

    // Kruskal for connectivity, then fill with the shortest unused pairs.
    std::vector<int> parent(static_cast<size_t>(o.hubs));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) x = parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
        return x;
    };
    std::vector<char> used(pairs.size(), 0);
    int count = 0;
    for (size_t p = 0; p < pairs.size(); ++p) {
        const int a = find(std::get<1>(pairs[p])), b = find(std::get<2>(pairs[p]));
        if (a == b) continue;
        parent[static_cast<size_t>(a)] = b;
        used[p] = 1;
        ++count;
    }
    for (size_t p = 0; p < pairs.size() && count < o.arcs; ++p)
        if (!used[p]) {
            used[p] = 1;
            ++count;
        }

    double longest = 0.0;
    for (size_t p = 0; p < pairs.size(); ++p)
        if (used[p]) longest = std::max(longest, std::get<0>(pairs[p]));
    const double scale = longest > 0.0 ? o.max_arc_miles / longest : 1.0;

    std::vector<PhysicalArc> arcs;
    for (size_t p = 0; p < pairs.size(); ++p) {
        if (!used[p]) continue;
        const auto [d, i, j] = pairs[p];
        const double miles = std::max(1.0, std::round(d * scale));
        arcs.push_back({i, j, 1, miles});
        arcs.push_back({j, i, 1, miles});
    }
    return PhysicalNetwork(std::move(hubs), std::move(arcs));
}

}  // namespace relaynet
