#pragma once

#include <cstdint>

#include "relaynet/network.hpp"

namespace relaynet {

struct TestbedOptions {
    int hubs = 19;
    int arcs = 95;  // undirected
    std::uint64_t seed = 1;
    double max_arc_miles = 275.0;  // longest arc after scaling; one travel step each
    // Placement box, degrees (roughly the US Southeast).
    double lon_min = -92.0, lon_max = -76.0;
    double lat_min = 25.0, lat_max = 37.0;
};

// Random hub placement, a minimum spanning tree on great-circle distance, then
// the shortest remaining pairs until `arcs` undirected arcs exist. Distances are
// scaled so the longest arc is max_arc_miles, keeping every arc drivable in one
// 6h step with a same-day return.
PhysicalNetwork make_synthetic_network(const TestbedOptions& opts);

double great_circle_miles(double lon1, double lat1, double lon2, double lat2);

}  // namespace relaynet
