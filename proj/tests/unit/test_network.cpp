#include "doctest.h"
#include "instances.hpp"
#include "relaynet/error.hpp"
#include "relaynet/network.hpp"

using namespace relaynet;
using nlohmann::json;

TEST_CASE("network: minimal two-hub document") {
    json doc = {{"hubs", {"A", "B"}}, {"arcs", {{{"from", "A"}, {"to", "B"}, {"travel_steps", 1}, {"distance_miles", 275}}}}};
    auto p = load_physical_network(doc);
    CHECK(p.num_hubs() == 2);
    CHECK(p.num_arcs() == 2);
    CHECK(p.find_arc(1, 0).has_value());
}

TEST_CASE("network: validation errors name the row") {
    json loop = {{"hubs", {"A", "B"}}, {"arcs", {{{"from", "A"}, {"to", "A"}, {"travel_steps", 1}, {"distance_miles", 5}}}}};
    CHECK_THROWS_AS(load_physical_network(loop), ValidationError);
    json dup = {{"hubs", {"A", "B"}},
                {"arcs",
                 {{{"from", "A"}, {"to", "B"}, {"travel_steps", 1}, {"distance_miles", 5}},
                  {{"from", "B"}, {"to", "A"}, {"travel_steps", 1}, {"distance_miles", 5}}}}};
    try {
        load_physical_network(dup);
        FAIL("expected duplicate error");
    } catch (const ValidationError& e) {
        CHECK(e.where() == "arcs[1]");
    }
    json bad = {{"hubs", {"A", "B"}}, {"arcs", {{{"from", "A"}, {"to", "Q"}, {"travel_steps", 1}, {"distance_miles", 5}}}}};
    CHECK_THROWS_AS(load_physical_network(bad), ValidationError);
    json zero = {{"hubs", {"A", "B"}}, {"arcs", {{{"from", "A"}, {"to", "B"}, {"travel_steps", 0}, {"distance_miles", 5}}}}};
    CHECK_THROWS_AS(load_physical_network(zero), ValidationError);
    json neg = {{"hubs", {"A", "B"}}, {"arcs", {{{"from", "A"}, {"to", "B"}, {"travel_steps", 1}, {"distance_miles", -5}}}}};
    CHECK_THROWS_AS(load_physical_network(neg), ValidationError);
}

TEST_CASE("network: json round trip") {
    auto p = testing_support::line_network(3);
    auto q = load_physical_network(to_json(p));
    CHECK(q.num_hubs() == 3);
    CHECK(q.num_arcs() == p.num_arcs());
}

TEST_CASE("network: shortest distances") {
    auto p = testing_support::line_network(3);
    CHECK(shortest_distance_miles(p, 0, 0) == 0.0);
    CHECK(shortest_distance_miles(p, 0, 2) == doctest::Approx(550.0));
    PhysicalNetwork split({{0, "A", {}, {}}, {1, "B", {}, {}}, {2, "C", {}, {}}}, {{0, 1, 1, 10}, {1, 0, 1, 10}});
    CHECK_THROWS_AS(shortest_distance_miles(split, 0, 2), UnreachableError);
}

TEST_CASE("network: time-space counts on the 3-hub line") {
    auto p = testing_support::line_network(3);
    TimeGrid g{6.0, 8, 1, 8};
    auto tsn = build_time_space_network(p, g);
    CHECK(tsn.num_nodes() == 27);
    CHECK(tsn.num_holding_arcs() == 24);
    CHECK(tsn.num_moving_arcs() == 32);
    // moving arcs first, ids dense
    for (int i = 0; i < tsn.num_arcs(); ++i) {
        CHECK(tsn.arc(i).id == i);
        CHECK(tsn.arc(i).is_moving() == (i < 32));
    }
}

TEST_CASE("network: multi-step arcs stop at the horizon") {
    auto p = testing_support::line_network(2, 400.0, 3);
    TimeGrid g{6.0, 4, 1, 4};
    auto tsn = build_time_space_network(p, g);
    CHECK(tsn.num_moving_arcs() == 2 * 2);  // departures 0 and 1
    for (const auto& a : tsn.arcs())
        if (a.is_moving()) CHECK(a.head.t - a.tail.t == 3);
}
