#include <cmath>

#include "doctest.h"
#include "instances.hpp"
#include "relaynet/demand.hpp"
#include "relaynet/error.hpp"

using namespace relaynet;
using testing_support::commodity;
using testing_support::line_network;

TEST_CASE("demand: outsourcing cost arithmetic") {
    auto p = line_network(3);
    Scenario w{0, 1.0, {5.0, 5.0, 0.0}};
    auto ac = commodity(0, 0, 2, 0, 4);
    auto ab = commodity(1, 0, 1, 0, 4);
    auto none = commodity(2, 0, 1, 0, 4);
    CHECK(outsourcing_cost(ac, w, 0.93, p) == doctest::Approx(2557.50));
    CHECK(outsourcing_cost(ab, w, 0.93, p) == doctest::Approx(1278.75));
    CHECK(outsourcing_cost(none, w, 0.93, p) == 0.0);
}

TEST_CASE("demand: mean scenario") {
    ScenarioSet one = testing_support::scenarios({{3, 7}});
    CHECK(mean_scenario(one).volumes == one.scenarios[0].volumes);
    CHECK(mean_scenario(testing_support::scenarios({{8}, {4}})).volumes[0] == doctest::Approx(6));
    ScenarioSet skew;
    skew.scenarios = {{0, 0.25, {0}}, {1, 0.75, {4}}};
    auto m = mean_scenario(skew);
    CHECK(m.volumes[0] == doctest::Approx(3));
    CHECK(m.probability == 1.0);
    // commutes with scaling
    ScenarioSet scaled = skew;
    for (auto& w : scaled.scenarios)
        for (auto& v : w.volumes) v *= 2.5;
    CHECK(mean_scenario(scaled).volumes[0] == doctest::Approx(2.5 * m.volumes[0]));
}

TEST_CASE("demand: generator determinism and degenerate law") {
    auto p = line_network(3);
    auto ks = make_commodities(p, {0, 4}, 8, 20, 0.93);
    CHECK(ks.size() == 6 * 2);
    DemandSpec spec;
    for (const auto& k : ks) spec.mean_volume[{k.origin, k.destination}] = 4.6;
    spec.dispersion = 0.0;
    auto set = generate_scenarios(spec, ks, 3, 42);
    for (const auto& w : set.scenarios) {
        CHECK(w.probability == doctest::Approx(1.0 / 3));
        for (double v : w.volumes) CHECK(v == 5.0);
    }
    spec.dispersion = 0.7;
    auto a = generate_scenarios(spec, ks, 30, 9);
    auto b = generate_scenarios(spec, ks, 30, 9);
    CHECK(a.size() == 30);
    for (int i = 0; i < 30; ++i) CHECK(a.scenarios[i].volumes == b.scenarios[i].volumes);
    CHECK_THROWS_AS(generate_scenarios(spec, ks, 0, 1), UsageError);
}

TEST_CASE("demand: empirical mean converges within 3 sigma") {
    auto p = line_network(2);
    auto ks = make_commodities(p, {0}, 4, 4, 0.93);
    DemandSpec spec;
    const double lambda = 6.0, r = 0.5;
    spec.mean_volume[{0, 1}] = lambda;
    spec.mean_volume[{1, 0}] = lambda;
    spec.dispersion = r;
    const int n = 20000;
    auto set = generate_scenarios(spec, ks, n, 123);
    double sum = 0;
    for (const auto& w : set.scenarios) {
        const double v = w.volumes[0];
        CHECK(v >= 0.0);
        CHECK(v == std::floor(v));
        sum += v;
    }
    const double sd = std::sqrt((lambda + r * lambda * lambda) / n);
    CHECK(std::abs(sum / n - lambda) <= 3 * sd);
}

TEST_CASE("demand: 196 commodities by 30 scenarios") {
    std::vector<Hub> hubs;
    for (int i = 0; i < 14; ++i) hubs.push_back({i, "H" + std::to_string(i), -90.0 + i, 33.0});
    std::vector<PhysicalArc> arcs;
    for (int i = 0; i + 1 < 14; ++i) {
        arcs.push_back({i, i + 1, 1, 200});
        arcs.push_back({i + 1, i, 1, 200});
    }
    PhysicalNetwork p(hubs, arcs);
    REQUIRE(make_commodities(p, {0}, 8, 20, 0.93).size() == 14 * 13);
    auto ks2 = make_commodities(p, {0, 4}, 8, 20, 0.93);
    ks2.resize(196);
    auto spec = demand_spec_from_geography(p, 3.0, 0.949, 0.3);
    auto set = generate_scenarios(spec, ks2, 30, 5);
    CHECK(set.size() == 30);
    for (const auto& w : set.scenarios) CHECK(w.volumes.size() == 196);
    CHECK(spec.mean_for(0, 5) > spec.mean_for(5, 0));
}

TEST_CASE("demand: scenario validation and documents") {
    auto p = line_network(3);
    CHECK_THROWS_AS(validate(ScenarioSet{}, 1), ValidationError);
    ScenarioSet bad = testing_support::scenarios({{1}, {2}});
    bad.scenarios[0].probability = 0.6;
    CHECK_THROWS_AS(validate(bad, 1), ValidationError);
    auto ks = read_commodities("id,origin,destination,entry_step,due_step\n0,A,C,0,8\n1,2,0,1,9\n", p);
    REQUIRE(ks.size() == 2);
    CHECK(ks[1].origin == 2);
    CHECK(read_commodities(write_commodities(ks, p), p)[0].destination == 2);
    auto set = read_scenarios("scenario_id,probability,commodity_id,volume\n0,0.5,0,3\n0,0.5,1,0\n1,0.5,0,1\n1,0.5,1,2\n", 2);
    CHECK(set.size() == 2);
    CHECK(set.scenarios[1].volumes[1] == 2);
    auto again = read_scenarios(write_scenarios(set), 2);
    CHECK(again.scenarios[0].volumes == set.scenarios[0].volumes);
    TimeGrid g{6.0, 8, 1, 8};
    std::vector<Commodity> loop{commodity(0, 1, 1, 0, 4)};
    CHECK_THROWS_AS(validate_commodities(loop, p, g), ValidationError);
    std::vector<Commodity> late{commodity(0, 0, 1, 4, 9)};
    CHECK_THROWS_AS(validate_commodities(late, p, g), ValidationError);
}
