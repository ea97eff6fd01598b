#include "doctest.h"
#include "instances.hpp"
#include "relaynet/analysis.hpp"
#include "relaynet/error.hpp"

using namespace relaynet;
using namespace testing_support;

TEST_CASE("analysis: L3 KPIs") {
    auto inst = build_instance(l3_spec());
    auto sol = solve_instance(inst, {});
    REQUIRE(sol.status == MilpStatus::Optimal);
    CHECK(sol.kpis.total_contracted_driver_hours == 12.0);
    CHECK(sol.kpis.avg_tractor_rental_hours == 12.0);
    CHECK(sol.kpis.avg_hauler_rental_hours == 12.0);
    CHECK(sol.kpis.avg_outsourcing_rate == 0.0);
    CHECK(sol.kpis.total_expected_cost == doctest::Approx(684.0));
    CHECK(std::abs(sol.kpis.total_expected_cost - sol.objective) <= 1e-6);
    CHECK(audit_solution(inst, sol.design, sol.recourse).ok());
}

TEST_CASE("analysis: all-outsource design") {
    auto spec = l3_spec();
    spec.scenarios = scenarios({{5}, {2}});
    auto inst = build_instance(spec);
    DesignSolution zero{std::vector<int>(inst.catalog.size(), 0)};
    auto ev = evaluate_design(inst, zero, {});
    REQUIRE(ev.status == MilpStatus::Optimal);
    CHECK(ev.kpis.total_contracted_driver_hours == 0.0);
    CHECK(ev.kpis.avg_outsourcing_rate == 1.0);
    CHECK(ev.kpis.total_expected_cost == doctest::Approx(0.93 * 275 * 3.5));
    auto count = compute_kpis(inst, zero, ev.recourse, OutsourcingRate::Count);
    CHECK(count.avg_outsourcing_rate == 1.0);
    CHECK_THROWS_AS(compute_kpis(inst, DesignSolution{{1}}, ev.recourse), ValidationError);
}

TEST_CASE("analysis: vss report arithmetic") {
    auto r = make_vss_report(556494, 422985);
    CHECK(r.vss == 133509);
}

TEST_CASE("analysis: vss is zero with one scenario") {
    auto inst = build_instance(l3_spec(4));
    auto r = compute_vss(inst, {});
    CHECK(r.conclusive);
    CHECK(r.vss == 0.0);
}

TEST_CASE("analysis: vss of a two-scenario line") {
    auto spec = l3_spec(4);
    spec.commodities.push_back(commodity(1, 2, 0, 0, 4));
    spec.scenarios = scenarios({{0, 14}, {14, 0}, {3, 2}});
    auto inst = build_instance(spec);
    auto r = compute_vss(inst, {});
    CHECK(r.conclusive);
    CHECK(r.vss >= -1e-6);
    CHECK(r.deterministic_design_cost >= r.stochastic_cost - 1e-6);
}

TEST_CASE("analysis: audit catches broken recourse") {
    auto inst = build_instance(l3_spec());
    auto sol = solve_instance(inst, {});
    REQUIRE(sol.has_solution);
    auto bad = sol.recourse;
    for (auto& [key, v] : bad.scenarios[0].f) v *= 0.5;
    CHECK(audit_solution(inst, sol.design, bad).max_flow_residual > 1e-9);
    auto design = sol.design;
    for (auto& x : design.x) x = 0;
    CHECK(audit_solution(inst, design, sol.recourse).max_residual > 1e-6);
}

TEST_CASE("analysis: random instances pass the audit, FLU tractor equals hauler hours") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 24; ++i) {
        auto spec = random_spec(rng, {});
        spec.pattern = static_cast<Pattern>(i % 3);
        spec.hauler_sizes = {4, 8};
        auto inst = build_instance(spec);
        auto sol = solve_instance(inst, {});
        REQUIRE(sol.status == MilpStatus::Optimal);
        auto audit = audit_solution(inst, sol.design, sol.recourse);
        INFO(i << " " << (audit.issues.empty() ? "" : audit.issues[0]));
        CHECK(audit.ok());
        CHECK(std::abs(sol.kpis.total_expected_cost - sol.objective) <= 1e-6);
        if (is_flu(spec.pattern)) CHECK(sol.kpis.avg_tractor_rental_hours == sol.kpis.avg_hauler_rental_hours);
        CHECK(sol.kpis.avg_outsourcing_rate >= 0.0);
        CHECK(sol.kpis.avg_outsourcing_rate <= 1.0);
    }
}

TEST_CASE("analysis: comparisons") {
    auto spec = l3_spec(4);
    spec.commodities.push_back(commodity(1, 2, 0, 0, 4));
    spec.scenarios = scenarios({{5, 3}, {9, 0}});
    auto inst = build_instance(spec);
    auto pats = compare_patterns(inst, {});
    REQUIRE(pats.rows.size() == 3);
    CHECK(pats.ordering_holds);
    auto spec2 = spec;
    spec2.grid = {6.0, 4, 2, 2};
    spec2.costs.consistency_discount = 1.0;
    auto cons = compare_consistency(build_instance(spec2), {});
    REQUIRE(cons.rows.size() == 4);
    CHECK(cons.ordering_holds);
    CHECK(cons.rows[2].kpis.total_expected_cost >= cons.rows[0].kpis.total_expected_cost - 1e-6);
    spec2.grid = {6.0, 5, 2, 2};
    CHECK_THROWS_AS(compare_consistency(build_instance(spec2), {}), ValidationError);
}
