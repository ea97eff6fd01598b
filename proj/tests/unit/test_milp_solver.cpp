#include <functional>
#include <random>

#include "doctest.h"
#include "relaynet/error.hpp"
#include "relaynet/milp_solver.hpp"

using namespace relaynet;

namespace {

// Exhaustive search over small pure-integer models.
double brute_force(const MilpModel& m, bool& feasible) {
    const int n = m.num_variables();
    std::vector<double> x(n);
    double best = kInf;
    feasible = false;
    std::function<void(int)> rec = [&](int j) {
        if (j == n) {
            for (int i = 0; i < m.num_constraints(); ++i)
                if (m.violation(i, x) > 1e-9) return;
            feasible = true;
            best = std::min(best, m.objective_value(x));
            return;
        }
        for (double v = m.variable(j).lower; v <= m.variable(j).upper; v += 1.0) {
            x[j] = v;
            rec(j + 1);
        }
    };
    rec(0);
    return best;
}

MilpModel random_ip(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coef(-4, 6);
    MilpModel m;
    const int n = 2 + static_cast<int>(rng() % 5);
    for (int j = 0; j < n; ++j)
        m.add_variable({"x" + std::to_string(j), 0, static_cast<double>(1 + rng() % 3), VarType::Integer,
                        static_cast<double>(coef(rng))});
    const int rows = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < rows; ++i) {
        Constraint c;
        c.name = "r" + std::to_string(i);
        for (int j = 0; j < n; ++j)
            if (rng() % 2) c.terms.push_back({j, static_cast<double>(coef(rng))});
        c.sense = static_cast<Sense>(rng() % 3 == 0 ? 2 : 0);
        c.rhs = static_cast<double>(coef(rng)) + 1.5;
        m.add_constraint(c);
    }
    return m;
}

}  // namespace

TEST_CASE("milp: knapsack") {
    MilpModel m;
    const double w[] = {5, 4, 3};
    const double v[] = {10, 40, 30};
    Constraint cap{"cap", {}, Sense::LessEqual, 8};
    for (int j = 0; j < 3; ++j) {
        m.add_variable({"b" + std::to_string(j), 0, 1, VarType::Binary, -v[j]});
        cap.terms.push_back({j, w[j]});
    }
    m.add_constraint(cap);
    auto s = solve_milp(m);
    REQUIRE(s.status == MilpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-70));
    CHECK(s.bound <= s.objective + 1e-9);
}

TEST_CASE("milp: all-zero costs give objective 0") {
    MilpModel m;
    int x = m.add_variable({"x", 0, 5, VarType::Integer, 0});
    m.add_constraint({"r", {{x, 2}}, Sense::GreaterEqual, 3});
    auto s = solve_milp(m);
    REQUIRE(s.status == MilpStatus::Optimal);
    CHECK(s.objective == 0.0);
}

TEST_CASE("milp: integer infeasible but LP feasible") {
    MilpModel m;
    int x = m.add_variable({"x", 0, 10, VarType::Integer, 1});
    m.add_constraint({"r1", {{x, 2}}, Sense::Equal, 3});
    CHECK(solve_milp(m).status == MilpStatus::Infeasible);
}

TEST_CASE("milp: random pure IPs match brute force, thread count independent") {
    std::mt19937_64 rng(3);
    int feasible_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
        auto m = random_ip(rng);
        bool feasible = false;
        const double ref = brute_force(m, feasible);
        SolveOptions opts;
        auto s1 = solve_milp(m, opts);
        opts.threads = 4;
        auto s4 = solve_milp(m, opts);
        opts.branching = Branching::PseudoCost;
        auto sp = solve_milp(m, opts);
        INFO("trial " << trial);
        if (!feasible) {
            CHECK(s1.status == MilpStatus::Infeasible);
            continue;
        }
        ++feasible_count;
        REQUIRE(s1.status == MilpStatus::Optimal);
        CHECK(std::abs(s1.objective - ref) <= 1e-9);
        CHECK(std::abs(sp.objective - ref) <= 1e-9);
        CHECK(s1.values == s4.values);
        CHECK(s1.incumbent_history == s4.incumbent_history);
        CHECK(s1.bound <= s1.objective + 1e-9);
    }
    CHECK(feasible_count > 60);
}

TEST_CASE("milp: rounding dives leave the optimum unchanged") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 150; ++trial) {
        auto m = random_ip(rng);
        SolveOptions opts;
        opts.dive_interval = 0;
        const auto plain = solve_milp(m, opts);
        opts.dive_interval = 1;
        const auto diving = solve_milp(m, opts);
        INFO("trial " << trial);
        REQUIRE(plain.status == diving.status);
        if (plain.status == MilpStatus::Optimal) CHECK(std::abs(plain.objective - diving.objective) <= 1e-9);
    }
    SolveOptions bad;
    bad.dive_interval = -1;
    CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("milp: LP relaxation bounds the MILP optimum") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        auto m = random_ip(rng);
        auto s = solve_milp(m);
        if (s.status != MilpStatus::Optimal) continue;
        auto lp = solve_lp(m);
        REQUIRE(lp.status == LpStatus::Optimal);
        CHECK(lp.objective <= s.objective + 1e-9);
    }
}

TEST_CASE("milp: node limit yields Limit") {
    MilpModel m;
    Constraint c{"r", {}, Sense::Equal, 21};
    for (int j = 0; j < 12; ++j) {
        m.add_variable({"x" + std::to_string(j), 0, 1, VarType::Binary, 1.0 + j * 0.01});
        c.terms.push_back({j, 2.0});
    }
    m.add_constraint(c);
    SolveOptions opts;
    opts.node_limit = 3;
    auto s = solve_milp(m, opts);
    CHECK(s.status == MilpStatus::Limit);
    CHECK(s.stats.nodes <= 3);
}

TEST_CASE("milp: import solution") {
    MilpModel m;
    int x = m.add_variable({"x", 0, 4, VarType::Integer, 3});
    int y = m.add_variable({"y", 1, 4, VarType::Continuous, 1});
    m.add_constraint({"cap_row", {{x, 1}, {y, 1}}, Sense::LessEqual, 5});
    m.add_constraint({"other", {{x, 1}}, Sense::GreaterEqual, 0});

    auto ok = import_solution(m, {{"x", 2}, {"y", 3}});
    CHECK(ok.objective == doctest::Approx(9));

    auto sol = solve_milp(m);
    auto round = import_solution(m, read_solution_csv(write_solution_csv(m, sol.values)));
    CHECK(std::abs(round.objective - sol.objective) <= 1e-9);

    CHECK_THROWS_AS(import_solution(m, {{"x", 2}}), ValidationError);  // y = 0 below its bound
    CHECK_THROWS_AS(import_solution(m, {{"x", 1.5}, {"y", 1}}), ValidationError);
    CHECK_THROWS_AS(import_solution(m, {{"z", 1}}), ValidationError);
    try {
        import_solution(m, {{"x", 4}, {"y", 4}});
        FAIL("expected rejection");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("cap_row") != std::string::npos);
    }
}
