#include "doctest.h"
#include "relaynet/lp.hpp"

using namespace relaynet;

TEST_CASE("lp: single lower bound row") {
    MilpModel m;
    int x = m.add_variable({"x", 0, kInf, VarType::Continuous, 1.0});
    m.add_constraint({"r", {{x, 1.0}}, Sense::GreaterEqual, 3.0});
    auto s = solve_lp(m);
    CHECK(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(3.0));
}

TEST_CASE("lp: infeasible box") {
    MilpModel m;
    int x = m.add_variable({"x", 0, 2, VarType::Continuous, 1.0});
    m.add_constraint({"r", {{x, 1.0}}, Sense::GreaterEqual, 3.0});
    CHECK(solve_lp(m).status == LpStatus::Infeasible);
}

TEST_CASE("lp: unbounded") {
    MilpModel m;
    int x = m.add_variable({"x", 0, kInf, VarType::Continuous, -1.0});
    int y = m.add_variable({"y", 0, kInf, VarType::Continuous, 0.0});
    m.add_constraint({"r", {{x, 1.0}, {y, -1.0}}, Sense::LessEqual, 1.0});
    CHECK(solve_lp(m).status == LpStatus::Unbounded);
}

TEST_CASE("lp: small maximization as min") {
    // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3
    MilpModel m;
    int x = m.add_variable({"x", 0, 3, VarType::Continuous, -3.0});
    int y = m.add_variable({"y", 0, kInf, VarType::Continuous, -2.0});
    m.add_constraint({"a", {{x, 1}, {y, 1}}, Sense::LessEqual, 4});
    m.add_constraint({"b", {{x, 1}, {y, 3}}, Sense::LessEqual, 6});
    auto s = solve_lp(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-11.0));
    CHECK(s.x[0] == doctest::Approx(3.0));
    CHECK(s.x[1] == doctest::Approx(1.0));
}

TEST_CASE("lp: equality rows need phase one") {
    // min x + 2y + 3z, x + y + z = 10, x - y = 2, z >= 1
    MilpModel m;
    int x = m.add_variable({"x", 0, kInf, VarType::Continuous, 1});
    int y = m.add_variable({"y", 0, kInf, VarType::Continuous, 2});
    int z = m.add_variable({"z", 1, kInf, VarType::Continuous, 3});
    m.add_constraint({"s", {{x, 1}, {y, 1}, {z, 1}}, Sense::Equal, 10});
    m.add_constraint({"d", {{x, 1}, {y, -1}}, Sense::Equal, 2});
    auto s = solve_lp(m);
    REQUIRE(s.status == LpStatus::Optimal);
    // z = 1, x + y = 9, x - y = 2 -> x = 5.5, y = 3.5
    CHECK(s.objective == doctest::Approx(5.5 + 7 + 3));
}

TEST_CASE("lp: warm start after bound change") {
    MilpModel m;
    int x = m.add_variable({"x", 0, 10, VarType::Continuous, -1});
    int y = m.add_variable({"y", 0, 10, VarType::Continuous, -1});
    m.add_constraint({"a", {{x, 2}, {y, 1}}, Sense::LessEqual, 7});
    m.add_constraint({"b", {{x, 1}, {y, 2}}, Sense::LessEqual, 7});
    LpProblem p(m);
    auto s = p.solve();
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-14.0 / 3.0));
    auto lo = p.lower();
    auto up = p.upper();
    up[0] = 2;
    auto w = p.solve(lo, up, &s.basis);
    REQUIRE(w.status == LpStatus::Optimal);
    CHECK(w.objective == doctest::Approx(-(2 + 2.5)));
    lo[0] = 3;
    up[0] = 10;
    auto w2 = p.solve(lo, up, &s.basis);
    REQUIRE(w2.status == LpStatus::Optimal);
    CHECK(w2.objective == doctest::Approx(-(3 + 1)));
}

#include <random>

#include "dense_lp.hpp"

TEST_CASE("lp: random instances agree with the dense oracle") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coef(-3, 4);
    std::uniform_int_distribution<int> pick(0, 2);
    int optimal = 0, infeasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
        MilpModel m;
        const int n = 2 + static_cast<int>(rng() % 6);
        const int rows = 1 + static_cast<int>(rng() % 6);
        for (int j = 0; j < n; ++j) {
            const double lo = static_cast<double>(rng() % 3);
            const double up = (rng() % 3 == 0) ? kInf : lo + static_cast<double>(rng() % 5);
            m.add_variable({"x" + std::to_string(j), lo, up, VarType::Continuous, static_cast<double>(coef(rng))});
        }
        for (int i = 0; i < rows; ++i) {
            Constraint c;
            c.name = "r" + std::to_string(i);
            for (int j = 0; j < n; ++j) {
                const int a = coef(rng);
                if (a != 0 && rng() % 2) c.terms.push_back({j, static_cast<double>(a)});
            }
            c.sense = static_cast<Sense>(pick(rng));
            c.rhs = static_cast<double>(coef(rng) * 3);
            m.add_constraint(c);
        }
        const auto ours = solve_lp(m);
        const auto ref = oracle::dense_solve(m);
        INFO("trial " << trial);
        if (ref.status == oracle::DenseStatus::Optimal) {
            ++optimal;
            REQUIRE(ours.status == LpStatus::Optimal);
            CHECK(ours.objective == doctest::Approx(ref.objective).epsilon(1e-7));
            for (int i = 0; i < m.num_constraints(); ++i)
                CHECK(m.violation(i, ours.x) <= 1e-7);
        } else if (ref.status == oracle::DenseStatus::Infeasible) {
            ++infeasible;
            CHECK(ours.status == LpStatus::Infeasible);
        } else {
            CHECK(ours.status == LpStatus::Unbounded);
        }
    }
    CHECK(optimal > 50);
    CHECK(infeasible > 10);
}

TEST_CASE("lp: warm-started re-solves match cold solves") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coef(-2, 5);
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial) {
        MilpModel m;
        const int n = 3 + static_cast<int>(rng() % 8);
        for (int j = 0; j < n; ++j)
            m.add_variable({"x" + std::to_string(j), 0, 8, VarType::Continuous, static_cast<double>(coef(rng))});
        for (int i = 0; i < 5; ++i) {
            Constraint c;
            c.name = "r" + std::to_string(i);
            for (int j = 0; j < n; ++j)
                if (rng() % 2) c.terms.push_back({j, static_cast<double>(coef(rng))});
            c.sense = i % 2 ? Sense::LessEqual : Sense::GreaterEqual;
            c.rhs = static_cast<double>(coef(rng) * 2);
            m.add_constraint(c);
        }
        LpProblem p(m);
        auto root = p.solve();
        if (root.status != LpStatus::Optimal) continue;
        auto lo = p.lower();
        auto up = p.upper();
        for (int k = 0; k < 3; ++k) {
            const int j = static_cast<int>(rng() % n);
            const double v = root.x[j];
            if (rng() % 2) up[j] = std::floor(v * 0.5);
            else lo[j] = std::ceil(v + 0.5);
            auto warm = p.solve(lo, up, &root.basis);
            auto cold = p.solve(lo, up, nullptr);
            REQUIRE(warm.status == cold.status);
            if (cold.status == LpStatus::Optimal) {
                ++compared;
                CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-8));
            }
        }
    }
    CHECK(compared > 50);
}
