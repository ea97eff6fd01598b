#pragma once

// Exhaustive enumeration of the integer variables of a formulated instance.
// Continuous variables (MCP flows) are settled per leaf with the dense LP
// oracle. Only usable on tiny models.

#include <cmath>
#include <limits>
#include <vector>

#include "dense_lp.hpp"
#include "relaynet/formulate.hpp"

namespace oracle {

struct Box {
    int var = 0;
    int lo = 0;
    int hi = 0;
};

// Finite integer range for every integral variable. Unbounded HS counts are
// capped at what the largest demand could ever need.
inline std::vector<Box> integer_boxes(const relaynet::Instance& inst, const relaynet::Formulation& f) {
    using namespace relaynet;
    std::vector<Box> out;
    const auto& m = f.model;
    for (int j = 0; j < m.num_variables(); ++j) {
        const auto& v = m.variable(j);
        if (!v.is_integral()) continue;
        double hi = v.upper;
        if (!std::isfinite(hi)) {
            const auto& key = f.vars.keys[static_cast<size_t>(j)];
            const auto& scen = inst.scenarios().scenarios[static_cast<size_t>(key.w)];
            if (key.kind == VarKind::Y) {
                const double vol = scen.volumes[static_cast<size_t>(key.a)];
                hi = std::ceil(vol / inst.haulers[static_cast<size_t>(key.b)].size);
            } else {
                const double vol = scen.volumes[static_cast<size_t>(key.a)];
                hi = 0.0;
                for (const auto& h : inst.haulers) hi += std::ceil(vol / h.size);
            }
        }
        out.push_back({j, static_cast<int>(std::ceil(v.lower - 1e-9)), static_cast<int>(std::floor(hi + 1e-9))});
    }
    return out;
}

inline double box_product(const std::vector<Box>& boxes) {
    double p = 1.0;
    for (const auto& b : boxes) p *= static_cast<double>(b.hi - b.lo + 1);
    return p;
}

struct EnumerationResult {
    bool feasible = false;
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> x;
    long leaves = 0;
};

// Every objective coefficient must be nonnegative; partial assignments whose
// cost already reaches the best value are cut off.
inline EnumerationResult enumerate(const relaynet::Instance& inst, const relaynet::Formulation& f) {
    using namespace relaynet;
    const auto& m = f.model;
    const int n = m.num_variables();
    const auto boxes = integer_boxes(inst, f);

    std::vector<int> cont;
    std::vector<int> cont_index(static_cast<size_t>(n), -1);
    for (int j = 0; j < n; ++j)
        if (!m.variable(j).is_integral()) {
            cont_index[static_cast<size_t>(j)] = static_cast<int>(cont.size());
            cont.push_back(j);
        }

    EnumerationResult best;
    std::vector<double> x(static_cast<size_t>(n), 0.0);

    auto leaf = [&]() {
        ++best.leaves;
        const double fixed_cost = m.objective_value(x);
        if (cont.empty()) {
            for (int i = 0; i < m.num_constraints(); ++i)
                if (m.violation(i, x) > 1e-9) return;
            if (fixed_cost < best.objective) {
                best = {true, fixed_cost, x, best.leaves};
            }
            return;
        }
        // Residual LP over the continuous variables.
        MilpModel lp;
        for (int j : cont) {
            auto v = m.variable(j);
            lp.add_variable(v);
        }
        for (int i = 0; i < m.num_constraints(); ++i) {
            const auto& c = m.constraint(i);
            Constraint r{c.name, {}, c.sense, c.rhs};
            for (const auto& t : c.terms) {
                const int ci = cont_index[static_cast<size_t>(t.var)];
                if (ci < 0) r.rhs -= t.coef * x[static_cast<size_t>(t.var)];
                else r.terms.push_back({ci, t.coef});
            }
            if (r.terms.empty()) {
                const double slack = r.rhs;
                const bool ok = c.sense == Sense::LessEqual ? slack >= -1e-9
                              : c.sense == Sense::GreaterEqual ? slack <= 1e-9
                              : std::abs(slack) <= 1e-9;
                if (!ok) return;
                continue;
            }
            lp.add_constraint(r);
        }
        const auto res = dense_solve(lp);
        if (res.status != DenseStatus::Optimal) return;
        const double total = fixed_cost + res.objective;
        if (total < best.objective) {
            auto full = x;
            for (size_t c = 0; c < cont.size(); ++c) full[static_cast<size_t>(cont[c])] = res.x[c];
            best = {true, total, full, best.leaves};
        }
    };

    auto rec = [&](auto&& self, size_t depth, double partial) -> void {
        if (partial >= best.objective) return;
        if (depth == boxes.size()) {
            leaf();
            return;
        }
        const auto& b = boxes[depth];
        const double c = m.variable(b.var).objective;
        for (int v = b.lo; v <= b.hi; ++v) {
            x[static_cast<size_t>(b.var)] = v;
            self(self, depth + 1, partial + c * v);
        }
        x[static_cast<size_t>(b.var)] = 0.0;
    };
    rec(rec, 0, 0.0);
    return best;
}

}  // namespace oracle
