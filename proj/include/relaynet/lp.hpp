#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "relaynet/model.hpp"

namespace relaynet {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

// Column status codes used in LpBasis::status.
enum class ColStatus : std::uint8_t { Basic, AtLower, AtUpper, AtZero };

// Warm-start information: basic column per row position and a status for
// every structural and logical column.
struct LpBasis {
    std::vector<int> head;
    std::vector<ColStatus> status;

    bool empty() const { return head.empty(); }
};

struct LpOptions {
    double primal_tol = 1e-9;
    double dual_tol = 1e-9;
    double pivot_tol = 1e-9;
    long max_iterations = 500000;
    int refactor_interval = 64;
    int degenerate_before_bland = 60;
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;             // structural values
    std::vector<double> row_activity;  // a_i x
    std::vector<double> duals;         // one per row
    long iterations = 0;
    LpBasis basis;
};

// Immutable column-form copy of a model with integrality dropped. Rows become
// logical columns s_i = -a_i x bounded by the row sense and rhs, so that
// [A I][x; s] = 0.
class LpProblem {
public:
    explicit LpProblem(const MilpModel& model);
    ~LpProblem();
    LpProblem(LpProblem&&) noexcept;
    LpProblem& operator=(LpProblem&&) noexcept;

    int num_structural() const;
    int num_rows() const;

    const std::vector<double>& lower() const;  // structural bounds of the model
    const std::vector<double>& upper() const;

    // Solves with structural bounds overridden by `lower`/`upper` (sizes n),
    // optionally warm-started from `warm`. Thread-safe: no shared mutation.
    LpSolution solve(const std::vector<double>& lower, const std::vector<double>& upper, const LpBasis* warm,
                     const LpOptions& opts = {}) const;
    LpSolution solve(const LpOptions& opts = {}) const;

    struct Data;

private:
    std::unique_ptr<Data> data_;
};

LpSolution solve_lp(const MilpModel& model, const LpOptions& opts = {});

}  // namespace relaynet
