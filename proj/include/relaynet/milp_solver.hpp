#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "relaynet/lp.hpp"
#include "relaynet/model.hpp"

namespace relaynet {

enum class Branching { MostFractional, PseudoCost };

struct SolveOptions {
    double rel_gap_tol = 1e-6;
    double int_feas_tol = 1e-6;
    double time_limit_s = 0.0;  // 0 = none
    long node_limit = 0;        // 0 = none
    Branching branching = Branching::MostFractional;
    std::uint64_t seed = 0;
    int threads = 1;
    // Open nodes taken from the queue per round. Results depend on this, not on threads.
    int node_batch = 8;
    // Rounding dives for an early incumbent: at the root, then every
    // `dive_interval` rounds while none is known. 0 disables them.
    int dive_interval = 16;
    // Optional per-variable branching priority (higher first); empty = all equal.
    std::vector<int> priority;
};

void validate(const SolveOptions& opts);

enum class MilpStatus { Optimal, Feasible, Infeasible, Unbounded, Limit };

const char* to_string(MilpStatus s);

struct SolveStats {
    long nodes = 0;
    long lp_iterations = 0;
    double wall_seconds = 0.0;
};

struct MilpSolution {
    MilpStatus status = MilpStatus::Infeasible;
    bool has_solution = false;
    double objective = 0.0;
    std::vector<double> values;  // by variable id
    double bound = -kInf;        // best proven lower bound
    SolveStats stats;
    std::vector<double> incumbent_history;  // objective of each improving incumbent
};

MilpSolution solve_milp(const MilpModel& model, const SolveOptions& opts = {});

// Solution document: CSV "name,value".
std::map<std::string, double> read_solution_csv(const std::string& text);
std::string write_solution_csv(const MilpModel& model, const std::vector<double>& values);

// Checks an external assignment against bounds, integrality and every row
// within `tol`, recomputing the objective. Variables absent from the map are
// taken as 0. Throws ValidationError naming the worst offending rows.
MilpSolution import_solution(const MilpModel& model, const std::map<std::string, double>& values, double tol = 1e-6);

}  // namespace relaynet
