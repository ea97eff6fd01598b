#include "relaynet/milp_solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <sstream>
#include <thread>

#include "relaynet/csv.hpp"
#include "relaynet/error.hpp"

namespace relaynet {

const char* to_string(MilpStatus s) {
    switch (s) {
        case MilpStatus::Optimal: return "optimal";
        case MilpStatus::Feasible: return "feasible";
        case MilpStatus::Infeasible: return "infeasible";
        case MilpStatus::Unbounded: return "unbounded";
        case MilpStatus::Limit: return "limit";
    }
    return "?";
}

void validate(const SolveOptions& opts) {
    if (!(opts.rel_gap_tol > 0.0) || !(opts.int_feas_tol > 0.0)) throw ValidationError("tolerances must be positive", "solver");
    if (opts.time_limit_s < 0.0) throw ValidationError("time limit must be nonnegative", "solver");
    if (opts.node_limit < 0) throw ValidationError("node limit must be nonnegative", "solver");
    if (opts.threads < 1) throw ValidationError("threads must be at least 1", "solver");
    if (opts.node_batch < 1) throw ValidationError("node batch must be at least 1", "solver");
    if (opts.dive_interval < 0) throw ValidationError("dive interval must be nonnegative", "solver");
    for (int p : opts.priority)
        if (p < 0) throw ValidationError("priorities must be nonnegative", "solver");
}

namespace {

struct BoundChange {
    int var;
    double lower;
    double upper;
};

struct Node {
    long seq = 0;
    double bound = -kInf;  // parent LP objective
    std::vector<BoundChange> changes;
    std::shared_ptr<const LpBasis> basis;
    // Branching record for pseudo-costs.
    int branch_var = -1;
    bool branch_up = false;
    double branch_frac = 0.0;
};

struct NodeOrder {
    bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
        if (a->bound != b->bound) return a->bound > b->bound;
        return a->seq < b->seq;  // newest first among ties
    }
};

struct NodeResult {
    LpSolution lp;
    bool failed = false;
};

class BranchAndBound {
public:
    BranchAndBound(const MilpModel& model, const SolveOptions& opts)
        : model_(model), opts_(opts), lp_(model), start_(std::chrono::steady_clock::now()) {
        const int n = model.num_variables();
        root_lo_ = lp_.lower();
        root_up_ = lp_.upper();
        for (int j = 0; j < n; ++j) {
            if (!model.variable(j).is_integral()) continue;
            integer_.push_back(j);
            root_lo_[static_cast<size_t>(j)] = std::ceil(root_lo_[static_cast<size_t>(j)] - opts.int_feas_tol);
            root_up_[static_cast<size_t>(j)] = std::floor(root_up_[static_cast<size_t>(j)] + opts.int_feas_tol);
        }
        pc_sum_.assign(static_cast<size_t>(n) * 2, 0.0);
        pc_count_.assign(static_cast<size_t>(n) * 2, 0);
    }

    MilpSolution run() {
        MilpSolution out;
        for (int j : integer_) {
            if (root_lo_[static_cast<size_t>(j)] > root_up_[static_cast<size_t>(j)]) {
                out.status = MilpStatus::Infeasible;
                return finish(out);
            }
        }
        auto root = std::make_shared<Node>();
        root->seq = next_seq_++;
        open_.push(root);

        bool incomplete = false;
        bool limit = false;
        bool unbounded = false;
        while (!open_.empty()) {
            if (limit_reached()) {
                limit = true;
                break;
            }
            std::vector<std::shared_ptr<Node>> batch;
            while (!open_.empty() && static_cast<int>(batch.size()) < opts_.node_batch) {
                auto node = open_.top();
                open_.pop();
                if (prunable(node->bound)) continue;
                batch.push_back(std::move(node));
            }
            if (batch.empty()) break;
            if (opts_.node_limit > 0) {
                const long room = opts_.node_limit - stats_.nodes;
                if (static_cast<long>(batch.size()) > room) {
                    for (size_t i = static_cast<size_t>(room); i < batch.size(); ++i) open_.push(batch[i]);
                    batch.resize(static_cast<size_t>(room));
                }
            }
            auto results = solve_batch(batch);
            const bool dive_now = opts_.dive_interval > 0 && (rounds_ == 0 || (!has_incumbent_ && rounds_ % opts_.dive_interval == 0));
            ++rounds_;
            for (size_t i = 0; i < batch.size(); ++i) {
                ++stats_.nodes;
                auto& node = *batch[i];
                auto& res = results[i];
                stats_.lp_iterations += res.lp.iterations;
                if (res.failed || res.lp.status == LpStatus::IterationLimit) {
                    incomplete = true;
                    continue;
                }
                if (res.lp.status == LpStatus::Infeasible) continue;
                if (res.lp.status == LpStatus::Unbounded) {
                    if (node.seq == 0) unbounded = true;
                    incomplete = true;
                    continue;
                }
                record_pseudo_cost(node, res.lp.objective);
                if (prunable(res.lp.objective)) continue;
                const int var = select_branch(res.lp.x);
                if (var < 0) {
                    accept_incumbent(res.lp.x);
                    continue;
                }
                if (dive_now && i == 0) dive(node, res.lp);
                if (prunable(res.lp.objective)) continue;
                branch(node, var, res.lp);
            }
            if (unbounded) break;
        }

        if (unbounded && !has_incumbent_) {
            out.status = MilpStatus::Unbounded;
            return finish(out);
        }
        double bound = has_incumbent_ ? incumbent_obj_ : kInf;
        while (!open_.empty()) {
            bound = std::min(bound, open_.top()->bound);
            open_.pop();
        }
        if (has_incumbent_) {
            out.has_solution = true;
            out.values = incumbent_;
            out.objective = incumbent_obj_;
            out.bound = std::min(bound, incumbent_obj_);
            if (limit) out.status = MilpStatus::Limit;
            else if (incomplete) out.status = MilpStatus::Feasible;
            else out.status = MilpStatus::Optimal;
        } else {
            out.bound = bound;
            out.status = (limit || incomplete) ? MilpStatus::Limit : MilpStatus::Infeasible;
        }
        return finish(out);
    }

private:
    double elapsed() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    bool limit_reached() const {
        if (opts_.node_limit > 0 && stats_.nodes >= opts_.node_limit) return true;
        return opts_.time_limit_s > 0.0 && elapsed() >= opts_.time_limit_s;
    }

    double cutoff() const {
        return incumbent_obj_ - opts_.rel_gap_tol * std::max(1.0, std::abs(incumbent_obj_));
    }

    bool prunable(double bound) const { return has_incumbent_ && bound >= cutoff(); }

    NodeResult solve_node(const Node& node) const {
        auto lo = root_lo_;
        auto up = root_up_;
        for (const auto& c : node.changes) {
            lo[static_cast<size_t>(c.var)] = c.lower;
            up[static_cast<size_t>(c.var)] = c.upper;
        }
        NodeResult r;
        try {
            r.lp = lp_.solve(lo, up, node.basis.get());
        } catch (const NumericalError&) {
            try {
                r.lp = lp_.solve(lo, up, nullptr);
            } catch (const NumericalError&) {
                r.failed = true;
            }
        }
        return r;
    }

    std::vector<NodeResult> solve_batch(const std::vector<std::shared_ptr<Node>>& batch) const {
        std::vector<NodeResult> results(batch.size());
        const int workers = std::min<int>(opts_.threads, static_cast<int>(batch.size()));
        if (workers <= 1) {
            for (size_t i = 0; i < batch.size(); ++i) results[i] = solve_node(*batch[i]);
            return results;
        }
        std::atomic<size_t> next{0};
        auto work = [&] {
            for (size_t i = next++; i < batch.size(); i = next++) results[i] = solve_node(*batch[i]);
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
        for (auto& th : pool) th.join();
        return results;
    }

    // Rounds one fractional variable at a time toward its nearest integer
    // (the other way if that is infeasible) and resolves until integral.
    void dive(const Node& node, const LpSolution& start) {
        auto lo = root_lo_;
        auto up = root_up_;
        for (const auto& c : node.changes) {
            lo[static_cast<size_t>(c.var)] = c.lower;
            up[static_cast<size_t>(c.var)] = c.upper;
        }
        LpSolution cur = start;
        const size_t max_depth = integer_.size();
        for (size_t depth = 0; depth < max_depth; ++depth) {
            if (limit_reached() || prunable(cur.objective)) return;
            const int var = select_branch(cur.x);
            if (var < 0) {
                accept_incumbent(cur.x);
                return;
            }
            const size_t k = static_cast<size_t>(var);
            const double v = cur.x[k];
            const bool up_first = v - std::floor(v) >= 0.5;
            bool moved = false;
            for (int attempt = 0; attempt < 2 && !moved; ++attempt) {
                const bool go_up = attempt == 0 ? up_first : !up_first;
                const double old_lo = lo[k], old_up = up[k];
                if (go_up) lo[k] = std::ceil(v);
                else up[k] = std::floor(v);
                try {
                    auto next = lp_.solve(lo, up, &cur.basis);
                    stats_.lp_iterations += next.iterations;
                    if (next.status == LpStatus::Optimal) {
                        cur = std::move(next);
                        moved = true;
                    }
                } catch (const NumericalError&) {
                }
                if (!moved) {
                    lo[k] = old_lo;
                    up[k] = old_up;
                }
            }
            if (!moved) return;
        }
    }

    double fractionality(double v) const { return v - std::floor(v); }

    bool is_integral_value(double v) const {
        const double f = fractionality(v);
        return f <= opts_.int_feas_tol || f >= 1.0 - opts_.int_feas_tol;
    }

    int select_branch(const std::vector<double>& x) const {
        int best = -1;
        double best_score = -1.0;
        int best_priority = 0;
        for (int j : integer_) {
            const double v = x[static_cast<size_t>(j)];
            if (is_integral_value(v)) continue;
            const int prio = opts_.priority.empty() ? 0 : opts_.priority[static_cast<size_t>(j)];
            if (best >= 0 && prio < best_priority) continue;
            if (best >= 0 && prio > best_priority) best_score = -1.0;
            const double f = fractionality(v);
            double score = std::min(f, 1.0 - f);
            if (opts_.branching == Branching::PseudoCost) {
                const double down = pseudo_cost(j, false) * f;
                const double up = pseudo_cost(j, true) * (1.0 - f);
                score = std::max(down, 1e-6) * std::max(up, 1e-6);
            }
            if (score > best_score) {
                best_score = score;
                best = j;
                best_priority = prio;
            }
        }
        return best;
    }

    double pseudo_cost(int j, bool up) const {
        const size_t k = static_cast<size_t>(j) * 2 + (up ? 1 : 0);
        if (pc_count_[k] > 0) return pc_sum_[k] / pc_count_[k];
        // Uninitialised: average over initialised entries of the same direction.
        double sum = 0.0;
        long count = 0;
        for (size_t i = up ? 1 : 0; i < pc_sum_.size(); i += 2) {
            if (pc_count_[i] == 0) continue;
            sum += pc_sum_[i] / pc_count_[i];
            ++count;
        }
        return count > 0 ? sum / static_cast<double>(count) : 1.0;
    }

    void record_pseudo_cost(const Node& node, double objective) {
        if (node.branch_var < 0 || opts_.branching != Branching::PseudoCost) return;
        const double dist = node.branch_up ? 1.0 - node.branch_frac : node.branch_frac;
        if (dist <= 0.0) return;
        const size_t k = static_cast<size_t>(node.branch_var) * 2 + (node.branch_up ? 1 : 0);
        pc_sum_[k] += std::max(0.0, objective - node.bound) / dist;
        ++pc_count_[k];
    }

    void accept_incumbent(const std::vector<double>& x) {
        std::vector<double> v = x;
        for (int j : integer_) v[static_cast<size_t>(j)] = std::round(v[static_cast<size_t>(j)]);
        const double obj = model_.objective_value(v);
        if (has_incumbent_ && obj >= incumbent_obj_) return;
        has_incumbent_ = true;
        incumbent_ = std::move(v);
        incumbent_obj_ = obj;
        history_.push_back(obj);
    }

    void branch(const Node& parent, int var, const LpSolution& lp) {
        const double v = lp.x[static_cast<size_t>(var)];
        double lo = root_lo_[static_cast<size_t>(var)];
        double up = root_up_[static_cast<size_t>(var)];
        for (const auto& c : parent.changes) {
            if (c.var == var) {
                lo = c.lower;
                up = c.upper;
            }
        }
        auto basis = std::make_shared<const LpBasis>(lp.basis);
        for (int dir = 0; dir < 2; ++dir) {
            auto child = std::make_shared<Node>();
            child->seq = next_seq_++;
            child->bound = lp.objective;
            child->changes = parent.changes;
            child->basis = basis;
            child->branch_var = var;
            child->branch_up = dir == 1;
            child->branch_frac = fractionality(v);
            BoundChange change{var, lo, up};
            if (dir == 0) change.upper = std::floor(v);
            else change.lower = std::ceil(v);
            auto it = std::find_if(child->changes.begin(), child->changes.end(), [&](const BoundChange& c) { return c.var == var; });
            if (it != child->changes.end()) *it = change;
            else child->changes.push_back(change);
            open_.push(std::move(child));
        }
    }

    MilpSolution finish(MilpSolution out) {
        out.stats = stats_;
        out.stats.wall_seconds = elapsed();
        out.incumbent_history = history_;
        return out;
    }

    const MilpModel& model_;
    SolveOptions opts_;
    LpProblem lp_;
    std::chrono::steady_clock::time_point start_;
    std::vector<double> root_lo_, root_up_;
    std::vector<int> integer_;
    std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open_;
    long rounds_ = 0;
    long next_seq_ = 0;
    SolveStats stats_;
    bool has_incumbent_ = false;
    std::vector<double> incumbent_;
    double incumbent_obj_ = kInf;
    std::vector<double> history_;
    std::vector<double> pc_sum_;
    std::vector<long> pc_count_;
};

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const SolveOptions& opts) {
    validate(opts);
    model.validate();
    if (!opts.priority.empty() && static_cast<int>(opts.priority.size()) != model.num_variables())
        throw ValidationError("priority list does not match the model", "solver");
    BranchAndBound bb(model, opts);
    return bb.run();
}

std::map<std::string, double> read_solution_csv(const std::string& text) {
    const auto table = csv::parse(text);
    const int name_col = table.require("name", "solution");
    const int value_col = table.require("value", "solution");
    std::map<std::string, double> out;
    for (size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::string where = "solution row " + std::to_string(i + 2);
        if (static_cast<int>(row.size()) <= std::max(name_col, value_col)) throw ValidationError("missing fields", where);
        const auto& name = row[static_cast<size_t>(name_col)];
        if (out.count(name)) throw ValidationError("duplicate variable " + name, where);
        out[name] = csv::to_double(row[static_cast<size_t>(value_col)], where);
    }
    return out;
}

std::string write_solution_csv(const MilpModel& model, const std::vector<double>& values) {
    std::string out = "name,value\n";
    for (int j = 0; j < model.num_variables(); ++j) {
        out += model.variable(j).name;
        out += ',';
        out += csv::format_number(values.at(static_cast<size_t>(j)));
        out += '\n';
    }
    return out;
}

MilpSolution import_solution(const MilpModel& model, const std::map<std::string, double>& values, double tol) {
    const int n = model.num_variables();
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    for (const auto& [name, v] : values) {
        const int j = model.find_variable(name);
        if (j < 0) throw ValidationError("unknown variable " + name, "solution");
        if (!std::isfinite(v)) throw ValidationError("non-finite value", name);
        x[static_cast<size_t>(j)] = v;
    }
    for (int j = 0; j < n; ++j) {
        const auto& var = model.variable(j);
        const double v = x[static_cast<size_t>(j)];
        if (v < var.lower - tol || v > var.upper + tol) {
            const bool missing = !values.count(var.name);
            throw ValidationError(missing ? "absent from solution and 0 is outside its bounds" : "value outside bounds", var.name);
        }
        if (var.is_integral() && std::abs(v - std::round(v)) > tol) throw ValidationError("value is not integral", var.name);
    }
    std::vector<std::pair<double, int>> violated;
    for (int i = 0; i < model.num_constraints(); ++i) {
        const double viol = model.violation(i, x);
        if (viol > tol) violated.emplace_back(viol, i);
    }
    if (!violated.empty()) {
        std::stable_sort(violated.begin(), violated.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        std::ostringstream msg;
        msg << violated.size() << " constraint(s) violated; worst:";
        for (size_t k = 0; k < std::min<size_t>(5, violated.size()); ++k)
            msg << ' ' << model.constraint(violated[k].second).name << " (" << violated[k].first << ")";
        throw ValidationError(msg.str(), "solution");
    }
    MilpSolution out;
    out.status = MilpStatus::Feasible;
    out.has_solution = true;
    out.values = std::move(x);
    out.objective = model.objective_value(out.values);
    out.bound = -kInf;
    return out;
}

}  // namespace relaynet
