#include <algorithm>
#include <cmath>
#include <map>

#include "lp/basis_factor.hpp"
#include "relaynet/error.hpp"
#include "relaynet/lp.hpp"

namespace relaynet {

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "?";
}

struct LpProblem::Data {
    int n = 0;
    int m = 0;
    lp::SparseColumns cols;   // n structural + m logical columns
    std::vector<double> cost; // n + m
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> row_lower;  // logical bounds
    std::vector<double> row_upper;
    // Row-wise copy of the same matrix: for row i, (column, value) pairs.
    std::vector<int> row_start;
    std::vector<int> row_col;
    std::vector<double> row_val;
};

LpProblem::LpProblem(const MilpModel& model) : data_(std::make_unique<Data>()) {
    auto& d = *data_;
    d.n = model.num_variables();
    d.m = model.num_constraints();
    std::vector<std::map<int, double>> by_col(static_cast<size_t>(d.n));
    for (int i = 0; i < d.m; ++i) {
        const auto& c = model.constraint(i);
        for (const auto& t : c.terms) {
            if (t.var < 0 || t.var >= d.n) throw ValidationError("reference to undeclared variable", c.name);
            by_col[static_cast<size_t>(t.var)][i] += t.coef;
        }
        // s_i = -a_i x
        switch (c.sense) {
            case Sense::LessEqual:
                d.row_lower.push_back(-c.rhs);
                d.row_upper.push_back(kInf);
                break;
            case Sense::GreaterEqual:
                d.row_lower.push_back(-kInf);
                d.row_upper.push_back(-c.rhs);
                break;
            case Sense::Equal:
                d.row_lower.push_back(-c.rhs);
                d.row_upper.push_back(-c.rhs);
                break;
        }
    }
    d.cols.num_rows = d.m;
    d.cols.start.push_back(0);
    for (int j = 0; j < d.n; ++j) {
        for (const auto& [i, v] : by_col[static_cast<size_t>(j)]) {
            if (v == 0.0) continue;
            d.cols.index.push_back(i);
            d.cols.value.push_back(v);
        }
        d.cols.start.push_back(static_cast<int>(d.cols.index.size()));
        const auto& var = model.variable(j);
        d.cost.push_back(var.objective);
        d.lower.push_back(var.lower);
        d.upper.push_back(var.upper);
    }
    for (int i = 0; i < d.m; ++i) {
        d.cols.index.push_back(i);
        d.cols.value.push_back(1.0);
        d.cols.start.push_back(static_cast<int>(d.cols.index.size()));
        d.cost.push_back(0.0);
    }
    d.row_start.assign(static_cast<size_t>(d.m) + 1, 0);
    for (int i : d.cols.index) ++d.row_start[static_cast<size_t>(i) + 1];
    for (int i = 0; i < d.m; ++i) d.row_start[static_cast<size_t>(i) + 1] += d.row_start[static_cast<size_t>(i)];
    d.row_col.resize(d.cols.index.size());
    d.row_val.resize(d.cols.index.size());
    std::vector<int> fill(d.row_start.begin(), d.row_start.end() - 1);
    for (int j = 0; j < d.cols.num_cols(); ++j)
        for (int p = d.cols.start[static_cast<size_t>(j)]; p < d.cols.start[static_cast<size_t>(j) + 1]; ++p) {
            const int at = fill[static_cast<size_t>(d.cols.index[static_cast<size_t>(p)])]++;
            d.row_col[static_cast<size_t>(at)] = j;
            d.row_val[static_cast<size_t>(at)] = d.cols.value[static_cast<size_t>(p)];
        }
}

LpProblem::~LpProblem() = default;
LpProblem::LpProblem(LpProblem&&) noexcept = default;
LpProblem& LpProblem::operator=(LpProblem&&) noexcept = default;

int LpProblem::num_structural() const { return data_->n; }
int LpProblem::num_rows() const { return data_->m; }
const std::vector<double>& LpProblem::lower() const { return data_->lower; }
const std::vector<double>& LpProblem::upper() const { return data_->upper; }

namespace {

class Simplex {
public:
    Simplex(const LpProblem::Data& p, const std::vector<double>& lo, const std::vector<double>& up, const LpOptions& opts)
        : p_(p), opts_(opts), n_(p.n), m_(p.m), total_(p.n + p.m) {
        lb_ = lo;
        ub_ = up;
        lb_.insert(lb_.end(), p.row_lower.begin(), p.row_lower.end());
        ub_.insert(ub_.end(), p.row_upper.begin(), p.row_upper.end());
        x_.assign(static_cast<size_t>(total_), 0.0);
        status_.assign(static_cast<size_t>(total_), ColStatus::AtLower);
        head_.assign(static_cast<size_t>(m_), -1);
        pos_.assign(static_cast<size_t>(total_), -1);
        work_.assign(static_cast<size_t>(m_), 0.0);
        alpha_.assign(static_cast<size_t>(m_), 0.0);
        dj_.assign(static_cast<size_t>(total_), 0.0);
        y_.assign(static_cast<size_t>(m_), 0.0);
    }

    LpSolution run(const LpBasis* warm) {
        for (int j = 0; j < n_; ++j)
            if (lb_[static_cast<size_t>(j)] > ub_[static_cast<size_t>(j)] + opts_.primal_tol) return finish(LpStatus::Infeasible);
        load_basis(warm);
        refactor();

        LpStatus result = LpStatus::Optimal;
        // Alternate engines until the basis is verified optimal after a fresh factorization.
        for (int round = 0; round < 8; ++round) {
            if (is_dual_feasible()) {
                result = dual();
                if (result == LpStatus::IterationLimit && iterations_ < opts_.max_iterations) result = primal();
            } else {
                result = primal();
            }
            if (result != LpStatus::Optimal) break;
            refactor();
            if (max_primal_infeasibility() <= opts_.primal_tol && is_dual_feasible()) break;
        }
        return finish(result);
    }

private:
    // ---- basic linear algebra over the column store ----
    template <class Fn>
    void for_col(int j, Fn&& fn) const {
        for (int p = p_.cols.start[static_cast<size_t>(j)]; p < p_.cols.start[static_cast<size_t>(j) + 1]; ++p)
            fn(p_.cols.index[static_cast<size_t>(p)], p_.cols.value[static_cast<size_t>(p)]);
    }

    double dot_col(const std::vector<double>& v, int j) const {
        double s = 0.0;
        for_col(j, [&](int i, double a) { s += v[static_cast<size_t>(i)] * a; });
        return s;
    }

    void column_ftran(int j, std::vector<double>& out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for_col(j, [&](int i, double a) { out[static_cast<size_t>(i)] += a; });
        factor_.ftran(out);
    }

    double lb(int j) const { return lb_[static_cast<size_t>(j)]; }
    double ub(int j) const { return ub_[static_cast<size_t>(j)]; }
    bool is_fixed(int j) const { return lb(j) == ub(j); }

    ColStatus default_status(int j, double cost) const {
        const bool lo = std::isfinite(lb(j));
        const bool hi = std::isfinite(ub(j));
        if (cost >= 0.0) return lo ? ColStatus::AtLower : hi ? ColStatus::AtUpper : ColStatus::AtZero;
        return hi ? ColStatus::AtUpper : lo ? ColStatus::AtLower : ColStatus::AtZero;
    }

    // Nonbasic status compatible with the current bounds.
    ColStatus repair_status(int j, ColStatus s) const {
        if (s == ColStatus::AtLower && std::isfinite(lb(j))) return s;
        if (s == ColStatus::AtUpper && std::isfinite(ub(j))) return s;
        if (s == ColStatus::AtZero && !std::isfinite(lb(j)) && !std::isfinite(ub(j))) return s;
        return default_status(j, p_.cost[static_cast<size_t>(j)]);
    }

    void set_nonbasic_value(int j) {
        switch (status_[static_cast<size_t>(j)]) {
            case ColStatus::AtLower: x_[static_cast<size_t>(j)] = lb(j); break;
            case ColStatus::AtUpper: x_[static_cast<size_t>(j)] = ub(j); break;
            case ColStatus::AtZero: x_[static_cast<size_t>(j)] = 0.0; break;
            case ColStatus::Basic: break;
        }
    }

    void load_basis(const LpBasis* warm) {
        const bool usable = warm && static_cast<int>(warm->head.size()) == m_ && static_cast<int>(warm->status.size()) == total_;
        if (usable) {
            head_ = warm->head;
            status_ = warm->status;
        } else {
            for (int i = 0; i < m_; ++i) head_[static_cast<size_t>(i)] = n_ + i;
            for (int j = 0; j < total_; ++j) status_[static_cast<size_t>(j)] = ColStatus::AtLower;
            for (int i = 0; i < m_; ++i) status_[static_cast<size_t>(n_ + i)] = ColStatus::Basic;
        }
        std::vector<char> in_head(static_cast<size_t>(total_), 0);
        for (int j : head_) in_head[static_cast<size_t>(j)] = 1;
        for (int j = 0; j < total_; ++j) {
            if (in_head[static_cast<size_t>(j)]) {
                status_[static_cast<size_t>(j)] = ColStatus::Basic;
            } else {
                const ColStatus s = status_[static_cast<size_t>(j)] == ColStatus::Basic
                                        ? default_status(j, p_.cost[static_cast<size_t>(j)])
                                        : repair_status(j, status_[static_cast<size_t>(j)]);
                status_[static_cast<size_t>(j)] = usable ? s : default_status(j, p_.cost[static_cast<size_t>(j)]);
                set_nonbasic_value(j);
            }
        }
    }

    void refactor() {
        // Row positions may be permuted; steepest-edge weights follow their columns.
        std::vector<std::pair<int, double>> weights;
        if (!dse_.empty())
            for (int r = 0; r < m_; ++r) weights.emplace_back(head_[static_cast<size_t>(r)], dse_[static_cast<size_t>(r)]);
        const auto displaced = factor_.factor(p_.cols, n_, head_);
        for (int j = 0; j < total_; ++j) pos_[static_cast<size_t>(j)] = -1;
        for (int r = 0; r < m_; ++r) {
            const int j = head_[static_cast<size_t>(r)];
            pos_[static_cast<size_t>(j)] = r;
            status_[static_cast<size_t>(j)] = ColStatus::Basic;
        }
        for (int j : displaced) {
            status_[static_cast<size_t>(j)] = default_status(j, p_.cost[static_cast<size_t>(j)]);
            set_nonbasic_value(j);
        }
        if (!weights.empty()) {
            std::fill(dse_.begin(), dse_.end(), 1.0);
            for (const auto& [j, w] : weights)
                if (pos_[static_cast<size_t>(j)] >= 0) dse_[static_cast<size_t>(pos_[static_cast<size_t>(j)])] = w;
        }
        compute_primal();
    }

    void compute_primal() {
        std::fill(work_.begin(), work_.end(), 0.0);
        for (int j = 0; j < total_; ++j) {
            if (status_[static_cast<size_t>(j)] == ColStatus::Basic) continue;
            const double v = x_[static_cast<size_t>(j)];
            if (v == 0.0) continue;
            for_col(j, [&](int i, double a) { work_[static_cast<size_t>(i)] -= a * v; });
        }
        factor_.ftran(work_);
        for (int r = 0; r < m_; ++r) x_[static_cast<size_t>(head_[static_cast<size_t>(r)])] = work_[static_cast<size_t>(r)];
    }

    double infeasibility(int j) const {
        const double v = x_[static_cast<size_t>(j)];
        if (v < lb(j)) return lb(j) - v;
        if (v > ub(j)) return v - ub(j);
        return 0.0;
    }

    double max_primal_infeasibility() const {
        double worst = 0.0;
        for (int j : head_) worst = std::max(worst, infeasibility(j));
        return worst;
    }

    // Reduced costs for the given basic cost vector (indexed by row position).
    void compute_reduced_costs(const std::vector<double>& cost_basic, bool phase_one) {
        y_ = cost_basic;
        factor_.btran(y_);
        for (int j = 0; j < total_; ++j) {
            if (status_[static_cast<size_t>(j)] == ColStatus::Basic) {
                dj_[static_cast<size_t>(j)] = 0.0;
                continue;
            }
            const double c = phase_one ? 0.0 : p_.cost[static_cast<size_t>(j)];
            dj_[static_cast<size_t>(j)] = c - dot_col(y_, j);
        }
    }

    std::vector<double> phase_two_costs() const {
        std::vector<double> cb(static_cast<size_t>(m_));
        for (int r = 0; r < m_; ++r) cb[static_cast<size_t>(r)] = p_.cost[static_cast<size_t>(head_[static_cast<size_t>(r)])];
        return cb;
    }

    bool is_dual_feasible() {
        compute_reduced_costs(phase_two_costs(), false);
        for (int j = 0; j < total_; ++j) {
            if (status_[static_cast<size_t>(j)] == ColStatus::Basic || is_fixed(j)) continue;
            const double d = dj_[static_cast<size_t>(j)];
            switch (status_[static_cast<size_t>(j)]) {
                case ColStatus::AtLower:
                    if (d < -opts_.dual_tol) return false;
                    break;
                case ColStatus::AtUpper:
                    if (d > opts_.dual_tol) return false;
                    break;
                case ColStatus::AtZero:
                    if (std::abs(d) > opts_.dual_tol) return false;
                    break;
                case ColStatus::Basic: break;
            }
        }
        return true;
    }

    void pivot(int q, int r, ColStatus leaving_status) {
        const int p = head_[static_cast<size_t>(r)];
        factor_.update(alpha_, r);
        head_[static_cast<size_t>(r)] = q;
        pos_[static_cast<size_t>(q)] = r;
        pos_[static_cast<size_t>(p)] = -1;
        status_[static_cast<size_t>(q)] = ColStatus::Basic;
        status_[static_cast<size_t>(p)] = leaving_status;
        set_nonbasic_value(p);
        if (factor_.updates_since_factor() >= opts_.refactor_interval) refactor();
    }

    // ---- primal simplex: composite phase 1 then phase 2 ----
    LpStatus primal() {
        int degenerate_run = 0;
        while (true) {
            if (iterations_ >= opts_.max_iterations) return LpStatus::IterationLimit;
            const bool bland = degenerate_run >= opts_.degenerate_before_bland;

            std::vector<double> cb(static_cast<size_t>(m_), 0.0);
            bool phase_one = false;
            for (int r = 0; r < m_; ++r) {
                const int j = head_[static_cast<size_t>(r)];
                const double v = x_[static_cast<size_t>(j)];
                if (v < lb(j) - opts_.primal_tol) {
                    cb[static_cast<size_t>(r)] = -1.0;
                    phase_one = true;
                } else if (v > ub(j) + opts_.primal_tol) {
                    cb[static_cast<size_t>(r)] = 1.0;
                    phase_one = true;
                }
            }
            if (!phase_one) cb = phase_two_costs();
            compute_reduced_costs(cb, phase_one);

            // Entering column: Dantzig, or lowest index under Bland.
            int q = -1;
            double q_score = 0.0;
            int q_dir = 0;
            for (int j = 0; j < total_; ++j) {
                const auto s = status_[static_cast<size_t>(j)];
                if (s == ColStatus::Basic || is_fixed(j)) continue;
                const double d = dj_[static_cast<size_t>(j)];
                int dir = 0;
                if ((s == ColStatus::AtLower || s == ColStatus::AtZero) && d < -opts_.dual_tol) dir = 1;
                else if ((s == ColStatus::AtUpper || s == ColStatus::AtZero) && d > opts_.dual_tol) dir = -1;
                if (dir == 0) continue;
                if (bland) {
                    q = j;
                    q_dir = dir;
                    break;
                }
                if (std::abs(d) > q_score) {
                    q_score = std::abs(d);
                    q = j;
                    q_dir = dir;
                }
            }
            if (q < 0) return phase_one ? LpStatus::Infeasible : LpStatus::Optimal;

            column_ftran(q, alpha_);
            ++iterations_;

            // Ratio test (Harris two-pass; Bland picks the lowest index among ties).
            const double tol = opts_.primal_tol;
            double relaxed_min = kInf;
            const auto ratio = [&](int r, double& exact, double& relaxed, bool& to_upper) -> bool {
                const double a = alpha_[static_cast<size_t>(r)];
                if (std::abs(a) <= opts_.pivot_tol) return false;
                const int j = head_[static_cast<size_t>(r)];
                const double v = x_[static_cast<size_t>(j)];
                const double rate = -q_dir * a;
                const bool below = v < lb(j) - tol;
                const bool above = v > ub(j) + tol;
                if (phase_one && below) {
                    if (rate <= 0.0) return false;
                    exact = (lb(j) - v) / rate;
                    relaxed = (lb(j) - v + tol) / rate;
                    to_upper = false;
                    return true;
                }
                if (phase_one && above) {
                    if (rate >= 0.0) return false;
                    exact = (v - ub(j)) / -rate;
                    relaxed = (v - ub(j) + tol) / -rate;
                    to_upper = true;
                    return true;
                }
                if (rate < 0.0 && std::isfinite(lb(j))) {
                    exact = std::max(0.0, (v - lb(j)) / -rate);
                    relaxed = (v - lb(j) + tol) / -rate;
                    to_upper = false;
                    return true;
                }
                if (rate > 0.0 && std::isfinite(ub(j))) {
                    exact = std::max(0.0, (ub(j) - v) / rate);
                    relaxed = (ub(j) - v + tol) / rate;
                    to_upper = true;
                    return true;
                }
                return false;
            };
            for (int r = 0; r < m_; ++r) {
                double exact = 0, relaxed = 0;
                bool up = false;
                if (ratio(r, exact, relaxed, up)) relaxed_min = std::min(relaxed_min, bland ? exact : relaxed);
            }
            const double range = ub(q) - lb(q);
            int leave = -1;
            bool leave_upper = false;
            double theta = kInf;
            if (std::isfinite(relaxed_min)) {
                double best_abs = -1.0;
                for (int r = 0; r < m_; ++r) {
                    double exact = 0, relaxed = 0;
                    bool up = false;
                    if (!ratio(r, exact, relaxed, up)) continue;
                    if (exact > relaxed_min + (bland ? 1e-12 : 0.0)) continue;
                    const double a = std::abs(alpha_[static_cast<size_t>(r)]);
                    const bool better = bland ? (leave < 0 || head_[static_cast<size_t>(r)] < head_[static_cast<size_t>(leave)]) : a > best_abs;
                    if (better) {
                        best_abs = a;
                        leave = r;
                        leave_upper = up;
                        theta = exact;
                    }
                }
            }
            if (std::isfinite(range) && range <= std::min(theta, relaxed_min)) {
                // Bound flip of the entering column.
                const double step = q_dir * range;
                for (int r = 0; r < m_; ++r) x_[static_cast<size_t>(head_[static_cast<size_t>(r)])] -= step * alpha_[static_cast<size_t>(r)];
                status_[static_cast<size_t>(q)] = q_dir > 0 ? ColStatus::AtUpper : ColStatus::AtLower;
                set_nonbasic_value(q);
                degenerate_run = range > 1e-12 ? 0 : degenerate_run + 1;
                continue;
            }
            if (leave < 0) {
                if (phase_one) throw NumericalError("phase one found no blocking row");
                return LpStatus::Unbounded;
            }
            const double step = q_dir * theta;
            x_[static_cast<size_t>(q)] += step;
            for (int r = 0; r < m_; ++r) x_[static_cast<size_t>(head_[static_cast<size_t>(r)])] -= step * alpha_[static_cast<size_t>(r)];
            const int p = head_[static_cast<size_t>(leave)];
            ColStatus ls = leave_upper ? ColStatus::AtUpper : ColStatus::AtLower;
            if (is_fixed(p)) ls = ColStatus::AtLower;
            degenerate_run = theta > 1e-12 ? 0 : degenerate_run + 1;
            pivot(q, leave, ls);
        }
    }

    // ---- dual simplex from a dual feasible basis ----
    // Dual steepest-edge pricing; reduced costs are updated from the pivot row
    // and recomputed at every refactorization.
    LpStatus dual() {
        std::vector<double> rho(static_cast<size_t>(m_));
        std::vector<double> tau(static_cast<size_t>(m_));
        std::vector<double> alpha_row(static_cast<size_t>(total_), 0.0);
        std::vector<char> in_row(static_cast<size_t>(total_), 0);
        std::vector<int> touched;
        if (static_cast<int>(dse_.size()) != m_) dse_.assign(static_cast<size_t>(m_), 1.0);
        int degenerate_run = 0;
        const long limit = iterations_ + std::max<long>(1000, 50L * (m_ + n_));
        while (true) {
            if (iterations_ >= opts_.max_iterations || iterations_ >= limit) return LpStatus::IterationLimit;
            const bool bland = degenerate_run >= opts_.degenerate_before_bland;

            int r = -1;
            double best = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double inf = infeasibility(head_[static_cast<size_t>(i)]);
                if (inf <= opts_.primal_tol) continue;
                if (bland) {
                    if (r < 0 || head_[static_cast<size_t>(i)] < head_[static_cast<size_t>(r)]) r = i;
                    continue;
                }
                const double score = inf * inf / dse_[static_cast<size_t>(i)];
                if (score > best) {
                    best = score;
                    r = i;
                }
            }
            if (r < 0) return LpStatus::Optimal;

            const int p = head_[static_cast<size_t>(r)];
            const double v = x_[static_cast<size_t>(p)];
            const bool increase = v < lb(p);
            const double target = increase ? lb(p) : ub(p);

            std::fill(rho.begin(), rho.end(), 0.0);
            rho[static_cast<size_t>(r)] = 1.0;
            factor_.btran(rho);

            // Pivot row over nonbasic columns, row-wise when rho is sparse.
            for (int j : touched) {
                alpha_row[static_cast<size_t>(j)] = 0.0;
                in_row[static_cast<size_t>(j)] = 0;
            }
            touched.clear();
            int rho_nz = 0;
            for (double x : rho) rho_nz += x != 0.0;
            if (rho_nz * 8 < m_) {
                for (int i = 0; i < m_; ++i) {
                    const double ri = rho[static_cast<size_t>(i)];
                    if (ri == 0.0) continue;
                    for (int k = p_.row_start[static_cast<size_t>(i)]; k < p_.row_start[static_cast<size_t>(i) + 1]; ++k) {
                        const int j = p_.row_col[static_cast<size_t>(k)];
                        if (status_[static_cast<size_t>(j)] == ColStatus::Basic) continue;
                        if (!in_row[static_cast<size_t>(j)]) {
                            in_row[static_cast<size_t>(j)] = 1;
                            touched.push_back(j);
                        }
                        alpha_row[static_cast<size_t>(j)] += ri * p_.row_val[static_cast<size_t>(k)];
                    }
                }
            } else {
                for (int j = 0; j < total_; ++j) {
                    if (status_[static_cast<size_t>(j)] == ColStatus::Basic) continue;
                    const double a = dot_col(rho, j);
                    if (a == 0.0) continue;
                    alpha_row[static_cast<size_t>(j)] = a;
                    in_row[static_cast<size_t>(j)] = 1;
                    touched.push_back(j);
                }
            }

            // Harris two-pass ratio test; candidates must move x_p toward its violated bound.
            double relaxed_min = kInf;
            for (int j : touched) {
                if (is_fixed(j)) continue;
                const double a = alpha_row[static_cast<size_t>(j)];
                if (!eligible(status_[static_cast<size_t>(j)], a, increase)) continue;
                const double d = std::abs(dj_[static_cast<size_t>(j)]);
                relaxed_min = std::min(relaxed_min, bland ? d / std::abs(a) : (d + opts_.dual_tol) / std::abs(a));
            }
            if (!std::isfinite(relaxed_min)) return LpStatus::Infeasible;

            int q = -1;
            double best_abs = -1.0;
            double q_ratio = 0.0;
            for (int j : touched) {
                if (is_fixed(j)) continue;
                const double a = alpha_row[static_cast<size_t>(j)];
                if (!eligible(status_[static_cast<size_t>(j)], a, increase)) continue;
                const double ratio_j = std::abs(dj_[static_cast<size_t>(j)]) / std::abs(a);
                if (ratio_j > relaxed_min + (bland ? 1e-12 : 0.0)) continue;
                const bool better = bland ? (q < 0 || j < q) : std::abs(a) > best_abs;
                if (better) {
                    best_abs = std::abs(a);
                    q = j;
                    q_ratio = ratio_j;
                }
            }
            if (q < 0) return LpStatus::Infeasible;

            column_ftran(q, alpha_);
            ++iterations_;
            const double apiv = alpha_[static_cast<size_t>(r)];
            if (std::abs(apiv) <= opts_.pivot_tol ||
                std::abs(apiv - alpha_row[static_cast<size_t>(q)]) > 1e-7 * std::max(1.0, std::abs(apiv))) {
                // Row and column views disagree: numerical drift.
                if (factor_.updates_since_factor() == 0) throw NumericalError("unstable dual pivot");
                refactor();
                compute_reduced_costs(phase_two_costs(), false);
                continue;
            }

            // Dual step.
            const double theta_d = dj_[static_cast<size_t>(q)] / alpha_row[static_cast<size_t>(q)];
            for (int j : touched) dj_[static_cast<size_t>(j)] -= theta_d * alpha_row[static_cast<size_t>(j)];
            dj_[static_cast<size_t>(q)] = 0.0;
            dj_[static_cast<size_t>(p)] = -theta_d;

            // Steepest-edge weights.
            double rho_norm = 0.0;
            for (double x : rho) rho_norm += x * x;
            tau = rho;
            factor_.ftran(tau);
            for (int i = 0; i < m_; ++i) {
                if (i == r) continue;
                const double ai = alpha_[static_cast<size_t>(i)];
                if (ai == 0.0) continue;
                const double ratio = ai / apiv;
                const double w = dse_[static_cast<size_t>(i)] - 2.0 * ratio * tau[static_cast<size_t>(i)] + ratio * ratio * rho_norm;
                dse_[static_cast<size_t>(i)] = std::max(w, std::max(1e-6, ratio * ratio * rho_norm));
            }
            dse_[static_cast<size_t>(r)] = std::max(1e-6, rho_norm / (apiv * apiv));

            // Primal step.
            const double step = (v - target) / apiv;
            x_[static_cast<size_t>(q)] += step;
            for (int i = 0; i < m_; ++i) x_[static_cast<size_t>(head_[static_cast<size_t>(i)])] -= step * alpha_[static_cast<size_t>(i)];
            x_[static_cast<size_t>(p)] = target;
            degenerate_run = q_ratio > 1e-12 ? 0 : degenerate_run + 1;
            ColStatus ls = increase ? ColStatus::AtLower : ColStatus::AtUpper;
            if (is_fixed(p)) ls = ColStatus::AtLower;
            pivot(q, r, ls);
            if (factor_.updates_since_factor() == 0) compute_reduced_costs(phase_two_costs(), false);
        }
    }

    static bool eligible(ColStatus s, double a, bool increase) {
        constexpr double tol = 1e-9;
        // x_p changes by -a * dx_q.
        if (increase) {
            if (s == ColStatus::AtLower) return a < -tol;
            if (s == ColStatus::AtUpper) return a > tol;
        } else {
            if (s == ColStatus::AtLower) return a > tol;
            if (s == ColStatus::AtUpper) return a < -tol;
        }
        return s == ColStatus::AtZero && std::abs(a) > tol;
    }

    LpSolution finish(LpStatus status) {
        LpSolution sol;
        sol.status = status;
        sol.iterations = iterations_;
        sol.x.assign(x_.begin(), x_.begin() + n_);
        sol.row_activity.resize(static_cast<size_t>(m_));
        for (int i = 0; i < m_; ++i) sol.row_activity[static_cast<size_t>(i)] = -x_[static_cast<size_t>(n_ + i)];
        sol.duals = y_;
        double z = 0.0;
        for (int j = 0; j < n_; ++j) z += p_.cost[static_cast<size_t>(j)] * x_[static_cast<size_t>(j)];
        sol.objective = z;
        sol.basis.head = head_;
        sol.basis.status = status_;
        return sol;
    }

    const LpProblem::Data& p_;
    LpOptions opts_;
    int n_, m_, total_;
    std::vector<double> lb_, ub_, x_;
    std::vector<ColStatus> status_;
    std::vector<int> head_, pos_;
    std::vector<double> work_, alpha_, dj_, y_;
    std::vector<double> dse_;  // dual steepest-edge weights by row position
    lp::BasisFactor factor_;
    long iterations_ = 0;
};

}  // namespace

LpSolution LpProblem::solve(const std::vector<double>& lower, const std::vector<double>& upper, const LpBasis* warm,
                            const LpOptions& opts) const {
    if (static_cast<int>(lower.size()) != data_->n || static_cast<int>(upper.size()) != data_->n)
        throw UsageError("bound vectors must match the number of structural columns");
    Simplex simplex(*data_, lower, upper, opts);
    return simplex.run(warm);
}

LpSolution LpProblem::solve(const LpOptions& opts) const { return solve(data_->lower, data_->upper, nullptr, opts); }

LpSolution solve_lp(const MilpModel& model, const LpOptions& opts) {
    model.validate();
    return LpProblem(model).solve(opts);
}

}  // namespace relaynet
