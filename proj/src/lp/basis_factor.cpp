#include "lp/basis_factor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace relaynet::lp {

namespace {
constexpr double kSingularTol = 1e-11;
constexpr double kDropTol = 1e-14;
}  // namespace

void BasisFactor::push_eta(const std::vector<double>& alpha, int r) {
    const double ar = alpha[static_cast<size_t>(r)];
    bool identity = ar == 1.0;
    for (size_t i = 0; i < alpha.size(); ++i) {
        if (static_cast<int>(i) == r) continue;
        const double a = alpha[i];
        if (std::abs(a) <= kDropTol) continue;
        idx_.push_back(static_cast<int>(i));
        val_.push_back(-a / ar);
        identity = false;
    }
    if (identity) return;
    eta_row_.push_back(r);
    eta_pivot_.push_back(1.0 / ar);
    eta_start_.push_back(static_cast<int>(idx_.size()));
}

void BasisFactor::ftran(std::vector<double>& v) const {
    const size_t n = eta_row_.size();
    for (size_t e = 0; e < n; ++e) {
        const int r = eta_row_[e];
        const double vr = v[static_cast<size_t>(r)];
        if (vr == 0.0) continue;
        v[static_cast<size_t>(r)] = vr * eta_pivot_[e];
        for (int p = eta_start_[e]; p < eta_start_[e + 1]; ++p) v[static_cast<size_t>(idx_[static_cast<size_t>(p)])] += val_[static_cast<size_t>(p)] * vr;
    }
}

void BasisFactor::btran(std::vector<double>& v) const {
    for (size_t e = eta_row_.size(); e-- > 0;) {
        const int r = eta_row_[e];
        double s = v[static_cast<size_t>(r)] * eta_pivot_[e];
        for (int p = eta_start_[e]; p < eta_start_[e + 1]; ++p) s += val_[static_cast<size_t>(p)] * v[static_cast<size_t>(idx_[static_cast<size_t>(p)])];
        v[static_cast<size_t>(r)] = s;
    }
}

void BasisFactor::sparse_ftran(std::vector<double>& w, std::vector<int>& nz, std::vector<char>& mark) const {
    // Apply only the etas whose pivot row is nonzero, in file order.
    std::vector<int> heap;
    std::vector<char>& queued = mark;  // mark == 2: row's eta already queued
    const auto push = [&](int i) {
        const int e = eta_of_row_[static_cast<size_t>(i)];
        if (e < 0 || queued[static_cast<size_t>(i)] == 2) return;
        queued[static_cast<size_t>(i)] = 2;
        heap.push_back(e);
        std::push_heap(heap.begin(), heap.end(), std::greater<>());
    };
    for (size_t q = 0; q < nz.size(); ++q) push(nz[q]);
    while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), std::greater<>());
        const int e = heap.back();
        heap.pop_back();
        const int r = eta_row_[static_cast<size_t>(e)];
        const double vr = w[static_cast<size_t>(r)];
        if (vr == 0.0) continue;
        w[static_cast<size_t>(r)] = vr * eta_pivot_[static_cast<size_t>(e)];
        for (int p = eta_start_[static_cast<size_t>(e)]; p < eta_start_[static_cast<size_t>(e) + 1]; ++p) {
            const int i = idx_[static_cast<size_t>(p)];
            if (!mark[static_cast<size_t>(i)]) {
                mark[static_cast<size_t>(i)] = 1;
                nz.push_back(i);
            }
            w[static_cast<size_t>(i)] += val_[static_cast<size_t>(p)] * vr;
            const int ei = eta_of_row_[static_cast<size_t>(i)];
            if (ei > e) push(i);
        }
    }
    for (int i : nz) mark[static_cast<size_t>(i)] = 1;
}

void BasisFactor::push_sparse_eta(std::vector<double>& w, std::vector<int>& nz, std::vector<char>& mark, int r) {
    std::sort(nz.begin(), nz.end());
    const double ar = w[static_cast<size_t>(r)];
    bool identity = ar == 1.0;
    for (int i : nz) {
        if (i == r) continue;
        const double a = w[static_cast<size_t>(i)];
        if (std::abs(a) <= kDropTol) continue;
        idx_.push_back(i);
        val_.push_back(-a / ar);
        identity = false;
    }
    for (int i : nz) {
        w[static_cast<size_t>(i)] = 0.0;
        mark[static_cast<size_t>(i)] = 0;
    }
    nz.clear();
    if (identity) return;
    eta_of_row_[static_cast<size_t>(r)] = static_cast<int>(eta_row_.size());
    eta_row_.push_back(r);
    eta_pivot_.push_back(1.0 / ar);
    eta_start_.push_back(static_cast<int>(idx_.size()));
}

void BasisFactor::update(const std::vector<double>& alpha, int r) {
    push_eta(alpha, r);
    ++updates_;
}

std::vector<int> BasisFactor::factor(const SparseColumns& cols, int num_structural, std::vector<int>& head) {
    const int m = cols.num_rows;
    eta_row_.clear();
    eta_pivot_.clear();
    eta_start_.assign(1, 0);
    idx_.clear();
    val_.clear();
    updates_ = 0;

    // Basis columns by position k; row-wise incidence (CSR) for singleton search.
    const int nb = static_cast<int>(head.size());
    std::vector<int> col_count(static_cast<size_t>(nb), 0);
    std::vector<int> row_count(static_cast<size_t>(m), 0);
    std::vector<int> row_start(static_cast<size_t>(m) + 1, 0);
    for (int k = 0; k < nb; ++k) {
        const int j = head[static_cast<size_t>(k)];
        for (int p = cols.start[static_cast<size_t>(j)]; p < cols.start[static_cast<size_t>(j) + 1]; ++p) {
            if (cols.value[static_cast<size_t>(p)] == 0.0) continue;
            ++row_start[static_cast<size_t>(cols.index[static_cast<size_t>(p)]) + 1];
            ++col_count[static_cast<size_t>(k)];
        }
    }
    for (int i = 0; i < m; ++i) {
        row_count[static_cast<size_t>(i)] = row_start[static_cast<size_t>(i) + 1];
        row_start[static_cast<size_t>(i) + 1] += row_start[static_cast<size_t>(i)];
    }
    std::vector<int> row_k(static_cast<size_t>(row_start[static_cast<size_t>(m)]));
    {
        std::vector<int> fill(row_start.begin(), row_start.end() - 1);
        for (int k = 0; k < nb; ++k) {
            const int j = head[static_cast<size_t>(k)];
            for (int p = cols.start[static_cast<size_t>(j)]; p < cols.start[static_cast<size_t>(j) + 1]; ++p) {
                if (cols.value[static_cast<size_t>(p)] == 0.0) continue;
                row_k[static_cast<size_t>(fill[static_cast<size_t>(cols.index[static_cast<size_t>(p)])]++)] = k;
            }
        }
    }
    const auto row_cols = [&](int i, auto&& fn) {
        for (int p = row_start[static_cast<size_t>(i)]; p < row_start[static_cast<size_t>(i) + 1]; ++p) fn(row_k[static_cast<size_t>(p)]);
    };

    std::vector<char> row_active(static_cast<size_t>(m), 1);
    std::vector<char> col_active(static_cast<size_t>(nb), 1);
    std::vector<std::pair<int, int>> front;  // (row, k)
    std::vector<std::pair<int, int>> back;

    const auto col_entries = [&](int k, auto&& fn) {
        const int j = head[static_cast<size_t>(k)];
        for (int p = cols.start[static_cast<size_t>(j)]; p < cols.start[static_cast<size_t>(j) + 1]; ++p)
            if (cols.value[static_cast<size_t>(p)] != 0.0) fn(cols.index[static_cast<size_t>(p)]);
    };

    std::vector<int> row_queue;
    std::vector<int> col_queue;
    size_t row_head = 0, col_head = 0;
    for (int i = 0; i < m; ++i)
        if (row_count[static_cast<size_t>(i)] == 1) row_queue.push_back(i);
    for (int k = 0; k < nb; ++k)
        if (col_count[static_cast<size_t>(k)] == 1) col_queue.push_back(k);

    const auto eliminate = [&](int r, int k) {
        row_active[static_cast<size_t>(r)] = 0;
        col_active[static_cast<size_t>(k)] = 0;
        col_entries(k, [&](int i) {
            if (!row_active[static_cast<size_t>(i)]) return;
            if (--row_count[static_cast<size_t>(i)] == 1) row_queue.push_back(i);
        });
        row_cols(r, [&](int k2) {
            if (!col_active[static_cast<size_t>(k2)]) return;
            if (--col_count[static_cast<size_t>(k2)] == 1) col_queue.push_back(k2);
        });
    };

    while (row_head < row_queue.size() || col_head < col_queue.size()) {
        if (row_head < row_queue.size()) {
            const int r = row_queue[row_head++];
            if (!row_active[static_cast<size_t>(r)] || row_count[static_cast<size_t>(r)] != 1) continue;
            int k = -1;
            row_cols(r, [&](int k2) {
                if (col_active[static_cast<size_t>(k2)]) k = k2;
            });
            front.emplace_back(r, k);
            eliminate(r, k);
        } else {
            const int k = col_queue[col_head++];
            if (!col_active[static_cast<size_t>(k)] || col_count[static_cast<size_t>(k)] != 1) continue;
            int r = -1;
            col_entries(k, [&](int i) {
                if (row_active[static_cast<size_t>(i)]) r = i;
            });
            back.emplace_back(r, k);
            eliminate(r, k);
        }
    }

    std::vector<int> new_head(static_cast<size_t>(m), -1);
    std::vector<int> displaced;
    std::vector<double> work(static_cast<size_t>(m), 0.0);
    std::vector<int> nz;
    std::vector<char> mark(static_cast<size_t>(m), 0);
    eta_of_row_.assign(static_cast<size_t>(m), -1);
    const auto load = [&](int k) {
        const int j = head[static_cast<size_t>(k)];
        for (int p = cols.start[static_cast<size_t>(j)]; p < cols.start[static_cast<size_t>(j) + 1]; ++p) {
            const int i = cols.index[static_cast<size_t>(p)];
            if (!mark[static_cast<size_t>(i)]) {
                mark[static_cast<size_t>(i)] = 1;
                nz.push_back(i);
            }
            work[static_cast<size_t>(i)] += cols.value[static_cast<size_t>(p)];
        }
        sparse_ftran(work, nz, mark);
    };
    const auto clear = [&] {
        for (int i : nz) {
            work[static_cast<size_t>(i)] = 0.0;
            mark[static_cast<size_t>(i)] = 0;
        }
        nz.clear();
    };
    std::vector<char> row_done(static_cast<size_t>(m), 0);
    const auto place = [&](int r, int k) {
        if (std::abs(work[static_cast<size_t>(r)]) <= kSingularTol) {
            displaced.push_back(head[static_cast<size_t>(k)]);
            clear();
            return;
        }
        push_sparse_eta(work, nz, mark, r);
        row_done[static_cast<size_t>(r)] = 1;
        new_head[static_cast<size_t>(r)] = head[static_cast<size_t>(k)];
    };

    for (const auto& [r, k] : front) {
        load(k);
        place(r, k);
    }

    // Nucleus: sparsest columns first, largest available pivot.
    std::vector<int> nucleus;
    for (int k = 0; k < nb; ++k)
        if (col_active[static_cast<size_t>(k)]) nucleus.push_back(k);
    std::stable_sort(nucleus.begin(), nucleus.end(),
                     [&](int a, int b) { return col_count[static_cast<size_t>(a)] < col_count[static_cast<size_t>(b)]; });
    for (int k : nucleus) {
        load(k);
        int best = -1;
        double best_abs = kSingularTol;
        for (int i : nz) {
            if (!row_active[static_cast<size_t>(i)] || row_done[static_cast<size_t>(i)]) continue;
            const double a = std::abs(work[static_cast<size_t>(i)]);
            if (a > best_abs || (a == best_abs && best >= 0 && i < best)) {
                best_abs = a;
                best = i;
            }
        }
        if (best < 0) {
            displaced.push_back(head[static_cast<size_t>(k)]);
            clear();
            continue;
        }
        push_sparse_eta(work, nz, mark, best);
        row_done[static_cast<size_t>(best)] = 1;
        new_head[static_cast<size_t>(best)] = head[static_cast<size_t>(k)];
    }

    for (auto it = back.rbegin(); it != back.rend(); ++it) {
        load(it->second);
        place(it->first, it->second);
    }

    // Uncovered rows take their logical column (an identity eta, nothing to store).
    for (int i = 0; i < m; ++i) {
        if (new_head[static_cast<size_t>(i)] >= 0) continue;
        const int logical = num_structural + i;
        if (std::find(displaced.begin(), displaced.end(), logical) != displaced.end())
            displaced.erase(std::find(displaced.begin(), displaced.end(), logical));
        // A logical sitting in another row of the old head would now be duplicated.
        new_head[static_cast<size_t>(i)] = logical;
    }
    // Columns that ended up basic in no row are displaced as well.
    std::vector<char> in_new(static_cast<size_t>(cols.num_cols()), 0);
    for (int j : new_head) in_new[static_cast<size_t>(j)] = 1;
    std::vector<int> out;
    for (int j : head)
        if (!in_new[static_cast<size_t>(j)]) out.push_back(j);
    head = std::move(new_head);
    return out;
}

}  // namespace relaynet::lp
