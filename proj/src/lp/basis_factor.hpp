#pragma once

#include <vector>

namespace relaynet::lp {

// Column-compressed matrix over structural and logical columns.
struct SparseColumns {
    int num_rows = 0;
    std::vector<int> start;  // size num_cols + 1
    std::vector<int> index;
    std::vector<double> value;

    int num_cols() const { return static_cast<int>(start.size()) - 1; }
};

// Product-form inverse of the basis. Factorization orders row singletons
// first, then a partially pivoted nucleus, then column singletons, which keeps
// the eta file close to the nonzero count of the basis for network matrices.
// Simplex pivots append one eta each.
class BasisFactor {
public:
    // Factors the basis given by `head` (one column per row position). On
    // return `head[r]` is the column pivoted in row r. Columns that could not
    // be pivoted are replaced by the logical column of the uncovered row; the
    // displaced columns are returned.
    std::vector<int> factor(const SparseColumns& cols, int num_structural, std::vector<int>& head);

    void ftran(std::vector<double>& v) const;
    void btran(std::vector<double>& v) const;
    // Records the pivot of an entering column whose ftran image is `alpha` in row r.
    void update(const std::vector<double>& alpha, int r);

    int updates_since_factor() const { return updates_; }
    long eta_nonzeros() const { return static_cast<long>(idx_.size()); }

private:
    void push_eta(const std::vector<double>& alpha, int r);
    // Sparse work vector helpers used while factoring.
    void sparse_ftran(std::vector<double>& w, std::vector<int>& nz, std::vector<char>& mark) const;
    void push_sparse_eta(std::vector<double>& w, std::vector<int>& nz, std::vector<char>& mark, int r);

    std::vector<int> eta_of_row_;  // during factor: eta index pivoting each row, or -1

    std::vector<int> eta_row_;
    std::vector<double> eta_pivot_;  // 1 / alpha_r
    std::vector<int> eta_start_{0};
    std::vector<int> idx_;
    std::vector<double> val_;        // -alpha_i / alpha_r
    int updates_ = 0;
};

}  // namespace relaynet::lp
