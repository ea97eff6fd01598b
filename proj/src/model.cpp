#include "relaynet/model.hpp"

#include <cmath>

#include "relaynet/error.hpp"

namespace relaynet {

int MilpModel::add_variable(Variable v) {
    if (v.type == VarType::Binary) {
        v.lower = std::max(v.lower, 0.0);
        v.upper = std::min(v.upper, 1.0);
    }
    const int id = num_variables();
    if (!v.name.empty() && !var_by_name_.emplace(v.name, id).second)
        throw ValidationError("duplicate variable name '" + v.name + "'", "model");
    vars_.push_back(std::move(v));
    return id;
}

int MilpModel::add_constraint(Constraint c) {
    const int id = num_constraints();
    if (!c.name.empty() && !row_by_name_.emplace(c.name, id).second)
        throw ValidationError("duplicate constraint name '" + c.name + "'", "model");
    rows_.push_back(std::move(c));
    return id;
}

int MilpModel::num_integer_variables() const {
    int n = 0;
    for (const auto& v : vars_) n += v.is_integral() ? 1 : 0;
    return n;
}

int MilpModel::find_variable(const std::string& name) const {
    const auto it = var_by_name_.find(name);
    return it == var_by_name_.end() ? -1 : it->second;
}

int MilpModel::find_constraint(const std::string& name) const {
    const auto it = row_by_name_.find(name);
    return it == row_by_name_.end() ? -1 : it->second;
}

double MilpModel::objective_value(const std::vector<double>& x) const {
    double z = 0.0;
    for (size_t j = 0; j < vars_.size(); ++j)
        if (vars_[j].objective != 0.0) z += vars_[j].objective * x.at(j);
    return z;
}

double MilpModel::activity(int row, const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& t : constraint(row).terms) a += t.coef * x.at(static_cast<size_t>(t.var));
    return a;
}

double MilpModel::violation(int row, const std::vector<double>& x) const {
    const auto& c = constraint(row);
    const double a = activity(row, x);
    switch (c.sense) {
        case Sense::LessEqual: return std::max(0.0, a - c.rhs);
        case Sense::GreaterEqual: return std::max(0.0, c.rhs - a);
        case Sense::Equal: return std::abs(a - c.rhs);
    }
    return 0.0;
}

void MilpModel::validate() const {
    for (size_t j = 0; j < vars_.size(); ++j) {
        const auto& v = vars_[j];
        if (v.name.empty()) throw ValidationError("variable " + std::to_string(j) + " has no name", "model");
        if (v.lower > v.upper) throw ValidationError("inverted bounds", v.name);
        if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInf || v.upper == -kInf)
            throw ValidationError("invalid bounds", v.name);
        if (!std::isfinite(v.objective)) throw ValidationError("non-finite objective coefficient", v.name);
    }
    for (size_t i = 0; i < rows_.size(); ++i) {
        const auto& c = rows_[i];
        if (c.name.empty()) throw ValidationError("constraint " + std::to_string(i) + " has no name", "model");
        if (!std::isfinite(c.rhs)) throw ValidationError("non-finite rhs", c.name);
        for (const auto& t : c.terms) {
            if (t.var < 0 || t.var >= num_variables()) throw ValidationError("reference to undeclared variable", c.name);
            if (!std::isfinite(t.coef)) throw ValidationError("non-finite coefficient", c.name);
        }
    }
}

}  // namespace relaynet
