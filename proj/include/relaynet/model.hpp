#pragma once

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace relaynet {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Integer, Binary };
enum class Sense { LessEqual, Equal, GreaterEqual };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    VarType type = VarType::Continuous;
    double objective = 0.0;

    bool is_integral() const { return type != VarType::Continuous; }
};

struct Term {
    int var = 0;
    double coef = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<Term> terms;
    Sense sense = Sense::LessEqual;
    double rhs = 0.0;
};

// Linear minimization model. Names are mandatory and unique.
class MilpModel {
public:
    int add_variable(Variable v);
    int add_constraint(Constraint c);

    int num_variables() const { return static_cast<int>(vars_.size()); }
    int num_constraints() const { return static_cast<int>(rows_.size()); }
    int num_integer_variables() const;

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return rows_; }
    const Variable& variable(int j) const { return vars_.at(static_cast<size_t>(j)); }
    Variable& variable(int j) { return vars_.at(static_cast<size_t>(j)); }
    const Constraint& constraint(int i) const { return rows_.at(static_cast<size_t>(i)); }

    int find_variable(const std::string& name) const;  // -1 when absent
    int find_constraint(const std::string& name) const;

    std::string objective_name = "COST";

    double objective_value(const std::vector<double>& x) const;
    double activity(int row, const std::vector<double>& x) const;
    // Amount by which row `row` is violated at x (0 when satisfied).
    double violation(int row, const std::vector<double>& x) const;

    // Throws ValidationError on unnamed or duplicate names, bad references,
    // inverted bounds or non-finite coefficients.
    void validate() const;

private:
    std::vector<Variable> vars_;
    std::vector<Constraint> rows_;
    std::unordered_map<std::string, int> var_by_name_;
    std::unordered_map<std::string, int> row_by_name_;
};

}  // namespace relaynet
