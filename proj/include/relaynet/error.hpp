#pragma once

#include <stdexcept>
#include <string>

namespace relaynet {

// Bad input data: malformed documents, out-of-range fields, inconsistent
// instances. `where` names the offending row or field when known.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what, std::string where = {})
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const { return where_; }

private:
    std::string where_;
};

// API misuse (wrong arc kind, unknown id, empty argument).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class UnreachableError : public std::runtime_error {
public:
    UnreachableError(int from, int to)
        : std::runtime_error("hub " + std::to_string(to) + " is unreachable from hub " + std::to_string(from)),
          from_(from), to_(to) {}

    int from() const { return from_; }
    int to() const { return to_; }

private:
    int from_;
    int to_;
};

// Numerical breakdown inside the LP engine that refactorization could not repair.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace relaynet
