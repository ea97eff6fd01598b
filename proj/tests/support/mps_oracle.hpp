#pragma once

// Stand-alone MPS reader for tests: tokenizes by whitespace and evaluates an
// assignment against the parsed rows. Shares no code with the library parser.

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct MpsDoc {
    std::string objective;
    std::map<std::string, char> row_type;  // N, L, G, E
    std::map<std::string, std::map<std::string, double>> coef;  // row -> column -> value
    std::map<std::string, double> rhs;
    std::map<std::string, double> lower, upper;
    std::map<std::string, bool> integer;
    std::vector<std::string> columns;
};

inline MpsDoc parse_mps(const std::string& text) {
    MpsDoc d;
    std::istringstream in(text);
    std::string line, section;
    bool in_int = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        std::vector<std::string> f;
        for (std::string t; ls >> t;) f.push_back(t);
        if (f.empty()) continue;
        if (line[0] != ' ' && line[0] != '\t') {
            section = f[0];
            continue;
        }
        if (section == "ROWS") {
            d.row_type[f[1]] = f[0][0];
            if (f[0] == "N" && d.objective.empty()) d.objective = f[1];
        } else if (section == "COLUMNS") {
            if (f.size() >= 3 && f[1] == "'MARKER'") {
                in_int = f[2] == "'INTORG'";
                continue;
            }
            if (d.integer.find(f[0]) == d.integer.end()) {
                d.columns.push_back(f[0]);
                d.integer[f[0]] = in_int;
                d.lower[f[0]] = 0.0;
                d.upper[f[0]] = std::numeric_limits<double>::infinity();
            }
            for (size_t i = 1; i + 1 < f.size(); i += 2) d.coef[f[i]][f[0]] += std::stod(f[i + 1]);
        } else if (section == "RHS") {
            for (size_t i = 1; i + 1 < f.size(); i += 2) d.rhs[f[i]] = std::stod(f[i + 1]);
        } else if (section == "BOUNDS") {
            const std::string& type = f[0];
            const std::string& col = f[2];
            const double v = f.size() > 3 ? std::stod(f[3]) : 0.0;
            if (type == "UP") d.upper[col] = v;
            else if (type == "LO") d.lower[col] = v;
            else if (type == "FX") d.lower[col] = d.upper[col] = v;
            else if (type == "BV") d.lower[col] = 0.0, d.upper[col] = 1.0, d.integer[col] = true;
            else if (type == "LI") d.lower[col] = v, d.integer[col] = true;
            else if (type == "UI") d.upper[col] = v, d.integer[col] = true;
            else if (type == "MI") d.lower[col] = -std::numeric_limits<double>::infinity();
            else if (type == "PL") d.upper[col] = std::numeric_limits<double>::infinity();
            else if (type == "FR") {
                d.lower[col] = -std::numeric_limits<double>::infinity();
                d.upper[col] = std::numeric_limits<double>::infinity();
            } else throw std::runtime_error("unsupported bound type " + type);
        } else if (section == "RANGES") {
            throw std::runtime_error("RANGES not supported");
        }
    }
    return d;
}

struct MpsEvaluation {
    double objective = 0.0;
    double max_violation = 0.0;  // rows, bounds and integrality
};

inline MpsEvaluation evaluate(const MpsDoc& d, const std::map<std::string, double>& x) {
    auto val = [&](const std::string& c) {
        const auto it = x.find(c);
        return it == x.end() ? 0.0 : it->second;
    };
    MpsEvaluation e;
    for (const auto& [row, type] : d.row_type) {
        double a = 0.0;
        const auto it = d.coef.find(row);
        if (it != d.coef.end())
            for (const auto& [col, v] : it->second) a += v * val(col);
        if (type == 'N') {
            if (row == d.objective) e.objective = a;
            continue;
        }
        const auto r = d.rhs.find(row);
        const double b = r == d.rhs.end() ? 0.0 : r->second;
        double viol = 0.0;
        if (type == 'L') viol = a - b;
        else if (type == 'G') viol = b - a;
        else viol = std::abs(a - b);
        e.max_violation = std::max(e.max_violation, viol);
    }
    for (const auto& c : d.columns) {
        const double v = val(c);
        e.max_violation = std::max({e.max_violation, d.lower.at(c) - v, v - d.upper.at(c)});
        if (d.integer.at(c)) e.max_violation = std::max(e.max_violation, std::abs(v - std::round(v)));
    }
    return e;
}

}  // namespace oracle
