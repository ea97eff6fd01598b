#include "relaynet/mps.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "relaynet/error.hpp"

namespace relaynet {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Pads `s` so the next field starts at 1-based column `col` (at least one space).
void pad_to(std::string& line, size_t col) {
    if (line.size() + 1 < col) {
        line.append(col - 1 - line.size(), ' ');
    } else {
        line.push_back(' ');
    }
}

std::string field_line(const std::string& f1, const std::string& f2, const std::string& f3, const std::string& f4) {
    std::string line = " " + f1;
    pad_to(line, 5);
    line += f2;
    pad_to(line, 15);
    line += f3;
    if (!f4.empty()) {
        pad_to(line, 25);
        line += f4;
    }
    return line;
}

}  // namespace

std::string write_mps(const MilpModel& model, const std::string& name) {
    model.validate();
    const int n = model.num_variables();
    const int m = model.num_constraints();

    // Column-wise view of the rows, merging repeated terms.
    std::vector<std::map<int, double>> columns(static_cast<size_t>(n));
    for (int i = 0; i < m; ++i)
        for (const auto& t : model.constraint(i).terms) columns[static_cast<size_t>(t.var)][i] += t.coef;

    std::ostringstream out;
    out << "NAME          " << name << "\n";
    out << "ROWS\n";
    out << " N  " << model.objective_name << "\n";
    for (const auto& c : model.constraints()) {
        const char* s = c.sense == Sense::LessEqual ? "L" : c.sense == Sense::GreaterEqual ? "G" : "E";
        out << " " << s << "  " << c.name << "\n";
    }

    out << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (int j = 0; j < n; ++j) {
        const auto& v = model.variable(j);
        if (v.is_integral() != in_int) {
            const char* kind = v.is_integral() ? "'INTORG'" : "'INTEND'";
            out << "    MARKER" << std::to_string(marker++) << "  'MARKER'                 " << kind << "\n";
            in_int = v.is_integral();
        }
        bool wrote = false;
        if (v.objective != 0.0) {
            out << field_line("", v.name, model.objective_name, num(v.objective)) << "\n";
            wrote = true;
        }
        for (const auto& [row, coef] : columns[static_cast<size_t>(j)]) {
            if (coef == 0.0) continue;
            out << field_line("", v.name, model.constraint(row).name, num(coef)) << "\n";
            wrote = true;
        }
        if (!wrote) out << field_line("", v.name, model.objective_name, "0") << "\n";
    }
    if (in_int) out << "    MARKER" << std::to_string(marker++) << "  'MARKER'                 'INTEND'\n";

    out << "RHS\n";
    for (const auto& c : model.constraints())
        if (c.rhs != 0.0) out << field_line("", "RHS", c.name, num(c.rhs)) << "\n";

    out << "BOUNDS\n";
    for (const auto& v : model.variables()) {
        const auto bound = [&](const char* type, const std::string& value) {
            out << field_line(type, "BND", v.name, value) << "\n";
        };
        if (v.lower == v.upper) {
            bound("FX", num(v.lower));
            continue;
        }
        if (v.lower == -kInf && v.upper == kInf) {
            bound("FR", "");
            continue;
        }
        if (v.lower == -kInf) {
            bound("MI", "");
        } else if (v.lower != 0.0 || v.is_integral()) {
            bound("LO", num(v.lower));
        }
        if (v.upper != kInf) {
            bound("UP", num(v.upper));
        } else if (v.is_integral()) {
            bound("PL", "");
        }
    }
    out << "ENDATA\n";
    return out.str();
}

MilpModel read_mps(const std::string& text) {
    enum class Section { None, Rows, Columns, Rhs, Bounds, End };
    Section section = Section::None;

    std::string objective_row;
    std::vector<Constraint> rows;
    std::map<std::string, int> row_index;
    std::vector<Variable> vars;
    std::map<std::string, int> var_index;
    std::vector<std::vector<Term>> row_terms;
    bool in_int = false;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    const auto fail = [&](const std::string& what) { throw ValidationError(what, "MPS line " + std::to_string(line_no)); };
    const auto parse_num = [&](const std::string& s) {
        try {
            size_t used = 0;
            const double v = std::stod(s, &used);
            if (used != s.size()) fail("bad number '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("bad number '" + s + "'");
        }
        return 0.0;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '*') continue;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        if (line[0] != ' ' && line[0] != '\t') {
            const auto& head = tok[0];
            if (head == "NAME") section = Section::None;
            else if (head == "ROWS") section = Section::Rows;
            else if (head == "COLUMNS") section = Section::Columns;
            else if (head == "RHS") section = Section::Rhs;
            else if (head == "BOUNDS") section = Section::Bounds;
            else if (head == "ENDATA") section = Section::End;
            else if (head == "RANGES") fail("RANGES section is not supported");
            else if (head == "OBJSENSE") fail("OBJSENSE section is not supported (minimization only)");
            else fail("unknown section '" + head + "'");
            continue;
        }

        switch (section) {
            case Section::Rows: {
                if (tok.size() != 2) fail("ROWS entry needs a type and a name");
                const auto& type = tok[0];
                if (type == "N") {
                    if (objective_row.empty()) objective_row = tok[1];
                    continue;
                }
                Constraint c;
                c.name = tok[1];
                if (type == "L") c.sense = Sense::LessEqual;
                else if (type == "G") c.sense = Sense::GreaterEqual;
                else if (type == "E") c.sense = Sense::Equal;
                else fail("unknown row type '" + type + "'");
                if (!row_index.emplace(c.name, static_cast<int>(rows.size())).second) fail("duplicate row '" + c.name + "'");
                rows.push_back(std::move(c));
                row_terms.emplace_back();
                break;
            }
            case Section::Columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                    if (tok[2] == "'INTORG'") in_int = true;
                    else if (tok[2] == "'INTEND'") in_int = false;
                    else fail("unknown marker");
                    continue;
                }
                if (tok.size() != 3 && tok.size() != 5) fail("COLUMNS entry needs 3 or 5 fields");
                auto [it, fresh] = var_index.try_emplace(tok[0], static_cast<int>(vars.size()));
                if (fresh) {
                    Variable v;
                    v.name = tok[0];
                    v.type = in_int ? VarType::Integer : VarType::Continuous;
                    vars.push_back(std::move(v));
                }
                const int j = it->second;
                for (size_t p = 1; p + 1 < tok.size(); p += 2) {
                    const double value = parse_num(tok[p + 1]);
                    if (tok[p] == objective_row) {
                        vars[static_cast<size_t>(j)].objective += value;
                    } else {
                        const auto r = row_index.find(tok[p]);
                        if (r == row_index.end()) fail("unknown row '" + tok[p] + "'");
                        if (value != 0.0) row_terms[static_cast<size_t>(r->second)].push_back({j, value});
                    }
                }
                break;
            }
            case Section::Rhs: {
                // Optional set name: an odd number of tokens means the first is the set.
                const size_t start = tok.size() % 2 == 1 ? 1 : 0;
                for (size_t p = start; p + 1 < tok.size(); p += 2) {
                    if (tok[p] == objective_row) continue;
                    const auto r = row_index.find(tok[p]);
                    if (r == row_index.end()) fail("unknown row '" + tok[p] + "'");
                    rows[static_cast<size_t>(r->second)].rhs = parse_num(tok[p + 1]);
                }
                break;
            }
            case Section::Bounds: {
                if (tok.size() < 3) fail("BOUNDS entry too short");
                const auto& type = tok[0];
                const auto v = var_index.find(tok[2]);
                if (v == var_index.end()) fail("unknown column '" + tok[2] + "'");
                auto& var = vars[static_cast<size_t>(v->second)];
                const bool needs_value = type == "UP" || type == "LO" || type == "FX" || type == "LI" || type == "UI";
                if (needs_value && tok.size() < 4) fail("bound needs a value");
                const double value = needs_value ? parse_num(tok[3]) : 0.0;
                if (type == "UP") var.upper = value;
                else if (type == "LO") var.lower = value;
                else if (type == "FX") var.lower = var.upper = value;
                else if (type == "FR") { var.lower = -kInf; var.upper = kInf; }
                else if (type == "MI") var.lower = -kInf;
                else if (type == "PL") var.upper = kInf;
                else if (type == "BV") { var.type = VarType::Binary; var.lower = 0.0; var.upper = 1.0; }
                else if (type == "LI") { var.type = VarType::Integer; var.lower = value; }
                else if (type == "UI") { var.type = VarType::Integer; var.upper = value; }
                else fail("unknown bound type '" + type + "'");
                break;
            }
            case Section::End: break;
            case Section::None: fail("data outside of a section");
        }
    }
    if (section != Section::End) throw ValidationError("missing ENDATA", "MPS");

    MilpModel model;
    if (!objective_row.empty()) model.objective_name = objective_row;
    for (auto& v : vars) {
        if (v.type == VarType::Integer && v.lower == 0.0 && v.upper == 1.0) v.type = VarType::Binary;
        model.add_variable(std::move(v));
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        rows[i].terms = std::move(row_terms[i]);
        model.add_constraint(std::move(rows[i]));
    }
    model.validate();
    return model;
}

}  // namespace relaynet
