#include "relaynet/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "relaynet/error.hpp"

namespace relaynet::csv {

int Table::column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

int Table::require(const std::string& name, const std::string& document) const {
    const int c = column(name);
    if (c < 0) throw ValidationError("missing column '" + name + "'", document);
    return c;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(trim(field));
    return out;
}

}  // namespace

Table parse(const std::string& text) {
    Table table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            fields.resize(table.header.size());
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    const auto parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file", path);
    out << text;
}

int to_int(const std::string& field, const std::string& where) {
    int v = 0;
    const auto* end = field.data() + field.size();
    const auto [p, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || p != end) throw ValidationError("expected an integer, got '" + field + "'", where);
    return v;
}

double to_double(const std::string& field, const std::string& where) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    const auto [p, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v))
        throw ValidationError("expected a number, got '" + field + "'", where);
    return v;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, p);
}

}  // namespace relaynet::csv
