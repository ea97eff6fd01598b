#pragma once

#include <string>
#include <vector>

namespace relaynet::csv {

// Minimal RFC-4180 reader: comma separated, optional double quotes, first
// row is the header. Blank lines and lines starting with '#' are skipped.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name, or -1.
    int column(const std::string& name) const;
    // Like column() but throws ValidationError naming the document.
    int require(const std::string& name, const std::string& document) const;
};

Table parse(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

int to_int(const std::string& field, const std::string& where);
double to_double(const std::string& field, const std::string& where);

// Shortest round-trip decimal form, stable across runs.
std::string format_number(double value);

}  // namespace relaynet::csv
