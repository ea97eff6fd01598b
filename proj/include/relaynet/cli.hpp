#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaynet/analysis.hpp"

namespace relaynet::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kValidation = 2,
    kInfeasible = 3,
    kLimit = 4,
    kUnbounded = 5,
};

int exit_code(MilpStatus s);

// Scenario generation settings used when a config names no scenario document.
struct DemandGeneration {
    int count = 30;
    double mean = 1.0;          // average vehicles per OD pair and entry step
    double east_share = 0.949;  // share of each OD pair's flow sent eastbound
    double dispersion = 0.5;
    std::vector<int> entry_steps{0, 4, 8, 12};
    int window_steps = 8;  // two days of 6h steps
    int od_limit = 0;      // keep this many random OD pairs (0 = all)
};

struct RunConfig {
    std::string base_dir;  // directory of the config file; input paths resolve against it
    std::string network_path;
    std::string commodities_path;  // optional with `demand`
    std::string scenarios_path;    // optional with `demand`
    std::string services_path;     // optional service-override document
    bool services_listed_only = false;
    std::optional<DemandGeneration> demand;

    TimeGrid grid{6.0, 20, 4, 4};
    HosPolicy hos;
    CostParams costs;
    Pattern pattern = Pattern::FluMcp;
    Consistency consistency = Consistency::Weekly;
    std::vector<int> haulers{8};
    bool fixed_outsourcing_cost = false;
    bool strengthen = true;
    OutsourcingRate outsourcing_rate = OutsourcingRate::Volume;
    SolveOptions solve;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
};

// Parses a config document. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir);
RunConfig load_config(const std::string& path);
// Effective configuration, including defaults.
nlohmann::json to_json(const RunConfig& cfg);

std::vector<int> parse_int_list(const std::string& text, const std::string& what);

// Loads every document the config names (or generates the scenarios).
InstanceSpec make_instance_spec(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& data, std::uint64_t h = 1469598103934665603ULL);
std::string hex64(std::uint64_t v);

// Reads a design document (service_id,x); services not listed get 0.
DesignSolution read_design_csv(const Instance& inst, const std::string& text);

// Entry point shared by the executable and the tests. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace relaynet::cli
