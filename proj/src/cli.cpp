#include "relaynet/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "relaynet/csv.hpp"
#include "relaynet/error.hpp"
#include "relaynet/mps.hpp"
#include "relaynet/report.hpp"
#include "relaynet/testbed.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace relaynet::cli {

int exit_code(MilpStatus s) {
    switch (s) {
        case MilpStatus::Optimal: return kOk;
        case MilpStatus::Infeasible: return kInfeasible;
        case MilpStatus::Unbounded: return kUnbounded;
        case MilpStatus::Feasible:
        case MilpStatus::Limit: return kLimit;
    }
    return kError;
}

std::uint64_t fnv1a(const std::string& data, std::uint64_t h) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<size_t>(i)] = digits[v & 0xF];
    return s;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(csv::to_int(item, what));
    if (out.empty()) throw ValidationError("empty list", what);
    return out;
}

namespace {

// ---- config parsing ----

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError("expected an object", where);
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ValidationError("unknown key '" + k + "'", where);
}

template <class T>
void read_field(const json& obj, const char* key, T& into, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        into = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("bad value for '" + std::string(key) + "'", where);
    }
}

std::string resolve(const std::string& base, const std::string& path) {
    if (path.empty() || fs::path(path).is_absolute() || base.empty()) return path;
    return (fs::path(base) / path).lexically_normal().string();
}

const char* rate_name(OutsourcingRate r) { return r == OutsourcingRate::Count ? "count" : "volume"; }
const char* branching_name(Branching b) { return b == Branching::PseudoCost ? "pseudo-cost" : "most-fractional"; }
const char* driving_name(DrivingTime d) { return d == DrivingTime::Mileage ? "mileage" : "grid"; }

}  // namespace

RunConfig parse_config(const json& doc, const std::string& base_dir) {
    check_keys(doc,
               {"network", "commodities", "scenarios", "services", "services_listed_only", "demand", "grid", "hos", "costs",
                "pattern", "consistency", "haulers", "fixed_outsourcing_cost", "strengthen", "outsourcing_rate", "solver",
                "output", "seed"},
               "config");
    RunConfig c;
    c.base_dir = base_dir;
    std::string s;
    read_field(doc, "network", c.network_path, "config");
    read_field(doc, "commodities", c.commodities_path, "config");
    read_field(doc, "scenarios", c.scenarios_path, "config");
    read_field(doc, "services", c.services_path, "config");
    read_field(doc, "services_listed_only", c.services_listed_only, "config");
    read_field(doc, "fixed_outsourcing_cost", c.fixed_outsourcing_cost, "config");
    read_field(doc, "strengthen", c.strengthen, "config");
    read_field(doc, "output", c.output_dir, "config");
    read_field(doc, "seed", c.seed, "config");
    if (doc.contains("pattern")) {
        read_field(doc, "pattern", s, "config");
        c.pattern = parse_pattern(s);
    }
    if (doc.contains("consistency")) {
        read_field(doc, "consistency", s, "config");
        c.consistency = parse_consistency(s);
    }
    if (doc.contains("haulers")) {
        if (doc["haulers"].is_string()) {
            read_field(doc, "haulers", s, "config");
            c.haulers = parse_int_list(s, "config.haulers");
        } else {
            read_field(doc, "haulers", c.haulers, "config");
        }
    }
    if (doc.contains("outsourcing_rate")) {
        read_field(doc, "outsourcing_rate", s, "config");
        if (s == "volume") c.outsourcing_rate = OutsourcingRate::Volume;
        else if (s == "count") c.outsourcing_rate = OutsourcingRate::Count;
        else throw ValidationError("expected volume or count", "config.outsourcing_rate");
    }
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        check_keys(g, {"step_hours", "num_steps", "num_cycles", "cycle_steps"}, "config.grid");
        read_field(g, "step_hours", c.grid.step_hours, "config.grid");
        read_field(g, "num_steps", c.grid.num_steps, "config.grid");
        read_field(g, "num_cycles", c.grid.num_cycles, "config.grid");
        read_field(g, "cycle_steps", c.grid.cycle_steps, "config.grid");
    }
    if (doc.contains("hos")) {
        const auto& h = doc["hos"];
        check_keys(h, {"max_on_duty_hours", "max_driving_hours", "driving_time"}, "config.hos");
        read_field(h, "max_on_duty_hours", c.hos.max_on_duty_hours, "config.hos");
        read_field(h, "max_driving_hours", c.hos.max_driving_hours, "config.hos");
        if (h.contains("driving_time")) {
            read_field(h, "driving_time", s, "config.hos");
            if (s == "grid") c.hos.driving_time = DrivingTime::Grid;
            else if (s == "mileage") c.hos.driving_time = DrivingTime::Mileage;
            else throw ValidationError("expected grid or mileage", "config.hos.driving_time");
        }
    }
    if (doc.contains("costs")) {
        const auto& k = doc["costs"];
        check_keys(k,
                   {"driver_hourly", "tractor_hourly", "hauler_hourly", "outsource_per_vehicle_mile", "consistency_discount",
                    "avg_mph", "capacity"},
                   "config.costs");
        read_field(k, "driver_hourly", c.costs.driver_hourly, "config.costs");
        read_field(k, "tractor_hourly", c.costs.tractor_hourly, "config.costs");
        read_field(k, "outsource_per_vehicle_mile", c.costs.outsource_per_vehicle_mile, "config.costs");
        read_field(k, "consistency_discount", c.costs.consistency_discount, "config.costs");
        read_field(k, "avg_mph", c.costs.avg_mph, "config.costs");
        read_field(k, "capacity", c.costs.default_capacity, "config.costs");
        if (k.contains("hauler_hourly")) {
            const auto& hh = k["hauler_hourly"];
            if (!hh.is_object()) throw ValidationError("expected an object keyed by size", "config.costs.hauler_hourly");
            c.costs.hauler_hourly_by_size.clear();
            for (const auto& [size, rate] : hh.items()) {
                if (!rate.is_number()) throw ValidationError("rate must be a number", "config.costs.hauler_hourly." + size);
                c.costs.hauler_hourly_by_size[csv::to_int(size, "config.costs.hauler_hourly")] = rate.get<double>();
            }
        }
    }
    if (doc.contains("solver")) {
        const auto& v = doc["solver"];
        check_keys(v, {"rel_gap", "time_limit", "node_limit", "threads", "branching", "node_batch", "dive_interval"},
                   "config.solver");
        read_field(v, "rel_gap", c.solve.rel_gap_tol, "config.solver");
        read_field(v, "time_limit", c.solve.time_limit_s, "config.solver");
        read_field(v, "node_limit", c.solve.node_limit, "config.solver");
        read_field(v, "threads", c.solve.threads, "config.solver");
        read_field(v, "node_batch", c.solve.node_batch, "config.solver");
        read_field(v, "dive_interval", c.solve.dive_interval, "config.solver");
        if (v.contains("branching")) {
            read_field(v, "branching", s, "config.solver");
            if (s == "most-fractional") c.solve.branching = Branching::MostFractional;
            else if (s == "pseudo-cost") c.solve.branching = Branching::PseudoCost;
            else throw ValidationError("expected most-fractional or pseudo-cost", "config.solver.branching");
        }
    }
    if (doc.contains("demand")) {
        const auto& d = doc["demand"];
        check_keys(d, {"count", "mean", "east_share", "dispersion", "entry_steps", "window_steps", "od_limit"}, "config.demand");
        DemandGeneration g;
        read_field(d, "count", g.count, "config.demand");
        read_field(d, "mean", g.mean, "config.demand");
        read_field(d, "east_share", g.east_share, "config.demand");
        read_field(d, "dispersion", g.dispersion, "config.demand");
        read_field(d, "entry_steps", g.entry_steps, "config.demand");
        read_field(d, "window_steps", g.window_steps, "config.demand");
        read_field(d, "od_limit", g.od_limit, "config.demand");
        c.demand = g;
    }
    if (c.network_path.empty()) throw ValidationError("missing 'network'", "config");
    c.solve.seed = c.seed;
    return c;
}

RunConfig load_config(const std::string& path) {
    const auto text = csv::read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what(), path);
    }
    return parse_config(doc, fs::path(path).parent_path().string());
}

json to_json(const RunConfig& c) {
    json hh = json::object();
    for (const auto& [size, rate] : c.costs.hauler_hourly_by_size) hh[std::to_string(size)] = rate;
    json j = {
        {"network", c.network_path},
        {"grid",
         {{"step_hours", c.grid.step_hours},
          {"num_steps", c.grid.num_steps},
          {"num_cycles", c.grid.num_cycles},
          {"cycle_steps", c.grid.cycle_steps}}},
        {"hos",
         {{"max_on_duty_hours", c.hos.max_on_duty_hours},
          {"max_driving_hours", c.hos.max_driving_hours},
          {"driving_time", driving_name(c.hos.driving_time)}}},
        {"costs",
         {{"driver_hourly", c.costs.driver_hourly},
          {"tractor_hourly", c.costs.tractor_hourly},
          {"hauler_hourly", hh},
          {"outsource_per_vehicle_mile", c.costs.outsource_per_vehicle_mile},
          {"consistency_discount", c.costs.consistency_discount},
          {"avg_mph", c.costs.avg_mph},
          {"capacity", c.costs.default_capacity}}},
        {"pattern", to_string(c.pattern)},
        {"consistency", to_string(c.consistency)},
        {"haulers", c.haulers},
        {"fixed_outsourcing_cost", c.fixed_outsourcing_cost},
        {"strengthen", c.strengthen},
        {"outsourcing_rate", rate_name(c.outsourcing_rate)},
        {"solver",
         {{"rel_gap", c.solve.rel_gap_tol},
          {"time_limit", c.solve.time_limit_s},
          {"node_limit", c.solve.node_limit},
          {"threads", c.solve.threads},
          {"node_batch", c.solve.node_batch},
          {"dive_interval", c.solve.dive_interval},
          {"branching", branching_name(c.solve.branching)}}},
        {"output", c.output_dir},
        {"seed", c.seed},
    };
    if (!c.commodities_path.empty()) j["commodities"] = c.commodities_path;
    if (!c.scenarios_path.empty()) j["scenarios"] = c.scenarios_path;
    if (!c.services_path.empty()) {
        j["services"] = c.services_path;
        j["services_listed_only"] = c.services_listed_only;
    }
    if (c.demand) {
        const auto& g = *c.demand;
        j["demand"] = {{"count", g.count},           {"mean", g.mean},
                       {"east_share", g.east_share}, {"dispersion", g.dispersion},
                       {"entry_steps", g.entry_steps}, {"window_steps", g.window_steps},
                       {"od_limit", g.od_limit}};
    }
    return j;
}

namespace {

PhysicalNetwork read_network(const std::string& path) {
    json doc;
    try {
        doc = json::parse(csv::read_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what(), path);
    }
    return load_physical_network(doc);
}

// Commodities for every OD pair and entry step, optionally thinned to a random
// subset of OD pairs, plus scenarios drawn from the east-biased demand law.
std::pair<std::vector<Commodity>, ScenarioSet> generate_demand(const PhysicalNetwork& pnet, const TimeGrid& grid,
                                                               const CostParams& costs, const DemandGeneration& g,
                                                               std::uint64_t seed) {
    auto all = make_commodities(pnet, g.entry_steps, g.window_steps, grid.num_steps, costs.outsource_per_vehicle_mile);
    if (g.od_limit > 0) {
        std::set<std::pair<HubId, HubId>> ods;
        for (const auto& k : all) ods.insert({k.origin, k.destination});
        std::vector<std::pair<HubId, HubId>> order(ods.begin(), ods.end());
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
        for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[static_cast<size_t>(rng() % i)]);
        order.resize(std::min(order.size(), static_cast<size_t>(g.od_limit)));
        const std::set<std::pair<HubId, HubId>> keep(order.begin(), order.end());
        std::vector<Commodity> kept;
        for (auto k : all)
            if (keep.count({k.origin, k.destination})) {
                k.id = static_cast<int>(kept.size());
                kept.push_back(k);
            }
        all = std::move(kept);
    }
    const auto law = demand_spec_from_geography(pnet, g.mean, g.east_share, g.dispersion);
    auto set = generate_scenarios(law, all, g.count, seed);
    return {std::move(all), std::move(set)};
}

}  // namespace

InstanceSpec make_instance_spec(const RunConfig& cfg) {
    InstanceSpec spec;
    spec.pnet = read_network(resolve(cfg.base_dir, cfg.network_path));
    spec.grid = cfg.grid;
    spec.hos = cfg.hos;
    spec.costs = cfg.costs;
    spec.hauler_sizes = cfg.haulers;
    spec.pattern = cfg.pattern;
    spec.consistency = cfg.consistency;
    spec.fixed_outsourcing_cost = cfg.fixed_outsourcing_cost;
    spec.strengthen = cfg.strengthen;

    std::optional<std::pair<std::vector<Commodity>, ScenarioSet>> generated;
    if (cfg.commodities_path.empty() || cfg.scenarios_path.empty()) {
        if (!cfg.demand) throw ValidationError("give commodity and scenario documents or a 'demand' section", "config");
        generated = generate_demand(spec.pnet, spec.grid, spec.costs, *cfg.demand, cfg.seed);
    }
    if (!cfg.commodities_path.empty()) {
        spec.commodities = read_commodities(csv::read_file(resolve(cfg.base_dir, cfg.commodities_path)), spec.pnet);
    } else {
        spec.commodities = generated->first;
    }
    if (!cfg.scenarios_path.empty()) {
        spec.scenarios = read_scenarios(csv::read_file(resolve(cfg.base_dir, cfg.scenarios_path)),
                                        static_cast<int>(spec.commodities.size()));
    } else {
        if (!cfg.commodities_path.empty()) {
            const auto law = demand_spec_from_geography(spec.pnet, cfg.demand->mean, cfg.demand->east_share, cfg.demand->dispersion);
            spec.scenarios = generate_scenarios(law, spec.commodities, cfg.demand->count, cfg.seed);
        } else {
            spec.scenarios = generated->second;
        }
    }
    if (!cfg.services_path.empty()) {
        spec.overrides = read_service_overrides(csv::read_file(resolve(cfg.base_dir, cfg.services_path)));
        spec.overrides_listed_only = cfg.services_listed_only;
    }
    return spec;
}

DesignSolution read_design_csv(const Instance& inst, const std::string& text) {
    const auto table = csv::parse(text);
    const std::string doc = "design";
    const int c_id = table.require("service_id", doc);
    const int c_x = table.require("x", doc);
    DesignSolution d;
    d.x.assign(static_cast<size_t>(inst.catalog.size()), 0);
    std::set<int> seen;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = doc + " row " + std::to_string(r + 2);
        if (static_cast<int>(row.size()) <= std::max(c_id, c_x)) throw ValidationError("too few fields", where);
        const int id = csv::to_int(row[static_cast<size_t>(c_id)], where);
        const int x = csv::to_int(row[static_cast<size_t>(c_x)], where);
        if (id < 0 || id >= inst.catalog.size()) throw ValidationError("unknown service id " + std::to_string(id), where);
        if (!seen.insert(id).second) throw ValidationError("duplicate service id " + std::to_string(id), where);
        if (x < 0 || x > inst.catalog.service(id).capacity) throw ValidationError("x outside [0, capacity]", where);
        d.x[static_cast<size_t>(id)] = x;
    }
    return d;
}

namespace {

// ---- command plumbing ----

struct Flags {
    std::string config;
    std::string pattern;
    std::string consistency;
    std::string haulers;
    int threads = 0;  // 0 = keep config
    std::optional<std::uint64_t> seed;
    std::optional<double> time_limit;
    std::string output;
};

RunConfig effective_config(const Flags& f) {
    RunConfig c = load_config(f.config);
    if (!f.pattern.empty()) c.pattern = parse_pattern(f.pattern);
    if (!f.consistency.empty()) c.consistency = parse_consistency(f.consistency);
    if (!f.haulers.empty()) c.haulers = parse_int_list(f.haulers, "--haulers");
    if (f.threads > 0) c.solve.threads = f.threads;
    if (f.seed) c.seed = c.solve.seed = *f.seed;
    if (f.time_limit) c.solve.time_limit_s = *f.time_limit;
    if (!f.output.empty()) c.output_dir = f.output;
    else c.output_dir = resolve(c.base_dir, c.output_dir);
    validate(c.solve);
    return c;
}

// Collects artifacts and writes them with a manifest.
class Artifacts {
public:
    Artifacts(std::string dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {}

    void add(const std::string& name, const std::string& content) { files_.emplace_back(name, content); }
    void log(const std::string& line) { log_ += line + "\n"; }

    void write(const json& config, const std::vector<std::string>& inputs, std::uint64_t seed, int threads) {
        fs::create_directories(dir_);
        std::uint64_t h = fnv1a(config.dump());
        json in = json::object();
        for (const auto& p : inputs) {
            const auto text = csv::read_file(p);
            in[p] = hex64(fnv1a(text));
            h = fnv1a(text, h);
        }
        json outputs = json::object();
        for (const auto& [name, content] : files_) {
            csv::write_file((fs::path(dir_) / name).string(), content);
            outputs[name] = hex64(fnv1a(content));
        }
        csv::write_file((fs::path(dir_) / "solver.log").string(), log_);
        const json manifest = {
            {"tool", "relaynet"},
            {"version", kVersion},
            {"compiler", __VERSION__},
            {"command", command_},
            {"config", config},
            {"config_hash", hex64(h)},
            {"inputs", in},
            {"outputs", outputs},
            {"seed", seed},
            {"threads", threads},
        };
        csv::write_file((fs::path(dir_) / "manifest.json").string(), manifest.dump(2) + "\n");
    }

private:
    std::string dir_;
    std::string command_;
    std::vector<std::pair<std::string, std::string>> files_;
    std::string log_;
};

std::vector<std::string> input_paths(const RunConfig& c) {
    std::vector<std::string> out{resolve(c.base_dir, c.network_path)};
    for (const auto* p : {&c.commodities_path, &c.scenarios_path, &c.services_path})
        if (!p->empty()) out.push_back(resolve(c.base_dir, *p));
    return out;
}

std::string stats_line(const std::string& what, MilpStatus status, double objective, const SolveStats& st) {
    std::ostringstream os;
    os << what << ": status=" << to_string(status) << " objective=" << csv::format_number(objective) << " nodes=" << st.nodes
       << " lp_iterations=" << st.lp_iterations << " seconds=" << st.wall_seconds;
    return os.str();
}

void add_solution_artifacts(Artifacts& art, const Instance& inst, const DesignSolution& design, const Recourse& recourse,
                            const KpiReport& kpis) {
    art.add("design.csv", design_csv(inst, design));
    art.add("recourse.csv", recourse_csv(inst, recourse));
    art.add("kpis.csv", kpi_csv(kpis));
    art.add("kpis.json", to_json(kpis).dump(2) + "\n");
    const auto audit = audit_solution(inst, design, recourse);
    std::ostringstream os;
    os << "audit: max_residual=" << audit.max_residual << " max_flow_residual=" << audit.max_flow_residual
       << " hos_ok=" << audit.hos_ok << " bounds_ok=" << audit.bounds_ok << " consistency_ok=" << audit.consistency_ok;
    art.log(os.str());
    for (const auto& issue : audit.issues) art.log("audit issue: " + issue);
}

void print_kpis(std::ostream& out, const KpiReport& k) {
    for (const auto& [label, v] : kpi_rows(k)) out << "  " << label << ": " << csv::format_number(v) << "\n";
}

int cmd_solve(const Flags& f, const std::string& export_mps, std::ostream& out) {
    const auto cfg = effective_config(f);
    const auto inst = build_instance(make_instance_spec(cfg));
    const auto form = formulate(inst);
    if (!export_mps.empty()) {
        csv::write_file(export_mps, write_mps(form.model));
        out << "wrote " << export_mps << " (" << form.model.num_variables() << " columns, " << form.model.num_constraints()
            << " rows)\n";
        return kOk;
    }
    const auto sol = solve_milp(form.model, with_default_priority(form, cfg.solve));
    Artifacts art(cfg.output_dir, "solve");
    art.log(stats_line("solve", sol.status, sol.objective, sol.stats));
    if (sol.has_solution && sol.status != MilpStatus::Optimal) {
        const double gap = (sol.objective - sol.bound) / std::max(1.0, std::abs(sol.objective));
        art.log("bound=" + csv::format_number(sol.bound) + " gap=" + csv::format_number(gap));
    }
    out << "status: " << to_string(sol.status) << "\n";
    if (sol.has_solution) {
        const auto design = extract_design(inst, form, sol.values);
        const auto recourse = extract_recourse(inst, form, sol.values);
        const auto kpis = compute_kpis(inst, design, recourse, cfg.outsourcing_rate);
        add_solution_artifacts(art, inst, design, recourse, kpis);
        art.add("solution.csv", write_solution_csv(form.model, sol.values));
        print_kpis(out, kpis);
    }
    art.write(to_json(cfg), input_paths(cfg), cfg.seed, cfg.solve.threads);
    return exit_code(sol.status);
}

int cmd_evaluate(const Flags& f, const std::string& design_path, std::ostream& out) {
    const auto cfg = effective_config(f);
    const auto inst = build_instance(make_instance_spec(cfg));
    const auto design = read_design_csv(inst, csv::read_file(design_path));
    const auto sol = evaluate_design(inst, design, cfg.solve);
    Artifacts art(cfg.output_dir, "evaluate");
    art.log(stats_line("evaluate", sol.status, sol.objective, sol.stats));
    out << "status: " << to_string(sol.status) << "\n";
    if (sol.has_solution) {
        const auto kpis = compute_kpis(inst, sol.design, sol.recourse, cfg.outsourcing_rate);
        add_solution_artifacts(art, inst, sol.design, sol.recourse, kpis);
        print_kpis(out, kpis);
    }
    auto inputs = input_paths(cfg);
    inputs.push_back(design_path);
    art.write(to_json(cfg), inputs, cfg.seed, cfg.solve.threads);
    return exit_code(sol.status);
}

int cmd_vss(const Flags& f, std::ostream& out) {
    const auto cfg = effective_config(f);
    const auto inst = build_instance(make_instance_spec(cfg));
    const auto rep = compute_vss(inst, cfg.solve);
    Artifacts art(cfg.output_dir, "vss");
    art.log(std::string("vss: conclusive=") + (rep.conclusive ? "yes" : "no"));
    art.add("vss.csv", vss_csv(rep));
    art.add("vss.json", to_json(rep).dump(2) + "\n");
    art.add("hours.svg", hours_chart(rep));
    art.add("cost.svg", cost_chart(rep));
    art.write(to_json(cfg), input_paths(cfg), cfg.seed, cfg.solve.threads);
    out << "stochastic cost: " << csv::format_number(rep.stochastic_cost) << "\n"
        << "deterministic design cost: " << csv::format_number(rep.deterministic_design_cost) << "\n"
        << "vss: " << csv::format_number(rep.vss) << (rep.conclusive ? "" : " (not conclusive)") << "\n";
    return rep.conclusive ? kOk : kLimit;
}

int comparison_exit(const ComparisonReport& rep) {
    int code = kOk;
    for (const auto& r : rep.rows) {
        const int c = exit_code(r.status);
        if (c == kInfeasible || c == kUnbounded) return c;
        if (c != kOk) code = c;
    }
    return code;
}

int cmd_compare(const Flags& f, bool consistency, const std::string& fixed, const std::string& various, std::ostream& out) {
    const auto cfg = effective_config(f);
    const auto inst = build_instance(make_instance_spec(cfg));
    const auto rep = consistency ? compare_consistency(inst, cfg.solve, parse_int_list(fixed, "--fixed"),
                                                       parse_int_list(various, "--various"))
                                 : compare_patterns(inst, cfg.solve);
    Artifacts art(cfg.output_dir, consistency ? "compare-consistency" : "compare-patterns");
    for (const auto& r : rep.rows) art.log(r.label + ": status=" + to_string(r.status));
    art.add("comparison.csv", comparison_csv(rep));
    art.add("comparison.json", to_json(rep).dump(2) + "\n");
    art.add("hours.svg", hours_chart(rep));
    art.add("cost.svg", cost_chart(rep));
    art.write(to_json(cfg), input_paths(cfg), cfg.seed, cfg.solve.threads);
    for (const auto& r : rep.rows)
        out << r.label << ": " << to_string(r.status) << " cost " << csv::format_number(r.kpis.total_expected_cost) << "\n";
    out << "ordering holds: " << (rep.ordering_holds ? "yes" : "no") << "\n";
    return comparison_exit(rep);
}

int cmd_export_mps(const Flags& f, const std::string& path, std::ostream& out) {
    return cmd_solve(f, path, out);
}

int cmd_import(const Flags& f, const std::string& solution_path, double tol, std::ostream& out) {
    const auto cfg = effective_config(f);
    const auto inst = build_instance(make_instance_spec(cfg));
    const auto form = formulate(inst);
    const auto sol = import_solution(form.model, read_solution_csv(csv::read_file(solution_path)), tol);
    const auto design = extract_design(inst, form, sol.values);
    const auto recourse = extract_recourse(inst, form, sol.values);
    const auto kpis = compute_kpis(inst, design, recourse, cfg.outsourcing_rate);
    Artifacts art(cfg.output_dir, "import-solution");
    art.log("import: objective=" + csv::format_number(sol.objective));
    add_solution_artifacts(art, inst, design, recourse, kpis);
    auto inputs = input_paths(cfg);
    inputs.push_back(solution_path);
    art.write(to_json(cfg), inputs, cfg.seed, cfg.solve.threads);
    out << "objective: " << csv::format_number(sol.objective) << "\n";
    print_kpis(out, kpis);
    return kOk;
}

struct NetworkFlags {
    bool synthetic = false;
    std::string input;
    std::string output = "network.json";
    TestbedOptions testbed;
};

int cmd_build_network(const NetworkFlags& f, std::ostream& out) {
    if (f.synthetic == !f.input.empty()) throw ValidationError("give exactly one of --synthetic or --input", "build-network");
    const auto pnet = f.synthetic ? make_synthetic_network(f.testbed) : read_network(f.input);
    csv::write_file(f.output, to_json(pnet).dump(2) + "\n");
    out << "hubs: " << pnet.num_hubs() << "\n"
        << "directed arcs: " << pnet.num_arcs() << "\n"
        << "wrote " << f.output << "\n";
    return kOk;
}

struct ScenarioFlags {
    std::string network;
    std::string commodities;  // optional: reuse instead of generating
    std::string out_dir = ".";
    std::string entry_steps = "0,4,8,12";
    int horizon = 20;
    std::uint64_t seed = 1;
    DemandGeneration gen;
    bool write_config = false;
};

int cmd_gen_scenarios(const ScenarioFlags& f, std::ostream& out) {
    const auto pnet = read_network(f.network);
    DemandGeneration g = f.gen;
    g.entry_steps = parse_int_list(f.entry_steps, "--entry-steps");
    TimeGrid grid{6.0, f.horizon, 4, 4};
    CostParams costs;
    std::vector<Commodity> commodities;
    ScenarioSet set;
    if (!f.commodities.empty()) {
        commodities = read_commodities(csv::read_file(f.commodities), pnet);
        const auto law = demand_spec_from_geography(pnet, g.mean, g.east_share, g.dispersion);
        set = generate_scenarios(law, commodities, g.count, f.seed);
    } else {
        std::tie(commodities, set) = generate_demand(pnet, grid, costs, g, f.seed);
    }
    fs::create_directories(f.out_dir);
    const auto cpath = (fs::path(f.out_dir) / "commodities.csv").string();
    const auto spath = (fs::path(f.out_dir) / "scenarios.csv").string();
    csv::write_file(cpath, write_commodities(commodities, pnet));
    csv::write_file(spath, write_scenarios(set));
    out << "commodities: " << commodities.size() << "\n"
        << "scenarios: " << set.size() << "\n"
        << "wrote " << cpath << ", " << spath << "\n";
    if (f.write_config) {
        RunConfig c;
        c.network_path = fs::relative(fs::absolute(f.network), fs::absolute(f.out_dir)).string();
        c.commodities_path = "commodities.csv";
        c.scenarios_path = "scenarios.csv";
        c.grid.num_steps = f.horizon;
        // One day per cycle; the last day is left for deliveries.
        c.grid.num_cycles = std::max(1, f.horizon / c.grid.cycle_steps - 1);
        c.hos.driving_time = DrivingTime::Mileage;
        c.seed = f.seed;
        const auto path = (fs::path(f.out_dir) / "config.json").string();
        csv::write_file(path, to_json(c).dump(2) + "\n");
        out << "wrote " << path << "\n";
    }
    return kOk;
}

void add_run_flags(CLI::App* sub, Flags& f) {
    sub->add_option("-c,--config", f.config, "Run configuration (JSON)")->required();
    sub->add_option("--pattern", f.pattern, "flu-mcp, flu-scp or hs");
    sub->add_option("--consistency", f.consistency, "weekly or daily");
    sub->add_option("--haulers", f.haulers, "Hauler sizes, e.g. 8 or 4,8");
    sub->add_option("--threads", f.threads, "Solver threads (default from config, 1)")->check(CLI::PositiveNumber);
    sub->add_option("--seed", f.seed, "Random seed (overrides config)");
    sub->add_option("--time-limit", f.time_limit, "Solver time limit in seconds (0 = none)")->check(CLI::NonNegativeNumber);
    sub->add_option("-o,--output", f.output, "Output directory (default from config)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relay transportation service network design under demand uncertainty", "relaynet"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Flags flags;
    std::string export_mps;
    auto* solve = app.add_subcommand("solve", "Solve the stochastic model and write design, recourse and KPI reports");
    add_run_flags(solve, flags);
    solve->add_option("--export-mps", export_mps, "Write the model as MPS to this path instead of solving");

    std::string design_path;
    auto* evaluate = app.add_subcommand("evaluate", "Solve the second stage of every scenario with a fixed design");
    add_run_flags(evaluate, flags);
    evaluate->add_option("--design", design_path, "Design document (service_id,x)")->required();

    auto* vss = app.add_subcommand("vss", "Value of the stochastic solution");
    add_run_flags(vss, flags);

    auto* cmp_p = app.add_subcommand("compare-patterns", "Solve FLU-MCP, FLU-SCP and HS on the same data");
    add_run_flags(cmp_p, flags);

    std::string fixed = "8", various = "4,8";
    auto* cmp_c = app.add_subcommand("compare-consistency", "Weekly vs daily consistency with fixed and various hauler sizes");
    add_run_flags(cmp_c, flags);
    cmp_c->add_option("--fixed", fixed, "Fixed hauler sizes")->capture_default_str();
    cmp_c->add_option("--various", various, "Various hauler sizes")->capture_default_str();

    std::string mps_out;
    auto* export_cmd = app.add_subcommand("export-mps", "Write the model as fixed-format MPS");
    add_run_flags(export_cmd, flags);
    export_cmd->add_option("--mps", mps_out, "Output MPS path")->required();

    std::string solution_path;
    double tol = 1e-6;
    auto* import_cmd = app.add_subcommand("import-solution", "Check an external solution (name,value) and report its KPIs");
    add_run_flags(import_cmd, flags);
    import_cmd->add_option("--solution", solution_path, "Solution document")->required();
    import_cmd->add_option("--tol", tol, "Feasibility tolerance")->capture_default_str();

    NetworkFlags nf;
    auto* build = app.add_subcommand("build-network", "Validate a network document or generate the synthetic testbed");
    build->add_flag("--synthetic", nf.synthetic, "Generate a synthetic network");
    build->add_option("--input", nf.input, "Network document to validate and normalize");
    build->add_option("-o,--output", nf.output, "Output network document")->capture_default_str();
    build->add_option("--hubs", nf.testbed.hubs, "Synthetic hub count")->capture_default_str();
    build->add_option("--arcs", nf.testbed.arcs, "Synthetic undirected arc count")->capture_default_str();
    build->add_option("--seed", nf.testbed.seed, "Synthetic placement seed")->capture_default_str();
    build->add_option("--max-arc-miles", nf.testbed.max_arc_miles, "Length of the longest synthetic arc")->capture_default_str();

    ScenarioFlags sf;
    auto* gen = app.add_subcommand("gen-scenarios", "Generate commodities and demand scenarios for a network");
    gen->add_option("--network", sf.network, "Network document")->required();
    gen->add_option("--commodities", sf.commodities, "Reuse this commodity document");
    gen->add_option("-o,--output", sf.out_dir, "Output directory")->capture_default_str();
    gen->add_option("--count", sf.gen.count, "Number of scenarios")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", sf.seed, "Random seed")->capture_default_str();
    gen->add_option("--mean", sf.gen.mean, "Mean vehicles per OD pair and entry step")->capture_default_str();
    gen->add_option("--east-share", sf.gen.east_share, "Share of flow moving east")->capture_default_str();
    gen->add_option("--dispersion", sf.gen.dispersion, "Over-dispersion (0 = deterministic)")->capture_default_str();
    gen->add_option("--entry-steps", sf.entry_steps, "Entry steps, comma separated")->capture_default_str();
    gen->add_option("--window-steps", sf.gen.window_steps, "Delivery window in steps")->capture_default_str();
    gen->add_option("--horizon", sf.horizon, "Horizon in steps")->capture_default_str();
    gen->add_option("--od-limit", sf.gen.od_limit, "Keep this many random OD pairs (0 = all)")->capture_default_str();
    gen->add_flag("--write-config", sf.write_config, "Also write a config.json next to the documents");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return kOk;
        err << "run with --help for usage\n";
        return kError;
    }

    try {
        if (solve->parsed()) return cmd_solve(flags, export_mps, out);
        if (evaluate->parsed()) return cmd_evaluate(flags, design_path, out);
        if (vss->parsed()) return cmd_vss(flags, out);
        if (cmp_p->parsed()) return cmd_compare(flags, false, fixed, various, out);
        if (cmp_c->parsed()) return cmd_compare(flags, true, fixed, various, out);
        if (export_cmd->parsed()) return cmd_export_mps(flags, mps_out, out);
        if (import_cmd->parsed()) return cmd_import(flags, solution_path, tol, out);
        if (build->parsed()) return cmd_build_network(nf, out);
        if (gen->parsed()) return cmd_gen_scenarios(sf, out);
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const UnreachableError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}

}  // namespace relaynet::cli
