#include "relaynet/formulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "relaynet/error.hpp"

namespace relaynet {

const char* to_string(Pattern p) {
    switch (p) {
        case Pattern::FluMcp: return "flu-mcp";
        case Pattern::FluScp: return "flu-scp";
        case Pattern::Hs: return "hs";
    }
    return "?";
}

Pattern parse_pattern(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return c == '_' ? '-' : std::tolower(c); });
    if (t == "flu-mcp") return Pattern::FluMcp;
    if (t == "flu-scp") return Pattern::FluScp;
    if (t == "hs") return Pattern::Hs;
    throw ValidationError("unknown pattern '" + text + "' (expected flu-mcp, flu-scp or hs)", "pattern");
}

const char* to_string(Consistency c) { return c == Consistency::Daily ? "daily" : "weekly"; }

Consistency parse_consistency(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "weekly") return Consistency::Weekly;
    if (t == "daily") return Consistency::Daily;
    throw ValidationError("unknown consistency '" + text + "' (expected weekly or daily)", "consistency");
}

std::vector<HaulerOption> hauler_options(const CostParams& costs, const std::vector<int>& sizes) {
    if (sizes.empty()) throw ValidationError("at least one hauler size is required", "haulers");
    std::vector<HaulerOption> out;
    std::set<int> seen;
    for (int u : sizes) {
        if (u <= 0) throw ValidationError("hauler sizes must be positive", "haulers");
        if (!seen.insert(u).second) throw ValidationError("duplicate hauler size " + std::to_string(u), "haulers");
        if (!costs.hauler_hourly_by_size.count(u))
            throw ValidationError("no hourly rate for hauler size " + std::to_string(u), "haulers");
        out.push_back({u, costs.hauler_hourly(u)});
    }
    return out;
}

Instance build_instance(InstanceSpec spec) {
    validate(spec.grid);
    validate(spec.hos);
    validate(spec.costs);
    if (spec.consistency == Consistency::Daily && spec.grid.num_cycles > 1 &&
        spec.grid.start_window() > spec.grid.num_steps)
        throw ValidationError("daily cycles extend past the horizon", "grid");
    Instance inst;
    inst.haulers = hauler_options(spec.costs, spec.hauler_sizes);
    validate_commodities(spec.commodities, spec.pnet, spec.grid);
    price_commodities(spec.commodities, spec.pnet, spec.costs.outsource_per_vehicle_mile);
    validate(spec.scenarios, static_cast<int>(spec.commodities.size()));
    inst.tsn = build_time_space_network(spec.pnet, spec.grid);
    inst.catalog = enumerate_services(inst.tsn, spec.pnet, spec.hos, spec.costs, spec.consistency, false);
    if (!spec.overrides.empty())
        inst.catalog = apply_overrides(inst.catalog, spec.pnet, spec.overrides, spec.overrides_listed_only);
    inst.spec = std::move(spec);
    return inst;
}

Instance with_catalog(const Instance& inst, ServiceCatalog catalog) {
    Instance out = inst;
    out.catalog = std::move(catalog);
    return out;
}

double first_stage_cost(const Instance& inst, const Service& s) {
    if (is_flu(inst.pattern())) return s.contract_fee;
    return s.contract_fee + inst.costs().tractor_hourly * s.on_duty_hours;
}

double flu_truck_cost(const Instance& inst, const Service& s, const HaulerOption& h) {
    return (inst.costs().tractor_hourly + h.hourly_rate) * s.on_duty_hours;
}

double hs_hauler_cost(const Instance& inst, const Commodity& k, const HaulerOption& h) {
    return h.hourly_rate * static_cast<double>(k.due_step - k.entry_step) * inst.tsn.grid().step_hours;
}

double outsource_cost(const Instance& inst, const Commodity& k, const Scenario& w) {
    const double v = w.volumes.at(static_cast<size_t>(k.id));
    if (inst.spec.fixed_outsourcing_cost) return v > 0.0 ? k.outsource_cost_per_vehicle : 0.0;
    return k.outsource_cost_per_vehicle * v;
}

int VarMap::find_y(int owner, int hauler, int w) const {
    auto it = y.find({owner, hauler, w});
    return it == y.end() ? -1 : it->second;
}

int VarMap::find_f(int k, int arc, int w) const {
    auto it = f.find({k, arc, w});
    return it == f.end() ? -1 : it->second;
}

std::vector<int> usable_arcs(const TimeSpaceNetwork& tsn, const ServiceCatalog& catalog, const Commodity& k,
                             const std::vector<char>& service_allowed) {
    const auto in_window = [&](const TSArc& a) {
        if (a.tail.t < k.entry_step || a.head.t > k.due_step) return false;
        if (a.kind == ArcKind::Holding) return true;
        for (int s : catalog.covering(a.id))
            if (service_allowed[static_cast<size_t>(s)]) return true;
        return false;
    };
    std::vector<char> fwd(static_cast<size_t>(tsn.num_nodes()), 0);
    std::vector<char> bwd(static_cast<size_t>(tsn.num_nodes()), 0);
    // Every arc moves forward in time, so sweeping instants in order is a topological pass.
    const int T = tsn.grid().num_steps;
    fwd[static_cast<size_t>(tsn.node_index({k.origin, k.entry_step}))] = 1;
    for (int t = k.entry_step; t <= T; ++t) {
        for (int h = 0; h < tsn.num_hubs(); ++h) {
            if (!fwd[static_cast<size_t>(tsn.node_index({h, t}))]) continue;
            for (int a : tsn.out_arcs({h, t})) {
                const auto& arc = tsn.arc(a);
                if (in_window(arc)) fwd[static_cast<size_t>(tsn.node_index(arc.head))] = 1;
            }
        }
    }
    bwd[static_cast<size_t>(tsn.node_index({k.destination, k.due_step}))] = 1;
    for (int t = k.due_step; t >= 0; --t) {
        for (int h = 0; h < tsn.num_hubs(); ++h) {
            if (!bwd[static_cast<size_t>(tsn.node_index({h, t}))]) continue;
            for (int a : tsn.in_arcs({h, t})) {
                const auto& arc = tsn.arc(a);
                if (in_window(arc)) bwd[static_cast<size_t>(tsn.node_index(arc.tail))] = 1;
            }
        }
    }
    std::vector<int> out;
    for (const auto& arc : tsn.arcs()) {
        if (!in_window(arc)) continue;
        if (fwd[static_cast<size_t>(tsn.node_index(arc.tail))] && bwd[static_cast<size_t>(tsn.node_index(arc.head))])
            out.push_back(arc.id);
    }
    return out;
}

namespace {

std::string sfx(int w_id) { return "_w" + std::to_string(w_id); }

class Builder {
public:
    Builder(const Instance& inst, const DesignSolution* design) : inst_(inst), design_(design) {
        const int ns = inst.catalog.size();
        allowed_.assign(static_cast<size_t>(ns), 1);
        if (design) {
            for (int s = 0; s < ns; ++s) allowed_[static_cast<size_t>(s)] = design->x[static_cast<size_t>(s)] > 0;
        }
        for (const auto& k : inst.commodities()) usable_.push_back(usable_arcs(inst.tsn, inst.catalog, k, allowed_));
        out_.vars.x.assign(static_cast<size_t>(ns), -1);
        out_.vars.z.assign(static_cast<size_t>(inst.scenarios().size()), {});
    }

    Formulation full() {
        add_first_stage();
        for (int w = 0; w < inst_.scenarios().size(); ++w) add_scenario(w, inst_.scenarios().scenarios[static_cast<size_t>(w)].probability);
        add_consistency();
        return std::move(out_);
    }

    Formulation second_stage(int w) {
        add_scenario(w, 1.0);
        return std::move(out_);
    }

private:
    int var(Variable v, VarKey key) {
        const int id = out_.model.add_variable(std::move(v));
        out_.vars.keys.push_back(key);
        return id;
    }

    double fixed_x(int s) const { return static_cast<double>(design_->x[static_cast<size_t>(s)]); }

    void add_first_stage() {
        for (const auto& s : inst_.catalog.services()) {
            out_.vars.x[static_cast<size_t>(s.id)] =
                var({"X_s" + std::to_string(s.id), 0.0, static_cast<double>(s.capacity), VarType::Integer, first_stage_cost(inst_, s)},
                    {VarKind::X, s.id, -1, -1});
        }
    }

    void add_consistency() {
        if (inst_.consistency() != Consistency::Daily) return;
        for (const auto& [key, group] : inst_.catalog.templates()) {
            for (size_t i = 1; i < group.size(); ++i) {
                const int a = group[i - 1];
                const int b = group[i];
                out_.model.add_constraint({"cons_s" + std::to_string(a) + "_s" + std::to_string(b),
                                           {{out_.vars.x[static_cast<size_t>(a)], 1.0}, {out_.vars.x[static_cast<size_t>(b)], -1.0}},
                                           Sense::Equal,
                                           0.0});
            }
        }
    }

    void add_scenario(int w, double prob) {
        const auto& scen = inst_.scenarios().scenarios[static_cast<size_t>(w)];
        const std::string ws = sfx(scen.id);
        const Pattern pattern = inst_.pattern();
        const auto& tsn = inst_.tsn;
        const auto& cat = inst_.catalog;
        const int nk = static_cast<int>(inst_.commodities().size());
        const int nu = static_cast<int>(inst_.haulers.size());
        auto& vm = out_.vars;
        auto& model = out_.model;

        // Z
        auto& zrow = vm.z[static_cast<size_t>(w)];
        zrow.assign(static_cast<size_t>(nk), -1);
        for (const auto& k : inst_.commodities()) {
            zrow[static_cast<size_t>(k.id)] = var({"Z_k" + std::to_string(k.id) + ws, 0.0, 1.0, VarType::Binary, prob * outsource_cost(inst_, k, scen)},
                                                  {VarKind::Z, k.id, -1, w});
        }

        // F, on usable arcs of commodities with positive volume
        std::map<int, std::vector<std::pair<int, double>>> arc_load;  // moving arc -> (F var, coefficient)
        std::vector<std::vector<int>> f_of(static_cast<size_t>(nk));
        for (const auto& k : inst_.commodities()) {
            const double v = scen.volumes[static_cast<size_t>(k.id)];
            if (v <= 0.0) continue;
            for (int a : usable_[static_cast<size_t>(k.id)]) {
                Variable fv{"F_k" + std::to_string(k.id) + "_a" + std::to_string(a) + ws, 0.0, kInf, VarType::Continuous, 0.0};
                if (pattern == Pattern::FluScp) {
                    fv.type = VarType::Binary;
                    fv.upper = 1.0;
                } else if (pattern == Pattern::Hs) {
                    fv.type = VarType::Integer;
                }
                const int id = var(std::move(fv), {VarKind::F, k.id, a, w});
                vm.f[{k.id, a, w}] = id;
                f_of[static_cast<size_t>(k.id)].push_back(a);
                if (tsn.arc(a).is_moving()) arc_load[a].push_back({id, pattern == Pattern::FluScp ? v : 1.0});
            }
        }

        std::vector<std::vector<int>> hs_y(static_cast<size_t>(nk));
        if (is_flu(pattern)) {
            // Y[s,u] for allowed services touching a loaded arc
            std::set<int> touched;
            for (const auto& [a, load] : arc_load)
                for (int s : cat.covering(a))
                    if (allowed_[static_cast<size_t>(s)]) touched.insert(s);
            for (int s : touched) {
                const auto& svc = cat.service(s);
                const double ub = design_ ? fixed_x(s) : static_cast<double>(svc.capacity);
                for (int u = 0; u < nu; ++u) {
                    const auto& h = inst_.haulers[static_cast<size_t>(u)];
                    vm.y[{s, u, w}] = var({"Y_s" + std::to_string(s) + "_u" + std::to_string(h.size) + ws, 0.0, ub, VarType::Integer,
                                           prob * flu_truck_cost(inst_, svc, h)},
                                          {VarKind::Y, s, u, w});
                }
            }
            for (int s : touched) {
                Constraint c{"eq3_s" + std::to_string(s) + ws, {}, Sense::LessEqual, 0.0};
                for (int u = 0; u < nu; ++u) c.terms.push_back({vm.find_y(s, u, w), 1.0});
                if (design_) c.rhs = fixed_x(s);
                else c.terms.push_back({vm.x[static_cast<size_t>(s)], -1.0});
                model.add_constraint(std::move(c));
            }
            for (const auto& [a, load] : arc_load) {
                Constraint c{(pattern == Pattern::FluScp ? "eq4p_arc" : "eq4_arc") + std::to_string(a) + ws, {}, Sense::GreaterEqual, 0.0};
                for (int s : cat.covering(a)) {
                    if (!allowed_[static_cast<size_t>(s)]) continue;
                    for (int u = 0; u < nu; ++u)
                        c.terms.push_back({vm.find_y(s, u, w), static_cast<double>(inst_.haulers[static_cast<size_t>(u)].size)});
                }
                for (const auto& [id, coef] : load) c.terms.push_back({id, -coef});
                model.add_constraint(std::move(c));
            }
            if (inst_.spec.strengthen) {
                // One commodity never needs more room than its volume:
                // load_k * F_ka <= sum_{s,u} min(v_k, u) Y_su.
                for (const auto& [a, load] : arc_load) {
                    for (const auto& [fid, coef] : load) {
                        const auto& key = vm.keys[static_cast<size_t>(fid)];
                        const double v = scen.volumes[static_cast<size_t>(key.a)];
                        Constraint c{(pattern == Pattern::FluScp ? "eq4pk_k" : "eq4k_k") + std::to_string(key.a) + "_a" + std::to_string(a) + ws,
                                     {{fid, coef}}, Sense::LessEqual, 0.0};
                        for (int s : cat.covering(a)) {
                            if (!allowed_[static_cast<size_t>(s)]) continue;
                            for (int u = 0; u < nu; ++u)
                                c.terms.push_back({vm.find_y(s, u, w), -std::min(v, static_cast<double>(inst_.haulers[static_cast<size_t>(u)].size))});
                        }
                        model.add_constraint(std::move(c));
                    }
                }
            }
        } else {
            for (const auto& k : inst_.commodities()) {
                if (f_of[static_cast<size_t>(k.id)].empty()) continue;
                for (int u = 0; u < nu; ++u) {
                    const auto& h = inst_.haulers[static_cast<size_t>(u)];
                    const int id = var({"Y_k" + std::to_string(k.id) + "_u" + std::to_string(h.size) + ws, 0.0, kInf, VarType::Integer,
                                        prob * hs_hauler_cost(inst_, k, h)},
                                       {VarKind::Y, k.id, u, w});
                    vm.y[{k.id, u, w}] = id;
                    hs_y[static_cast<size_t>(k.id)].push_back(id);
                }
            }
            for (const auto& [a, load] : arc_load) {
                Constraint c{"eq3pp_a" + std::to_string(a) + ws, {}, Sense::LessEqual, 0.0};
                for (const auto& [id, coef] : load) c.terms.push_back({id, 1.0});
                for (int s : cat.covering(a)) {
                    if (!allowed_[static_cast<size_t>(s)]) continue;
                    if (design_) c.rhs += fixed_x(s);
                    else c.terms.push_back({vm.x[static_cast<size_t>(s)], -1.0});
                }
                model.add_constraint(std::move(c));
            }
            for (const auto& k : inst_.commodities()) {
                const double v = scen.volumes[static_cast<size_t>(k.id)];
                if (v <= 0.0) continue;
                Constraint c{"eq4pp_k" + std::to_string(k.id) + ws, {}, Sense::GreaterEqual, v};
                const auto& ys = hs_y[static_cast<size_t>(k.id)];
                for (size_t u = 0; u < ys.size(); ++u) c.terms.push_back({ys[u], static_cast<double>(inst_.haulers[u].size)});
                c.terms.push_back({zrow[static_cast<size_t>(k.id)], v});
                model.add_constraint(std::move(c));
                if (inst_.spec.strengthen && !ys.empty()) {
                    // Hauler counts are integral: sum_u Y_ku >= ceil(v / max u) (1 - Z_k).
                    int umax = 0;
                    for (const auto& h : inst_.haulers) umax = std::max(umax, h.size);
                    const double need = std::ceil(v / umax - 1e-9);
                    Constraint r{"eq4ppc_k" + std::to_string(k.id) + ws, {}, Sense::GreaterEqual, need};
                    for (int y : ys) r.terms.push_back({y, 1.0});
                    r.terms.push_back({zrow[static_cast<size_t>(k.id)], need});
                    model.add_constraint(std::move(r));
                }
            }
        }

        // Flow balance: inflow - outflow at every node touched by k's arcs.
        const std::string tag = pattern == Pattern::FluMcp ? "eq5_k" : pattern == Pattern::FluScp ? "eq5p_k" : "eq5pp_k";
        for (const auto& k : inst_.commodities()) {
            const double v = scen.volumes[static_cast<size_t>(k.id)];
            if (v <= 0.0) continue;
            std::map<TSNode, std::vector<Term>> rows;
            const TSNode origin{k.origin, k.entry_step};
            const TSNode dest{k.destination, k.due_step};
            rows[origin];
            rows[dest];
            for (int a : f_of[static_cast<size_t>(k.id)]) {
                const int id = vm.find_f(k.id, a, w);
                rows[tsn.arc(a).head].push_back({id, 1.0});
                rows[tsn.arc(a).tail].push_back({id, -1.0});
            }
            const int z = zrow[static_cast<size_t>(k.id)];
            for (auto& [node, terms] : rows) {
                double rhs = 0.0;
                const bool is_origin = node == origin;
                const bool is_dest = node == dest;
                if (pattern == Pattern::Hs) {
                    for (int y : hs_y[static_cast<size_t>(k.id)]) {
                        if (is_origin) terms.push_back({y, 1.0});
                        if (is_dest) terms.push_back({y, -1.0});
                    }
                } else {
                    const double scale = pattern == Pattern::FluMcp ? v : 1.0;
                    if (is_origin) {
                        terms.push_back({z, -scale});
                        rhs = -scale;
                    } else if (is_dest) {
                        terms.push_back({z, scale});
                        rhs = scale;
                    }
                }
                if (terms.empty() && rhs == 0.0) continue;
                model.add_constraint({tag + std::to_string(k.id) + "_n" + std::to_string(node.hub) + "_t" + std::to_string(node.t) + ws,
                                      std::move(terms), Sense::Equal, rhs});
            }
        }
    }

    const Instance& inst_;
    const DesignSolution* design_;
    std::vector<char> allowed_;
    std::vector<std::vector<int>> usable_;
    Formulation out_;
};

}  // namespace

Formulation formulate(const Instance& inst) {
    return Builder(inst, nullptr).full();
}

Formulation formulate_second_stage(const Instance& inst, const DesignSolution& design, int w) {
    if (static_cast<int>(design.x.size()) != inst.catalog.size())
        throw ValidationError("design has " + std::to_string(design.x.size()) + " entries for " + std::to_string(inst.catalog.size()) + " services",
                              "design");
    for (const auto& s : inst.catalog.services()) {
        const int x = design.x[static_cast<size_t>(s.id)];
        if (x < 0 || x > s.capacity)
            throw ValidationError("contracted count " + std::to_string(x) + " outside [0, " + std::to_string(s.capacity) + "]",
                                  "design X_s" + std::to_string(s.id));
    }
    if (w < 0 || w >= inst.scenarios().size()) throw UsageError("scenario index out of range");
    return Builder(inst, &design).second_stage(w);
}

}  // namespace relaynet
