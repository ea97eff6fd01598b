#include "relaynet/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "relaynet/error.hpp"

namespace relaynet {

DesignSolution extract_design(const Instance& inst, const Formulation& f, const std::vector<double>& values) {
    DesignSolution d;
    d.x.assign(static_cast<size_t>(inst.catalog.size()), 0);
    for (int s = 0; s < inst.catalog.size(); ++s) {
        const int id = f.vars.x.at(static_cast<size_t>(s));
        if (id >= 0) d.x[static_cast<size_t>(s)] = static_cast<int>(std::lround(values.at(static_cast<size_t>(id))));
    }
    return d;
}

ScenarioRecourse extract_scenario(const Instance& inst, const Formulation& f, const std::vector<double>& values, int w) {
    ScenarioRecourse r;
    r.w = w;
    const int nk = static_cast<int>(inst.commodities().size());
    r.z.assign(static_cast<size_t>(nk), 0);
    for (size_t j = 0; j < f.vars.keys.size(); ++j) {
        const auto& key = f.vars.keys[j];
        if (key.w != w) continue;
        const double v = values.at(j);
        switch (key.kind) {
            case VarKind::Z: r.z[static_cast<size_t>(key.a)] = static_cast<int>(std::lround(v)); break;
            case VarKind::Y: {
                const int n = static_cast<int>(std::lround(v));
                if (n != 0) r.y[{key.a, key.b}] = n;
                break;
            }
            case VarKind::F:
                if (v != 0.0) r.f[{key.a, key.b}] = v;
                break;
            case VarKind::X: break;
        }
    }
    r.cost = recourse_cost(inst, r);
    return r;
}

Recourse extract_recourse(const Instance& inst, const Formulation& f, const std::vector<double>& values) {
    Recourse out;
    for (int w = 0; w < inst.scenarios().size(); ++w) out.scenarios.push_back(extract_scenario(inst, f, values, w));
    return out;
}

double recourse_cost(const Instance& inst, const ScenarioRecourse& r) {
    const auto& scen = inst.scenarios().scenarios.at(static_cast<size_t>(r.w));
    double cost = 0.0;
    for (const auto& [key, n] : r.y) {
        const auto& h = inst.haulers.at(static_cast<size_t>(key.second));
        const double unit = is_flu(inst.pattern()) ? flu_truck_cost(inst, inst.catalog.service(key.first), h)
                                                   : hs_hauler_cost(inst, inst.commodities().at(static_cast<size_t>(key.first)), h);
        cost += unit * n;
    }
    for (const auto& k : inst.commodities())
        if (r.z[static_cast<size_t>(k.id)]) cost += outsource_cost(inst, k, scen);
    return cost;
}

double contract_cost(const Instance& inst, const DesignSolution& design) {
    double cost = 0.0;
    for (const auto& s : inst.catalog.services()) cost += first_stage_cost(inst, s) * design.x.at(static_cast<size_t>(s.id));
    return cost;
}

namespace {

void check_shapes(const Instance& inst, const DesignSolution& design, const Recourse& recourse) {
    if (static_cast<int>(design.x.size()) != inst.catalog.size()) throw ValidationError("design does not match the service catalog", "design");
    if (static_cast<int>(recourse.scenarios.size()) != inst.scenarios().size())
        throw ValidationError("recourse does not match the scenario set", "recourse");
    for (size_t i = 0; i < recourse.scenarios.size(); ++i) {
        const auto& r = recourse.scenarios[i];
        if (r.w != static_cast<int>(i) || r.z.size() != inst.commodities().size())
            throw ValidationError("recourse scenario " + std::to_string(i) + " is malformed", "recourse");
    }
}

}  // namespace

KpiReport compute_kpis(const Instance& inst, const DesignSolution& design, const Recourse& recourse, OutsourcingRate rate) {
    check_shapes(inst, design, recourse);
    KpiReport k;
    const double step_h = inst.tsn.grid().step_hours;
    for (const auto& s : inst.catalog.services()) {
        const int x = design.x[static_cast<size_t>(s.id)];
        k.total_contracted_driver_hours += x * s.on_duty_hours;
        k.opened_services += x > 0;
        k.contracted_units += x;
    }
    k.contract_cost = contract_cost(inst, design);
    for (const auto& r : recourse.scenarios) {
        const auto& scen = inst.scenarios().scenarios[static_cast<size_t>(r.w)];
        const double p = scen.probability;
        double hauler_hours = 0.0;
        for (const auto& [key, n] : r.y) {
            if (is_flu(inst.pattern())) hauler_hours += n * inst.catalog.service(key.first).on_duty_hours;
            else {
                const auto& c = inst.commodities()[static_cast<size_t>(key.first)];
                hauler_hours += n * (c.due_step - c.entry_step) * step_h;
            }
        }
        k.avg_hauler_rental_hours += p * hauler_hours;
        k.avg_tractor_rental_hours += p * (is_flu(inst.pattern()) ? hauler_hours : k.total_contracted_driver_hours);
        double outsourced = 0.0, total = 0.0;
        for (const auto& c : inst.commodities()) {
            const double v = scen.volumes[static_cast<size_t>(c.id)];
            const double weight = rate == OutsourcingRate::Volume ? v : (v > 0.0 ? 1.0 : 0.0);
            total += weight;
            if (r.z[static_cast<size_t>(c.id)]) outsourced += weight;
        }
        if (total > 0.0) k.avg_outsourcing_rate += p * outsourced / total;
        k.expected_recourse_cost += p * recourse_cost(inst, r);
    }
    k.total_expected_cost = k.contract_cost + k.expected_recourse_cost;
    return k;
}

AuditReport audit_solution(const Instance& inst, const DesignSolution& design, const Recourse& recourse) {
    check_shapes(inst, design, recourse);
    AuditReport rep;
    const auto& tsn = inst.tsn;
    const auto& grid = tsn.grid();
    const auto& hos = inst.spec.hos;
    const auto& pnet = inst.spec.pnet;
    const Pattern pattern = inst.pattern();
    auto residual = [&](double r, const std::string& what) {
        if (r > rep.max_residual) rep.max_residual = r;
        if (r > 1e-6) rep.issues.push_back(what);
    };

    for (const auto& s : inst.catalog.services()) {
        const int x = design.x[static_cast<size_t>(s.id)];
        if (x < 0 || x > s.capacity) {
            rep.bounds_ok = false;
            rep.issues.push_back("X_s" + std::to_string(s.id) + " outside [0, capacity]");
        }
        if (x == 0) continue;
        const auto& first = tsn.arc(s.legs.front());
        const auto& last = tsn.arc(s.legs.back());
        const double on_duty = (last.head.t - first.tail.t) * grid.step_hours;
        double driving = 0.0;
        for (int a : s.legs) {
            const auto& pa = pnet.arcs().at(static_cast<size_t>(tsn.arc(a).physical_arc));
            driving += hos.driving_time == DrivingTime::Grid ? pa.travel_steps * grid.step_hours : pa.distance_miles / inst.costs().avg_mph;
        }
        if (first.tail.hub != s.home_hub || last.head.hub != s.home_hub || on_duty > hos.max_on_duty_hours + 1e-9 ||
            driving > hos.max_driving_hours + 1e-9) {
            rep.hos_ok = false;
            rep.issues.push_back("service " + std::to_string(s.id) + " breaks hours-of-service limits");
        }
    }
    if (inst.consistency() == Consistency::Daily) {
        for (const auto& [key, group] : inst.catalog.templates())
            for (int s : group)
                if (design.x[static_cast<size_t>(s)] != design.x[static_cast<size_t>(group.front())]) {
                    rep.consistency_ok = false;
                    rep.issues.push_back("template of service " + std::to_string(s) + " is not consistent");
                }
    }

    for (const auto& r : recourse.scenarios) {
        const auto& scen = inst.scenarios().scenarios[static_cast<size_t>(r.w)];
        const std::string ws = " in scenario " + std::to_string(scen.id);
        // FLU: trucks assigned per service
        if (is_flu(pattern)) {
            std::map<int, int> per_service;
            for (const auto& [key, n] : r.y) {
                if (n < 0) rep.bounds_ok = false;
                per_service[key.first] += n;
            }
            for (const auto& [s, n] : per_service) residual(n - design.x[static_cast<size_t>(s)], "trucks exceed drivers on service " + std::to_string(s) + ws);
        }
        // arc loads
        std::map<int, double> load;
        for (const auto& [key, v] : r.f) {
            const auto& k = inst.commodities()[static_cast<size_t>(key.first)];
            const auto& arc = tsn.arc(key.second);
            if (v < -1e-9) residual(-v, "negative flow" + ws);
            if (arc.tail.t < k.entry_step || arc.head.t > k.due_step) residual(std::abs(v), "flow outside the delivery window" + ws);
            if (pattern == Pattern::FluScp && std::abs(v - std::round(v)) > 1e-9) residual(std::abs(v - std::round(v)), "fractional path flag" + ws);
            if (arc.is_moving()) load[key.second] += pattern == Pattern::FluScp ? scen.volumes[static_cast<size_t>(k.id)] * v : v;
        }
        for (const auto& [a, l] : load) {
            double cap = 0.0;
            for (int s : inst.catalog.covering(a)) {
                if (is_flu(pattern)) {
                    for (size_t u = 0; u < inst.haulers.size(); ++u) {
                        auto it = r.y.find({s, static_cast<int>(u)});
                        if (it != r.y.end()) cap += inst.haulers[u].size * it->second;
                    }
                } else {
                    cap += design.x[static_cast<size_t>(s)];
                }
            }
            residual(l - cap, "arc " + std::to_string(a) + " over capacity" + ws);
        }
        // HS hauler sizing
        if (pattern == Pattern::Hs) {
            for (const auto& k : inst.commodities()) {
                const double v = scen.volumes[static_cast<size_t>(k.id)];
                double cap = 0.0;
                for (size_t u = 0; u < inst.haulers.size(); ++u) {
                    auto it = r.y.find({k.id, static_cast<int>(u)});
                    if (it != r.y.end()) cap += inst.haulers[u].size * it->second;
                }
                residual(v * (1 - r.z[static_cast<size_t>(k.id)]) - cap, "haulers too small for commodity " + std::to_string(k.id) + ws);
            }
        }
        // flow conservation
        for (const auto& k : inst.commodities()) {
            const double v = scen.volumes[static_cast<size_t>(k.id)];
            const int z = r.z[static_cast<size_t>(k.id)];
            double supply = 0.0;
            if (pattern == Pattern::FluMcp) supply = v * (1 - z);
            else if (pattern == Pattern::FluScp) supply = v > 0.0 ? 1 - z : 0.0;
            else
                for (size_t u = 0; u < inst.haulers.size(); ++u) {
                    auto it = r.y.find({k.id, static_cast<int>(u)});
                    if (it != r.y.end()) supply += it->second;
                }
            std::map<TSNode, double> net;  // inflow - outflow
            net[{k.origin, k.entry_step}] += 0.0;
            net[{k.destination, k.due_step}] += 0.0;
            for (auto it = r.f.lower_bound({k.id, -1}); it != r.f.end() && it->first.first == k.id; ++it) {
                net[tsn.arc(it->first.second).head] += it->second;
                net[tsn.arc(it->first.second).tail] -= it->second;
            }
            for (const auto& [node, value] : net) {
                double expected = 0.0;
                if (node == TSNode{k.origin, k.entry_step}) expected = -supply;
                else if (node == TSNode{k.destination, k.due_step}) expected = supply;
                const double res = std::abs(value - expected);
                if (res > rep.max_flow_residual) rep.max_flow_residual = res;
                if (res > 1e-9) rep.issues.push_back("flow of commodity " + std::to_string(k.id) + " unbalanced" + ws);
            }
        }
    }
    return rep;
}

SolveOptions with_default_priority(const Formulation& f, SolveOptions opts) {
    if (!opts.priority.empty()) return opts;
    // First-stage contracts, then outsourcing, then truck counts, then flows.
    opts.priority.reserve(f.vars.keys.size());
    for (const auto& k : f.vars.keys) {
        switch (k.kind) {
            case VarKind::X: opts.priority.push_back(3); break;
            case VarKind::Z: opts.priority.push_back(2); break;
            case VarKind::Y: opts.priority.push_back(1); break;
            case VarKind::F: opts.priority.push_back(0); break;
        }
    }
    return opts;
}

InstanceSolution solve_instance(const Instance& inst, const SolveOptions& opts) {
    const auto f = formulate(inst);
    const auto sol = solve_milp(f.model, with_default_priority(f, opts));
    InstanceSolution out;
    out.status = sol.status;
    out.has_solution = sol.has_solution;
    out.objective = sol.objective;
    out.bound = sol.bound;
    out.stats = sol.stats;
    if (!sol.has_solution) return out;
    out.design = extract_design(inst, f, sol.values);
    out.recourse = extract_recourse(inst, f, sol.values);
    out.kpis = compute_kpis(inst, out.design, out.recourse);
    return out;
}

InstanceSolution evaluate_design(const Instance& inst, const DesignSolution& design, const SolveOptions& opts) {
    const int nw = inst.scenarios().size();
    std::vector<MilpSolution> sols(static_cast<size_t>(nw));
    std::vector<Formulation> forms(static_cast<size_t>(nw));
    // Validate once up front so errors surface on the calling thread.
    forms[0] = formulate_second_stage(inst, design, 0);
    SolveOptions inner = opts;
    inner.threads = 1;
    const int workers = std::max(1, std::min(opts.threads, nw));
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(nw));
    auto work = [&] {
        for (int w = next++; w < nw; w = next++) {
            try {
                if (w > 0) forms[static_cast<size_t>(w)] = formulate_second_stage(inst, design, w);
                sols[static_cast<size_t>(w)] = solve_milp(forms[static_cast<size_t>(w)].model, with_default_priority(forms[static_cast<size_t>(w)], inner));
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    InstanceSolution out;
    out.design = design;
    out.status = MilpStatus::Optimal;
    out.has_solution = true;
    for (int w = 0; w < nw; ++w) {
        const auto& s = sols[static_cast<size_t>(w)];
        out.stats.nodes += s.stats.nodes;
        out.stats.lp_iterations += s.stats.lp_iterations;
        out.stats.wall_seconds += s.stats.wall_seconds;
        if (!s.has_solution) {
            out.status = s.status == MilpStatus::Infeasible ? MilpStatus::Infeasible : MilpStatus::Limit;
            out.has_solution = false;
            continue;
        }
        if (s.status != MilpStatus::Optimal && out.status == MilpStatus::Optimal) out.status = s.status;
        if (out.has_solution) out.recourse.scenarios.push_back(extract_scenario(inst, forms[static_cast<size_t>(w)], s.values, w));
    }
    if (!out.has_solution) {
        out.recourse.scenarios.clear();
        return out;
    }
    out.kpis = compute_kpis(inst, out.design, out.recourse);
    out.objective = out.kpis.total_expected_cost;
    return out;
}

Instance mean_value_instance(const Instance& inst) {
    Instance out = inst;
    ScenarioSet mean;
    mean.seed = inst.scenarios().seed;
    mean.scenarios.push_back(mean_scenario(inst.scenarios()));
    out.spec.scenarios = std::move(mean);
    return out;
}

VssReport make_vss_report(double deterministic_design_cost, double stochastic_cost) {
    VssReport r;
    r.deterministic_design_cost = deterministic_design_cost;
    r.stochastic_cost = stochastic_cost;
    r.vss = deterministic_design_cost - stochastic_cost;
    return r;
}

VssReport compute_vss(const Instance& inst, const SolveOptions& opts) {
    if (inst.scenarios().empty()) throw ValidationError("scenario set is empty", "scenarios");
    const auto stochastic = solve_instance(inst, opts);
    const auto mean = solve_instance(mean_value_instance(inst), opts);
    VssReport r;
    r.conclusive = stochastic.status == MilpStatus::Optimal && mean.status == MilpStatus::Optimal;
    if (!stochastic.has_solution || !mean.has_solution) {
        r.conclusive = false;
        return r;
    }
    InstanceSolution evaluated;
    if (mean.design.x == stochastic.design.x) {
        evaluated = stochastic;  // same first stage: the recourse problems coincide
    } else {
        evaluated = evaluate_design(inst, mean.design, opts);
        r.conclusive = r.conclusive && evaluated.status == MilpStatus::Optimal;
        if (!evaluated.has_solution) {
            r.conclusive = false;
            return r;
        }
    }
    r.stochastic_cost = stochastic.kpis.total_expected_cost;
    r.deterministic_design_cost = evaluated.kpis.total_expected_cost;
    r.vss = r.deterministic_design_cost - r.stochastic_cost;
    r.stochastic_design = stochastic.design;
    r.deterministic_design = mean.design;
    r.stochastic_kpis = stochastic.kpis;
    r.deterministic_kpis = evaluated.kpis;
    return r;
}

ComparisonReport compare_patterns(const Instance& inst, const SolveOptions& opts) {
    ComparisonReport rep;
    for (Pattern p : {Pattern::FluMcp, Pattern::FluScp, Pattern::Hs}) {
        Instance variant = inst;
        variant.spec.pattern = p;
        const auto sol = solve_instance(variant, opts);
        ComparisonRow row;
        row.label = to_string(p);
        row.pattern = p;
        row.consistency = inst.consistency();
        row.hauler_sizes = inst.spec.hauler_sizes;
        row.status = sol.status;
        row.kpis = sol.kpis;
        rep.rows.push_back(row);
    }
    if (rep.rows[0].status == MilpStatus::Optimal && rep.rows[1].status == MilpStatus::Optimal)
        rep.ordering_holds = rep.rows[0].kpis.total_expected_cost <= rep.rows[1].kpis.total_expected_cost + 1e-6;
    return rep;
}

ComparisonReport compare_consistency(const Instance& inst, const SolveOptions& opts, const std::vector<int>& fixed_sizes,
                                     const std::vector<int>& various_sizes) {
    const auto& grid = inst.spec.grid;
    if (grid.cycle_steps <= 0 || grid.num_steps % grid.cycle_steps != 0)
        throw ValidationError("daily consistency needs cycle_steps to divide the horizon", "grid");
    ComparisonReport rep;
    for (Consistency c : {Consistency::Weekly, Consistency::Daily}) {
        double fixed_cost = 0.0;
        bool fixed_ok = false;
        for (int variant = 0; variant < 2; ++variant) {
            InstanceSpec spec = inst.spec;
            spec.consistency = c;
            spec.hauler_sizes = variant == 0 ? fixed_sizes : various_sizes;
            const auto built = build_instance(spec);
            const auto sol = solve_instance(built, opts);
            ComparisonRow row;
            row.label = std::string(to_string(c)) + (variant == 0 ? "-fixed" : "-various");
            row.pattern = spec.pattern;
            row.consistency = c;
            row.hauler_sizes = spec.hauler_sizes;
            row.status = sol.status;
            row.kpis = sol.kpis;
            rep.rows.push_back(row);
            if (variant == 0) {
                fixed_ok = sol.status == MilpStatus::Optimal;
                fixed_cost = sol.kpis.total_expected_cost;
            } else if (fixed_ok && sol.status == MilpStatus::Optimal && sol.kpis.total_expected_cost > fixed_cost + 1e-6) {
                rep.ordering_holds = false;
            }
        }
    }
    return rep;
}

}  // namespace relaynet
