#include "relaynet/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "relaynet/error.hpp"

namespace relaynet {

PhysicalNetwork::PhysicalNetwork(std::vector<Hub> hubs, std::vector<PhysicalArc> arcs)
    : hubs_(std::move(hubs)), arcs_(std::move(arcs)) {
    std::set<std::string> names;
    for (size_t i = 0; i < hubs_.size(); ++i) {
        if (hubs_[i].id != static_cast<HubId>(i))
            throw ValidationError("hub ids must be dense 0..n-1", "hub " + std::to_string(i));
        if (!hubs_[i].name.empty() && !names.insert(hubs_[i].name).second)
            throw ValidationError("duplicate hub name '" + hubs_[i].name + "'", "hub " + std::to_string(i));
    }
    std::set<std::pair<HubId, HubId>> seen;
    out_.assign(hubs_.size(), {});
    for (size_t i = 0; i < arcs_.size(); ++i) {
        const auto& a = arcs_[i];
        const std::string where = "arc " + std::to_string(i);
        if (a.from < 0 || a.from >= num_hubs() || a.to < 0 || a.to >= num_hubs())
            throw ValidationError("unknown hub id", where);
        if (a.from == a.to) throw ValidationError("self-loop", where);
        if (a.travel_steps < 1) throw ValidationError("travel_steps must be >= 1", where);
        if (!(a.distance_miles > 0.0) || !std::isfinite(a.distance_miles))
            throw ValidationError("distance_miles must be positive", where);
        if (!seen.insert({a.from, a.to}).second) throw ValidationError("duplicate arc", where);
        out_[static_cast<size_t>(a.from)].push_back(static_cast<int>(i));
    }
}

std::optional<HubId> PhysicalNetwork::find_hub(const std::string& name) const {
    for (const auto& h : hubs_)
        if (h.name == name) return h.id;
    return std::nullopt;
}

std::optional<int> PhysicalNetwork::find_arc(HubId from, HubId to) const {
    if (from < 0 || from >= num_hubs()) return std::nullopt;
    for (int a : out_[static_cast<size_t>(from)])
        if (arcs_[static_cast<size_t>(a)].to == to) return a;
    return std::nullopt;
}

namespace {

HubId resolve_hub(const nlohmann::json& ref, const std::vector<Hub>& hubs, const std::string& where) {
    if (ref.is_number_integer()) {
        const auto id = ref.get<long long>();
        if (id < 0 || id >= static_cast<long long>(hubs.size())) throw ValidationError("unknown hub id " + std::to_string(id), where);
        return static_cast<HubId>(id);
    }
    if (ref.is_string()) {
        const auto name = ref.get<std::string>();
        for (const auto& h : hubs)
            if (h.name == name) return h.id;
        throw ValidationError("unknown hub '" + name + "'", where);
    }
    throw ValidationError("hub reference must be a name or an id", where);
}

}  // namespace

PhysicalNetwork load_physical_network(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("hubs") || !doc["hubs"].is_array())
        throw ValidationError("network document needs a 'hubs' list");
    if (!doc.contains("arcs") || !doc["arcs"].is_array())
        throw ValidationError("network document needs an 'arcs' list");

    std::vector<Hub> hubs;
    for (const auto& row : doc["hubs"]) {
        Hub h;
        h.id = static_cast<HubId>(hubs.size());
        const std::string where = "hubs[" + std::to_string(h.id) + "]";
        if (row.is_string()) {
            h.name = row.get<std::string>();
        } else if (row.is_object()) {
            h.name = row.value("name", std::to_string(h.id));
            if (row.contains("id") && row["id"].get<int>() != h.id)
                throw ValidationError("hub ids must be dense and in order", where);
            if (row.contains("lon")) h.lon = row["lon"].get<double>();
            if (row.contains("lat")) h.lat = row["lat"].get<double>();
        } else {
            throw ValidationError("hub row must be a string or an object", where);
        }
        hubs.push_back(std::move(h));
    }

    std::vector<PhysicalArc> arcs;
    std::set<std::pair<HubId, HubId>> seen;
    const auto add = [&](PhysicalArc a, const std::string& where) {
        if (!seen.insert({a.from, a.to}).second) throw ValidationError("duplicate arc", where);
        arcs.push_back(a);
    };
    int row_index = 0;
    for (const auto& row : doc["arcs"]) {
        const std::string where = "arcs[" + std::to_string(row_index++) + "]";
        if (!row.is_object()) throw ValidationError("arc row must be an object", where);
        for (const char* key : {"from", "to", "travel_steps", "distance_miles"})
            if (!row.contains(key)) throw ValidationError(std::string("missing field '") + key + "'", where);
        PhysicalArc a;
        a.from = resolve_hub(row["from"], hubs, where);
        a.to = resolve_hub(row["to"], hubs, where);
        if (!row["travel_steps"].is_number_integer()) throw ValidationError("travel_steps must be an integer", where);
        a.travel_steps = row["travel_steps"].get<int>();
        a.distance_miles = row["distance_miles"].get<double>();
        if (a.from == a.to) throw ValidationError("self-loop", where);
        if (a.travel_steps < 1) throw ValidationError("travel_steps must be >= 1", where);
        if (!(a.distance_miles > 0.0)) throw ValidationError("distance_miles must be positive", where);
        add(a, where);
        if (!row.value("directed", false)) add(PhysicalArc{a.to, a.from, a.travel_steps, a.distance_miles}, where);
    }
    return PhysicalNetwork(std::move(hubs), std::move(arcs));
}

nlohmann::json to_json(const PhysicalNetwork& pnet) {
    nlohmann::json hubs = nlohmann::json::array();
    for (const auto& h : pnet.hubs()) {
        nlohmann::json row = {{"name", h.name}};
        if (h.lon) row["lon"] = *h.lon;
        if (h.lat) row["lat"] = *h.lat;
        hubs.push_back(row);
    }
    // Collapse symmetric pairs back into bidirectional rows.
    nlohmann::json arcs = nlohmann::json::array();
    std::set<std::pair<HubId, HubId>> emitted;
    for (const auto& a : pnet.arcs()) {
        if (emitted.count({a.from, a.to})) continue;
        const auto rev = pnet.find_arc(a.to, a.from);
        const bool symmetric = rev && pnet.arcs()[static_cast<size_t>(*rev)].travel_steps == a.travel_steps &&
                               pnet.arcs()[static_cast<size_t>(*rev)].distance_miles == a.distance_miles;
        nlohmann::json row = {{"from", pnet.hub(a.from).name},
                              {"to", pnet.hub(a.to).name},
                              {"travel_steps", a.travel_steps},
                              {"distance_miles", a.distance_miles}};
        emitted.insert({a.from, a.to});
        if (symmetric) {
            emitted.insert({a.to, a.from});
        } else {
            row["directed"] = true;
        }
        arcs.push_back(row);
    }
    return {{"hubs", hubs}, {"arcs", arcs}};
}

namespace {

std::vector<double> dijkstra(const PhysicalNetwork& pnet, HubId origin) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(pnet.num_hubs()), inf);
    using Item = std::pair<double, HubId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[static_cast<size_t>(origin)] = 0.0;
    queue.push({0.0, origin});
    while (!queue.empty()) {
        const auto [d, h] = queue.top();
        queue.pop();
        if (d > dist[static_cast<size_t>(h)]) continue;
        for (int ai : pnet.out_arcs(h)) {
            const auto& a = pnet.arcs()[static_cast<size_t>(ai)];
            const double nd = d + a.distance_miles;
            if (nd < dist[static_cast<size_t>(a.to)]) {
                dist[static_cast<size_t>(a.to)] = nd;
                queue.push({nd, a.to});
            }
        }
    }
    return dist;
}

}  // namespace

double shortest_distance_miles(const PhysicalNetwork& pnet, HubId origin, HubId destination) {
    if (origin < 0 || origin >= pnet.num_hubs() || destination < 0 || destination >= pnet.num_hubs())
        throw UsageError("hub id out of range");
    const double d = dijkstra(pnet, origin)[static_cast<size_t>(destination)];
    if (!std::isfinite(d)) throw UnreachableError(origin, destination);
    return d;
}

std::vector<std::vector<double>> all_pairs_distance_miles(const PhysicalNetwork& pnet) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(pnet.num_hubs()));
    for (HubId h = 0; h < pnet.num_hubs(); ++h) out.push_back(dijkstra(pnet, h));
    return out;
}

void validate(const TimeGrid& grid) {
    if (!(grid.step_hours > 0.0) || !std::isfinite(grid.step_hours)) throw ValidationError("step_hours must be positive", "grid");
    if (grid.num_steps < 1) throw ValidationError("num_steps must be >= 1", "grid");
    if (grid.num_cycles < 1) throw ValidationError("num_cycles must be >= 1", "grid");
    if (grid.cycle_steps < 1) throw ValidationError("cycle_steps must be >= 1", "grid");
}

TimeSpaceNetwork::TimeSpaceNetwork(TimeGrid grid, int num_hubs, std::vector<TSArc> arcs)
    : grid_(grid), num_hubs_(num_hubs), arcs_(std::move(arcs)) {
    out_.assign(static_cast<size_t>(num_nodes()), {});
    in_.assign(static_cast<size_t>(num_nodes()), {});
    int max_parc = -1;
    for (const auto& a : arcs_) {
        out_[static_cast<size_t>(node_index(a.tail))].push_back(a.id);
        in_[static_cast<size_t>(node_index(a.head))].push_back(a.id);
        if (a.is_moving()) {
            ++num_moving_;
            max_parc = std::max(max_parc, a.physical_arc);
        }
    }
    moving_by_parc_.assign(static_cast<size_t>(max_parc + 1), std::vector<int>(static_cast<size_t>(grid_.num_instants()), -1));
    for (const auto& a : arcs_)
        if (a.is_moving()) moving_by_parc_[static_cast<size_t>(a.physical_arc)][static_cast<size_t>(a.tail.t)] = a.id;
}

std::optional<int> TimeSpaceNetwork::moving_arc(int parc, int t) const {
    if (parc < 0 || parc >= static_cast<int>(moving_by_parc_.size()) || t < 0 || t > grid_.num_steps) return std::nullopt;
    const int id = moving_by_parc_[static_cast<size_t>(parc)][static_cast<size_t>(t)];
    if (id < 0) return std::nullopt;
    return id;
}

TimeSpaceNetwork build_time_space_network(const PhysicalNetwork& pnet, const TimeGrid& grid) {
    validate(grid);
    const int T = grid.num_steps;

    // Moving arcs sorted by (tail hub, tail time, head hub); holding arcs by (hub, time).
    std::vector<int> parc_order(static_cast<size_t>(pnet.num_arcs()));
    for (int i = 0; i < pnet.num_arcs(); ++i) parc_order[static_cast<size_t>(i)] = i;
    std::sort(parc_order.begin(), parc_order.end(), [&](int x, int y) {
        const auto& a = pnet.arcs()[static_cast<size_t>(x)];
        const auto& b = pnet.arcs()[static_cast<size_t>(y)];
        return std::pair(a.from, a.to) < std::pair(b.from, b.to);
    });

    std::vector<TSArc> arcs;
    for (HubId h = 0; h < pnet.num_hubs(); ++h) {
        for (int t = 0; t <= T; ++t) {
            for (int pi : parc_order) {
                const auto& pa = pnet.arcs()[static_cast<size_t>(pi)];
                if (pa.from != h) continue;
                if (t + pa.travel_steps > T) continue;
                TSArc a;
                a.id = static_cast<int>(arcs.size());
                a.kind = ArcKind::Moving;
                a.tail = {h, t};
                a.head = {pa.to, t + pa.travel_steps};
                a.physical_arc = pi;
                arcs.push_back(a);
            }
        }
    }
    for (HubId h = 0; h < pnet.num_hubs(); ++h) {
        for (int t = 0; t < T; ++t) {
            TSArc a;
            a.id = static_cast<int>(arcs.size());
            a.kind = ArcKind::Holding;
            a.tail = {h, t};
            a.head = {h, t + 1};
            arcs.push_back(a);
        }
    }
    return TimeSpaceNetwork(grid, pnet.num_hubs(), std::move(arcs));
}

}  // namespace relaynet
