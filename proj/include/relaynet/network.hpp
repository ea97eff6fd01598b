#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace relaynet {

using HubId = int;

struct Hub {
    HubId id = 0;
    std::string name;
    std::optional<double> lon;
    std::optional<double> lat;
};

struct PhysicalArc {
    HubId from = 0;
    HubId to = 0;
    int travel_steps = 1;        // travel time plus buffer, in grid steps
    double distance_miles = 0.0;
};

// Hubs and directed arcs. Bidirectional input rows are stored as two arcs.
class PhysicalNetwork {
public:
    PhysicalNetwork() = default;
    PhysicalNetwork(std::vector<Hub> hubs, std::vector<PhysicalArc> arcs);

    const std::vector<Hub>& hubs() const { return hubs_; }
    const std::vector<PhysicalArc>& arcs() const { return arcs_; }
    int num_hubs() const { return static_cast<int>(hubs_.size()); }
    int num_arcs() const { return static_cast<int>(arcs_.size()); }

    const Hub& hub(HubId id) const { return hubs_.at(static_cast<size_t>(id)); }
    std::optional<HubId> find_hub(const std::string& name) const;

    // Index of the directed arc from -> to, if present.
    std::optional<int> find_arc(HubId from, HubId to) const;
    const std::vector<int>& out_arcs(HubId h) const { return out_.at(static_cast<size_t>(h)); }

private:
    std::vector<Hub> hubs_;
    std::vector<PhysicalArc> arcs_;
    std::vector<std::vector<int>> out_;
};

// Parses and validates a network document:
//   {"hubs": [{"name": "A", "lon": -84.4, "lat": 33.7}, ...],
//    "arcs": [{"from": "A", "to": "B", "travel_steps": 1, "distance_miles": 275,
//              "directed": false}, ...]}
// Hubs may also be given as plain strings; arc endpoints may be names or ids.
PhysicalNetwork load_physical_network(const nlohmann::json& doc);
nlohmann::json to_json(const PhysicalNetwork& pnet);

// Length of the shortest path by distance_miles. Throws UnreachableError.
double shortest_distance_miles(const PhysicalNetwork& pnet, HubId origin, HubId destination);

// All-pairs distances; unreachable pairs hold +infinity.
std::vector<std::vector<double>> all_pairs_distance_miles(const PhysicalNetwork& pnet);

struct TimeGrid {
    double step_hours = 6.0;
    int num_steps = 20;    // T; instants are 0..T
    int num_cycles = 1;    // C
    int cycle_steps = 20;  // steps per cycle

    int num_instants() const { return num_steps + 1; }
    // Services may only start inside [0, start_window()).
    int start_window() const { return num_cycles * cycle_steps; }
};

void validate(const TimeGrid& grid);

struct TSNode {
    HubId hub = 0;
    int t = 0;

    friend bool operator==(const TSNode&, const TSNode&) = default;
    friend auto operator<=>(const TSNode&, const TSNode&) = default;
};

enum class ArcKind : std::uint8_t { Moving, Holding };

struct TSArc {
    int id = 0;
    ArcKind kind = ArcKind::Holding;
    TSNode tail;
    TSNode head;
    int physical_arc = -1;  // -1 for holding arcs

    bool is_moving() const { return kind == ArcKind::Moving; }
};

class TimeSpaceNetwork {
public:
    TimeSpaceNetwork() = default;
    TimeSpaceNetwork(TimeGrid grid, int num_hubs, std::vector<TSArc> arcs);

    const TimeGrid& grid() const { return grid_; }
    int num_hubs() const { return num_hubs_; }
    int num_nodes() const { return num_hubs_ * grid_.num_instants(); }
    int num_arcs() const { return static_cast<int>(arcs_.size()); }
    int num_moving_arcs() const { return num_moving_; }
    int num_holding_arcs() const { return num_arcs() - num_moving_; }

    const std::vector<TSArc>& arcs() const { return arcs_; }
    const TSArc& arc(int id) const { return arcs_.at(static_cast<size_t>(id)); }

    int node_index(const TSNode& n) const { return n.hub * grid_.num_instants() + n.t; }
    TSNode node(int index) const { return {index / grid_.num_instants(), index % grid_.num_instants()}; }

    const std::vector<int>& out_arcs(const TSNode& n) const { return out_[static_cast<size_t>(node_index(n))]; }
    const std::vector<int>& in_arcs(const TSNode& n) const { return in_[static_cast<size_t>(node_index(n))]; }

    // Moving arc leaving `from` at time t over physical arc `parc`, if it fits the horizon.
    std::optional<int> moving_arc(int parc, int t) const;

private:
    TimeGrid grid_;
    int num_hubs_ = 0;
    int num_moving_ = 0;
    std::vector<TSArc> arcs_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
    std::vector<std::vector<int>> moving_by_parc_;  // [parc][t] -> arc id or -1
};

TimeSpaceNetwork build_time_space_network(const PhysicalNetwork& pnet, const TimeGrid& grid);

}  // namespace relaynet
