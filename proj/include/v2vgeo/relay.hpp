#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "v2vgeo/fading.hpp"
#include "v2vgeo/plos.hpp"
#include "v2vgeo/propagation.hpp"

namespace v2vgeo {

/// Connectivity snapshot: neighbors are the vehicles receiving above the
/// reception threshold under the channel model.
class NeighborGraph {
  public:
    struct Edge {
        int64_t neighbor_id;
        double distance_m;
        LinkClass link_class;
        double rx_power_dbm;
    };

    void add_vehicle(int64_t id, Point2 pos, VehicleClass cls);
    void add_edge(int64_t a, int64_t b, double distance_m, LinkClass cls, double power_dbm);

    const std::vector<Edge>& neighbors(int64_t id) const;
    bool are_neighbors(int64_t a, int64_t b) const;
    Point2 position(int64_t id) const;
    VehicleClass vehicle_class(int64_t id) const;
    std::vector<int64_t> vehicle_ids() const; // sorted
    size_t vehicle_count() const { return info_.size(); }

  private:
    struct Info {
        Point2 pos;
        VehicleClass cls;
        std::vector<Edge> edges;
    };
    std::unordered_map<int64_t, Info> info_;
    static const std::vector<Edge> kNoEdges;
};

struct GraphOptions {
    double reception_threshold_dbm = -90.0;
    bool apply_fading = false; // keyed draws keep edges symmetric when on
};

/// Classifies and evaluates every in-range pair, keeping edges whose
/// (optionally faded) received power meets the threshold.
NeighborGraph build_graph(const Scene& scene, const SceneIndices& indices,
                          const RadioConfig& radio, const RangeConfig& ranges,
                          const FadingConfig& fading, const GraphOptions& options);

struct RelayTechnique {
    enum class Kind { Farthest, MostNewNeighbors, Tvr } kind = Kind::Farthest;
    double x_max_m = 50.0; // TVR only

    static RelayTechnique farthest() { return {Kind::Farthest, 0.0}; }
    static RelayTechnique most_new_neighbors() { return {Kind::MostNewNeighbors, 0.0}; }
    static RelayTechnique tvr(double x_max) { return {Kind::Tvr, x_max}; }
    std::string name() const;
};

/// Next hop among the current node's neighbors strictly closer to the
/// destination (the progress filter), or nullopt when none qualifies.
/// Ties break on the lowest id.
std::optional<int64_t> select_next_hop(const NeighborGraph& graph, int64_t current,
                                       int64_t dst, const RelayTechnique& technique);

struct RouteResult {
    bool success = false;
    int hops = 0;
    std::vector<int64_t> relays; // intermediate nodes, excluding src and dst
};

/// Greedy hop-by-hop forwarding until the destination is a neighbor; the
/// progress filter makes it loop-free.
RouteResult route(const NeighborGraph& graph, int64_t src, int64_t dst,
                  const RelayTechnique& technique, int hop_limit = 64);

struct TechniqueStats {
    std::string technique;
    uint64_t pairs = 0;
    uint64_t successes = 0;
    uint64_t best_routes = 0;       // minimum hops among compared techniques
    double mean_hops = 0.0;         // over successful routes
    double relay_vehicle_fraction = 0.0; // share of vehicles used as a relay
};

struct CompareResult {
    std::vector<TechniqueStats> stats;
    uint64_t evaluated_pairs = 0;
};

/// Evaluates all techniques on the same randomly selected source-destination
/// pairs (never direct neighbors); deterministic per seed.
CompareResult compare_techniques(const std::vector<NeighborGraph>& graphs,
                                 const std::vector<RelayTechnique>& techniques,
                                 size_t pairs_per_graph, uint64_t seed,
                                 int hop_limit = 64);

/// Largest distance deficit at which a tall relay still wins, from the
/// fitted normal distance-difference distributions; solves
///   1 - Q((x - mu_s)/sigma_s) = Q((x - mu_t)/sigma_t)
/// by bisection to 1e-6 m. Throws std::domain_error without a sign change.
double x_max_solve(double mu_s, double sigma_s, double mu_t, double sigma_t);

/// Probability of at least one tall vehicle in [R - x_max, R] under
/// exponential spacing (memoryless):  1 - exp(-gamma lambda_s x_max).
double p_tall_within(double gamma_tall, double lambda_s_per_m, double x_max_m);

} // namespace v2vgeo
