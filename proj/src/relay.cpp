#include "v2vgeo/relay.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <set>
#include <stdexcept>

#include "v2vgeo/parallel.hpp"
#include "v2vgeo/rng.hpp"

namespace v2vgeo {

const std::vector<NeighborGraph::Edge> NeighborGraph::kNoEdges;

void NeighborGraph::add_vehicle(int64_t id, Point2 pos, VehicleClass cls) {
    info_[id] = Info{pos, cls, {}};
}

void NeighborGraph::add_edge(int64_t a, int64_t b, double distance_m, LinkClass cls,
                             double power_dbm) {
    info_.at(a).edges.push_back({b, distance_m, cls, power_dbm});
    info_.at(b).edges.push_back({a, distance_m, cls, power_dbm});
}

const std::vector<NeighborGraph::Edge>& NeighborGraph::neighbors(int64_t id) const {
    auto it = info_.find(id);
    return it == info_.end() ? kNoEdges : it->second.edges;
}

bool NeighborGraph::are_neighbors(int64_t a, int64_t b) const {
    for (const auto& e : neighbors(a)) {
        if (e.neighbor_id == b) return true;
    }
    return false;
}

Point2 NeighborGraph::position(int64_t id) const { return info_.at(id).pos; }

VehicleClass NeighborGraph::vehicle_class(int64_t id) const { return info_.at(id).cls; }

std::vector<int64_t> NeighborGraph::vehicle_ids() const {
    std::vector<int64_t> ids;
    ids.reserve(info_.size());
    for (const auto& [id, info] : info_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

NeighborGraph build_graph(const Scene& scene, const SceneIndices& indices,
                          const RadioConfig& radio, const RangeConfig& ranges,
                          const FadingConfig& fading, const GraphOptions& options) {
    NeighborGraph graph;
    for (const auto& v : scene.vehicles) graph.add_vehicle(v.id, v.position, v.cls);

    const auto links = classify_all(scene, indices, radio, ranges);
    std::vector<double> powers(links.size(), kNoSignalDbm);
    parallel_for(links.size(), [&](size_t k) {
        const auto& link = links[k];
        const Vehicle* tx = scene.find_vehicle(link.tx_id);
        const Vehicle* rx = scene.find_vehicle(link.rx_id);
        const auto power = received_power(scene, indices, *tx, *rx, link.link_class,
                                          link.detail, radio, ranges);
        if (!power.has_signal()) return;
        double pr = power.rx_power_dbm;
        if (options.apply_fading) {
            const SearchEllipse ellipse{tx->position, rx->position, ranges.max_range()};
            const double sigma = sigma_for_link(
                density_in_ellipse(scene, indices, ellipse), link.link_class, fading);
            pr = apply_fading(pr, sigma, {link.tx_id, link.rx_id, scene.timestamp_s},
                              fading);
        }
        powers[k] = pr;
    });
    for (size_t k = 0; k < links.size(); ++k) {
        if (powers[k] >= options.reception_threshold_dbm) {
            graph.add_edge(links[k].tx_id, links[k].rx_id, links[k].distance_m,
                           links[k].link_class, powers[k]);
        }
    }
    return graph;
}

std::string RelayTechnique::name() const {
    switch (kind) {
    case Kind::Farthest: return "farthest";
    case Kind::MostNewNeighbors: return "most_new_neighbors";
    case Kind::Tvr: return "tvr";
    }
    return "?";
}

namespace {

struct Candidate {
    int64_t id;
    double dist_from_current;
    VehicleClass cls;
};

// Neighbors strictly closer to the destination than the current node.
std::vector<Candidate> progress_candidates(const NeighborGraph& graph, int64_t current,
                                           int64_t dst) {
    const Point2 dst_pos = graph.position(dst);
    const double current_to_dst = distance(graph.position(current), dst_pos);
    std::vector<Candidate> out;
    for (const auto& e : graph.neighbors(current)) {
        if (e.neighbor_id == dst) continue;
        const Point2 p = graph.position(e.neighbor_id);
        if (distance(p, dst_pos) < current_to_dst) {
            out.push_back({e.neighbor_id, e.distance_m, graph.vehicle_class(e.neighbor_id)});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
    return out;
}

std::optional<int64_t> farthest_of(const std::vector<Candidate>& cands,
                                   std::optional<VehicleClass> cls) {
    std::optional<int64_t> best;
    double best_dist = -1.0;
    for (const auto& c : cands) {
        if (cls && c.cls != *cls) continue;
        if (c.dist_from_current > best_dist) { // ties keep the lowest id
            best_dist = c.dist_from_current;
            best = c.id;
        }
    }
    return best;
}

double dist_of(const std::vector<Candidate>& cands, int64_t id) {
    for (const auto& c : cands) {
        if (c.id == id) return c.dist_from_current;
    }
    return 0.0;
}

// New neighbors toward the destination contributed by a candidate: neighbors
// of the candidate strictly closer to dst than the candidate itself, not
// already neighbors of the current node (passed as a sorted id list).
size_t new_neighbors_toward(const NeighborGraph& graph,
                            std::span<const int64_t> current_neighbors, int64_t current,
                            int64_t candidate, int64_t dst) {
    const Point2 dst_pos = graph.position(dst);
    const double cand_to_dst = distance(graph.position(candidate), dst_pos);
    size_t count = 0;
    for (const auto& e : graph.neighbors(candidate)) {
        if (e.neighbor_id == current) continue;
        if (distance(graph.position(e.neighbor_id), dst_pos) >= cand_to_dst) continue;
        if (std::binary_search(current_neighbors.begin(), current_neighbors.end(),
                               e.neighbor_id)) {
            continue;
        }
        ++count;
    }
    return count;
}

} // namespace

std::optional<int64_t> select_next_hop(const NeighborGraph& graph, int64_t current,
                                       int64_t dst, const RelayTechnique& technique) {
    const auto cands = progress_candidates(graph, current, dst);
    if (cands.empty()) return std::nullopt;
    switch (technique.kind) {
    case RelayTechnique::Kind::Farthest:
        return farthest_of(cands, std::nullopt);
    case RelayTechnique::Kind::MostNewNeighbors: {
        std::vector<int64_t> current_neighbors;
        current_neighbors.reserve(graph.neighbors(current).size());
        for (const auto& e : graph.neighbors(current)) {
            current_neighbors.push_back(e.neighbor_id);
        }
        std::sort(current_neighbors.begin(), current_neighbors.end());
        std::optional<int64_t> best;
        size_t best_count = 0;
        for (const auto& c : cands) { // sorted by id: ties keep the lowest
            const size_t n =
                new_neighbors_toward(graph, current_neighbors, current, c.id, dst);
            if (!best || n > best_count) {
                best = c.id;
                best_count = n;
            }
        }
        return best;
    }
    case RelayTechnique::Kind::Tvr: {
        const auto far_tall = farthest_of(cands, VehicleClass::Tall);
        const auto far_short = farthest_of(cands, VehicleClass::Short);
        if (!far_tall) return far_short;
        if (!far_short) return far_tall; // no short candidates: farthest-any
        const double gap = dist_of(cands, *far_short) - dist_of(cands, *far_tall);
        return gap <= technique.x_max_m ? far_tall : far_short;
    }
    }
    return std::nullopt;
}

RouteResult route(const NeighborGraph& graph, int64_t src, int64_t dst,
                  const RelayTechnique& technique, int hop_limit) {
    RouteResult result;
    int64_t current = src;
    for (int hop = 0; hop < hop_limit; ++hop) {
        if (graph.are_neighbors(current, dst)) {
            result.success = true;
            result.hops = hop + 1;
            return result;
        }
        const auto next = select_next_hop(graph, current, dst, technique);
        if (!next) return result;
        result.relays.push_back(*next);
        current = *next;
    }
    return result;
}

CompareResult compare_techniques(const std::vector<NeighborGraph>& graphs,
                                 const std::vector<RelayTechnique>& techniques,
                                 size_t pairs_per_graph, uint64_t seed, int hop_limit) {
    CompareResult result;
    result.stats.resize(techniques.size());
    for (size_t t = 0; t < techniques.size(); ++t) {
        result.stats[t].technique = techniques[t].name();
    }
    std::vector<uint64_t> hop_totals(techniques.size(), 0);
    std::vector<std::set<int64_t>> relay_sets(techniques.size());
    size_t total_vehicles = 0;

    for (size_t g = 0; g < graphs.size(); ++g) {
        const NeighborGraph& graph = graphs[g];
        const auto ids = graph.vehicle_ids();
        total_vehicles += ids.size();
        if (ids.size() < 2) continue;
        Rng rng(mix_key({seed, static_cast<uint64_t>(g)}));

        size_t selected = 0;
        size_t attempts = 0;
        const size_t max_attempts = pairs_per_graph * 200;
        while (selected < pairs_per_graph && attempts < max_attempts) {
            ++attempts;
            const int64_t src = ids[rng.below(ids.size())];
            const int64_t dst = ids[rng.below(ids.size())];
            // Pairs must not be direct neighbors (or the same vehicle).
            if (src == dst || graph.are_neighbors(src, dst)) continue;
            ++selected;
            ++result.evaluated_pairs;

            std::vector<RouteResult> routes(techniques.size());
            int min_hops = INT32_MAX;
            for (size_t t = 0; t < techniques.size(); ++t) {
                routes[t] = route(graph, src, dst, techniques[t], hop_limit);
                result.stats[t].pairs += 1;
                if (routes[t].success) {
                    result.stats[t].successes += 1;
                    hop_totals[t] += static_cast<uint64_t>(routes[t].hops);
                    min_hops = std::min(min_hops, routes[t].hops);
                    for (int64_t r : routes[t].relays) relay_sets[t].insert(r);
                }
            }
            if (min_hops == INT32_MAX) continue;
            for (size_t t = 0; t < techniques.size(); ++t) {
                if (routes[t].success && routes[t].hops == min_hops) {
                    result.stats[t].best_routes += 1;
                }
            }
        }
    }
    for (size_t t = 0; t < techniques.size(); ++t) {
        auto& s = result.stats[t];
        s.mean_hops = s.successes == 0
                          ? 0.0
                          : static_cast<double>(hop_totals[t]) /
                                static_cast<double>(s.successes);
        s.relay_vehicle_fraction =
            total_vehicles == 0
                ? 0.0
                : static_cast<double>(relay_sets[t].size()) /
                      static_cast<double>(total_vehicles);
    }
    return result;
}

double x_max_solve(double mu_s, double sigma_s, double mu_t, double sigma_t) {
    if (!(sigma_s > 0.0) || !(sigma_t > 0.0)) {
        throw std::domain_error("x_max_solve: sigmas must be positive");
    }
    auto residual = [&](double x) {
        return (1.0 - q_function((x - mu_s) / sigma_s)) - q_function((x - mu_t) / sigma_t);
    };
    double lo = mu_t - 8.0 * sigma_t;
    double hi = mu_s + 8.0 * sigma_s;
    if (lo > hi) std::swap(lo, hi);
    double f_lo = residual(lo);
    double f_hi = residual(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw std::domain_error("x_max_solve: no sign change in bracket");
    }
    while (hi - lo > 1e-6) {
        const double mid = (lo + hi) / 2.0;
        const double f_mid = residual(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2.0;
}

double p_tall_within(double gamma_tall, double lambda_s_per_m, double x_max_m) {
    if (gamma_tall < 0.0 || lambda_s_per_m < 0.0 || x_max_m < 0.0) {
        throw std::domain_error("p_tall_within: arguments must be nonnegative");
    }
    return 1.0 - std::exp(-gamma_tall * lambda_s_per_m * x_max_m);
}

} // namespace v2vgeo
