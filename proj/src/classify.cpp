#include "v2vgeo/classify.hpp"

#include <algorithm>
#include <stdexcept>

#include "v2vgeo/parallel.hpp"

namespace v2vgeo {

std::string to_string(LinkClass c) {
    switch (c) {
    case LinkClass::LOS: return "LOS";
    case LinkClass::NLOSv: return "NLOSv";
    case LinkClass::NLOSb: return "NLOSb";
    case LinkClass::OutOfRange: return "OutOfRange";
    }
    return "?";
}

double fresnel_radius(double d, double d_obs, double wavelength) {
    if (!(d_obs > 0.0) || !(d_obs < d)) {
        throw std::domain_error("fresnel_radius requires 0 < d_obs < d");
    }
    return std::sqrt(wavelength * d_obs * (d - d_obs) / d);
}

SceneIndices SceneIndices::build(const Scene& scene) {
    SceneIndices idx;
    std::vector<SpatialIndex::Entry> statics;
    statics.reserve(scene.statics.size());
    for (const auto& s : scene.statics) statics.push_back({s.id, s.outline});
    idx.statics = SpatialIndex::build(std::move(statics));
    std::vector<SpatialIndex::Entry> vehicles;
    vehicles.reserve(scene.vehicles.size());
    for (const auto& v : scene.vehicles) vehicles.push_back({v.id, vehicle_footprint(v)});
    idx.vehicles = SpatialIndex::build(std::move(vehicles));
    return idx;
}

namespace {

// Midpoint of the footprint's overlap with the segment, as a parameter in
// (0,1); falls back to the projected centroid for tangential contact.
double obstacle_parameter(Point2 a, Point2 b, const Polygon& poly) {
    double t0 = 0.0;
    double t1 = 0.0;
    if (segment_polygon_overlap_interval(a, b, poly, t0, t1)) return (t0 + t1) / 2.0;
    Point2 ab = b - a;
    double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(polygon_centroid(poly) - a, ab) / len2 : 0.5;
    return std::clamp(t, 1e-9, 1.0 - 1e-9);
}

} // namespace

std::pair<LinkClass, ObstructionDetail> classify_link(const Scene& scene,
                                                      const SceneIndices& indices,
                                                      const Vehicle& tx, const Vehicle& rx,
                                                      const RadioConfig& radio,
                                                      const RangeConfig& ranges) {
    ObstructionDetail detail;
    const Point2 a = tx.position;
    const Point2 b = rx.position;
    const double d = distance(a, b);
    if (d > ranges.r_los) return {LinkClass::OutOfRange, detail};

    // Rule: statics first. A blocked Fresnel zone under a building incurs far
    // more loss than under a vehicle, so the vehicle tree is not consulted.
    auto static_hits = indices.statics.query_segment(a, b);
    if (!static_hits.empty()) {
        detail.statics_blocked = true;
        std::vector<std::pair<double, int64_t>> ordered;
        for (int64_t id : static_hits) {
            const auto* entry = indices.statics.find(id);
            ordered.emplace_back(obstacle_parameter(a, b, entry->footprint), id);
        }
        std::sort(ordered.begin(), ordered.end());
        for (auto& [t, id] : ordered) detail.blocking_static_ids.push_back(id);
        for (const auto& s : scene.statics) {
            if (std::find(static_hits.begin(), static_hits.end(), s.id) ==
                static_hits.end()) {
                continue;
            }
            if (s.kind == StaticKind::Foliage) {
                double len = segment_polygon_clip(a, b, s.outline);
                if (len > 0.0) detail.foliage_crossings_m.emplace_back(s.id, len);
            } else {
                detail.has_building_block = true;
            }
        }
        if (d > ranges.r_nlosb) return {LinkClass::OutOfRange, detail};
        return {LinkClass::NLOSb, detail};
    }

    const double wavelength = radio.wavelength_m();
    const double h_tx = tx.antenna_total_height();
    const double h_rx = rx.antenna_total_height();
    const Point2 ab = b - a;
    const Point2 u = d > 0.0 ? ab * (1.0 / d) : Point2{1.0, 0.0};

    auto vehicle_hits = indices.vehicles.query_segment(a, b);
    for (int64_t id : vehicle_hits) {
        if (id == tx.id || id == rx.id) continue;
        const auto* entry = indices.vehicles.find(id);
        const Vehicle* veh = scene.find_vehicle(id);
        if (!entry || !veh) continue;
        VehicleObstacle obs;
        obs.id = id;
        const double t = obstacle_parameter(a, b, entry->footprint);
        obs.d_obs_m = t * d;
        obs.height_m = veh->height_m;
        obs.line_height_m = h_tx + (h_rx - h_tx) * t;
        obs.fresnel_radius_m = fresnel_radius(d, obs.d_obs_m, wavelength);
        double lat_min = std::numeric_limits<double>::infinity();
        double lat_max = -std::numeric_limits<double>::infinity();
        for (Point2 p : entry->footprint) {
            double off = cross(u, p - a);
            lat_min = std::min(lat_min, off);
            lat_max = std::max(lat_max, off);
        }
        obs.lateral_min_m = lat_min;
        obs.lateral_max_m = lat_max;
        // NLOSv if the roof penetrates more than 40% of the first Fresnel
        // zone, i.e. reaches above the antenna line discounted by 0.6 r_f.
        obs.blocks_fresnel = obs.height_m >= obs.line_height_m - 0.6 * obs.fresnel_radius_m;
        detail.vehicles.push_back(obs);
    }
    std::sort(detail.vehicles.begin(), detail.vehicles.end(),
              [](const VehicleObstacle& x, const VehicleObstacle& y) {
                  if (x.d_obs_m != y.d_obs_m) return x.d_obs_m < y.d_obs_m;
                  return x.id < y.id;
              });

    if (detail.blocking_vehicle_count() > 0) {
        if (d > ranges.r_nlosv) return {LinkClass::OutOfRange, detail};
        return {LinkClass::NLOSv, detail};
    }
    return {LinkClass::LOS, detail};
}

std::vector<LinkResult> classify_all(const Scene& scene, const SceneIndices& indices,
                                     const RadioConfig& radio, const RangeConfig& ranges) {
    struct Pair {
        size_t i;
        size_t j;
    };
    std::vector<Pair> pairs;
    const auto& vs = scene.vehicles;
    for (size_t i = 0; i < vs.size(); ++i) {
        for (size_t j = i + 1; j < vs.size(); ++j) {
            if (distance(vs[i].position, vs[j].position) <= ranges.r_los) {
                pairs.push_back({i, j});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [&](const Pair& p, const Pair& q) {
        int64_t pa = std::min(vs[p.i].id, vs[p.j].id);
        int64_t pb = std::max(vs[p.i].id, vs[p.j].id);
        int64_t qa = std::min(vs[q.i].id, vs[q.j].id);
        int64_t qb = std::max(vs[q.i].id, vs[q.j].id);
        return std::tie(pa, pb) < std::tie(qa, qb);
    });
    std::vector<LinkResult> results(pairs.size());
    parallel_for(pairs.size(), [&](size_t k) {
        const Vehicle& tx = vs[pairs[k].i].id <= vs[pairs[k].j].id ? vs[pairs[k].i]
                                                                   : vs[pairs[k].j];
        const Vehicle& rx = vs[pairs[k].i].id <= vs[pairs[k].j].id ? vs[pairs[k].j]
                                                                   : vs[pairs[k].i];
        auto [cls, detail] = classify_link(scene, indices, tx, rx, radio, ranges);
        results[k] = {tx.id, rx.id, distance(tx.position, rx.position), cls,
                      std::move(detail)};
    });
    return results;
}

} // namespace v2vgeo
