#include "v2vgeo/propagation.hpp"

#include <algorithm>
#include <cassert>
#include <complex>
#include <stdexcept>

#include "v2vgeo/rng.hpp"

namespace v2vgeo {

double knife_edge_loss(double v) {
    if (!(v > -0.7)) return 0.0;
    const double t = v - 0.1;
    return 6.9 + 20.0 * std::log10(std::sqrt(t * t + 1.0) + t);
}

double multiple_knife_edge_loss(std::span<const KnifeEdgeObstacle> profile,
                                double total_distance_m, double wavelength_m,
                                bool itu_correction) {
    const size_t n = profile.size();
    if (n == 0) return 0.0;
    for (size_t k = 0; k + 1 < n; ++k) {
        assert(profile[k].d_obs_m <= profile[k + 1].d_obs_m);
    }
    // Work in the sheared frame where the Tx-Rx line is flat: endpoints at
    // (0,0) and (d,0), edge k at (x_k, H_k). Each edge is then scored on the
    // sub-path between its neighbours' tops (Epstein-Peterson).
    double loss = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double xa = k == 0 ? 0.0 : profile[k - 1].d_obs_m;
        const double za = k == 0 ? 0.0 : profile[k - 1].excess_height_m;
        const double xb = k + 1 == n ? total_distance_m : profile[k + 1].d_obs_m;
        const double zb = k + 1 == n ? 0.0 : profile[k + 1].excess_height_m;
        const double x = profile[k].d_obs_m;
        const double sub = xb - xa;
        if (!(sub > 0.0) || !(x > xa) || !(x < xb)) continue;
        const double line = za + (zb - za) * (x - xa) / sub;
        const double h = profile[k].excess_height_m - line;
        const double rf = std::sqrt(wavelength_m * (x - xa) * (xb - x) / sub);
        if (rf <= 0.0) continue;
        loss += knife_edge_loss(std::sqrt(2.0) * h / rf);
    }
    if (itu_correction && n >= 2) {
        // Spreading-loss correction per interior gap (Millington's factor for
        // the Epstein-Peterson cascade):
        //   C = 10 log10( (a+b)(b+c) / (b (a+b+c)) ) >= 0
        for (size_t k = 0; k + 1 < n; ++k) {
            const double a = profile[k].d_obs_m - (k == 0 ? 0.0 : profile[k - 1].d_obs_m);
            const double b = profile[k + 1].d_obs_m - profile[k].d_obs_m;
            const double c = (k + 2 < n ? profile[k + 2].d_obs_m : total_distance_m) -
                             profile[k + 1].d_obs_m;
            if (a <= 0.0 || b <= 0.0 || c <= 0.0) continue;
            loss += 10.0 * std::log10((a + b) * (b + c) / (b * (a + b + c)));
        }
    }
    return loss;
}

double reflection_coefficient(double theta_grazing_rad, double eps_r,
                              ReflectionPolarization pol) {
    if (!(theta_grazing_rad > 0.0) || !(theta_grazing_rad <= kPi / 2.0)) {
        throw std::domain_error("reflection_coefficient: grazing angle outside (0, pi/2]");
    }
    if (!(eps_r >= 1.0)) {
        throw std::domain_error("reflection_coefficient: eps_r must be >= 1");
    }
    const double st = std::sin(theta_grazing_rad);
    // eps - cos^2 t rewritten as (eps - 1) + sin^2 t: both terms are
    // nonnegative, avoiding the near-grazing cancellation.
    const double root = std::sqrt((eps_r - 1.0) + st * st);
    if (pol == ReflectionPolarization::Parallel) {
        return (-eps_r * st + root) / (eps_r * st + root);
    }
    return (st - root) / (st + root);
}

namespace {

// Ground bounce: near-grazing V2V geometry sums vertical field components at
// the receiver, for which the perpendicular-form coefficient carries the
// consistent sign (R -> -1 at grazing incidence, for either antenna
// orientation; the parallel form's sign convention flips there).
double ground_coefficient(double theta_grazing_rad, const RadioConfig& radio) {
    return reflection_coefficient(theta_grazing_rad, radio.ground_permittivity,
                                  ReflectionPolarization::Perpendicular);
}

// Wall bounce: with vertical antennas the E-field is normal to the
// (horizontal) plane of incidence; with horizontal antennas it lies in it.
double wall_coefficient(double theta_grazing_rad, double eps_r, const RadioConfig& radio) {
    const auto pol = radio.polarization == AntennaPolarization::Vertical
                         ? ReflectionPolarization::Perpendicular
                         : ReflectionPolarization::Parallel;
    return reflection_coefficient(theta_grazing_rad, eps_r, pol);
}

std::pair<Ray, Ray> two_ray_rays(Point2 tx_pos, double ht, Point2 rx_pos, double hr,
                                 const RadioConfig& radio) {
    const double dh = distance(tx_pos, rx_pos);
    Ray direct;
    direct.kind = RayKind::Los;
    direct.path_length_m = std::hypot(dh, ht - hr);
    direct.amplitude_factor = 1.0;
    Ray ground;
    ground.kind = RayKind::GroundReflection;
    ground.path_length_m = std::hypot(dh, ht + hr);
    const double theta = std::atan2(ht + hr, dh);
    ground.amplitude_factor = ground_coefficient(theta, radio);
    return {direct, ground};
}

} // namespace

PowerResult two_ray_power(Point2 tx_pos, double tx_antenna_height_m, Point2 rx_pos,
                          double rx_antenna_height_m, const RadioConfig& radio) {
    auto [direct, ground] =
        two_ray_rays(tx_pos, tx_antenna_height_m, rx_pos, rx_antenna_height_m, radio);
    const Ray rays[2] = {direct, ground};
    return combine_efield(rays, radio, PowerMechanism::TwoRay);
}

std::vector<Ray> vehicle_obstruction_field(Point2 tx_pos, double tx_antenna_height_m,
                                           Point2 rx_pos, double rx_antenna_height_m,
                                           std::span<const KnifeEdgeObstacle> top_profile,
                                           const std::optional<SideProfile>& left,
                                           const std::optional<SideProfile>& right,
                                           const RadioConfig& radio) {
    const double dh = distance(tx_pos, rx_pos);
    const double wavelength = radio.wavelength_m();
    std::vector<Ray> rays;

    // Vertical plane: the whole free-space bundle (direct + ground) passes
    // over the roofs, so both rays carry the cascade loss.
    const double top_db =
        multiple_knife_edge_loss(top_profile, dh, wavelength, radio.itu_knife_edge_correction);
    const double top_factor = std::pow(10.0, -top_db / 20.0);
    auto [direct, ground] =
        two_ray_rays(tx_pos, tx_antenna_height_m, rx_pos, rx_antenna_height_m, radio);
    direct.kind = RayKind::VehicleDiffractionTop;
    direct.amplitude_factor *= top_factor;
    ground.amplitude_factor *= top_factor;
    rays.push_back(direct);
    rays.push_back(ground);

    // Horizontal plane: one potential detour per side of the obstacles.
    const double dz = tx_antenna_height_m - rx_antenna_height_m;
    for (const auto* side : {&left, &right}) {
        if (!side->has_value()) continue;
        const auto& edges = (*side)->edges;
        const double side_db = multiple_knife_edge_loss(edges, dh, wavelength,
                                                        radio.itu_knife_edge_correction);
        // Plan-view polyline around the lateral edges.
        double plan_len = 0.0;
        double prev_x = 0.0;
        double prev_y = 0.0;
        for (const auto& e : edges) {
            plan_len += std::hypot(e.d_obs_m - prev_x, e.excess_height_m - prev_y);
            prev_x = e.d_obs_m;
            prev_y = e.excess_height_m;
        }
        plan_len += std::hypot(dh - prev_x, prev_y);
        Ray r;
        r.kind = RayKind::VehicleDiffractionSide;
        r.path_length_m = std::hypot(plan_len, dz);
        r.amplitude_factor = std::pow(10.0, -side_db / 20.0);
        rays.push_back(r);
    }
    return rays;
}

namespace {

constexpr double kLegEps = 1e-6; // meters backed off a wall/corner contact

Point2 shrink_toward(Point2 from, Point2 to, double eps) {
    const double len = distance(from, to);
    if (len <= eps) return from;
    return to + (from - to) * (eps / len);
}

// Blocking test for one leg of a bent (unfolded) path: statics always block;
// a vehicle blocks where its roof reaches above the antenna line discounted
// by 60% of the first Fresnel zone along the unfolded path.
struct LegContext {
    const Scene* scene;
    const SceneIndices* indices;
    const Vehicle* tx;
    const Vehicle* rx;
    double total_path_m;
    double wavelength;
};

// Both leg ends are backed off by kLegEps, so contact with the reflecting
// wall at the specular point itself does not read as an obstruction while a
// leg crossing the reflector's own body still does.
bool leg_is_blocked(const LegContext& ctx, Point2 from, Point2 to, double s_offset_m) {
    Point2 f = shrink_toward(to, from, kLegEps);
    Point2 t = shrink_toward(from, to, kLegEps);
    if (ctx.indices->statics.segment_hits_any(f, t)) return true;
    const double h_tx = ctx.tx->antenna_total_height();
    const double h_rx = ctx.rx->antenna_total_height();
    for (int64_t id : ctx.indices->vehicles.query_segment(f, t)) {
        if (id == ctx.tx->id || id == ctx.rx->id) continue;
        const auto* entry = ctx.indices->vehicles.find(id);
        const Vehicle* veh = ctx.scene->find_vehicle(id);
        if (!entry || !veh) continue;
        double q0 = 0.0, q1 = 0.0;
        double q = 0.5;
        if (segment_polygon_overlap_interval(f, t, entry->footprint, q0, q1)) {
            q = (q0 + q1) / 2.0;
        }
        const double s = s_offset_m + q * distance(f, t);
        if (!(s > 0.0) || !(s < ctx.total_path_m)) continue;
        const double line = h_tx + (h_rx - h_tx) * s / ctx.total_path_m;
        const double rf = fresnel_radius(ctx.total_path_m, s, ctx.wavelength);
        if (veh->height_m >= line - 0.6 * rf) return true;
    }
    return false;
}

// Foliage transmission loss picked up along one leg, as a field factor.
double leg_foliage_factor(const Scene& scene, const SceneIndices& indices, Point2 from,
                          Point2 to, const RadioConfig& radio) {
    double loss_db = 0.0;
    for (int64_t id : indices.statics.query_segment(from, to)) {
        const StaticObject* obj = nullptr;
        for (const auto& s : scene.statics) {
            if (s.id == id) {
                obj = &s;
                break;
            }
        }
        if (!obj || obj->kind != StaticKind::Foliage) continue;
        const double len = segment_polygon_clip(from, to, obj->outline);
        loss_db += foliage_mel_db_per_m(radio.frequency_hz) * len;
    }
    return std::pow(10.0, -loss_db / 20.0);
}

struct WallCandidate {
    int64_t id;
    const Polygon* outline;
    std::optional<double> permittivity;
};

} // namespace

std::vector<Ray> find_wall_reflections(const Scene& scene, const SceneIndices& indices,
                                       const Vehicle& tx, const Vehicle& rx,
                                       const RadioConfig& radio, double search_range_m) {
    std::vector<Ray> rays;
    const Point2 a = tx.position;
    const Point2 b = rx.position;
    const SearchEllipse ellipse{a, b, search_range_m};
    if (!ellipse.valid()) return rays;
    const double h_tx = tx.antenna_total_height();
    const double h_rx = rx.antenna_total_height();

    std::vector<WallCandidate> candidates;
    std::vector<Polygon> vehicle_footprints; // keeps footprint storage alive
    for (int64_t id : indices.statics.query_ellipse(ellipse)) {
        for (const auto& s : scene.statics) {
            if (s.id != id) continue;
            if (s.kind != StaticKind::Building) break; // foliage does not reflect
            candidates.push_back({s.id, &s.outline, s.relative_permittivity});
            break;
        }
    }
    vehicle_footprints.reserve(scene.vehicles.size());
    for (int64_t id : indices.vehicles.query_ellipse(ellipse)) {
        if (id == tx.id || id == rx.id) continue;
        const Vehicle* veh = scene.find_vehicle(id);
        if (!veh) continue;
        // A vehicle reflects only when taller than both communicating antennas.
        if (!(veh->height_m > h_tx && veh->height_m > h_rx)) continue;
        vehicle_footprints.push_back(vehicle_footprint(*veh));
        candidates.push_back({veh->id, &vehicle_footprints.back(), std::nullopt});
    }

    for (const auto& cand : candidates) {
        const Polygon& poly = *cand.outline;
        const size_t n = poly.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const Point2 w0 = poly[j];
            const Point2 w1 = poly[i];
            const Point2 wd = w1 - w0;
            const double wlen = norm(wd);
            if (wlen <= 0.0) continue;
            // Both endpoints must lie on the same side of the wall line.
            const double side_a = cross(wd, a - w0);
            const double side_b = cross(wd, b - w0);
            if (side_a == 0.0 || side_b == 0.0 || (side_a > 0) != (side_b > 0)) continue;
            // Mirror the transmitter across the wall line.
            const Point2 u = wd * (1.0 / wlen);
            const Point2 rel = a - w0;
            const double along = dot(rel, u);
            const Point2 foot = w0 + u * along;
            const Point2 image = foot + (foot - a);
            // Specular point: image-rx crossing the wall segment.
            const Point2 ir = b - image;
            const double denom = cross(ir, wd);
            if (std::abs(denom) < 1e-15) continue;
            const double t = cross(w0 - image, wd) / denom; // along image->rx
            const double s = cross(w0 - image, ir) / denom; // along the wall
            if (!(t > 0.0 && t < 1.0) || !(s >= 0.0 && s <= 1.0)) continue;
            const Point2 p = w0 + wd * s;
            const double plan_len = distance(image, b);
            if (plan_len > search_range_m) continue;

            LegContext ctx{&scene, &indices, &tx, &rx, plan_len, radio.wavelength_m()};
            if (leg_is_blocked(ctx, a, p, 0.0)) continue;
            if (leg_is_blocked(ctx, p, b, distance(a, p))) continue;

            const double sin_grazing =
                std::clamp(std::abs(cross(u, ir * (1.0 / norm(ir)))), 0.0, 1.0);
            const double theta = std::asin(sin_grazing);
            if (!(theta > 0.0)) continue;
            const double eps_r =
                cand.permittivity.value_or(radio.default_wall_permittivity);

            Ray ray;
            ray.kind = RayKind::WallReflection;
            ray.path_length_m = std::hypot(plan_len, h_tx - h_rx);
            ray.amplitude_factor = wall_coefficient(theta, eps_r, radio);
            ray.amplitude_factor *=
                leg_foliage_factor(scene, indices, a, p, radio) *
                leg_foliage_factor(scene, indices, p, b, radio);
            ray.interaction_id = cand.id;
            rays.push_back(ray);
        }
    }
    std::sort(rays.begin(), rays.end(), [](const Ray& x, const Ray& y) {
        if (x.interaction_id != y.interaction_id) return x.interaction_id < y.interaction_id;
        return x.path_length_m < y.path_length_m;
    });
    return rays;
}

std::vector<Ray> find_corner_diffractions(const Scene& scene, const SceneIndices& indices,
                                          const Vehicle& tx, const Vehicle& rx,
                                          const RadioConfig& radio, double search_range_m) {
    std::vector<Ray> rays;
    const Point2 a = tx.position;
    const Point2 b = rx.position;
    const double d = distance(a, b);
    const SearchEllipse ellipse{a, b, search_range_m};
    if (!ellipse.valid() || d <= 0.0) return rays;
    const Point2 u = (b - a) * (1.0 / d);
    const double wavelength = radio.wavelength_m();
    const double h_tx = tx.antenna_total_height();
    const double h_rx = rx.antenna_total_height();

    for (int64_t id : indices.statics.query_ellipse(ellipse)) {
        const StaticObject* obj = nullptr;
        for (const auto& s : scene.statics) {
            if (s.id == id) {
                obj = &s;
                break;
            }
        }
        if (!obj || obj->kind != StaticKind::Building) continue;
        const bool blocks_direct = segment_intersects_polygon(a, b, obj->outline);
        for (Point2 c : obj->outline) {
            if (!ellipse.contains(c)) continue;
            const double leg1 = distance(a, c);
            const double leg2 = distance(c, b);
            const double plan_len = leg1 + leg2;
            if (plan_len > search_range_m || leg1 <= kLegEps || leg2 <= kLegEps) continue;
            // Corner must see both endpoints.
            const Point2 c1 = shrink_toward(a, c, kLegEps);
            const Point2 c2 = shrink_toward(b, c, kLegEps);
            if (indices.statics.segment_hits_any(a, c1)) continue;
            if (indices.statics.segment_hits_any(c2, b)) continue;

            // Horizontal-plane knife edge: excess is the corner's lateral
            // offset from the direct line, penetrating (positive) when the
            // corner's building actually blocks the segment.
            const double offset = std::abs(cross(u, c - a));
            const double h = blocks_direct ? offset : -offset;
            const double t = std::clamp(dot(c - a, u) / d, 1e-9, 1.0 - 1e-9);
            const double rf = fresnel_radius(d, t * d, wavelength);
            const double loss_db = knife_edge_loss(std::sqrt(2.0) * h / rf);

            Ray ray;
            ray.kind = RayKind::CornerDiffraction;
            ray.path_length_m = std::hypot(plan_len, h_tx - h_rx);
            ray.amplitude_factor = std::pow(10.0, -loss_db / 20.0);
            ray.amplitude_factor *=
                leg_foliage_factor(scene, indices, a, c1, radio) *
                leg_foliage_factor(scene, indices, c2, b, radio);
            ray.interaction_id = id;
            rays.push_back(ray);
        }
    }
    std::sort(rays.begin(), rays.end(), [](const Ray& x, const Ray& y) {
        if (x.interaction_id != y.interaction_id) return x.interaction_id < y.interaction_id;
        return x.path_length_m < y.path_length_m;
    });
    return rays;
}

double foliage_mel_db_per_m(double frequency_hz) {
    return 0.79 * std::pow(frequency_hz / 1e9, 0.61);
}

double foliage_loss_db(std::span<const std::pair<int64_t, double>> crossings,
                       double frequency_hz) {
    double total = 0.0;
    for (const auto& [id, len] : crossings) total += len;
    return foliage_mel_db_per_m(frequency_hz) * total;
}

PowerResult combine_efield(std::span<const Ray> rays, const RadioConfig& radio,
                           PowerMechanism mechanism) {
    PowerResult result;
    result.rays.assign(rays.begin(), rays.end());
    if (rays.empty()) return result;
    const double e0d0 = radio.e_field_reference() * radio.reference_distance_m;
    const double wavelength = radio.wavelength_m();
    Rng phase_rng(mix_key({radio.phase_seed, 0x9E3779B97F4A7C15ULL}));
    std::complex<double> field{0.0, 0.0};
    for (const Ray& ray : rays) {
        if (!(ray.path_length_m > 0.0)) continue;
        const double amp = e0d0 / ray.path_length_m * ray.amplitude_factor;
        double phase;
        if (radio.phase_model == PhaseModel::Geometric) {
            phase = 2.0 * kPi * ray.path_length_m / wavelength;
        } else {
            phase = phase_rng.uniform(0.0, 2.0 * kPi);
        }
        field += std::polar(amp, phase);
    }
    const double e2 = std::norm(field);
    if (e2 <= 0.0) return result; // perfect cancellation: no signal
    //   Pr = |E|^2 lambda^2 / (480 pi^2)  [W], then antenna gains.
    double pr_w = e2 * wavelength * wavelength / (480.0 * kPi * kPi);
    pr_w *= db_to_linear(radio.tx_gain_dbi) * db_to_linear(radio.rx_gain_dbi);
    result.rx_power_dbm = watt_to_dbm(pr_w);
    result.mechanism = mechanism;
    return result;
}

double log_distance_power_dbm(double distance_m, const RadioConfig& radio, double gamma,
                              std::optional<double> pl_d0_db) {
    const double d0 = radio.reference_distance_m;
    if (!(distance_m >= d0)) {
        throw std::domain_error("log_distance_power_dbm: d < reference distance");
    }
    const double pl_d0 =
        pl_d0_db.value_or(20.0 * std::log10(4.0 * kPi * d0 / radio.wavelength_m()));
    return radio.tx_power_dbm + radio.tx_gain_dbi + radio.rx_gain_dbi - pl_d0 -
           10.0 * gamma * std::log10(distance_m / d0);
}

namespace {

// Profiles for the NLOSv cascades, from the obstruction detail. Every
// footprint crossing the segment contributes an edge; sub-critical crossers
// cost ~0 dB through the knife-edge formula anyway.
void build_nlosv_profiles(const ObstructionDetail& detail,
                          std::vector<KnifeEdgeObstacle>& top, SideProfile& left,
                          SideProfile& right) {
    for (const auto& v : detail.vehicles) {
        top.push_back({v.d_obs_m, v.height_m - v.line_height_m});
        left.edges.push_back({v.d_obs_m, v.lateral_max_m});
        right.edges.push_back({v.d_obs_m, -v.lateral_min_m});
    }
}

} // namespace

PowerResult received_power(const Scene& scene, const SceneIndices& indices,
                           const Vehicle& tx, const Vehicle& rx, LinkClass link_class,
                           const ObstructionDetail& detail, const RadioConfig& radio,
                           const RangeConfig& ranges) {
    const double h_tx = tx.antenna_total_height();
    const double h_rx = rx.antenna_total_height();
    switch (link_class) {
    case LinkClass::OutOfRange: {
        return PowerResult{};
    }
    case LinkClass::LOS: {
        PowerResult res = two_ray_power(tx.position, h_tx, rx.position, h_rx, radio);
        if (!detail.foliage_crossings_m.empty() && res.has_signal()) {
            res.rx_power_dbm -=
                foliage_loss_db(detail.foliage_crossings_m, radio.frequency_hz);
        }
        return res;
    }
    case LinkClass::NLOSv: {
        std::vector<KnifeEdgeObstacle> top;
        SideProfile left;
        SideProfile right;
        build_nlosv_profiles(detail, top, left, right);
        auto rays = vehicle_obstruction_field(tx.position, h_tx, rx.position, h_rx, top,
                                              left, right, radio);
        return combine_efield(rays, radio, PowerMechanism::KnifeEdge);
    }
    case LinkClass::NLOSb: {
        auto rays = find_wall_reflections(scene, indices, tx, rx, radio, ranges.r_nlosb);
        auto diffr = find_corner_diffractions(scene, indices, tx, rx, radio, ranges.r_nlosb);
        rays.insert(rays.end(), diffr.begin(), diffr.end());
        if (!detail.has_building_block) {
            // Foliage-only obstruction: the direct bundle survives, carrying
            // the through-foliage transmission loss.
            auto [direct, ground] = two_ray_rays(tx.position, h_tx, rx.position, h_rx, radio);
            const double fol_db =
                foliage_loss_db(detail.foliage_crossings_m, radio.frequency_hz);
            const double factor = std::pow(10.0, -fol_db / 20.0);
            direct.amplitude_factor *= factor;
            ground.amplitude_factor *= factor;
            rays.push_back(direct);
            rays.push_back(ground);
        }
        PowerResult geo = combine_efield(rays, radio, PowerMechanism::ReflDiffr);
        const double d = std::max(distance(tx.position, rx.position),
                                  radio.reference_distance_m);
        const double fallback =
            log_distance_power_dbm(d, radio, radio.path_loss_exponent);
        // The stronger of the geometric estimate and the log-distance floor.
        if (!geo.has_signal() || fallback > geo.rx_power_dbm) {
            PowerResult res;
            res.rx_power_dbm = fallback;
            res.mechanism = PowerMechanism::LogDistanceFallback;
            res.rays = std::move(geo.rays);
            return res;
        }
        return geo;
    }
    }
    return PowerResult{};
}

} // namespace v2vgeo
