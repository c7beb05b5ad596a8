#include "v2vgeo/plos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "v2vgeo/propagation.hpp"

namespace v2vgeo {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double p_los_link(double h_i, double h_j, double d, const ObstacleProfile& profile,
                  double wavelength, double h_a) {
    double p = 1.0;
    for (const auto& obs : profile) {
        const double rf = fresnel_radius(d, obs.d_obs_m, wavelength);
        const double h_k = (h_j - h_i) * obs.d_obs_m / d + h_i - 0.6 * rf + h_a;
        if (obs.sigma_m <= 0.0) {
            // Degenerate obstacle height: deterministic blocking test.
            p *= obs.mu_m >= h_k ? 0.0 : 1.0;
        } else {
            p *= 1.0 - q_function((h_k - obs.mu_m) / obs.sigma_m);
        }
        if (p == 0.0) break;
    }
    return p;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double normal_pdf(double x, double mu, double sigma) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * kPi));
}

} // namespace

double p_los_unconditional(const HeightDensity& tx_height, const HeightDensity& rx_height,
                           double d, const ObstacleProfile& profile, double wavelength,
                           double h_a, int quadrature_points) {
    if (tx_height.sigma <= 0.0 && rx_height.sigma <= 0.0) {
        return p_los_link(tx_height.mean, rx_height.mean, d, profile, wavelength, h_a);
    }
    std::vector<double> nodes;
    std::vector<double> weights;
    gauss_legendre(quadrature_points, nodes, weights);
    auto integrate_rx = [&](double hi) {
        if (rx_height.sigma <= 0.0) {
            return p_los_link(hi, rx_height.mean, d, profile, wavelength, h_a);
        }
        const double lo = rx_height.mean - 5.0 * rx_height.sigma;
        const double hi_b = rx_height.mean + 5.0 * rx_height.sigma;
        const double half = (hi_b - lo) / 2.0;
        const double mid = (hi_b + lo) / 2.0;
        double acc = 0.0;
        for (int k = 0; k < quadrature_points; ++k) {
            const double hj = mid + half * nodes[k];
            acc += weights[k] * p_los_link(hi, hj, d, profile, wavelength, h_a) *
                   normal_pdf(hj, rx_height.mean, rx_height.sigma);
        }
        return acc * half;
    };
    if (tx_height.sigma <= 0.0) return integrate_rx(tx_height.mean);
    const double lo = tx_height.mean - 5.0 * tx_height.sigma;
    const double hi_b = tx_height.mean + 5.0 * tx_height.sigma;
    const double half = (hi_b - lo) / 2.0;
    const double mid = (hi_b + lo) / 2.0;
    double acc = 0.0;
    for (int k = 0; k < quadrature_points; ++k) {
        const double hi = mid + half * nodes[k];
        acc += weights[k] * integrate_rx(hi) * normal_pdf(hi, tx_height.mean, tx_height.sigma);
    }
    return acc * half;
}

namespace {

ObstacleProfile profile_between(const Scene& scene, const SceneIndices& indices,
                                const Vehicle& tx, const Vehicle& rx,
                                const PlosParams& params) {
    ObstacleProfile profile;
    const Point2 a = tx.position;
    const Point2 b = rx.position;
    const double d = distance(a, b);
    if (!(d > 0.0)) return profile;
    const Point2 ab = b - a;
    for (int64_t id : indices.vehicles.query_segment(a, b)) {
        if (id == tx.id || id == rx.id) continue;
        const auto* entry = indices.vehicles.find(id);
        const Vehicle* veh = scene.find_vehicle(id);
        if (!entry || !veh) continue;
        double t0 = 0.0, t1 = 0.0, t = 0.5;
        if (segment_polygon_overlap_interval(a, b, entry->footprint, t0, t1)) {
            t = (t0 + t1) / 2.0;
        } else {
            const double len2 = dot(ab, ab);
            t = std::clamp(dot(polygon_centroid(entry->footprint) - a, ab) / len2, 1e-9,
                           1.0 - 1e-9);
        }
        const double sigma = veh->cls == VehicleClass::Tall ? params.sigma_height_tall
                                                            : params.sigma_height_short;
        profile.push_back({t * d, veh->height_m, sigma});
    }
    std::sort(profile.begin(), profile.end(),
              [](const ObstacleHeight& x, const ObstacleHeight& y) {
                  return x.d_obs_m < y.d_obs_m;
              });
    return profile;
}

} // namespace

std::optional<double> p_los_node(const Scene& scene, const SceneIndices& indices,
                                 int64_t vehicle_id, double range_m,
                                 const RadioConfig& radio, const PlosParams& params) {
    const Vehicle* self = scene.find_vehicle(vehicle_id);
    if (!self) throw std::invalid_argument("p_los_node: unknown vehicle id");
    const double wavelength = radio.wavelength_m();
    double acc = 0.0;
    size_t neighbors = 0;
    for (const auto& other : scene.vehicles) {
        if (other.id == vehicle_id) continue;
        const double d = distance(self->position, other.position);
        if (d > range_m || !(d > 0.0)) continue;
        const auto profile = profile_between(scene, indices, *self, other, params);
        // Antenna mast already included in the absolute antenna heights.
        acc += p_los_link(self->antenna_total_height(), other.antenna_total_height(), d,
                          profile, wavelength, 0.0);
        ++neighbors;
    }
    if (neighbors == 0) return std::nullopt;
    return acc / static_cast<double>(neighbors);
}

double p_los_system(const Scene& scene, const SceneIndices& indices, double range_m,
                    const RadioConfig& radio, const PlosParams& params) {
    double acc = 0.0;
    size_t counted = 0;
    for (const auto& v : scene.vehicles) {
        // A vehicle with no neighbors contributes nothing to the average.
        if (auto p = p_los_node(scene, indices, v.id, range_m, radio, params)) {
            acc += *p;
            ++counted;
        }
    }
    return counted == 0 ? 1.0 : acc / static_cast<double>(counted);
}

double delta_p_los(const Trace& trace, int64_t vehicle_id, double t1, double t2,
                   double range_m, const RadioConfig& radio, const PlosParams& params) {
    auto node_at = [&](double t) {
        for (const auto& scene : trace.snapshots) {
            if (scene.timestamp_s == t) {
                if (!scene.find_vehicle(vehicle_id)) {
                    throw std::invalid_argument("delta_p_los: vehicle missing at timestamp");
                }
                const auto indices = SceneIndices::build(scene);
                auto p = p_los_node(scene, indices, vehicle_id, range_m, radio, params);
                return p.value_or(1.0);
            }
        }
        throw std::invalid_argument("delta_p_los: timestamp not in trace");
    };
    return std::abs(node_at(t2) - node_at(t1));
}

std::span<const SensitivityRow> dsrc_sensitivity_table() {
    static const SensitivityRow rows[] = {
        {3.0, "BPSK", -85.0},  {4.5, "BPSK", -84.0},   {6.0, "QPSK", -82.0},
        {9.0, "QPSK", -80.0},  {12.0, "QAM-16", -77.0}, {18.0, "QAM-16", -70.0},
        {24.0, "QAM-64", -69.0}, {27.0, "QAM-64", -67.0},
    };
    return rows;
}

double sensitivity_for_rate(double data_rate_mbps) {
    for (const auto& row : dsrc_sensitivity_table()) {
        if (row.data_rate_mbps == data_rate_mbps) return row.min_sensitivity_dbm;
    }
    throw std::invalid_argument("sensitivity_for_rate: unknown data rate");
}

std::vector<PsrBin> packet_success_rate(const Scene& scene, const SceneIndices& indices,
                                        const RadioConfig& radio, const RangeConfig& ranges,
                                        const FadingConfig& fading, double data_rate_mbps,
                                        double bin_width_m) {
    const double threshold = sensitivity_for_rate(data_rate_mbps);
    const size_t n_bins =
        static_cast<size_t>(std::ceil(ranges.max_range() / bin_width_m)) + 1;
    std::vector<PsrBin> bins(n_bins);
    for (size_t i = 0; i < n_bins; ++i) bins[i].bin_start_m = static_cast<double>(i) * bin_width_m;

    const auto links = classify_all(scene, indices, radio, ranges);
    for (const auto& link : links) {
        const Vehicle* tx = scene.find_vehicle(link.tx_id);
        const Vehicle* rx = scene.find_vehicle(link.rx_id);
        const auto power = received_power(scene, indices, *tx, *rx, link.link_class,
                                          link.detail, radio, ranges);
        const size_t bin = std::min(
            n_bins - 1, static_cast<size_t>(link.distance_m / bin_width_m));
        bins[bin].sent += 1;
        if (!power.has_signal()) continue;
        double pr = power.rx_power_dbm;
        const SearchEllipse ellipse{tx->position, rx->position, ranges.max_range()};
        const double sigma =
            sigma_for_link(density_in_ellipse(scene, indices, ellipse), link.link_class,
                           fading);
        pr = apply_fading(pr, sigma, {link.tx_id, link.rx_id, scene.timestamp_s}, fading);
        if (pr >= threshold) bins[bin].received += 1;
    }
    while (!bins.empty() && bins.back().sent == 0) bins.pop_back();
    return bins;
}

} // namespace v2vgeo
