#pragma once

#include <optional>
#include <span>
#include <vector>

#include "v2vgeo/classify.hpp"
#include "v2vgeo/fading.hpp"
#include "v2vgeo/radio.hpp"
#include "v2vgeo/scenario.hpp"

namespace v2vgeo {

/// Gaussian tail probability Q(x) = P(N(0,1) > x), via the complementary
/// error function; absolute error below 1e-12 on [-8, 8].
double q_function(double x);

/// Potential obstacle between Tx and Rx: location along the path and the
/// normal distribution of its height.
struct ObstacleHeight {
    double d_obs_m = 0.0;
    double mu_m = 0.0;
    double sigma_m = 0.0;
};

using ObstacleProfile = std::vector<ObstacleHeight>;

/// Probability of LOS conditional on the endpoint antenna heights:
///   P = prod_k [ 1 - Q((h_k - mu_k) / sigma_k) ]
/// where h_k interpolates the antenna line at the obstacle, discounted by
/// 60% of the first Fresnel zone, plus the antenna mast height h_a:
///   h_k = (h_j - h_i) d_k / d + h_i - 0.6 r_f(d_k) + h_a
double p_los_link(double h_i, double h_j, double d, const ObstacleProfile& profile,
                  double wavelength, double h_a);

/// Normal height density for the unconditional average; sigma 0 degenerates
/// to a point mass.
struct HeightDensity {
    double mean = 1.5;
    double sigma = 0.084;
};

/// Eq. over both endpoint height densities, by tensor Gauss-Legendre
/// quadrature across +-5 sigma (the integrand is smooth and bounded).
double p_los_unconditional(const HeightDensity& tx_height, const HeightDensity& rx_height,
                           double d, const ObstacleProfile& profile, double wavelength,
                           double h_a, int quadrature_points = 32);

/// Height deviation assumed for scene vehicles when they appear as obstacles
/// in the analytic model (the sampled height is used as the mean).
struct PlosParams {
    double sigma_height_short = 0.084;
    double sigma_height_tall = 0.084;
};

/// Mean LOS probability from vehicle `vehicle_id` to every neighbor within
/// `range_m`, on the actual scene geometry. Returns nullopt for a vehicle
/// with no neighbors.
std::optional<double> p_los_node(const Scene& scene, const SceneIndices& indices,
                                 int64_t vehicle_id, double range_m,
                                 const RadioConfig& radio, const PlosParams& params = {});

/// Mean of p_los_node over all vehicles that have at least one neighbor.
double p_los_system(const Scene& scene, const SceneIndices& indices, double range_m,
                    const RadioConfig& radio, const PlosParams& params = {});

/// |P(LOS)_i(t2) - P(LOS)_i(t1)| between two trace snapshots. Throws
/// std::invalid_argument when either timestamp or the vehicle is missing.
double delta_p_los(const Trace& trace, int64_t vehicle_id, double t1, double t2,
                   double range_m, const RadioConfig& radio, const PlosParams& params = {});

/// DSRC receiver performance requirements.
struct SensitivityRow {
    double data_rate_mbps;
    const char* modulation;
    double min_sensitivity_dbm;
};

std::span<const SensitivityRow> dsrc_sensitivity_table();

/// Minimum sensitivity for a data rate; throws std::invalid_argument for a
/// rate not in the table.
double sensitivity_for_rate(double data_rate_mbps);

struct PsrBin {
    double bin_start_m = 0.0;
    uint64_t sent = 0;
    uint64_t received = 0;

    double psr() const { return sent == 0 ? 0.0 : static_cast<double>(received) / sent; }
};

/// One simulated transmission per in-range pair; success iff the faded
/// received power meets the rate's sensitivity. Aggregated in 10 m bins.
std::vector<PsrBin> packet_success_rate(const Scene& scene, const SceneIndices& indices,
                                        const RadioConfig& radio, const RangeConfig& ranges,
                                        const FadingConfig& fading, double data_rate_mbps,
                                        double bin_width_m = 10.0);

} // namespace v2vgeo
