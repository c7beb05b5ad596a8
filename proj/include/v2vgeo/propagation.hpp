#pragma once

#include <optional>
#include <span>
#include <vector>

#include "v2vgeo/classify.hpp"
#include "v2vgeo/radio.hpp"
#include "v2vgeo/scenario.hpp"
#include "v2vgeo/spatial.hpp"

namespace v2vgeo {

enum class RayKind {
    Los,
    GroundReflection,
    WallReflection,
    CornerDiffraction,
    VehicleDiffractionTop,
    VehicleDiffractionSide,
};

/// One propagation path contributing to the E-field sum.
struct Ray {
    RayKind kind = RayKind::Los;
    double path_length_m = 0.0;
    /// Product of the reflection coefficient R or diffraction attenuation D
    /// (as a field ratio) picked up along the path; the 1/d spreading is
    /// applied separately from path_length.
    double amplitude_factor = 1.0;
    int64_t interaction_id = -1; // reflecting wall / diffracting corner owner
};

enum class PowerMechanism { TwoRay, KnifeEdge, ReflDiffr, LogDistanceFallback, NoSignal };

/// "No signal" sentinel: a distinct value, never NaN.
inline constexpr double kNoSignalDbm = -std::numeric_limits<double>::infinity();

struct PowerResult {
    double rx_power_dbm = kNoSignalDbm;
    PowerMechanism mechanism = PowerMechanism::NoSignal;
    std::vector<Ray> rays;

    bool has_signal() const { return std::isfinite(rx_power_dbm); }
};

/// Additional attenuation (dB) of a single knife edge with clearance
/// parameter v = sqrt(2) H / r_f:
///   A = 6.9 + 20 log10( sqrt((v-0.1)^2 + 1) + v - 0.1 )   for v > -0.7
///   A = 0                                                 otherwise
double knife_edge_loss(double v);

/// One edge of a diffraction profile: distance from the transmitter along
/// the path and the edge's excess height over the straight Tx-Rx line.
struct KnifeEdgeObstacle {
    double d_obs_m = 0.0;
    double excess_height_m = 0.0;
};

/// Cascaded knife-edge loss over a profile ordered by d_obs (Epstein-Peterson
/// construction: each edge is evaluated on the sub-path between its
/// neighbors' tops). With itu_correction a spreading-loss term is added for
/// every interior gap:
///   C = 10 log10( (a+b)(b+c) / (b (a+b+c)) )
/// with a, b, c the sub-path lengths around the gap.
double multiple_knife_edge_loss(std::span<const KnifeEdgeObstacle> profile,
                                double total_distance_m, double wavelength_m,
                                bool itu_correction = true);

/// Grazing-angle reflection coefficients, free space onto a medium of
/// relative permittivity eps_r:
///   parallel      (E in the plane of incidence):
///       R = (-eps sin t + sqrt(eps - cos^2 t)) / (eps sin t + sqrt(eps - cos^2 t))
///   perpendicular (E normal to the plane of incidence):
///       R = (sin t - sqrt(eps - cos^2 t)) / (sin t + sqrt(eps - cos^2 t))
/// theta is measured from the surface; throws std::domain_error outside
/// 0 < theta <= pi/2 or eps_r < 1.
enum class ReflectionPolarization { Parallel, Perpendicular };
double reflection_coefficient(double theta_grazing_rad, double eps_r,
                              ReflectionPolarization pol);

/// Direct + ground-reflected ray with exact path lengths from the exact
/// antenna heights (no large-distance approximation).
PowerResult two_ray_power(Point2 tx_pos, double tx_antenna_height_m, Point2 rx_pos,
                          double rx_antenna_height_m, const RadioConfig& radio);

/// Lateral knife edges seen by one horizontal-plane detour around the
/// blocking vehicles (left or right side).
struct SideProfile {
    std::vector<KnifeEdgeObstacle> edges;
};

/// Rays replacing the free-space bundle on an NLOSv link: the vertical-plane
/// bundle (direct + ground, both carrying the roof-cascade loss) plus up to
/// two horizontal-plane side rays.
std::vector<Ray> vehicle_obstruction_field(Point2 tx_pos, double tx_antenna_height_m,
                                           Point2 rx_pos, double rx_antenna_height_m,
                                           std::span<const KnifeEdgeObstacle> top_profile,
                                           const std::optional<SideProfile>& left,
                                           const std::optional<SideProfile>& right,
                                           const RadioConfig& radio);

/// Single-bounce wall reflections by the method of images. Every candidate
/// wall inside the NLOSb search ellipse is mirrored; the reflected ray is
/// kept when a specular point exists on the wall segment, both legs clear
/// the statics and any sufficiently tall vehicles, and the unfolded path is
/// within the NLOSb range. Vehicles also act as reflectors when taller than
/// both antennas.
std::vector<Ray> find_wall_reflections(const Scene& scene, const SceneIndices& indices,
                                       const Vehicle& tx, const Vehicle& rx,
                                       const RadioConfig& radio, double search_range_m);

/// Single-corner diffractions in the horizontal plane: building corners
/// inside the search ellipse visible from both endpoints, attenuated by the
/// knife-edge loss of the corner's lateral excess over the Tx-Rx line.
std::vector<Ray> find_corner_diffractions(const Scene& scene, const SceneIndices& indices,
                                          const Vehicle& tx, const Vehicle& rx,
                                          const RadioConfig& radio, double search_range_m);

/// Mean-excess-loss foliage transmission: MEL = 0.79 f^0.61 dB per meter
/// (f in GHz), summed over per-object crossing lengths.
double foliage_loss_db(std::span<const std::pair<int64_t, double>> crossings,
                       double frequency_hz);
double foliage_mel_db_per_m(double frequency_hz);

/// Phasor sum of the rays' E-fields and conversion to received power:
///   Pr = |E_tot|^2 lambda^2 / (480 pi^2)   [W], scaled by antenna gains.
PowerResult combine_efield(std::span<const Ray> rays, const RadioConfig& radio,
                           PowerMechanism mechanism = PowerMechanism::ReflDiffr);

/// Log-distance path loss fallback:
///   Pr(d) = Pt + Gt + Gr - PL(d0) - 10 gamma log10(d/d0)
/// Default PL(d0) is free space at the reference distance. Throws
/// std::domain_error for d < d0.
double log_distance_power_dbm(double distance_m, const RadioConfig& radio, double gamma,
                              std::optional<double> pl_d0_db = std::nullopt);

/// Full per-link large-scale power given the classification result.
PowerResult received_power(const Scene& scene, const SceneIndices& indices,
                           const Vehicle& tx, const Vehicle& rx, LinkClass link_class,
                           const ObstructionDetail& detail, const RadioConfig& radio,
                           const RangeConfig& ranges);

} // namespace v2vgeo
