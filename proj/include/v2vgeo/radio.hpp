#pragma once

#include <cmath>

namespace v2vgeo {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.141592653589793;

enum class Environment { Highway, Urban };

/// E-field orientation of the antennas.
enum class AntennaPolarization { Vertical, Horizontal };

/// Phase handling for multipath combination: exact geometric phase from ray
/// path lengths, or per-ray uniform random phase when the geometry database
/// is too coarse for centimeter-grade path lengths.
enum class PhaseModel { Geometric, Random };

struct RadioConfig {
    double frequency_hz = 5.9e9;
    double tx_power_dbm = 18.0;
    double tx_gain_dbi = 0.0;
    double rx_gain_dbi = 0.0;
    AntennaPolarization polarization = AntennaPolarization::Vertical;
    double ground_permittivity = 1.003;
    double default_wall_permittivity = 4.5; // typical brick; tunable
    double reference_distance_m = 1.0;      // d0
    double path_loss_exponent = 2.9;        // gamma for the NLOSb fallback
    PhaseModel phase_model = PhaseModel::Geometric;
    uint64_t phase_seed = 0;                 // used when phase_model == Random
    bool itu_knife_edge_correction = true;   // spreading correction on cascades
    double device_threshold_dbm = -92.0;     // radio decode floor (not a rate
                                             // sensitivity; see plos tables)

    double wavelength_m() const { return kSpeedOfLight / frequency_hz; }
    double tx_power_w() const { return std::pow(10.0, (tx_power_dbm - 30.0) / 10.0); }

    /// Reference E-field at d0 for unit gain, chosen so a lone unobstructed
    /// ray reproduces free-space (Friis) received power:
    ///   E0 = sqrt(30 * Pt) / d0  [V/m]
    double e_field_reference() const {
        return std::sqrt(30.0 * tx_power_w()) / reference_distance_m;
    }
};

/// Per-class maximum communication ranges (meters).
struct RangeConfig {
    double r_los = 1000.0;
    double r_nlosv = 400.0;
    double r_nlosb = 300.0;

    static RangeConfig for_environment(Environment env) {
        RangeConfig rc;
        rc.r_los = env == Environment::Urban ? 500.0 : 1000.0;
        return rc;
    }
    double max_range() const { return std::max(r_los, std::max(r_nlosv, r_nlosb)); }
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace v2vgeo
