#pragma once

#include <cstdint>

#include "v2vgeo/classify.hpp"
#include "v2vgeo/scenario.hpp"
#include "v2vgeo/spatial.hpp"

namespace v2vgeo {

/// Small-scale fading deviation bounds per link class (dB), with the density
/// normalizers of the interpolation. Defaults are the measured table values
/// and the downtown-Porto-derived density maxima.
struct FadingConfig {
    double sigma_min_los = 3.3;
    double sigma_max_los = 5.2;
    double sigma_min_nlosv = 0.0;
    double sigma_max_nlosv = 5.3;
    double sigma_min_nlosb = 0.0;
    double sigma_max_nlosb = 6.8;
    double nv_max_per_km2 = 255.0;     // vehicles per km^2
    double as_max_m2_per_km2 = 8.6e6 / 41.3; // m^2 of statics per km^2
    uint64_t seed = 0;

    std::pair<double, double> bounds(LinkClass c) const;
};

/// Object density inside one link's communication ellipse.
struct DensitySample {
    double nv_per_km2 = 0.0;
    double as_m2_per_km2 = 0.0;
};

/// Counts vehicles and sums static footprint areas inside the link ellipse,
/// normalized by the ellipse area.
DensitySample density_in_ellipse(const Scene& scene, const SceneIndices& indices,
                                 const SearchEllipse& ellipse);

/// Square interpolation between the class bounds:
///   sigma = s_min + (s_max - s_min)/2 * ( sqrt(NV/NV_max) + sqrt(AS/AS_max) )
/// with both densities clamped to [0, max].
double sigma_for_link(const DensitySample& sample, LinkClass link_class,
                      const FadingConfig& cfg);

/// Identifies one link instance for the keyed fading draw. Draws depend only
/// on (seed, key), so evaluation order and thread count cannot change them.
struct LinkKey {
    int64_t tx_id = 0;
    int64_t rx_id = 0;
    double timestamp_s = 0.0;
};

/// Deterministic N(0, sigma) draw added to the large-scale power (dBm).
double apply_fading(double pr_dbm, double sigma_db, const LinkKey& key,
                    const FadingConfig& cfg);

/// The underlying standard-normal draw, exposed for statistical tests.
double fading_unit_normal(const LinkKey& key, const FadingConfig& cfg);

} // namespace v2vgeo
