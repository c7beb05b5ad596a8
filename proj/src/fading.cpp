#include "v2vgeo/fading.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "v2vgeo/rng.hpp"

namespace v2vgeo {

std::pair<double, double> FadingConfig::bounds(LinkClass c) const {
    switch (c) {
    case LinkClass::LOS: return {sigma_min_los, sigma_max_los};
    case LinkClass::NLOSv: return {sigma_min_nlosv, sigma_max_nlosv};
    default: return {sigma_min_nlosb, sigma_max_nlosb};
    }
}

DensitySample density_in_ellipse(const Scene& scene, const SceneIndices& indices,
                                 const SearchEllipse& ellipse) {
    DensitySample sample;
    const double area_km2 = ellipse.area() / 1e6;
    if (!(area_km2 > 0.0)) return sample;
    const auto vehicle_ids = indices.vehicles.query_ellipse(ellipse);
    sample.nv_per_km2 = static_cast<double>(vehicle_ids.size()) / area_km2;
    double static_area = 0.0;
    for (int64_t id : indices.statics.query_ellipse(ellipse)) {
        for (const auto& s : scene.statics) {
            if (s.id == id) {
                static_area += polygon_area(s.outline);
                break;
            }
        }
    }
    sample.as_m2_per_km2 = static_area / area_km2;
    return sample;
}

double sigma_for_link(const DensitySample& sample, LinkClass link_class,
                      const FadingConfig& cfg) {
    const auto [smin, smax] = cfg.bounds(link_class);
    const double nv = std::clamp(sample.nv_per_km2, 0.0, cfg.nv_max_per_km2);
    const double as = std::clamp(sample.as_m2_per_km2, 0.0, cfg.as_max_m2_per_km2);
    return smin + (smax - smin) / 2.0 *
                      (std::sqrt(nv / cfg.nv_max_per_km2) +
                       std::sqrt(as / cfg.as_max_m2_per_km2));
}

double fading_unit_normal(const LinkKey& key, const FadingConfig& cfg) {
    // Counter-based: the draw is a pure function of (seed, tx, rx, t). The
    // pair is normalized so both link directions share one draw.
    const uint64_t lo = static_cast<uint64_t>(std::min(key.tx_id, key.rx_id));
    const uint64_t hi = static_cast<uint64_t>(std::max(key.tx_id, key.rx_id));
    Rng rng(mix_key({cfg.seed, lo, hi, std::bit_cast<uint64_t>(key.timestamp_s)}));
    return rng.normal(0.0, 1.0);
}

double apply_fading(double pr_dbm, double sigma_db, const LinkKey& key,
                    const FadingConfig& cfg) {
    if (sigma_db == 0.0) return pr_dbm;
    return pr_dbm + sigma_db * fading_unit_normal(key, cfg);
}

} // namespace v2vgeo
