#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "v2vgeo/radio.hpp"
#include "v2vgeo/scenario.hpp"
#include "v2vgeo/spatial.hpp"

namespace v2vgeo {

enum class LinkClass { LOS, NLOSv, NLOSb, OutOfRange };

std::string to_string(LinkClass c);

/// One vehicle whose footprint crosses the Tx-Rx segment.
struct VehicleObstacle {
    int64_t id = 0;
    double d_obs_m = 0.0;        // distance from Tx along the segment
    double height_m = 0.0;       // obstacle roof height
    double line_height_m = 0.0;  // antenna line height at d_obs
    double fresnel_radius_m = 0.0;
    double lateral_min_m = 0.0;  // signed footprint extent across the segment
    double lateral_max_m = 0.0;
    bool blocks_fresnel = false; // penetrates more than 40% of the first zone
};

struct ObstructionDetail {
    std::vector<int64_t> blocking_static_ids;   // ordered along the path
    std::vector<VehicleObstacle> vehicles;      // every crosser, by d_obs;
                                                // blockers flagged
    std::vector<std::pair<int64_t, double>> foliage_crossings_m; // id, length
    bool statics_blocked = false;
    bool has_building_block = false;

    size_t blocking_vehicle_count() const {
        size_t n = 0;
        for (const auto& v : vehicles) n += v.blocks_fresnel ? 1 : 0;
        return n;
    }
};

/// Radius of the first Fresnel zone at distance d_obs from the transmitter
/// on a path of length d:  r_f = sqrt(lambda * d_obs * (d - d_obs) / d).
/// Throws std::domain_error unless 0 < d_obs < d.
double fresnel_radius(double d, double d_obs, double wavelength);

/// Static and vehicle indexes over one scene, built once per snapshot.
struct SceneIndices {
    SpatialIndex statics;
    SpatialIndex vehicles;

    static SceneIndices build(const Scene& scene);
};

/// Classifies one link. Statics take precedence: a building or foliage
/// outline crossing the 2-D segment makes the link NLOSb and vehicles are
/// not examined. Otherwise every vehicle footprint crossing the segment is
/// tested against the 60%-of-first-Fresnel-zone line.
std::pair<LinkClass, ObstructionDetail> classify_link(const Scene& scene,
                                                      const SceneIndices& indices,
                                                      const Vehicle& tx, const Vehicle& rx,
                                                      const RadioConfig& radio,
                                                      const RangeConfig& ranges);

struct LinkResult {
    int64_t tx_id = 0;
    int64_t rx_id = 0;
    double distance_m = 0.0;
    LinkClass link_class = LinkClass::LOS;
    ObstructionDetail detail;
};

/// One entry per unordered pair within the configured r_LOS, ordered by
/// (min id, max id). Deterministic regardless of thread count.
std::vector<LinkResult> classify_all(const Scene& scene, const SceneIndices& indices,
                                     const RadioConfig& radio, const RangeConfig& ranges);

} // namespace v2vgeo
