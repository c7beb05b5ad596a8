#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "v2vgeo/geometry.hpp"

namespace v2vgeo {

/// Malformed input file (bad JSON, missing fields, wrong types).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Structurally valid input violating a scene invariant; the message names
/// the offending object id.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class VehicleClass { Short, Tall };

struct Vehicle {
    int64_t id = 0;
    Point2 position;            // footprint center
    double heading_rad = 0.0;
    double length_m = 0.0;
    double width_m = 0.0;
    double height_m = 0.0;      // roof height above ground
    double antenna_height_m = 0.10; // antenna mast above the roof (h_a)
    VehicleClass cls = VehicleClass::Short;

    /// Absolute antenna height above ground.
    double antenna_total_height() const { return height_m + antenna_height_m; }
};

enum class StaticKind { Building, Foliage };

struct StaticObject {
    int64_t id = 0;
    StaticKind kind = StaticKind::Building;
    Polygon outline; // simple, stored CCW
    std::optional<double> relative_permittivity; // buildings only
};

struct Scene {
    double timestamp_s = 0.0;
    std::vector<Vehicle> vehicles;
    std::vector<StaticObject> statics;

    const Vehicle* find_vehicle(int64_t id) const;
};

/// Ordered snapshots with strictly increasing timestamps.
struct Trace {
    std::vector<Scene> snapshots;
};

/// Normal distribution parameters for a sampled dimension.
struct DimFit {
    double mean = 0.0;
    double sigma = 0.0;
};

/// Parameters of the synthetic highway generator. Defaults follow the fitted
/// highway distributions: exponential center-to-center gaps per lane, normal
/// widths/heights per vehicle class, constant width for tall vehicles.
struct HighwaySpec {
    double road_length_m = 12500.0;
    int lanes = 4;
    double lane_width_m = 3.5;
    double mean_spacing_m = 51.58; // exponential mean of successive gaps
    double tall_fraction = 0.1436;
    DimFit short_height{1.50, 0.084};
    DimFit short_width{1.75, 0.083};
    DimFit short_length{4.50, 0.25};
    DimFit tall_height{3.35, 0.084};
    DimFit tall_width{2.50, 0.0};
    DimFit tall_length{10.0, 1.5};
    double antenna_height_m = 0.10;
    uint64_t seed = 1;
};

/// Oriented length x width rectangle around the vehicle pose, CCW.
Polygon vehicle_footprint(const Vehicle& v);

Scene load_scene(const std::string& path);
Scene scene_from_json_text(const std::string& text);
std::string scene_to_json_text(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

Trace load_trace(const std::string& path);

/// Deterministic per seed; one pass per lane placing vehicles at exponential
/// center-to-center gaps until the road length is exhausted.
Scene synth_highway(const HighwaySpec& spec);

/// Validates all scene invariants, throwing ValidationError naming the first
/// offending object. Called by the loaders; exposed for generated scenes.
void validate_scene(const Scene& scene);

} // namespace v2vgeo
