#include "v2vgeo/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "v2vgeo/rng.hpp"

namespace v2vgeo {

using ordered_json = nlohmann::ordered_json;

const Vehicle* Scene::find_vehicle(int64_t id) const {
    for (const auto& v : vehicles)
        if (v.id == id) return &v;
    return nullptr;
}

Polygon vehicle_footprint(const Vehicle& v) {
    const double hl = v.length_m / 2.0;
    const double hw = v.width_m / 2.0;
    const double c = std::cos(v.heading_rad);
    const double s = std::sin(v.heading_rad);
    auto corner = [&](double lx, double ly) -> Point2 {
        return {v.position.x + lx * c - ly * s, v.position.y + lx * s + ly * c};
    };
    // CCW for heading 0: rear-right, front-right, front-left, rear-left.
    return {corner(-hl, -hw), corner(hl, -hw), corner(hl, hw), corner(-hl, hw)};
}

namespace {

bool finite(double v) { return std::isfinite(v); }

void validate_vehicle(const Vehicle& v) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("vehicle id " + std::to_string(v.id) + ": " + what);
    };
    if (!finite(v.position.x) || !finite(v.position.y) || !finite(v.heading_rad)) {
        fail("non-finite pose");
    }
    if (!(v.length_m > 0.0) || !(v.width_m > 0.0) || !(v.height_m > 0.0)) {
        fail("nonpositive dimension");
    }
    if (!(v.antenna_height_m >= 0.0) || !finite(v.antenna_height_m)) {
        fail("negative antenna height");
    }
}

Polygon normalize_outline(Polygon outline, int64_t id) {
    auto fail = [&](const std::string& what) {
        throw ValidationError("static id " + std::to_string(id) + ": " + what);
    };
    for (Point2 p : outline) {
        if (!finite(p.x) || !finite(p.y)) fail("non-finite vertex");
    }
    // Tolerate and drop a repeated closing vertex.
    if (outline.size() >= 2 && norm(outline.front() - outline.back()) < 1e-9) {
        outline.pop_back();
    }
    if (outline.size() < 3) fail("fewer than 3 vertices");
    if (!is_simple_polygon(outline)) fail("self-intersecting polygon");
    if (!is_ccw(outline)) std::reverse(outline.begin(), outline.end());
    return outline;
}

} // namespace

void validate_scene(const Scene& scene) {
    if (!finite(scene.timestamp_s)) throw ValidationError("non-finite timestamp");
    std::unordered_set<int64_t> ids;
    for (const auto& v : scene.vehicles) {
        validate_vehicle(v);
        if (!ids.insert(v.id).second) {
            throw ValidationError("vehicle id " + std::to_string(v.id) + ": duplicate id");
        }
    }
    ids.clear();
    for (const auto& s : scene.statics) {
        if (!ids.insert(s.id).second) {
            throw ValidationError("static id " + std::to_string(s.id) + ": duplicate id");
        }
        if (s.outline.size() < 3) {
            throw ValidationError("static id " + std::to_string(s.id) +
                                  ": fewer than 3 vertices");
        }
    }
    // Static outlines must not overlap; bbox prefilter keeps this tractable.
    std::vector<Rect> boxes;
    boxes.reserve(scene.statics.size());
    for (const auto& s : scene.statics) boxes.push_back(bounding_rect(s.outline));
    for (size_t i = 0; i < scene.statics.size(); ++i) {
        for (size_t j = i + 1; j < scene.statics.size(); ++j) {
            const Rect& a = boxes[i];
            const Rect& b = boxes[j];
            if (a.max_x < b.min_x || b.max_x < a.min_x || a.max_y < b.min_y ||
                b.max_y < a.min_y) {
                continue;
            }
            if (polygons_interiors_overlap(scene.statics[i].outline,
                                           scene.statics[j].outline)) {
                throw ValidationError("static id " + std::to_string(scene.statics[j].id) +
                                      ": outline overlaps static id " +
                                      std::to_string(scene.statics[i].id));
            }
        }
    }
}

namespace {

Scene scene_from_json(const ordered_json& j) {
    Scene scene;
    try {
        scene.timestamp_s = j.value("timestamp", 0.0);
        for (const auto& jv : j.value("vehicles", ordered_json::array())) {
            Vehicle v;
            v.id = jv.at("id").get<int64_t>();
            v.position = {jv.at("x").get<double>(), jv.at("y").get<double>()};
            v.heading_rad = jv.at("heading_rad").get<double>();
            v.length_m = jv.at("length").get<double>();
            v.width_m = jv.at("width").get<double>();
            v.height_m = jv.at("height").get<double>();
            v.antenna_height_m = jv.value("antenna_height", 0.10);
            std::string cls = jv.value("class", "short");
            if (cls == "short") {
                v.cls = VehicleClass::Short;
            } else if (cls == "tall") {
                v.cls = VehicleClass::Tall;
            } else {
                throw ParseError("vehicle id " + std::to_string(v.id) +
                                 ": unknown class '" + cls + "'");
            }
            scene.vehicles.push_back(v);
        }
        for (const auto& js : j.value("statics", ordered_json::array())) {
            StaticObject s;
            s.id = js.at("id").get<int64_t>();
            std::string kind = js.at("kind").get<std::string>();
            if (kind == "building") {
                s.kind = StaticKind::Building;
            } else if (kind == "foliage") {
                s.kind = StaticKind::Foliage;
            } else {
                throw ParseError("static id " + std::to_string(s.id) + ": unknown kind '" +
                                 kind + "'");
            }
            if (js.contains("permittivity")) {
                s.relative_permittivity = js.at("permittivity").get<double>();
            }
            Polygon outline;
            for (const auto& pt : js.at("outline")) {
                outline.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
            }
            s.outline = normalize_outline(std::move(outline), s.id);
            scene.statics.push_back(std::move(s));
        }
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("malformed scene: ") + e.what());
    }
    validate_scene(scene);
    return scene;
}

ordered_json scene_to_json(const Scene& scene) {
    ordered_json j;
    j["timestamp"] = scene.timestamp_s;
    auto& jvs = j["vehicles"] = ordered_json::array();
    for (const auto& v : scene.vehicles) {
        ordered_json jv;
        jv["id"] = v.id;
        jv["x"] = v.position.x;
        jv["y"] = v.position.y;
        jv["heading_rad"] = v.heading_rad;
        jv["length"] = v.length_m;
        jv["width"] = v.width_m;
        jv["height"] = v.height_m;
        jv["antenna_height"] = v.antenna_height_m;
        jv["class"] = v.cls == VehicleClass::Tall ? "tall" : "short";
        jvs.push_back(std::move(jv));
    }
    auto& jss = j["statics"] = ordered_json::array();
    for (const auto& s : scene.statics) {
        ordered_json js;
        js["id"] = s.id;
        js["kind"] = s.kind == StaticKind::Building ? "building" : "foliage";
        if (s.relative_permittivity) js["permittivity"] = *s.relative_permittivity;
        auto& jo = js["outline"] = ordered_json::array();
        for (Point2 p : s.outline) jo.push_back({p.x, p.y});
        jss.push_back(std::move(js));
    }
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

Scene scene_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return scene_from_json(j);
}

std::string scene_to_json_text(const Scene& scene) {
    return scene_to_json(scene).dump(2) + "\n";
}

Scene load_scene(const std::string& path) { return scene_from_json_text(read_file(path)); }

void save_scene(const Scene& scene, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << scene_to_json_text(scene);
}

Trace load_trace(const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const ordered_json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_array()) throw ParseError("trace file must be a JSON array of scenes");
    Trace trace;
    for (size_t i = 0; i < j.size(); ++i) {
        Scene s = scene_from_json(j[i]);
        if (!trace.snapshots.empty() &&
            s.timestamp_s <= trace.snapshots.back().timestamp_s) {
            throw ValidationError("trace snapshot " + std::to_string(i) +
                                  ": timestamp not strictly increasing");
        }
        trace.snapshots.push_back(std::move(s));
    }
    return trace;
}

namespace {

double sample_dim(Rng& rng, const DimFit& fit, double min_value) {
    if (fit.sigma == 0.0) return std::max(fit.mean, min_value);
    // Truncated normal by rejection; keeps degenerate obstacles out.
    for (int i = 0; i < 1000; ++i) {
        double v = rng.normal(fit.mean, fit.sigma);
        if (v >= min_value) return v;
    }
    return min_value;
}

} // namespace

Scene synth_highway(const HighwaySpec& spec) {
    Scene scene;
    Rng rng(spec.seed);
    int64_t next_id = 1;
    for (int lane = 0; lane < spec.lanes; ++lane) {
        const double y = (static_cast<double>(lane) + 0.5) * spec.lane_width_m;
        // Successive bumper-to-bumper gaps drawn i.i.d. exponential; vehicles
        // in a lane never overlap.
        double cursor = 0.0;
        while (true) {
            const double gap = rng.exponential(spec.mean_spacing_m);
            Vehicle v;
            v.id = next_id;
            v.heading_rad = 0.0;
            const bool tall = rng.uniform01() < spec.tall_fraction;
            v.cls = tall ? VehicleClass::Tall : VehicleClass::Short;
            const DimFit& hf = tall ? spec.tall_height : spec.short_height;
            const DimFit& wf = tall ? spec.tall_width : spec.short_width;
            const DimFit& lf = tall ? spec.tall_length : spec.short_length;
            v.height_m = sample_dim(rng, hf, 0.5);
            v.width_m = sample_dim(rng, wf, 0.5);
            v.length_m = sample_dim(rng, lf, 0.5);
            v.antenna_height_m = spec.antenna_height_m;
            const double rear = cursor + gap;
            v.position = {rear + v.length_m / 2.0, y};
            if (v.position.x + v.length_m / 2.0 > spec.road_length_m) break;
            cursor = v.position.x + v.length_m / 2.0;
            scene.vehicles.push_back(v);
            ++next_id;
        }
    }
    return scene;
}

} // namespace v2vgeo
