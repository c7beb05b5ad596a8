// Command-line front end: scene I/O, synthetic generation, link sweeps,
// P(LOS) analytics, PSR, relay comparison, and scaling benchmarks.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "v2vgeo/classify.hpp"
#include "v2vgeo/fading.hpp"
#include "v2vgeo/plos.hpp"
#include "v2vgeo/propagation.hpp"
#include "v2vgeo/relay.hpp"
#include "v2vgeo/rng.hpp"
#include "v2vgeo/scenario.hpp"

using namespace v2vgeo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

std::string fmt(double v, int prec = 6) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
    return buf;
}

struct OutputSink {
    std::string path;   // empty: stdout
    std::string format; // csv | json

    void write_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) const {
        std::ostringstream out;
        if (format == "json") {
            nlohmann::ordered_json arr = nlohmann::ordered_json::array();
            for (const auto& row : rows) {
                nlohmann::ordered_json obj;
                for (size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
                arr.push_back(obj);
            }
            out << arr.dump(2) << "\n";
        } else {
            for (size_t i = 0; i < header.size(); ++i) {
                out << header[i] << (i + 1 < header.size() ? "," : "");
            }
            out << "\n";
            for (const auto& row : rows) {
                for (size_t i = 0; i < row.size(); ++i) {
                    out << row[i] << (i + 1 < row.size() ? "," : "");
                }
                out << "\n";
            }
        }
        if (path.empty()) {
            std::cout << out.str();
        } else {
            std::ofstream f(path, std::ios::binary);
            if (!f) throw ParseError("cannot open output file: " + path);
            f << out.str();
        }
    }
};

struct CommonOpts {
    std::string scene_path;
    uint64_t seed = 1;
    double freq_hz = 5.9e9;
    double tx_dbm = 18.0;
    double gain_dbi = 0.0;
    std::string env = "highway";
    OutputSink sink;

    RadioConfig radio() const {
        RadioConfig rc;
        rc.frequency_hz = freq_hz;
        rc.tx_power_dbm = tx_dbm;
        rc.tx_gain_dbi = gain_dbi;
        rc.rx_gain_dbi = gain_dbi;
        return rc;
    }
    RangeConfig ranges() const {
        return RangeConfig::for_environment(env == "urban" ? Environment::Urban
                                                           : Environment::Highway);
    }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool scene_required) {
    auto* scene = cmd->add_option("--scene", o.scene_path, "Scene JSON path");
    if (scene_required) scene->required();
    cmd->add_option("--seed", o.seed, "Seed for all randomness");
    cmd->add_option("--freq-hz", o.freq_hz, "Carrier frequency (Hz)");
    cmd->add_option("--tx-dbm", o.tx_dbm, "Transmit power (dBm)");
    cmd->add_option("--gain-dbi", o.gain_dbi, "Antenna gain, both ends (dBi)");
    cmd->add_option("--env", o.env, "Environment: highway|urban")
        ->check(CLI::IsMember({"highway", "urban"}));
    cmd->add_option("--out", o.sink.path, "Output path (default stdout)");
    o.sink.format = "csv";
    cmd->add_option("--format", o.sink.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_highway_spec(CLI::App* cmd, HighwaySpec& spec) {
    cmd->add_option("--length", spec.road_length_m, "Road length (m)");
    cmd->add_option("--lanes", spec.lanes, "Lane count");
    cmd->add_option("--lane-width", spec.lane_width_m, "Lane width (m)");
    cmd->add_option("--spacing", spec.mean_spacing_m, "Mean exponential gap per lane (m)");
    cmd->add_option("--tall-fraction", spec.tall_fraction, "Tall vehicle fraction");
}

int cmd_synth(const CommonOpts& o, const HighwaySpec& spec_in) {
    HighwaySpec spec = spec_in;
    spec.seed = o.seed;
    Scene scene = synth_highway(spec);
    if (o.sink.path.empty()) {
        std::cout << scene_to_json_text(scene);
    } else {
        save_scene(scene, o.sink.path);
    }
    return kExitOk;
}

int cmd_classify(const CommonOpts& o) {
    const Scene scene = load_scene(o.scene_path);
    const auto indices = SceneIndices::build(scene);
    const auto links = classify_all(scene, indices, o.radio(), o.ranges());
    std::vector<std::vector<std::string>> rows;
    for (const auto& l : links) {
        const size_t blockers =
            l.detail.blocking_static_ids.size() + l.detail.blocking_vehicle_count();
        rows.push_back({std::to_string(l.tx_id), std::to_string(l.rx_id),
                        fmt(l.distance_m, 3), to_string(l.link_class),
                        std::to_string(blockers)});
    }
    o.sink.write_table({"tx", "rx", "distance_m", "class", "n_blockers"}, rows);
    return kExitOk;
}

int cmd_power(const CommonOpts& o) {
    const Scene scene = load_scene(o.scene_path);
    const auto indices = SceneIndices::build(scene);
    const RadioConfig radio = o.radio();
    const RangeConfig ranges = o.ranges();
    FadingConfig fading;
    fading.seed = o.seed;
    const auto links = classify_all(scene, indices, radio, ranges);
    std::vector<std::vector<std::string>> rows;
    for (const auto& l : links) {
        const Vehicle* tx = scene.find_vehicle(l.tx_id);
        const Vehicle* rx = scene.find_vehicle(l.rx_id);
        const auto power =
            received_power(scene, indices, *tx, *rx, l.link_class, l.detail, radio, ranges);
        double sigma = 0.0;
        double faded = power.rx_power_dbm;
        if (power.has_signal()) {
            const SearchEllipse ellipse{tx->position, rx->position, ranges.max_range()};
            sigma = sigma_for_link(density_in_ellipse(scene, indices, ellipse),
                                   l.link_class, fading);
            faded = apply_fading(power.rx_power_dbm, sigma,
                                 {l.tx_id, l.rx_id, scene.timestamp_s}, fading);
        }
        rows.push_back({std::to_string(l.tx_id), std::to_string(l.rx_id),
                        fmt(l.distance_m, 3), to_string(l.link_class),
                        fmt(power.rx_power_dbm), fmt(sigma), fmt(faded)});
    }
    o.sink.write_table(
        {"tx", "rx", "distance_m", "class", "large_scale_dbm", "sigma_db", "faded_dbm"},
        rows);
    return kExitOk;
}

int cmd_plos(const CommonOpts& o, const HighwaySpec& spec_in,
             const std::vector<double>& sweep) {
    Scene scene;
    if (!o.scene_path.empty()) {
        scene = load_scene(o.scene_path);
    } else {
        HighwaySpec spec = spec_in;
        spec.seed = o.seed;
        scene = synth_highway(spec);
    }
    const auto indices = SceneIndices::build(scene);
    const RadioConfig radio = o.radio();
    std::vector<std::vector<std::string>> rows;
    for (double range : sweep) {
        const double p = p_los_system(scene, indices, range, radio);
        rows.push_back({fmt(range, 1), fmt(p)});
    }
    o.sink.write_table({"range_m", "system_plos"}, rows);
    return kExitOk;
}

int cmd_psr(const CommonOpts& o, const std::vector<double>& rates) {
    const Scene scene = load_scene(o.scene_path);
    const auto indices = SceneIndices::build(scene);
    const RadioConfig radio = o.radio();
    const RangeConfig ranges = o.ranges();
    FadingConfig fading;
    fading.seed = o.seed;
    std::vector<std::vector<PsrBin>> per_rate;
    size_t max_bins = 0;
    for (double rate : rates) {
        per_rate.push_back(
            packet_success_rate(scene, indices, radio, ranges, fading, rate));
        max_bins = std::max(max_bins, per_rate.back().size());
    }
    std::vector<std::string> header{"bin_start_m"};
    for (double rate : rates) header.push_back("psr_" + fmt(rate, 1) + "mbps");
    std::vector<std::vector<std::string>> rows;
    for (size_t b = 0; b < max_bins; ++b) {
        std::vector<std::string> row{fmt(static_cast<double>(b) * 10.0, 1)};
        for (const auto& bins : per_rate) {
            row.push_back(b < bins.size() && bins[b].sent > 0 ? fmt(bins[b].psr()) : "");
        }
        rows.push_back(std::move(row));
    }
    o.sink.write_table(header, rows);
    return kExitOk;
}

int cmd_relay(const CommonOpts& o, const HighwaySpec& spec_in, size_t n_scenes,
              size_t n_pairs, double threshold_dbm, double x_max,
              const std::string& routes_out) {
    const RadioConfig radio = o.radio();
    const RangeConfig ranges = o.ranges();
    FadingConfig fading;
    fading.seed = o.seed;
    GraphOptions gopts;
    gopts.reception_threshold_dbm = threshold_dbm;

    std::vector<NeighborGraph> graphs;
    if (!o.scene_path.empty()) {
        const Scene scene = load_scene(o.scene_path);
        const auto indices = SceneIndices::build(scene);
        graphs.push_back(build_graph(scene, indices, radio, ranges, fading, gopts));
    } else {
        for (size_t s = 0; s < n_scenes; ++s) {
            HighwaySpec spec = spec_in;
            spec.seed = mix_key({o.seed, static_cast<uint64_t>(s)});
            const Scene scene = synth_highway(spec);
            const auto indices = SceneIndices::build(scene);
            graphs.push_back(build_graph(scene, indices, radio, ranges, fading, gopts));
        }
    }
    const std::vector<RelayTechnique> techniques = {
        RelayTechnique::farthest(), RelayTechnique::most_new_neighbors(),
        RelayTechnique::tvr(x_max)};
    const auto cmp = compare_techniques(graphs, techniques, n_pairs, o.seed);
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : cmp.stats) {
        const double pct_best =
            s.pairs == 0 ? 0.0 : 100.0 * static_cast<double>(s.best_routes) / s.pairs;
        const double pct_success =
            s.pairs == 0 ? 0.0 : 100.0 * static_cast<double>(s.successes) / s.pairs;
        rows.push_back({s.technique, std::to_string(s.pairs), fmt(pct_success, 2),
                        fmt(pct_best, 2), fmt(s.mean_hops, 3),
                        fmt(100.0 * s.relay_vehicle_fraction, 2)});
    }
    o.sink.write_table({"technique", "pairs", "pct_delivered", "pct_best_routes",
                        "mean_hops", "pct_vehicles_relaying"},
                       rows);
    if (!routes_out.empty()) {
        // Per-route log for one representative graph.
        std::ofstream f(routes_out, std::ios::binary);
        if (!f) throw ParseError("cannot open output file: " + routes_out);
        f << "technique,src,dst,success,hops\n";
        if (!graphs.empty()) {
            const auto ids = graphs[0].vehicle_ids();
            Rng rng(mix_key({o.seed, 0}));
            for (size_t k = 0; k < std::min(n_pairs, size_t{1000}); ++k) {
                const int64_t src = ids[rng.below(ids.size())];
                const int64_t dst = ids[rng.below(ids.size())];
                if (src == dst || graphs[0].are_neighbors(src, dst)) continue;
                for (const auto& t : techniques) {
                    const auto r = route(graphs[0], src, dst, t);
                    f << t.name() << "," << src << "," << dst << "," << (r.success ? 1 : 0)
                      << "," << r.hops << "\n";
                }
            }
        }
    }
    return kExitOk;
}

Scene bench_scene(size_t n_objects, uint64_t seed) {
    // Object density mirrors the urban reference dataset: ~676 objects/km^2,
    // ~38% of them vehicles, the rest rectangular buildings on a jittered
    // grid (no overlaps by construction).
    Scene scene;
    Rng rng(seed);
    const double area_km2 = static_cast<double>(n_objects) / 676.0;
    const double side = std::sqrt(area_km2) * 1000.0;
    const size_t n_vehicles = static_cast<size_t>(0.38 * static_cast<double>(n_objects));
    const size_t n_statics = n_objects - n_vehicles;
    for (size_t i = 0; i < n_vehicles; ++i) {
        Vehicle v;
        v.id = static_cast<int64_t>(i + 1);
        v.position = {rng.uniform(0.0, side), rng.uniform(0.0, side)};
        v.heading_rad = rng.uniform(0.0, 2.0 * kPi);
        const bool tall = rng.uniform01() < 0.15;
        v.cls = tall ? VehicleClass::Tall : VehicleClass::Short;
        v.height_m = tall ? 3.35 : 1.5;
        v.width_m = tall ? 2.5 : 1.75;
        v.length_m = tall ? 10.0 : 4.5;
        scene.vehicles.push_back(v);
    }
    const size_t grid = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(n_statics))));
    const double cell = side / static_cast<double>(grid);
    size_t placed = 0;
    for (size_t gy = 0; gy < grid && placed < n_statics; ++gy) {
        for (size_t gx = 0; gx < grid && placed < n_statics; ++gx) {
            StaticObject s;
            s.id = static_cast<int64_t>(1000000 + placed);
            s.kind = rng.uniform01() < 0.8 ? StaticKind::Building : StaticKind::Foliage;
            const double cx = (static_cast<double>(gx) + 0.5) * cell;
            const double cy = (static_cast<double>(gy) + 0.5) * cell;
            const double w = rng.uniform(0.2, 0.4) * cell;
            const double h = rng.uniform(0.2, 0.4) * cell;
            s.outline = {{cx - w, cy - h}, {cx + w, cy - h}, {cx + w, cy + h}, {cx - w, cy + h}};
            scene.statics.push_back(std::move(s));
            ++placed;
        }
    }
    return scene;
}

int cmd_bench(const CommonOpts& o, const std::vector<size_t>& sizes, size_t n_links) {
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };
    const RadioConfig radio = o.radio();
    const RangeConfig ranges = o.ranges();
    std::vector<std::vector<std::string>> rows;
    for (size_t n : sizes) {
        const Scene scene = bench_scene(n, o.seed);
        const auto t_total = clock::now();

        const auto t_build = clock::now();
        const auto indices = SceneIndices::build(scene);
        const double build_ms = ms_since(t_build);

        // Random in-range pairs among vehicles adjacent in x-order.
        std::vector<size_t> order(scene.vehicles.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            return scene.vehicles[a].position.x < scene.vehicles[b].position.x;
        });
        Rng rng(o.seed ^ n);
        std::vector<std::pair<size_t, size_t>> pairs;
        while (pairs.size() < n_links && !order.empty()) {
            const size_t i = static_cast<size_t>(rng.below(order.size()));
            const size_t j = std::min(order.size() - 1, i + 1 + static_cast<size_t>(rng.below(20)));
            if (i == j) continue;
            const auto& a = scene.vehicles[order[i]];
            const auto& b = scene.vehicles[order[j]];
            if (distance(a.position, b.position) <= ranges.r_los) {
                pairs.emplace_back(order[i], order[j]);
            }
        }

        const auto t_classify = clock::now();
        std::vector<std::pair<LinkClass, ObstructionDetail>> cls(pairs.size());
        for (size_t k = 0; k < pairs.size(); ++k) {
            cls[k] = classify_link(scene, indices, scene.vehicles[pairs[k].first],
                                   scene.vehicles[pairs[k].second], radio, ranges);
        }
        const double classify_ms = ms_since(t_classify);

        const auto t_rays = clock::now();
        size_t ray_count = 0;
        for (size_t k = 0; k < pairs.size(); ++k) {
            if (cls[k].first != LinkClass::NLOSb) continue;
            const auto& tx = scene.vehicles[pairs[k].first];
            const auto& rx = scene.vehicles[pairs[k].second];
            ray_count += find_wall_reflections(scene, indices, tx, rx, radio, ranges.r_nlosb)
                             .size();
            ray_count +=
                find_corner_diffractions(scene, indices, tx, rx, radio, ranges.r_nlosb)
                    .size();
        }
        const double refl_diffr_ms = ms_since(t_rays);
        const double total_ms = ms_since(t_total);
        (void)ray_count;
        rows.push_back({std::to_string(n), fmt(build_ms, 3), fmt(classify_ms, 3),
                        fmt(refl_diffr_ms, 3), fmt(total_ms, 3)});
    }
    o.sink.write_table({"n_objects", "build_ms", "classify_ms", "refl_diffr_ms", "total_ms"},
                       rows);
    return kExitOk;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometry-based V2V radio channel simulation engine"};
    app.require_subcommand(1);

    CommonOpts synth_o, classify_o, power_o, plos_o, psr_o, relay_o, bench_o;
    HighwaySpec synth_spec, plos_spec, relay_spec;
    std::string plos_sweep = "100,250,500,750";
    std::string psr_rates = "3,6,12";
    size_t relay_scenes = 1;
    size_t relay_pairs = 1000;
    double relay_threshold = -90.0;
    double relay_x_max = 50.0;
    std::string relay_routes_out;
    std::string bench_sizes = "3500,7000,14000,28000";
    size_t bench_links = 10000;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic highway scene");
    add_common(synth, synth_o, false);
    add_highway_spec(synth, synth_spec);

    auto* classify = app.add_subcommand("classify", "Per-link LOS classification");
    add_common(classify, classify_o, true);

    auto* power = app.add_subcommand("power", "Per-link received power");
    add_common(power, power_o, true);

    auto* plos = app.add_subcommand("plos", "System P(LOS) vs observed range");
    add_common(plos, plos_o, false);
    add_highway_spec(plos, plos_spec);
    plos->add_option("--ranges", plos_sweep, "Comma-separated observed ranges (m)");

    auto* psr = app.add_subcommand("psr", "Packet success rate per distance bin");
    add_common(psr, psr_o, true);
    psr->add_option("--rates", psr_rates, "Comma-separated data rates (Mb/s)");

    auto* relay = app.add_subcommand("relay", "Relay technique comparison");
    add_common(relay, relay_o, false);
    add_highway_spec(relay, relay_spec);
    relay->add_option("--scenes", relay_scenes, "Synthetic scenes in the ensemble");
    relay->add_option("--pairs", relay_pairs, "Source-destination pairs per scene");
    relay->add_option("--rx-threshold-dbm", relay_threshold, "Reception threshold (dBm)");
    relay->add_option("--x-max", relay_x_max, "TVR distance threshold (m)");
    relay->add_option("--routes-out", relay_routes_out, "Optional per-route log path");

    auto* bench = app.add_subcommand("bench", "Scaling benchmark");
    add_common(bench, bench_o, false);
    bench->add_option("--sizes", bench_sizes, "Comma-separated object counts");
    bench->add_option("--links", bench_links, "Links per measurement");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_o, synth_spec);
        if (classify->parsed()) return cmd_classify(classify_o);
        if (power->parsed()) return cmd_power(power_o);
        if (plos->parsed()) return cmd_plos(plos_o, plos_spec, parse_double_list(plos_sweep));
        if (psr->parsed()) return cmd_psr(psr_o, parse_double_list(psr_rates));
        if (relay->parsed()) {
            return cmd_relay(relay_o, relay_spec, relay_scenes, relay_pairs,
                             relay_threshold, relay_x_max, relay_routes_out);
        }
        if (bench->parsed()) {
            std::vector<size_t> sizes;
            for (double v : parse_double_list(bench_sizes)) {
                sizes.push_back(static_cast<size_t>(v));
            }
            return cmd_bench(bench_o, sizes, bench_links);
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
