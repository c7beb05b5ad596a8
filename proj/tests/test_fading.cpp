#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "v2vgeo/fading.hpp"
#include "v2vgeo/rng.hpp"

using namespace v2vgeo;

TEST_CASE("sigma_for_link endpoints and table values") {
    FadingConfig cfg;
    SUBCASE("empty ellipse hits sigma_min per class") {
        DensitySample none{0.0, 0.0};
        CHECK(sigma_for_link(none, LinkClass::LOS, cfg) == doctest::Approx(3.3));
        CHECK(sigma_for_link(none, LinkClass::NLOSv, cfg) == doctest::Approx(0.0));
        CHECK(sigma_for_link(none, LinkClass::NLOSb, cfg) == doctest::Approx(0.0));
    }
    SUBCASE("saturated ellipse hits sigma_max per class") {
        DensitySample full{cfg.nv_max_per_km2, cfg.as_max_m2_per_km2};
        CHECK(sigma_for_link(full, LinkClass::LOS, cfg) == doctest::Approx(5.2));
        CHECK(sigma_for_link(full, LinkClass::NLOSv, cfg) == doctest::Approx(5.3));
        CHECK(sigma_for_link(full, LinkClass::NLOSb, cfg) == doctest::Approx(6.8));
    }
    SUBCASE("vehicles-only saturation on NLOSb gives half the span") {
        DensitySample half{cfg.nv_max_per_km2, 0.0};
        CHECK(sigma_for_link(half, LinkClass::NLOSb, cfg) == doctest::Approx(3.4));
    }
    SUBCASE("densities beyond the maxima are clamped") {
        DensitySample over{10.0 * cfg.nv_max_per_km2, 10.0 * cfg.as_max_m2_per_km2};
        CHECK(sigma_for_link(over, LinkClass::LOS, cfg) == doctest::Approx(5.2));
    }
    SUBCASE("monotone nondecreasing in both densities, bounded by the table") {
        Rng rng(8);
        for (int i = 0; i < 500; ++i) {
            DensitySample s{rng.uniform(0, cfg.nv_max_per_km2),
                            rng.uniform(0, cfg.as_max_m2_per_km2)};
            DensitySample denser{s.nv_per_km2 + rng.uniform(0, 50.0),
                                 s.as_m2_per_km2 + rng.uniform(0, 5e4)};
            const double s1 = sigma_for_link(s, LinkClass::LOS, cfg);
            const double s2 = sigma_for_link(denser, LinkClass::LOS, cfg);
            CHECK(s1 <= s2 + 1e-12);
            CHECK(s1 >= 3.3);
            CHECK(s1 <= 5.2);
        }
    }
}

TEST_CASE("apply_fading basics") {
    FadingConfig cfg;
    cfg.seed = 2024;
    const LinkKey key{7, 9, 1.0};
    SUBCASE("sigma zero is the identity") {
        CHECK(apply_fading(-70.0, 0.0, key, cfg) == -70.0);
    }
    SUBCASE("same key twice gives the same draw") {
        CHECK(apply_fading(-70.0, 4.0, key, cfg) == apply_fading(-70.0, 4.0, key, cfg));
    }
    SUBCASE("draw is symmetric in the pair order") {
        CHECK(apply_fading(-70.0, 4.0, {7, 9, 1.0}, cfg) ==
              apply_fading(-70.0, 4.0, {9, 7, 1.0}, cfg));
    }
    SUBCASE("different keys and seeds differ") {
        const double base = apply_fading(-70.0, 4.0, key, cfg);
        CHECK(apply_fading(-70.0, 4.0, {7, 10, 1.0}, cfg) != base);
        CHECK(apply_fading(-70.0, 4.0, {7, 9, 2.0}, cfg) != base);
        FadingConfig other = cfg;
        other.seed = 2025;
        CHECK(apply_fading(-70.0, 4.0, key, other) != base);
    }
}

TEST_CASE("keyed draws reproduce the target deviation") {
    FadingConfig cfg;
    cfg.seed = 5;
    const double sigma = 5.3;
    const int n = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const LinkKey key{i, i + 1, 0.0};
        const double delta = apply_fading(0.0, sigma, key, cfg);
        sum += delta;
        sum2 += delta * delta;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(sd - sigma) < 0.05);
}

TEST_CASE("draws across distinct keys are uncorrelated") {
    FadingConfig cfg;
    cfg.seed = 77;
    const int n = 100000;
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = fading_unit_normal({i, i + 1, 0.0}, cfg);
        const double y = fading_unit_normal({i, i + 2, 0.0}, cfg);
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    const double corr = (n * sxy - sx * sy) /
                        std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    CHECK(std::abs(corr) < 0.02);
}

TEST_CASE("density_in_ellipse counts and normalizes") {
    Scene scene;
    auto car = [](int64_t id, double x, double y) {
        Vehicle v;
        v.id = id;
        v.position = {x, y};
        v.length_m = 4.5;
        v.width_m = 1.75;
        v.height_m = 1.5;
        return v;
    };
    scene.vehicles = {car(1, 0, 0), car(2, 100, 0), car(3, 50, 5), car(4, 50, 2000)};
    StaticObject s;
    s.id = 10;
    s.kind = StaticKind::Building;
    s.outline = {{40, 20}, {60, 20}, {60, 40}, {40, 40}}; // 400 m^2
    scene.statics = {s};
    auto idx = SceneIndices::build(scene);
    const SearchEllipse ellipse{{0, 0}, {100, 0}, 400.0};
    const auto d = density_in_ellipse(scene, idx, ellipse);
    const double area_km2 = ellipse.area() / 1e6;
    CHECK(d.nv_per_km2 == doctest::Approx(3.0 / area_km2)); // far car excluded
    CHECK(d.as_m2_per_km2 == doctest::Approx(400.0 / area_km2));
}
