#include "v2vgeo/geometry.hpp"

#include <algorithm>

namespace v2vgeo {

namespace {

constexpr double kEps = 1e-12;

int orientation(Point2 a, Point2 b, Point2 c) {
    double v = cross(b - a, c - a);
    double scale = std::abs(b.x - a.x) + std::abs(b.y - a.y) + std::abs(c.x - a.x) +
                   std::abs(c.y - a.y);
    if (std::abs(v) <= kEps * scale * scale) return 0;
    return v > 0 ? 1 : -1;
}

bool on_segment(Point2 p, Point2 a, Point2 b) {
    if (orientation(a, b, p) != 0) return false;
    return p.x >= std::min(a.x, b.x) - kEps && p.x <= std::max(a.x, b.x) + kEps &&
           p.y >= std::min(a.y, b.y) - kEps && p.y <= std::max(a.y, b.y) + kEps;
}

// 0 outside, 1 on boundary, 2 strictly inside.
int point_polygon_location(Point2 p, const Polygon& poly) {
    const size_t n = poly.size();
    bool inside = false;
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Point2 a = poly[j];
        Point2 b = poly[i];
        if (on_segment(p, a, b)) return 1;
        // Standard crossing-number rule, half-open in y to avoid double counts.
        if ((b.y > p.y) != (a.y > p.y)) {
            double x_cross = b.x + (p.y - b.y) * (a.x - b.x) / (a.y - b.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside ? 2 : 0;
}

} // namespace

Rect bounding_rect(const Polygon& poly) {
    Rect r;
    for (Point2 p : poly) r.expand(p);
    return r;
}

double signed_area(const Polygon& poly) {
    double s = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) s += cross(poly[j], poly[i]);
    return s / 2.0;
}

double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

bool is_ccw(const Polygon& poly) { return signed_area(poly) > 0.0; }

bool is_simple_polygon(const Polygon& poly) {
    const size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        Point2 a = poly[i];
        Point2 b = poly[(i + 1) % n];
        if (norm(b - a) <= kEps) return false; // degenerate edge
        for (size_t j = i + 1; j < n; ++j) {
            // Adjacent edges share a vertex by construction; skip them.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            Point2 c = poly[j];
            Point2 d = poly[(j + 1) % n];
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

Point2 polygon_centroid(const Polygon& poly) {
    double a = signed_area(poly);
    if (std::abs(a) < kEps) { // degenerate: fall back to vertex mean
        Point2 c;
        for (Point2 p : poly) c = c + p;
        return c * (1.0 / static_cast<double>(poly.size()));
    }
    double cx = 0.0;
    double cy = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        double w = cross(poly[j], poly[i]);
        cx += (poly[j].x + poly[i].x) * w;
        cy += (poly[j].y + poly[i].y) * w;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

bool point_in_polygon(Point2 p, const Polygon& poly) {
    return point_polygon_location(p, poly) != 0;
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    int o1 = orientation(a, b, c);
    int o2 = orientation(a, b, d);
    int o3 = orientation(c, d, a);
    int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(c, a, b)) return true;
    if (o2 == 0 && on_segment(d, a, b)) return true;
    if (o3 == 0 && on_segment(a, c, d)) return true;
    if (o4 == 0 && on_segment(b, c, d)) return true;
    return false;
}

bool segment_intersects_polygon(Point2 a, Point2 b, const Polygon& poly) {
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        if (segments_intersect(a, b, poly[j], poly[i])) return true;
    }
    // No edge crossing: the segment is either fully inside or fully outside.
    return point_polygon_location(a, poly) != 0;
}

bool segment_intersects_rect(Point2 a, Point2 b, const Rect& r) {
    // Liang-Barsky clip of ab against the rectangle.
    double t0 = 0.0;
    double t1 = 1.0;
    double dx = b.x - a.x;
    double dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - r.min_x, r.max_x - a.x, a.y - r.min_y, r.max_y - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
        } else {
            double t = q[i] / p[i];
            if (p[i] < 0.0) {
                if (t > t1) return false;
                t0 = std::max(t0, t);
            } else {
                if (t < t0) return false;
                t1 = std::min(t1, t);
            }
        }
    }
    return true;
}

bool segment_polygon_overlap_interval(Point2 a, Point2 b, const Polygon& poly,
                                      double& t0, double& t1) {
    double clipped = 0.0;
    std::vector<double> ts;
    ts.push_back(0.0);
    ts.push_back(1.0);
    Point2 ab = b - a;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Point2 c = poly[j];
        Point2 d = poly[i];
        Point2 cd = d - c;
        double denom = cross(ab, cd);
        if (std::abs(denom) > kEps) {
            double t = cross(c - a, cd) / denom;
            double u = cross(c - a, ab) / denom;
            if (t > 0.0 && t < 1.0 && u >= -kEps && u <= 1.0 + kEps) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    bool found = false;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        double mid = (ts[i] + ts[i + 1]) / 2.0;
        Point2 p = a + ab * mid;
        if (point_polygon_location(p, poly) == 2) {
            if (!found) {
                t0 = ts[i];
                found = true;
            }
            t1 = ts[i + 1];
            clipped += ts[i + 1] - ts[i];
        }
    }
    (void)clipped;
    return found;
}

double segment_polygon_clip(Point2 a, Point2 b, const Polygon& poly) {
    std::vector<double> ts;
    ts.push_back(0.0);
    ts.push_back(1.0);
    Point2 ab = b - a;
    double len = norm(ab);
    if (len <= kEps) return 0.0;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Point2 c = poly[j];
        Point2 d = poly[i];
        Point2 cd = d - c;
        double denom = cross(ab, cd);
        if (std::abs(denom) > kEps) {
            double t = cross(c - a, cd) / denom;
            double u = cross(c - a, ab) / denom;
            if (t > 0.0 && t < 1.0 && u >= -kEps && u <= 1.0 + kEps) ts.push_back(t);
        }
    }
    std::sort(ts.begin(), ts.end());
    double inside_len = 0.0;
    for (size_t i = 0; i + 1 < ts.size(); ++i) {
        double mid = (ts[i] + ts[i + 1]) / 2.0;
        Point2 p = a + ab * mid;
        // Strict interior only: running along an edge is measure-zero contact.
        if (point_polygon_location(p, poly) == 2) inside_len += (ts[i + 1] - ts[i]) * len;
    }
    return inside_len;
}

bool polygons_interiors_overlap(const Polygon& a, const Polygon& b) {
    const size_t na = a.size();
    const size_t nb = b.size();
    for (size_t i = 0, i2 = na - 1; i < na; i2 = i++) {
        for (size_t j = 0, j2 = nb - 1; j < nb; j2 = j++) {
            // Proper crossing: interiors of both edges intersect.
            Point2 p1 = a[i2], p2 = a[i], p3 = b[j2], p4 = b[j];
            int o1 = orientation(p1, p2, p3);
            int o2 = orientation(p1, p2, p4);
            int o3 = orientation(p3, p4, p1);
            int o4 = orientation(p3, p4, p2);
            if (o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4) return true;
        }
    }
    for (Point2 p : a)
        if (point_polygon_location(p, b) == 2) return true;
    for (Point2 p : b)
        if (point_polygon_location(p, a) == 2) return true;
    if (point_polygon_location(polygon_centroid(a), b) == 2) return true;
    if (point_polygon_location(polygon_centroid(b), a) == 2) return true;
    return false;
}

} // namespace v2vgeo
