#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace v2vgeo {

/// 2-D point/vector in a local Cartesian frame (meters, east/north).
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(Point2 o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(Point2 o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2&) const = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Simple polygon stored as an ordered vertex list (no repeated closing vertex).
using Polygon = std::vector<Point2>;

/// Axis-aligned bounding rectangle.
struct Rect {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void expand(Point2 p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    void expand(const Rect& r) {
        min_x = std::min(min_x, r.min_x);
        min_y = std::min(min_y, r.min_y);
        max_x = std::max(max_x, r.max_x);
        max_y = std::max(max_y, r.max_y);
    }
    bool contains(Point2 p) const {
        return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
    bool contains(const Rect& r) const {
        return r.min_x >= min_x && r.max_x <= max_x && r.min_y >= min_y && r.max_y <= max_y;
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    Point2 center() const { return {(min_x + max_x) / 2, (min_y + max_y) / 2}; }
};

Rect bounding_rect(const Polygon& poly);

/// Signed area; positive for counter-clockwise vertex order.
double signed_area(const Polygon& poly);
double polygon_area(const Polygon& poly);
bool is_ccw(const Polygon& poly);

/// True if the polygon has >= 3 vertices and no two non-adjacent edges intersect.
bool is_simple_polygon(const Polygon& poly);

Point2 polygon_centroid(const Polygon& poly);

/// Point-in-polygon test; points on the boundary count as inside.
bool point_in_polygon(Point2 p, const Polygon& poly);

/// Closed-segment intersection test (touching endpoints count).
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d);

/// True if segment ab meets the closed polygon region (boundary or interior).
bool segment_intersects_polygon(Point2 a, Point2 b, const Polygon& poly);

bool segment_intersects_rect(Point2 a, Point2 b, const Rect& r);

/// Total length of segment ab interior to the polygon. Tangential contact
/// contributes zero measure.
double segment_polygon_clip(Point2 a, Point2 b, const Polygon& poly);

/// Intersection parameter interval [t0,t1] of segment ab inside the polygon,
/// used by clip; exposed for the obstacle-location computation.
/// Returns false when the segment misses the polygon entirely.
bool segment_polygon_overlap_interval(Point2 a, Point2 b, const Polygon& poly,
                                      double& t0, double& t1);

/// True if the interiors of two simple polygons overlap (shared boundary
/// points alone do not count).
bool polygons_interiors_overlap(const Polygon& a, const Polygon& b);

} // namespace v2vgeo
