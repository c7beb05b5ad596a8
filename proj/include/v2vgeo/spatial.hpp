#pragma once

#include <cstdint>
#include <vector>

#include "v2vgeo/geometry.hpp"

namespace v2vgeo {

/// Elliptical search region with the link endpoints as foci. The major
/// diameter equals the class communication range r, so an object lies inside
/// iff some point p of it satisfies |p - tx| + |p - rx| <= r.
struct SearchEllipse {
    Point2 focus_tx;
    Point2 focus_rx;
    double major_diameter = 0.0; // r

    bool valid() const { return distance(focus_tx, focus_rx) <= major_diameter; }
    double minor_diameter() const {
        double d = distance(focus_tx, focus_rx);
        return std::sqrt(std::max(0.0, major_diameter * major_diameter - d * d));
    }
    double area() const {
        return 3.141592653589793 * (major_diameter / 2.0) * (minor_diameter() / 2.0);
    }
    Rect bounding_rect() const;
    bool contains(Point2 p) const {
        return distance(p, focus_tx) + distance(p, focus_rx) <= major_diameter;
    }
};

/// Binary bounding-rectangle hierarchy over object footprints. Built once,
/// immutable afterwards; concurrent queries are safe.
class SpatialIndex {
  public:
    struct Entry {
        int64_t id = 0;
        Polygon footprint;
    };

    SpatialIndex() = default;

    /// Top-down median split: objects are sorted by centroid along the node
    /// bounding box's longer axis, ties broken by id, and halved until each
    /// leaf holds one object.
    static SpatialIndex build(std::vector<Entry> objects);

    bool empty() const { return nodes_.empty(); }
    size_t size() const { return entries_.size(); }

    /// Ids of objects whose footprint meets the closed segment ab.
    std::vector<int64_t> query_segment(Point2 a, Point2 b) const;

    /// Ids of objects whose footprint intersects the ellipse region.
    std::vector<int64_t> query_ellipse(const SearchEllipse& e) const;

    /// First object hit along ab, or nullptr; visits candidates like
    /// query_segment but stops at the first confirmed intersection.
    bool segment_hits_any(Point2 a, Point2 b) const;

    /// Like segment_hits_any but ignoring one object id.
    bool segment_hits_any_except(Point2 a, Point2 b, int64_t skip_id) const;

    const Entry* find(int64_t id) const;

    template <typename Fn> void for_each_entry(Fn&& fn) const {
        for (const auto& e : entries_) fn(e);
    }

    /// Exact footprint-vs-ellipse membership test used by the query (and by
    /// the brute-force oracles in the tests).
    static bool footprint_in_ellipse(const Polygon& poly, const SearchEllipse& e);

    int max_leaf_depth() const;
    int min_leaf_depth() const;

  private:
    struct Node {
        Rect box;
        int32_t left = -1;   // child node index, or -1 at leaves
        int32_t right = -1;
        int32_t entry = -1;  // entry index at leaves
    };

    int32_t build_recursive(std::vector<int32_t>& order, int32_t lo, int32_t hi);

    std::vector<Node> nodes_;
    std::vector<Entry> entries_;
    std::vector<Point2> centroids_;
    int32_t root_ = -1;
};

} // namespace v2vgeo
