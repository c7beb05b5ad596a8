#include "v2vgeo/spatial.hpp"

#include <algorithm>

namespace v2vgeo {

Rect SearchEllipse::bounding_rect() const {
    const double d = distance(focus_tx, focus_rx);
    const double a = major_diameter / 2.0;
    const double b = minor_diameter() / 2.0;
    Point2 u{1.0, 0.0};
    if (d > 0.0) u = (focus_rx - focus_tx) * (1.0 / d);
    const Point2 v{-u.y, u.x};
    const Point2 c{(focus_tx.x + focus_rx.x) / 2.0, (focus_tx.y + focus_rx.y) / 2.0};
    const double hx = std::sqrt(a * a * u.x * u.x + b * b * v.x * v.x);
    const double hy = std::sqrt(a * a * u.y * u.y + b * b * v.y * v.y);
    Rect r;
    r.min_x = c.x - hx;
    r.max_x = c.x + hx;
    r.min_y = c.y - hy;
    r.max_y = c.y + hy;
    return r;
}

bool SpatialIndex::footprint_in_ellipse(const Polygon& poly, const SearchEllipse& e) {
    for (Point2 p : poly) {
        if (e.contains(p)) return true;
    }
    // The polygon may swallow the whole ellipse without any boundary contact.
    if (point_in_polygon(e.focus_tx, poly) || point_in_polygon(e.focus_rx, poly)) {
        return true;
    }
    // Sum-of-focal-distances is convex along an edge; ternary search finds
    // its minimum to machine precision.
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        Point2 a = poly[j];
        Point2 ab = poly[i] - a;
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 100; ++it) {
            double m1 = lo + (hi - lo) / 3.0;
            double m2 = hi - (hi - lo) / 3.0;
            Point2 p1 = a + ab * m1;
            Point2 p2 = a + ab * m2;
            double f1 = distance(p1, e.focus_tx) + distance(p1, e.focus_rx);
            double f2 = distance(p2, e.focus_tx) + distance(p2, e.focus_rx);
            if (f1 < f2) hi = m2;
            else lo = m1;
        }
        Point2 pm = a + ab * ((lo + hi) / 2.0);
        if (e.contains(pm)) return true;
    }
    return false;
}

SpatialIndex SpatialIndex::build(std::vector<Entry> objects) {
    SpatialIndex idx;
    idx.entries_ = std::move(objects);
    if (idx.entries_.empty()) return idx;
    idx.centroids_.reserve(idx.entries_.size());
    for (const auto& e : idx.entries_) idx.centroids_.push_back(polygon_centroid(e.footprint));
    std::vector<int32_t> order(idx.entries_.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
    idx.nodes_.reserve(idx.entries_.size() * 2);
    idx.root_ = idx.build_recursive(order, 0, static_cast<int32_t>(order.size()));
    return idx;
}

int32_t SpatialIndex::build_recursive(std::vector<int32_t>& order, int32_t lo, int32_t hi) {
    Node node;
    for (int32_t i = lo; i < hi; ++i) {
        node.box.expand(bounding_rect(entries_[order[i]].footprint));
    }
    if (hi - lo == 1) {
        node.entry = order[lo];
        nodes_.push_back(node);
        return static_cast<int32_t>(nodes_.size() - 1);
    }
    const bool split_x = node.box.width() >= node.box.height();
    std::sort(order.begin() + lo, order.begin() + hi, [&](int32_t ia, int32_t ib) {
        double ka = split_x ? centroids_[ia].x : centroids_[ia].y;
        double kb = split_x ? centroids_[ib].x : centroids_[ib].y;
        if (ka != kb) return ka < kb;
        return entries_[ia].id < entries_[ib].id; // stable, platform-independent
    });
    const int32_t mid = lo + (hi - lo + 1) / 2;
    const int32_t self = static_cast<int32_t>(nodes_.size());
    nodes_.push_back(node);
    const int32_t left = build_recursive(order, lo, mid);
    const int32_t right = build_recursive(order, mid, hi);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

std::vector<int64_t> SpatialIndex::query_segment(Point2 a, Point2 b) const {
    std::vector<int64_t> out;
    if (root_ < 0) return out;
    std::vector<int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (!segment_intersects_rect(a, b, n.box)) continue;
        if (n.entry >= 0) {
            if (segment_intersects_polygon(a, b, entries_[n.entry].footprint)) {
                out.push_back(entries_[n.entry].id);
            }
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int64_t> SpatialIndex::query_ellipse(const SearchEllipse& e) const {
    std::vector<int64_t> out;
    if (root_ < 0) return out;
    const Rect ebox = e.bounding_rect();
    std::vector<int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (n.box.max_x < ebox.min_x || ebox.max_x < n.box.min_x ||
            n.box.max_y < ebox.min_y || ebox.max_y < n.box.min_y) {
            continue;
        }
        if (n.entry >= 0) {
            if (footprint_in_ellipse(entries_[n.entry].footprint, e)) {
                out.push_back(entries_[n.entry].id);
            }
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool SpatialIndex::segment_hits_any(Point2 a, Point2 b) const {
    return segment_hits_any_except(a, b, INT64_MIN);
}

bool SpatialIndex::segment_hits_any_except(Point2 a, Point2 b, int64_t skip_id) const {
    if (root_ < 0) return false;
    std::vector<int32_t> stack{root_};
    while (!stack.empty()) {
        const Node& n = nodes_[stack.back()];
        stack.pop_back();
        if (!segment_intersects_rect(a, b, n.box)) continue;
        if (n.entry >= 0) {
            if (entries_[n.entry].id == skip_id) continue;
            if (segment_intersects_polygon(a, b, entries_[n.entry].footprint)) return true;
        } else {
            stack.push_back(n.left);
            stack.push_back(n.right);
        }
    }
    return false;
}

const SpatialIndex::Entry* SpatialIndex::find(int64_t id) const {
    for (const auto& e : entries_) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

int SpatialIndex::max_leaf_depth() const {
    int best = 0;
    if (root_ < 0) return best;
    std::vector<std::pair<int32_t, int>> stack{{root_, 1}};
    while (!stack.empty()) {
        auto [ni, depth] = stack.back();
        stack.pop_back();
        const Node& n = nodes_[ni];
        if (n.entry >= 0) {
            best = std::max(best, depth);
        } else {
            stack.push_back({n.left, depth + 1});
            stack.push_back({n.right, depth + 1});
        }
    }
    return best;
}

int SpatialIndex::min_leaf_depth() const {
    int best = INT32_MAX;
    if (root_ < 0) return 0;
    std::vector<std::pair<int32_t, int>> stack{{root_, 1}};
    while (!stack.empty()) {
        auto [ni, depth] = stack.back();
        stack.pop_back();
        const Node& n = nodes_[ni];
        if (n.entry >= 0) {
            best = std::min(best, depth);
        } else {
            stack.push_back({n.left, depth + 1});
            stack.push_back({n.right, depth + 1});
        }
    }
    return best;
}

} // namespace v2vgeo
