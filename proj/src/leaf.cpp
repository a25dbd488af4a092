#include "anosov/leaf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anosov/errors.hpp"
#include "anosov/util.hpp"

namespace anosov {
namespace {

// Index of the edge containing t in a strictly increasing table.
std::size_t bracket(const std::vector<double>& table, double t) {
    auto it = std::upper_bound(table.begin(), table.end(), t);
    std::size_t hi = std::size_t(it - table.begin());
    if (hi == 0) return 0;
    if (hi >= table.size()) return table.size() - 2;
    return hi - 1;
}

double lerp(double a, double b, double w) { return a + (b - a) * w; }

}  // namespace

Vec3 LeafSegment::at_param(double t) const {
    std::size_t i = bracket(param, t);
    double w = (t - param[i]) / (param[i + 1] - param[i]);
    return vertex[i] + (vertex[i + 1] - vertex[i]) * w;
}

LeafPoint LeafSegment::at_arclength(double s) const {
    std::size_t i = bracket(cumlen, s);
    double span = cumlen[i + 1] - cumlen[i];
    double w = span > 0.0 ? (s - cumlen[i]) / span : 0.0;
    LeafPoint p;
    p.param = lerp(param[i], param[i + 1], w);
    p.lift = vertex[i] + (vertex[i + 1] - vertex[i]) * w;
    return p;
}

double LeafSegment::arclength_of_param(double t) const {
    std::size_t i = bracket(param, t);
    double w = (t - param[i]) / (param[i + 1] - param[i]);
    return lerp(cumlen[i], cumlen[i + 1], w);
}

double LeafSegment::param_of_arclength(double s) const {
    std::size_t i = bracket(cumlen, s);
    double span = cumlen[i + 1] - cumlen[i];
    double w = span > 0.0 ? (s - cumlen[i]) / span : 0.0;
    return lerp(param[i], param[i + 1], w);
}

namespace {

std::vector<double> chord_cumlen(const std::vector<Vec3>& vertex) {
    std::vector<double> out(vertex.size(), 0.0);
    KahanSum acc;
    for (std::size_t i = 1; i < vertex.size(); ++i) {
        acc.add(norm(vertex[i] - vertex[i - 1]));
        out[i] = acc.value();
    }
    return out;
}

// One half of the arc: integrates y' = sign * e(y) from x by RK4 and
// appends (arclength, lift) pairs.
void integrate_half(const AnosovMap& map, Tag tag, const Vec3& start, double sign,
                    double radius, const GrowOptions& opt,
                    std::vector<double>& arcs, std::vector<Vec3>& lifts) {
    Vec3 y = start;
    Vec3 guide = leaf_direction(map, tag, TorusPoint(y), opt.field) * sign;
    auto field = [&](const Vec3& at) {
        Vec3 e = leaf_direction(map, tag, TorusPoint(at), opt.field) * sign;
        double c = dot(e, guide);
        if (std::abs(c) < opt.orientation_floor)
            throw OrientationJump("grow_leaf: field direction jumped by angle cos " +
                                  std::to_string(c));
        return c < 0.0 ? -e : e;
    };
    double s = 0.0;
    while (s < radius - 1e-15) {
        double h = std::min(opt.step, radius - s);
        Vec3 k1 = field(y);
        guide = k1;
        Vec3 k2 = field(y + k1 * (h / 2));
        Vec3 k3 = field(y + k2 * (h / 2));
        Vec3 k4 = field(y + k3 * h);
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        s += h;
        arcs.push_back(s);
        lifts.push_back(y);
    }
}

}  // namespace

LeafSegment grow_leaf(const AnosovMap& map, Tag tag, const TorusPoint& x, double radius,
                      const GrowOptions& opt) {
    if (!(radius > 0.0)) throw ConfigError("grow_leaf: radius must be positive");
    std::vector<double> arc_pos, arc_neg;
    std::vector<Vec3> lift_pos, lift_neg;
    integrate_half(map, tag, x.r, +1.0, radius, opt, arc_pos, lift_pos);
    integrate_half(map, tag, x.r, -1.0, radius, opt, arc_neg, lift_neg);

    LeafSegment seg;
    seg.tag = tag;
    seg.backward = (tag == Tag::s);
    seg.base = x;
    seg.param.reserve(arc_neg.size() + arc_pos.size() + 1);
    seg.vertex.reserve(arc_neg.size() + arc_pos.size() + 1);
    for (std::size_t i = arc_neg.size(); i > 0; --i) {
        seg.param.push_back(-arc_neg[i - 1]);
        seg.vertex.push_back(lift_neg[i - 1]);
    }
    seg.param.push_back(0.0);
    seg.vertex.push_back(x.r);
    for (std::size_t i = 0; i < arc_pos.size(); ++i) {
        seg.param.push_back(arc_pos[i]);
        seg.vertex.push_back(lift_pos[i]);
    }
    seg.cumlen = chord_cumlen(seg.vertex);
    return seg;
}

namespace {

struct Refiner {
    const MapView& view;
    const LeafSegment& prev;
    const RefineOptions& opt;
    std::vector<double>& params;
    std::vector<Vec3>& verts;

    Vec3 image_at(double t) const { return view.lift_apply(prev.at_param(t)); }

    bool needs_split(const Vec3& a, const Vec3& b, const Vec3& mid) const {
        double chord = norm(b - a);
        if (chord > opt.max_chord) return true;
        double sag = norm(mid - (a + b) * 0.5);
        return sag > std::max(opt.max_sag, opt.sag_ratio * chord);
    }

    // Emits the open interval (ta, tb) followed by vertex tb.
    void edge(double ta, const Vec3& va, double tb, const Vec3& vb, int depth) {
        double tm = 0.5 * (ta + tb);
        Vec3 vm = image_at(tm);
        if (depth < opt.max_depth && needs_split(va, vb, vm)) {
            if (params.size() + 2 > opt.vertex_budget)
                throw VertexBudgetExceeded("iterate_leaf: refinement exceeded " +
                                           std::to_string(opt.vertex_budget) + " vertices");
            edge(ta, va, tm, vm, depth + 1);
            edge(tm, vm, tb, vb, depth + 1);
            return;
        }
        if (params.size() >= opt.vertex_budget)
            throw VertexBudgetExceeded("iterate_leaf: refinement exceeded " +
                                       std::to_string(opt.vertex_budget) + " vertices");
        params.push_back(tb);
        verts.push_back(vb);
    }
};

}  // namespace

LeafSegment iterate_leaf(const AnosovMap& map, const LeafSegment& seg,
                         const RefineOptions& opt) {
    if (seg.size() < 2) throw ConfigError("iterate_leaf: segment needs at least two vertices");
    MapView view(map, seg.backward);

    LeafSegment out;
    out.tag = seg.tag;
    out.backward = seg.backward;
    out.stage = seg.stage + 1;
    out.base = view.apply(seg.base);

    out.param.reserve(seg.size() * 2);
    out.vertex.reserve(seg.size() * 2);
    out.param.push_back(seg.param.front());
    out.vertex.push_back(view.lift_apply(seg.vertex.front()));

    Refiner r{view, seg, opt, out.param, out.vertex};
    Vec3 prev_img = out.vertex.front();
    for (std::size_t i = 1; i < seg.size(); ++i) {
        Vec3 img = view.lift_apply(seg.vertex[i]);
        r.edge(seg.param[i - 1], prev_img, seg.param[i], img, 0);
        prev_img = img;
    }
    out.cumlen = chord_cumlen(out.vertex);
    return out;
}

}  // namespace anosov
