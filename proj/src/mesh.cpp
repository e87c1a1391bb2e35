// Copyright 2026 The sloshspec Authors
// SPDX-License-Identifier: Apache-2.0

#include "sloshspec/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <string>
#include <ostream>

#include "sloshspec/errors.hpp"
#include "sloshspec/quadrature.hpp"

namespace sloshspec::mesh {

namespace {

constexpr double pi = std::numbers::pi;
// Refinement uses a slightly stricter bound than the guaranteed 20 degrees.
constexpr double kRefineAngle = 20.5 * pi / 180.0;

using geometry::Curve;
using geometry::SloshingDomain;

double dist(Point p, Point q) { return std::hypot(p.x - q.x, p.y - q.y); }

// Orientation of (a, b, c): positive for a counterclockwise turn. The sign is
// exact; near-degenerate cases are resolved with floating-point expansions.
long double orient(Point a, Point b, Point c)
{
    const double fast = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    const double bound = 1e-14 * (std::abs((b.x - a.x) * (c.y - a.y)) + std::abs((b.y - a.y) * (c.x - a.x)));
    if (std::abs(fast) > bound) return fast;
    const double terms[6][2] = {{b.x, c.y}, {-b.x, a.y}, {-a.x, c.y}, {-b.y, c.x}, {b.y, a.x}, {a.y, c.x}};
    std::vector<double> e;
    auto grow = [&e](double v) {
        double q = v;
        for (double& x : e) {
            const double s = q + x;
            const double bv = s - q;
            const double err = (q - (s - bv)) + (x - bv);
            x = err;
            q = s;
        }
        e.push_back(q);
    };
    for (const auto& t : terms) {
        const double p = t[0] * t[1];
        grow(std::fma(t[0], t[1], -p));
        grow(p);
    }
    for (std::size_t i = e.size(); i-- > 0;)
        if (e[i] != 0.0) return e[i];
    return 0.0;
}

// Positive when d lies strictly inside the circle through the counterclockwise a, b, c.
long double incircle(Point a, Point b, Point c, Point d)
{
    const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
    const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
    const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
    const long double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

Point circumcenter(Point a, Point b, Point c)
{
    const double bx = b.x - a.x, by = b.y - a.y, cx = c.x - a.x, cy = c.y - a.y;
    const double d = 2.0 * (bx * cy - by * cx);
    const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

double min_angle(Point a, Point b, Point c)
{
    const double la = dist(b, c), lb = dist(a, c), lc = dist(a, b);
    auto ang = [](double opp, double s1, double s2) {
        return std::acos(std::clamp((s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2), -1.0, 1.0));
    };
    return std::min({ang(la, lb, lc), ang(lb, la, lc), ang(lc, la, lb)});
}

// Arc-length tables for inverting s(t) on a curve.
class ArcLength {
public:
    explicit ArcLength(const Curve& c) : curve_(&c)
    {
        const int cells = c.kind == Curve::Kind::SineGraph ? 2048 : 1;
        t_.resize(cells + 1);
        s_.assign(cells + 1, 0.0);
        for (int i = 0; i <= cells; ++i) t_[i] = static_cast<double>(i) / cells;
        for (int i = 0; i < cells; ++i) s_[i + 1] = s_[i] + segment(t_[i], t_[i + 1]);
    }

    double total() const { return s_.back(); }

    double param(double s) const
    {
        if (s <= 0.0) return 0.0;
        if (s >= total()) return 1.0;
        if (curve_->kind != Curve::Kind::SineGraph) return s / total();
        const std::size_t i = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), s) - s_.begin()) - 1;
        double t = t_[i] + (s - s_[i]) / (s_[i + 1] - s_[i]) * (t_[i + 1] - t_[i]);
        for (int it = 0; it < 30; ++it) {
            const Point d = curve_->derivative(t);
            const double dt = (s_[i] + segment(t_[i], t) - s) / std::hypot(d.x, d.y);
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        return t;
    }

    double length_to(double t) const
    {
        // Segments, arcs and polylines are parametrised proportionally to arc length.
        if (curve_->kind != Curve::Kind::SineGraph) return t * total();
        const std::size_t i =
            std::min(static_cast<std::size_t>(std::upper_bound(t_.begin(), t_.end(), t) - t_.begin()) - 1, t_.size() - 2);
        return s_[i] + segment(t_[i], t);
    }

private:
    double segment(double a, double b) const
    {
        static const quad::Rule rule = quad::gauss_legendre(12);
        double s = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const Point d = curve_->derivative(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[k]);
            s += rule.weights[k] * std::hypot(d.x, d.y);
        }
        return 0.5 * (b - a) * s;
    }

    const Curve* curve_;
    std::vector<double> t_, s_;
};

struct Piece {
    const Curve* curve;
    Condition condition;
    bool reversed;  // traversed against its parametrisation in the ccw loop
};

struct Segment {
    int a, b;      // vertex ids, in ccw loop order
    int piece;
    double ta, tb; // curve parameters of a and b
    bool alive;
};

struct Tri {
    int v[3];
    int n[3];  // n[i] is the neighbour across the edge opposite v[i]
    bool alive;
};

class Mesher {
public:
    Mesher(const SloshingDomain& d, double h, double g) : dom_(d), h_(h), g_(g)
    {
        pieces_.push_back({&d.sloshing_surface.curve, Condition::Steklov, true});
        for (const auto& w : d.walls) pieces_.push_back({&w.curve, w.condition, false});
        for (const auto& p : pieces_) arcs_.emplace_back(*p.curve);
    }

    TriangleMesh run()
    {
        build_super_triangle();
        sample_boundary();
        for (auto& s : segs_) seg_queue_.push_back(static_cast<int>(&s - segs_.data()));
        resolve_segments();
        refine();
        return extract();
    }

private:
    double size_at(Point p) const { return target_size(dom_, h_, g_, p); }

    void build_super_triangle()
    {
        const auto poly = geometry::boundary_polygon(dom_, 64);
        double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
        for (auto p : poly) {
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
        }
        const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
        const double m = 20.0 * std::max(x1 - x0, y1 - y0);
        pts_ = {{cx - 2.0 * m, cy - m}, {cx + 2.0 * m, cy - m}, {cx, cy + 2.0 * m}};
        vtri_ = {0, 0, 0};
        is_corner_ = {false, false, false};
        tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    }

    // Places nodes on each piece: the first and last edge have length equal to
    // the target size at the corner, the rest is equidistributed in 1/size.
    void sample_boundary()
    {
        // Corner vertices in loop order: A, wall junctions, B.
        std::vector<Point> corners{dom_.A()};
        for (std::size_t i = 0; i + 1 < dom_.walls.size(); ++i) corners.push_back(dom_.walls[i].curve.eval(1.0));
        corners.push_back(dom_.B());
        std::vector<int> corner_id;
        for (auto c : corners) corner_id.push_back(add_vertex(c, true));

        // Samples the parameter range [t0, t1] of a piece between existing vertices.
        auto sample_range = [&](int piece, double t0, double t1, int v0, int v1) {
            const ArcLength& al = arcs_[piece];
            const Curve& c = *pieces_[piece].curve;
            const double sa = al.length_to(t0), total = al.length_to(t1) - sa;
            const double s0 = std::min(size_at(c.eval(t0)), 0.5 * total);
            const double s1 = std::min(size_at(c.eval(t1)), 0.5 * total);
            std::vector<double> ss{0.0};
            if (total > s0 + s1 + 1e-12 * total) {
                ss.push_back(s0);
                // Equidistribute on [s0, total - s1].
                const int fine = 4000;
                std::vector<double> cum(fine + 1, 0.0);
                const double span = total - s0 - s1;
                for (int i = 0; i < fine; ++i) {
                    const double sm = s0 + span * (i + 0.5) / fine;
                    cum[i + 1] = cum[i] + span / fine / size_at(c.eval(al.param(sa + sm)));
                }
                const int n = std::max(1, static_cast<int>(std::ceil(cum.back() - 1e-9)));
                for (int k = 1; k < n; ++k) {
                    const double target = cum.back() * k / n;
                    const std::size_t i =
                        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin()) - 1;
                    const double frac = (target - cum[i]) / (cum[i + 1] - cum[i]);
                    ss.push_back(s0 + span * (static_cast<double>(i) + frac) / fine);
                }
                ss.push_back(total - s1);
            } else if (total > 1.5 * std::max(s0, s1)) {
                ss.push_back(0.5 * total);
            }
            ss.push_back(total);
            std::vector<double> ts;
            for (double s : ss) ts.push_back(al.param(sa + s));
            ts.front() = t0;
            ts.back() = t1;
            std::vector<int> ids{v0};
            for (std::size_t k = 1; k + 1 < ts.size(); ++k) ids.push_back(add_vertex(c.eval(ts[k]), false));
            ids.push_back(v1);
            // Loop order: walls follow their parametrisation, the surface runs backwards.
            for (std::size_t k = 0; k + 1 < ids.size(); ++k) {
                if (pieces_[piece].reversed)
                    segs_.push_back({ids[k + 1], ids[k], piece, ts[k + 1], ts[k], true});
                else
                    segs_.push_back({ids[k], ids[k + 1], piece, ts[k], ts[k + 1], true});
            }
        };
        auto sample = [&](int piece, int va, int vb) {
            const Curve& c = *pieces_[piece].curve;
            std::vector<double> breaks{0.0};
            std::vector<int> verts{va};
            for (double k : c.kinks()) {
                breaks.push_back(k);
                verts.push_back(add_vertex(c.eval(k), true));
            }
            breaks.push_back(1.0);
            verts.push_back(vb);
            for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
                sample_range(piece, breaks[i], breaks[i + 1], verts[i], verts[i + 1]);
        };
        const int nw = static_cast<int>(dom_.walls.size());
        for (int w = 0; w < nw; ++w) sample(w + 1, corner_id[w], corner_id[w + 1]);
        sample(0, corner_id.front(), corner_id.back());
    }

    int add_vertex(Point p, bool corner)
    {
        const int id = static_cast<int>(pts_.size());
        pts_.push_back(p);
        vtri_.push_back(-1);
        is_corner_.push_back(corner);
        insert(id);
        return id;
    }

    int locate(Point p, int hint) const
    {
        int t = hint;
        if (t < 0 || !tris_[t].alive) t = last_alive();
        const std::size_t limit = 4 * tris_.size() + 100;
        for (std::size_t step = 0; step < limit; ++step) {
            const Tri& tr = tris_[t];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + static_cast<int>(step)) % 3;
                if (orient(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p) < 0) {
                    next = tr.n[i];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& tr = tris_[i];
            if (!tr.alive) continue;
            bool in = true;
            for (int k = 0; k < 3 && in; ++k)
                in = orient(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], p) >= 0;
            if (in) return static_cast<int>(i);
        }
        throw NumericalError("mesh: point location failed at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    }

    int last_alive() const
    {
        for (std::size_t i = tris_.size(); i-- > 0;)
            if (tris_[i].alive) return static_cast<int>(i);
        return -1;
    }

    // Bowyer-Watson insertion of an existing vertex id.
    void insert(int id)
    {
        const Point p = pts_[id];
        const int t0 = locate(p, last_created_);
        std::vector<int> cav{t0};
        stamp_.resize(tris_.size(), 0);
        ++epoch_;
        stamp_[t0] = epoch_;
        for (std::size_t k = 0; k < cav.size(); ++k) {
            const Tri& tr = tris_[cav[k]];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[i];
                if (nb < 0 || stamp_[nb] == epoch_) continue;
                const Tri& tn = tris_[nb];
                if (incircle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p) > 0) {
                    stamp_[nb] = epoch_;
                    cav.push_back(nb);
                }
            }
        }
        // Keep the cavity star-shaped with respect to p.
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = 0; k < cav.size() && !changed; ++k) {
                const int t = cav[k];
                if (t == t0) continue;
                const Tri& tr = tris_[t];
                for (int i = 0; i < 3; ++i) {
                    const int nb = tr.n[i];
                    if (nb >= 0 && stamp_[nb] == epoch_) continue;
                    if (orient(pts_[tr.v[(i + 1) % 3]], pts_[tr.v[(i + 2) % 3]], p) <= 0) {
                        stamp_[t] = 0;
                        cav.erase(cav.begin() + static_cast<long>(k));
                        changed = true;
                        break;
                    }
                }
            }
        }
        struct Edge {
            int a, b, outside;
        };
        std::vector<Edge> rim;
        for (int t : cav) {
            const Tri& tr = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[i];
                if (nb >= 0 && stamp_[nb] == epoch_) continue;
                rim.push_back({tr.v[(i + 1) % 3], tr.v[(i + 2) % 3], nb});
            }
        }
        for (int t : cav) tris_[t].alive = false;
        std::vector<int> slots(cav.begin(), cav.end());
        std::vector<int> made;
        for (std::size_t k = 0; k < rim.size(); ++k) {
            int slot;
            if (k < slots.size()) {
                slot = slots[k];
            } else {
                slot = static_cast<int>(tris_.size());
                tris_.push_back({});
                stamp_.push_back(0);
            }
            tris_[slot] = {{id, rim[k].a, rim[k].b}, {rim[k].outside, -1, -1}, true};
            made.push_back(slot);
            const int out = rim[k].outside;
            if (out >= 0) {
                Tri& to = tris_[out];
                for (int i = 0; i < 3; ++i)
                    if (to.v[(i + 1) % 3] == rim[k].b && to.v[(i + 2) % 3] == rim[k].a) to.n[i] = slot;
            }
        }
        for (std::size_t k = 0; k < made.size(); ++k) {
            Tri& tk = tris_[made[k]];
            for (std::size_t j = 0; j < made.size(); ++j) {
                const Tri& tj = tris_[made[j]];
                if (tj.v[1] == tk.v[2]) tk.n[1] = made[j];  // edge (b, p)
                if (tj.v[2] == tk.v[1]) tk.n[2] = made[j];  // edge (p, a)
            }
        }
        for (int t : made) {
            const Tri& tr = tris_[t];
            for (int i = 0; i < 3; ++i) vtri_[tr.v[i]] = t;
            fresh_.push_back(t);
        }
        last_created_ = made.front();
    }


    // Triangle and local index holding the directed or reversed edge a-b.
    bool has_edge(int a, int b, int* opposite = nullptr) const
    {
        int t = vtri_[a];
        const int start = t;
        int count = 0;
        int found = 0;
        do {
            const Tri& tr = tris_[t];
            int ia = 0;
            while (tr.v[ia] != a) ++ia;
            if (tr.v[(ia + 1) % 3] == b || tr.v[(ia + 2) % 3] == b) {
                const int ib = tr.v[(ia + 1) % 3] == b ? (ia + 1) % 3 : (ia + 2) % 3;
                if (opposite) opposite[found] = tr.v[3 - ia - ib];
                ++found;
                if (found == 2) return true;
            }
            t = tr.n[(ia + 2) % 3];
        } while (t >= 0 && t != start && ++count < 1000);
        if (found == 1 && opposite) opposite[1] = -1;
        return found > 0;
    }

    bool encroached(const Segment& s) const
    {
        int opp[2] = {-1, -1};
        if (!has_edge(s.a, s.b, opp)) return true;
        for (int c : opp) {
            if (c < 0) continue;
            if (encroaches(pts_[c], s)) return true;
        }
        return false;
    }

    bool encroaches(Point c, const Segment& s) const
    {
        const Point a = pts_[s.a], b = pts_[s.b];
        const double d = (a.x - c.x) * (b.x - c.x) + (a.y - c.y) * (b.y - c.y);
        return d < -1e-14 * dist(a, b) * dist(a, b);
    }

    // Splits at the curve midpoint, or on a power-of-two shell around a corner.
    void split(int si)
    {
        Segment s = segs_[si];
        segs_[si].alive = false;
        const ArcLength& al = arcs_[s.piece];
        const double sa = al.length_to(s.ta), sb = al.length_to(s.tb);
        double tm = 0.5 * (s.ta + s.tb);
        const bool ca = is_corner_[s.a], cb = is_corner_[s.b];
        if (ca != cb) {
            const double len = std::abs(sb - sa);
            const Point corner = ca ? pts_[s.a] : pts_[s.b];
            const double unit = size_at(corner);
            const double shell = unit * std::exp2(std::round(std::log2(0.5 * len / unit)));
            if (shell > 0.25 * len && shell < 0.75 * len) {
                const double sc = ca ? sa : sb;
                const double target = sc + (sb > sa ? 1.0 : -1.0) * (ca ? shell : -shell);
                tm = al.param(target);
            }
        }
        const Point p = pieces_[s.piece].curve->eval(tm);
        const int id = static_cast<int>(pts_.size());
        pts_.push_back(p);
        vtri_.push_back(-1);
        is_corner_.push_back(false);
        insert(id);
        segs_.push_back({s.a, id, s.piece, s.ta, tm, true});
        segs_.push_back({id, s.b, s.piece, tm, s.tb, true});
        seg_queue_.push_back(static_cast<int>(segs_.size()) - 2);
        seg_queue_.push_back(static_cast<int>(segs_.size()) - 1);
        queue_encroached_by(p);
        guard();
    }

    void queue_encroached_by(Point p)
    {
        for (std::size_t i = 0; i < segs_.size(); ++i)
            if (segs_[i].alive && encroaches(p, segs_[i])) seg_queue_.push_back(static_cast<int>(i));
    }

    void resolve_segments()
    {
        for (;;) {
            while (!seg_queue_.empty()) {
                const int si = seg_queue_.front();
                seg_queue_.pop_front();
                if (!segs_[si].alive) continue;
                if (encroached(segs_[si])) split(si);
            }
            // A final sweep catches segments lost to degenerate cocircular input.
            for (std::size_t i = 0; i < segs_.size(); ++i)
                if (segs_[i].alive && encroached(segs_[i])) seg_queue_.push_back(static_cast<int>(i));
            if (seg_queue_.empty()) return;
        }
    }

    bool inside(Point p) const
    {
        bool in = false;
        for (const auto& s : segs_) {
            if (!s.alive) continue;
            const Point a = pts_[s.a], b = pts_[s.b];
            if ((a.y > p.y) != (b.y > p.y)) {
                const double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if (x > p.x) in = !in;
            }
        }
        return in;
    }

    bool is_super(int v) const { return v < 3; }

    bool bad(int t) const
    {
        const Tri& tr = tris_[t];
        if (is_super(tr.v[0]) || is_super(tr.v[1]) || is_super(tr.v[2])) return false;
        const Point a = pts_[tr.v[0]], b = pts_[tr.v[1]], c = pts_[tr.v[2]];
        const Point g{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
        if (!inside(g)) return false;
        if (min_angle(a, b, c) < kRefineAngle) return true;
        const Point cc = circumcenter(a, b, c);
        return dist(cc, a) > size_at(g) / std::sqrt(3.0);
    }

    void refine()
    {
        std::deque<int> work;
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (tris_[i].alive) work.push_back(static_cast<int>(i));
        fresh_.clear();
        while (!work.empty()) {
            const int t = work.front();
            work.pop_front();
            if (!tris_[t].alive || !bad(t)) continue;
            const Tri tr = tris_[t];
            const Point a = pts_[tr.v[0]], b = pts_[tr.v[1]], c = pts_[tr.v[2]];
            const Point cc = circumcenter(a, b, c);
            std::vector<int> hit;
            for (std::size_t i = 0; i < segs_.size(); ++i)
                if (segs_[i].alive && encroaches(cc, segs_[i])) hit.push_back(static_cast<int>(i));
            if (hit.empty() && !inside(cc)) hit.push_back(crossing_segment(a, b, c, cc));
            if (!hit.empty()) {
                for (int si : hit)
                    if (segs_[si].alive) split(si);
                resolve_segments();
                work.push_back(t);
            } else {
                const int id = static_cast<int>(pts_.size());
                pts_.push_back(cc);
                vtri_.push_back(-1);
                is_corner_.push_back(false);
                insert(id);
                queue_encroached_by(cc);
                resolve_segments();
                guard();
            }
            for (int f : fresh_) work.push_back(f);
            fresh_.clear();
        }
    }

    int crossing_segment(Point a, Point b, Point c, Point target) const
    {
        const Point g{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
        int best = -1;
        double best_d = 1e300;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            const Segment& s = segs_[i];
            if (!s.alive) continue;
            const Point p = pts_[s.a], q = pts_[s.b];
            const double d1 = static_cast<double>(orient(p, q, g)), d2 = static_cast<double>(orient(p, q, target));
            const double d3 = static_cast<double>(orient(g, target, p)), d4 = static_cast<double>(orient(g, target, q));
            if ((d1 > 0) != (d2 > 0) && (d3 > 0) != (d4 > 0)) {
                const Point m{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
                if (dist(m, g) < best_d) {
                    best_d = dist(m, g);
                    best = static_cast<int>(i);
                }
            }
        }
        if (best < 0) throw NumericalError("mesh: circumcenter left the domain without crossing a segment");
        return best;
    }

    void guard()
    {
        if (pts_.size() > max_vertices_)
            throw NumericalError("mesh: refinement did not reach the minimum-angle bound within the vertex budget");
    }

    TriangleMesh extract()
    {
        // Flood fill from the super triangle without crossing segments.
        std::vector<std::pair<int, int>> seg_keys;
        for (const auto& s : segs_)
            if (s.alive) seg_keys.emplace_back(std::min(s.a, s.b), std::max(s.a, s.b));
        std::sort(seg_keys.begin(), seg_keys.end());
        auto is_seg = [&](int a, int b) {
            return std::binary_search(seg_keys.begin(), seg_keys.end(), std::make_pair(std::min(a, b), std::max(a, b)));
        };
        std::vector<char> outside(tris_.size(), 0);
        std::vector<int> stack;
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& tr = tris_[i];
            if (tr.alive && (is_super(tr.v[0]) || is_super(tr.v[1]) || is_super(tr.v[2]))) {
                outside[i] = 1;
                stack.push_back(static_cast<int>(i));
            }
        }
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            const Tri& tr = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[i];
                if (nb < 0 || outside[nb]) continue;
                if (is_seg(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
                outside[nb] = 1;
                stack.push_back(nb);
            }
        }
        TriangleMesh m;
        m.mesh_size = h_;
        m.grading_factor = g_;
        std::vector<int> remap(pts_.size(), -1);
        for (std::size_t v = 3; v < pts_.size(); ++v) {
            remap[v] = static_cast<int>(m.nodes.size());
            m.nodes.push_back(pts_[v]);
        }
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const Tri& tr = tris_[i];
            if (!tr.alive || outside[i]) continue;
            m.triangles.push_back({remap[tr.v[0]], remap[tr.v[1]], remap[tr.v[2]]});
        }
        for (const auto& s : segs_) {
            if (!s.alive) continue;
            if (!has_edge(s.a, s.b)) throw NumericalError("mesh: boundary segment missing from the triangulation");
            m.boundary_edges.push_back({{remap[s.a], remap[s.b]}, pieces_[s.piece].condition, s.piece});
        }
        // Order boundary edges: by piece, then along the loop.
        std::stable_sort(m.boundary_edges.begin(), m.boundary_edges.end(),
                         [](const BoundaryEdge& x, const BoundaryEdge& y) { return x.piece < y.piece; });
        return m;
    }

    const SloshingDomain& dom_;
    double h_, g_;
    std::vector<Piece> pieces_;
    std::vector<ArcLength> arcs_;
    std::vector<Point> pts_;
    std::vector<int> vtri_;
    std::vector<char> is_corner_;
    std::vector<Tri> tris_;
    std::vector<Segment> segs_;
    std::deque<int> seg_queue_;
    std::vector<int> fresh_;
    std::vector<int> stamp_;
    int epoch_ = 0;
    int last_created_ = 0;

public:
    std::size_t max_vertices_ = 0;
};

} // namespace

double target_size(const SloshingDomain& d, double h, double grading_factor, Point p)
{
    const double r = std::min(dist(p, d.A()), dist(p, d.B()));
    // Geometric growth from grading_factor * h at A and B to h at distance 10 h.
    return h * std::pow(grading_factor, 1.0 - std::min(r / (10.0 * h), 1.0));
}

TriangleMesh generate_mesh(const SloshingDomain& d, double h, double grading_factor)
{
    require(std::isfinite(h) && h > 0.0, "h", "mesh size must be positive");
    require(std::isfinite(grading_factor) && grading_factor > 0.0 && grading_factor <= 1.0, "grading_factor",
            "must lie in (0, 1]");
    geometry::validate(d);
    const auto poly = geometry::boundary_polygon(d, 64);
    double area2 = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point p = poly[i], q = poly[(i + 1) % poly.size()];
        area2 += p.x * q.y - q.x * p.y;
    }
    const double gh = grading_factor * h;
    Mesher m(d, h, grading_factor);
    m.max_vertices_ = static_cast<std::size_t>(20.0 * (0.5 * area2 / (gh * gh)) + 1e5);
    return m.run();
}

double signed_area(const TriangleMesh& m, int t)
{
    const auto& tr = m.triangles[t];
    const Point a = m.nodes[tr[0]], b = m.nodes[tr[1]], c = m.nodes[tr[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

double min_angle_degrees(const TriangleMesh& m)
{
    double best = 180.0;
    for (const auto& tr : m.triangles)
        best = std::min(best, min_angle(m.nodes[tr[0]], m.nodes[tr[1]], m.nodes[tr[2]]) * 180.0 / pi);
    return best;
}

double boundary_polygon_area(const TriangleMesh& m)
{
    double a2 = 0.0;
    for (const auto& e : m.boundary_edges) {
        const Point p = m.nodes[e.nodes[0]], q = m.nodes[e.nodes[1]];
        a2 += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a2;
}

double tagged_length(const TriangleMesh& m, Condition tag)
{
    double s = 0.0;
    for (const auto& e : m.boundary_edges)
        if (e.tag == tag) s += dist(m.nodes[e.nodes[0]], m.nodes[e.nodes[1]]);
    return s;
}

void write_dump(std::ostream& os, const TriangleMesh& m)
{
    os.precision(17);
    os << "nodes " << m.nodes.size() << '\n';
    for (auto p : m.nodes) os << p.x << ' ' << p.y << '\n';
    os << "triangles " << m.triangles.size() << '\n';
    for (const auto& t : m.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "bedges " << m.boundary_edges.size() << '\n';
    for (const auto& e : m.boundary_edges)
        os << e.nodes[0] << ' ' << e.nodes[1] << ' ' << geometry::condition_name(e.tag) << '\n';
}

} // namespace sloshspec::mesh
