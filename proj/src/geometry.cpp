#include "stablepde/geometry.hpp"

#include <algorithm>

namespace stablepde {

namespace {
constexpr double kTiny = 1e-15;

void keep_best(Domain::DistResult& best, double d, const Pt& z) {
    if (d < best.d - 1e-15 || (std::abs(d - best.d) <= 1e-15 && lex_less(z, best.z))) {
        best.d = d;
        best.z = z;
    }
}
}  // namespace

Domain Domain::interval(double a, double b) {
    if (!(a < b)) throw std::invalid_argument("interval: a < b required");
    Domain d;
    d.kind_ = Kind::Interval;
    d.dim_ = 1;
    d.lo_ = pt(a);
    d.hi_ = pt(b);
    d.bb_lo_ = d.lo_;
    d.bb_hi_ = d.hi_;
    return d;
}

Domain Domain::ball(Pt center, double radius, int dim) {
    if (radius <= 0.0) throw std::invalid_argument("ball: radius > 0 required");
    Domain d;
    d.kind_ = Kind::Ball;
    d.dim_ = dim;
    d.center_ = center;
    d.radius_ = radius;
    for (int k = 0; k < 3; ++k) {
        d.bb_lo_[k] = k < dim ? center[k] - radius : 0.0;
        d.bb_hi_[k] = k < dim ? center[k] + radius : 0.0;
    }
    return d;
}

Domain Domain::box(Pt lo, Pt hi, int dim) {
    for (int k = 0; k < dim; ++k)
        if (!(lo[k] < hi[k])) throw std::invalid_argument("box: lo < hi required");
    Domain d;
    d.kind_ = Kind::Box;
    d.dim_ = dim;
    d.lo_ = lo;
    d.hi_ = hi;
    d.bb_lo_ = lo;
    d.bb_hi_ = hi;
    return d;
}

Domain Domain::lshape(Pt outer_lo, Pt outer_hi, Pt notch_lo, Pt notch_hi) {
    Domain d = box(outer_lo, outer_hi, 2);
    d.kind_ = Kind::LShape;
    for (int k = 0; k < 2; ++k) {
        if (!(notch_lo[k] < notch_hi[k]))
            throw std::invalid_argument("lshape: notch_lo < notch_hi required");
        if (notch_lo[k] < outer_lo[k] - kTiny || notch_hi[k] > outer_hi[k] + kTiny)
            throw std::invalid_argument("lshape: notch must sit inside the outer box");
    }
    d.nlo_ = notch_lo;
    d.nhi_ = notch_hi;
    return d;
}

Domain Domain::lshape_canonical() {
    return lshape(pt(-2, -2), pt(2, 2), pt(0, 0), pt(1, 1));
}

bool Domain::contains(const Pt& x) const {
    switch (kind_) {
        case Kind::Interval:
            return x[0] > lo_[0] && x[0] < hi_[0];
        case Kind::Ball:
            return norm(sub(x, center_)) < radius_;
        case Kind::Box:
            for (int k = 0; k < dim_; ++k)
                if (!(x[k] > lo_[k] && x[k] < hi_[k])) return false;
            return true;
        case Kind::LShape: {
            for (int k = 0; k < 2; ++k)
                if (!(x[k] > lo_[k] && x[k] < hi_[k])) return false;
            bool in_notch = x[0] >= nlo_[0] && x[0] <= nhi_[0] && x[1] >= nlo_[1] && x[1] <= nhi_[1];
            return !in_notch;
        }
    }
    return false;
}

namespace {

// distance to the boundary of an axis box, from anywhere; candidates carry z
void box_boundary_dist(const Pt& lo, const Pt& hi, int dim, const Pt& x,
                       Domain::DistResult& best) {
    bool inside = true;
    for (int k = 0; k < dim; ++k) inside = inside && x[k] > lo[k] && x[k] < hi[k];
    if (inside) {
        for (int k = 0; k < dim; ++k) {
            Pt z = x;
            z[k] = lo[k];
            keep_best(best, x[k] - lo[k], z);
            z[k] = hi[k];
            keep_best(best, hi[k] - x[k], z);
        }
    } else {
        Pt z = x;
        for (int k = 0; k < dim; ++k) z[k] = std::clamp(x[k], lo[k], hi[k]);
        if (norm(sub(z, x)) > 0.0) {
            keep_best(best, norm(sub(z, x)), z);
        } else {
            // on the boundary itself
            keep_best(best, 0.0, z);
        }
    }
}

}  // namespace

Domain::DistResult Domain::dist_to_boundary(const Pt& x) const {
    DistResult best;
    best.inside = contains(x);
    best.d = std::numeric_limits<double>::infinity();
    best.z = pt(std::numeric_limits<double>::infinity());
    switch (kind_) {
        case Kind::Interval: {
            keep_best(best, std::abs(x[0] - lo_[0]), lo_);
            keep_best(best, std::abs(x[0] - hi_[0]), hi_);
            break;
        }
        case Kind::Ball: {
            double r = norm(sub(x, center_));
            if (r < kTiny) {
                Pt z = center_;
                z[0] -= radius_;  // lexicographically smallest boundary point
                keep_best(best, radius_, z);
            } else {
                Pt z = axpy(radius_ / r, sub(x, center_), center_);
                keep_best(best, std::abs(radius_ - r), z);
            }
            break;
        }
        case Kind::Box: {
            box_boundary_dist(lo_, hi_, dim_, x, best);
            break;
        }
        case Kind::LShape: {
            // boundary = outer box boundary + notch box boundary
            box_boundary_dist(lo_, hi_, 2, x, best);
            bool in_notch_cl =
                x[0] >= nlo_[0] && x[0] <= nhi_[0] && x[1] >= nlo_[1] && x[1] <= nhi_[1];
            if (in_notch_cl) {
                // from inside the notch, nearest notch face
                for (int k = 0; k < 2; ++k) {
                    Pt z = x;
                    z[k] = nlo_[k];
                    keep_best(best, x[k] - nlo_[k], z);
                    z[k] = nhi_[k];
                    keep_best(best, nhi_[k] - x[k], z);
                }
            } else {
                Pt z = x;
                for (int k = 0; k < 2; ++k) z[k] = std::clamp(x[k], nlo_[k], nhi_[k]);
                keep_best(best, norm(sub(z, x)), z);
            }
            break;
        }
    }
    return best;
}

namespace {

std::vector<Domain::Chord> intersect_chords(const std::vector<Domain::Chord>& a, double lo,
                                            double hi) {
    std::vector<Domain::Chord> out;
    for (const auto& [p, q] : a) {
        double l = std::max(p, lo), r = std::min(q, hi);
        if (l < r - kTiny) out.emplace_back(l, r);
    }
    return out;
}

std::vector<Domain::Chord> subtract_chord(const std::vector<Domain::Chord>& a, double lo,
                                          double hi) {
    std::vector<Domain::Chord> out;
    for (const auto& [p, q] : a) {
        if (hi <= p + kTiny || lo >= q - kTiny) {
            out.emplace_back(p, q);
            continue;
        }
        if (lo > p + kTiny) out.emplace_back(p, lo);
        if (hi < q - kTiny) out.emplace_back(hi, q);
    }
    return out;
}

// {r : x + r dir in axis box}, or empty
bool slab_range(const Pt& lo, const Pt& hi, int dim, const Pt& x, const Pt& dir, double& t0,
                double& t1) {
    t0 = -std::numeric_limits<double>::infinity();
    t1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) {
        if (std::abs(dir[k]) < 1e-14) {
            if (!(x[k] > lo[k] && x[k] < hi[k])) return false;
        } else {
            double a = (lo[k] - x[k]) / dir[k];
            double b = (hi[k] - x[k]) / dir[k];
            if (a > b) std::swap(a, b);
            t0 = std::max(t0, a);
            t1 = std::min(t1, b);
        }
    }
    return t0 < t1 - kTiny;
}

}  // namespace

std::vector<Domain::Chord> Domain::ray_chords(const Pt& x, const Pt& dir) const {
    std::vector<Chord> out;
    switch (kind_) {
        case Kind::Interval: {
            double a = (lo_[0] - x[0]) / dir[0];
            double b = (hi_[0] - x[0]) / dir[0];
            if (a > b) std::swap(a, b);
            out.emplace_back(a, b);
            break;
        }
        case Kind::Ball: {
            // |x + r dir - c|^2 = R^2
            Pt w = sub(x, center_);
            double b = dot(w, dir);
            double c = dot(w, w) - radius_ * radius_;
            double disc = b * b - c;
            if (disc > kTiny) {
                double sq = std::sqrt(disc);
                out.emplace_back(-b - sq, -b + sq);
            }
            break;
        }
        case Kind::Box: {
            double t0, t1;
            if (slab_range(lo_, hi_, dim_, x, dir, t0, t1)) out.emplace_back(t0, t1);
            break;
        }
        case Kind::LShape: {
            double t0, t1;
            if (!slab_range(lo_, hi_, 2, x, dir, t0, t1)) break;
            out.emplace_back(t0, t1);
            double n0, n1;
            if (slab_range(nlo_, nhi_, 2, x, dir, n0, n1)) out = subtract_chord(out, n0, n1);
            break;
        }
    }
    return out;
}

std::vector<Domain::Chord> Domain::complement_chords(const Pt& x, const Pt& dir, double lo,
                                                     double hi) const {
    auto inside = intersect_chords(ray_chords(x, dir), lo, hi);
    std::vector<Chord> out;
    double cur = lo;
    for (const auto& [p, q] : inside) {
        if (p > cur + kTiny) out.emplace_back(cur, p);
        cur = std::max(cur, q);
    }
    if (hi > cur + kTiny) out.emplace_back(cur, hi);
    return out;
}

double Domain::boundary_measure() const {
    switch (kind_) {
        case Kind::Interval:
            return 2.0;  // counting measure on the two endpoints
        case Kind::Ball:
            return dim_ == 2 ? 2.0 * 3.141592653589793238463 * radius_ : 2.0;
        case Kind::Box: {
            double p = 0.0;
            for (int k = 0; k < dim_; ++k) p += hi_[k] - lo_[k];
            return 2.0 * p;
        }
        case Kind::LShape: {
            double p = 2.0 * ((hi_[0] - lo_[0]) + (hi_[1] - lo_[1]));
            p += 2.0 * ((nhi_[0] - nlo_[0]) + (nhi_[1] - nlo_[1]));
            return p;
        }
    }
    return 0.0;
}

namespace {

void polyline_nodes(const std::vector<Pt>& corners, int n,
                    std::vector<std::pair<Pt, double>>& out) {
    // closed polyline; n midpoints distributed proportionally to edge length
    double per = 0.0;
    std::size_t m = corners.size();
    for (std::size_t e = 0; e < m; ++e) per += norm(sub(corners[(e + 1) % m], corners[e]));
    for (std::size_t e = 0; e < m; ++e) {
        Pt a = corners[e], b = corners[(e + 1) % m];
        double len = norm(sub(b, a));
        int ne = std::max(1, static_cast<int>(std::lround(n * len / per)));
        for (int i = 0; i < ne; ++i) {
            double t = (i + 0.5) / ne;
            out.emplace_back(axpy(t, sub(b, a), a), len / ne);
        }
    }
}

}  // namespace

std::vector<std::pair<Pt, double>> Domain::boundary_nodes(int n) const {
    if (n < 4) throw std::invalid_argument("boundary_nodes: n >= 4");
    std::vector<std::pair<Pt, double>> out;
    switch (kind_) {
        case Kind::Interval:
            out.emplace_back(lo_, 1.0);
            out.emplace_back(hi_, 1.0);
            break;
        case Kind::Ball: {
            for (int i = 0; i < n; ++i) {
                double th = 2.0 * 3.141592653589793238463 * (i + 0.5) / n;
                out.emplace_back(
                    axpy(radius_, pt(std::cos(th), std::sin(th)), center_),
                    2.0 * 3.141592653589793238463 * radius_ / n);
            }
            break;
        }
        case Kind::Box: {
            polyline_nodes({pt(lo_[0], lo_[1]), pt(hi_[0], lo_[1]), pt(hi_[0], hi_[1]),
                            pt(lo_[0], hi_[1])},
                           n, out);
            break;
        }
        case Kind::LShape: {
            int n_out = std::max(4, static_cast<int>(std::lround(
                                         n * 2.0 * ((hi_[0] - lo_[0]) + (hi_[1] - lo_[1])) /
                                         boundary_measure())));
            polyline_nodes({pt(lo_[0], lo_[1]), pt(hi_[0], lo_[1]), pt(hi_[0], hi_[1]),
                            pt(lo_[0], hi_[1])},
                           n_out, out);
            polyline_nodes({pt(nlo_[0], nlo_[1]), pt(nhi_[0], nlo_[1]), pt(nhi_[0], nhi_[1]),
                            pt(nlo_[0], nhi_[1])},
                           std::max(4, n - n_out), out);
            break;
        }
    }
    return out;
}

double Domain::diameter() const {
    Pt d = sub(bb_hi_, bb_lo_);
    double v = 0.0;
    for (int k = 0; k < dim_; ++k) v += d[k] * d[k];
    return std::sqrt(v);
}

double Domain::volume() const {
    switch (kind_) {
        case Kind::Interval:
            return hi_[0] - lo_[0];
        case Kind::Ball:
            return 3.141592653589793238463 * radius_ * radius_;
        case Kind::Box:
            return (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]);
        case Kind::LShape:
            return (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]) -
                   (nhi_[0] - nlo_[0]) * (nhi_[1] - nlo_[1]);
    }
    return 0.0;
}

WhitneyCover whitney_cover(const Domain& dom, double min_radius) {
    if (!(min_radius > 0.0)) throw std::invalid_argument("whitney_cover: min_radius > 0");
    WhitneyCover cover;
    int d = dom.dim();
    double half_diag_f = 0.5 * std::sqrt(static_cast<double>(d));

    struct Cell {
        Pt lo;
        double side;
    };
    std::vector<Cell> stack;
    Pt blo = dom.bbox_lo(), bhi = dom.bbox_hi();
    double side0 = 0.0;
    for (int k = 0; k < d; ++k) side0 = std::max(side0, bhi[k] - blo[k]);
    stack.push_back({blo, side0});

    while (!stack.empty()) {
        Cell c = stack.back();
        stack.pop_back();
        Pt ctr = c.lo;
        for (int k = 0; k < d; ++k) ctr[k] += 0.5 * c.side;
        double hd = half_diag_f * c.side;
        auto dr = dom.dist_to_boundary(ctr);
        if (!dr.inside && dr.d > hd) continue;  // cell entirely outside
        double r = dr.d / 3.0;                  // 2r <= d <= 4r holds by construction
        if (dr.inside && r >= hd) {
            cover.balls.push_back({ctr, r});
            continue;
        }
        if (0.5 * c.side < min_radius) {
            if (dr.inside && dr.d > 0.0) cover.balls.push_back({ctr, r});
            continue;
        }
        double s2 = 0.5 * c.side;
        int sub = 1 << d;
        for (int m = 0; m < sub; ++m) {
            Cell cc{c.lo, s2};
            for (int k = 0; k < d; ++k)
                if (m & (1 << k)) cc.lo[k] += s2;
            stack.push_back(cc);
        }
    }

    // measured overlap of the dilated balls at 1e4 seeded random points,
    // via a uniform bucket index over ball centers
    if (!cover.balls.empty()) {
        double rmax = 0.0;
        for (const auto& b : cover.balls) rmax = std::max(rmax, b.radius);
        double cellw = std::max(2.0 * cover.dilation * rmax / 8.0, 1e-9);
        // simple flat grid over bbox
        int nx[3] = {1, 1, 1};
        for (int k = 0; k < d; ++k)
            nx[k] = std::max(1, static_cast<int>((bhi[k] - blo[k]) / cellw) + 1);
        auto bucket = [&](const Pt& p) {
            int ii[3] = {0, 0, 0};
            for (int k = 0; k < d; ++k)
                ii[k] = std::clamp(static_cast<int>((p[k] - blo[k]) / cellw), 0, nx[k] - 1);
            return (ii[2] * nx[1] + ii[1]) * nx[0] + ii[0];
        };
        std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nx[0]) * nx[1] * nx[2]);
        for (std::size_t b = 0; b < cover.balls.size(); ++b)
            buckets[bucket(cover.balls[b].center)].push_back(static_cast<int>(b));

        Rng rng(20240915ULL);
        int maxcnt = 0;
        int found = 0;
        while (found < 10000) {
            Pt p = {0, 0, 0};
            for (int k = 0; k < d; ++k) p[k] = rng.uniform(blo[k], bhi[k]);
            if (!dom.contains(p)) continue;
            ++found;
            int cnt = 0;
            int reach = static_cast<int>(cover.dilation * rmax / cellw) + 1;
            int ii[3] = {0, 0, 0};
            for (int k = 0; k < d; ++k)
                ii[k] = std::clamp(static_cast<int>((p[k] - blo[k]) / cellw), 0, nx[k] - 1);
            int z0 = d > 2 ? std::max(0, ii[2] - reach) : 0;
            int z1 = d > 2 ? std::min(nx[2] - 1, ii[2] + reach) : 0;
            int y0 = d > 1 ? std::max(0, ii[1] - reach) : 0;
            int y1 = d > 1 ? std::min(nx[1] - 1, ii[1] + reach) : 0;
            for (int z = z0; z <= z1; ++z)
                for (int y = y0; y <= y1; ++y)
                    for (int x = std::max(0, ii[0] - reach); x <= std::min(nx[0] - 1, ii[0] + reach);
                         ++x)
                        for (int b : buckets[(static_cast<std::size_t>(z) * nx[1] + y) * nx[0] + x]) {
                            const auto& B = cover.balls[b];
                            if (norm(sub(p, B.center)) < cover.dilation * B.radius) ++cnt;
                        }
            maxcnt = std::max(maxcnt, cnt);
        }
        cover.overlap_bound = maxcnt;
    }
    return cover;
}

nlohmann::json to_json(const Domain& dom) {
    nlohmann::json j;
    switch (dom.kind()) {
        case Domain::Kind::Interval:
            j["variant"] = "interval";
            j["a"] = dom.lo()[0];
            j["b"] = dom.hi()[0];
            break;
        case Domain::Kind::Ball:
            j["variant"] = "ball";
            j["center"] = std::vector<double>{dom.center()[0], dom.center()[1]};
            j["radius"] = dom.radius();
            j["d"] = dom.dim();
            break;
        case Domain::Kind::Box:
            j["variant"] = "box";
            j["lo"] = std::vector<double>{dom.lo()[0], dom.lo()[1]};
            j["hi"] = std::vector<double>{dom.hi()[0], dom.hi()[1]};
            break;
        case Domain::Kind::LShape:
            j["variant"] = "lshape";
            j["lo"] = std::vector<double>{dom.lo()[0], dom.lo()[1]};
            j["hi"] = std::vector<double>{dom.hi()[0], dom.hi()[1]};
            j["notch_lo"] = std::vector<double>{dom.notch_lo()[0], dom.notch_lo()[1]};
            j["notch_hi"] = std::vector<double>{dom.notch_hi()[0], dom.notch_hi()[1]};
            break;
    }
    return j;
}

namespace {
Pt pt_from_json(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    Pt p = {0, 0, 0};
    for (std::size_t k = 0; k < v.size() && k < 3; ++k) p[k] = v[k];
    return p;
}
}  // namespace

Domain domain_from_json(const nlohmann::json& j) {
    std::string v = j.at("variant").get<std::string>();
    if (v == "interval") return Domain::interval(j.at("a").get<double>(), j.at("b").get<double>());
    if (v == "ball")
        return Domain::ball(pt_from_json(j.at("center")), j.at("radius").get<double>(),
                            j.value("d", 2));
    if (v == "box") return Domain::box(pt_from_json(j.at("lo")), pt_from_json(j.at("hi")));
    if (v == "lshape")
        return Domain::lshape(pt_from_json(j.at("lo")), pt_from_json(j.at("hi")),
                              pt_from_json(j.at("notch_lo")), pt_from_json(j.at("notch_hi")));
    throw std::invalid_argument("domain_from_json: unknown variant " + v);
}

}  // namespace stablepde
