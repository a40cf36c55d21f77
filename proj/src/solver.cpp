#include "stablepde/solver.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

extern "C" {
void dgetrf_(const int* m, const int* n, double* a, const int* lda, int* ipiv, int* info);
void dgetrs_(const char* trans, const int* n, const int* nrhs, const double* a, const int* lda,
             const int* ipiv, double* b, const int* ldb, int* info);
void openblas_set_num_threads(int n);
}

namespace stablepde {

namespace {

constexpr double kPi = 3.141592653589793238463;

void blas_single_thread() {
    // bit-identical factorizations across our own --threads settings
    static std::once_flag flag;
    std::call_once(flag, [] { openblas_set_num_threads(1); });
}

}  // namespace

Grid make_grid(const Domain& dom, double h, std::size_t node_cap) {
    if (!(h > 0.0)) throw std::invalid_argument("make_grid: h > 0");
    Grid g;
    g.dom = dom;
    if (dom.dim() == 1) {
        double a = dom.lo()[0], b = dom.hi()[0];
        int m = std::max(2, static_cast<int>(std::lround((b - a) / h)));
        g.h = (b - a) / m;  // endpoints on the lattice
        g.origin = pt(a - 2.0 * g.h);
        g.ext[0] = m + 4;
        g.ext[1] = 0;
    } else {
        g.h = h;
        Pt lo = dom.bbox_lo(), hi = dom.bbox_hi();
        if (dom.kind() == Domain::Kind::Ball) {
            // center on the lattice
            int m0 = static_cast<int>(std::ceil((dom.radius() + 2.0 * h) / h));
            g.origin = pt(dom.center()[0] - m0 * h, dom.center()[1] - m0 * h);
            g.ext[0] = g.ext[1] = 2 * m0;
        } else {
            g.origin = pt(lo[0] - 2.0 * h, lo[1] - 2.0 * h);
            g.ext[0] = static_cast<int>(std::ceil((hi[0] - lo[0]) / h)) + 4;
            g.ext[1] = static_cast<int>(std::ceil((hi[1] - lo[1]) / h)) + 4;
        }
    }
    g.index.assign(static_cast<std::size_t>(g.ext[0] + 1) * (g.ext[1] + 1), -1);
    for (int j = 0; j <= g.ext[1]; ++j) {
        for (int i = 0; i <= g.ext[0]; ++i) {
            Pt x = pt(g.origin[0] + i * g.h, g.origin[1] + j * g.h);
            if (dom.dim() == 1) x[1] = 0.0;
            if (!dom.contains(x)) continue;
            g.index[g.lat(i, j)] = static_cast<int>(g.nodes.size());
            g.nodes.push_back(x);
            g.dist.push_back(dom.dist_to_boundary(x).d);
            g.ij.push_back({i, j});
            if (g.nodes.size() > node_cap)
                throw std::invalid_argument("make_grid: node count exceeds the cap");
        }
    }
    if (g.nodes.empty()) throw std::invalid_argument("make_grid: no interior nodes");
    return g;
}

namespace {

// ---- line (1d / axis-direction) row assembly -------------------------------
//
// Accumulates the coefficients of  -weight * int_0^inf F(r) r^{-1-2s} dr  into
// `row`, where F is the symmetric second difference of the line-restricted
// partition-of-unity interpolant: hats at interior lattice points, constant
// extension on chord-end cells, zero off the chords; first radial cell by the
// quadratic second-difference model.
void line_row(const Grid& grid, const Domain& dom, double s, double weight, std::size_t self,
              int di, int dj, std::vector<double>& row) {
    double h = grid.h;
    auto [i0, j0] = grid.ij[self];
    auto col = [&](int k) { return grid.node_at(i0 + k * di, j0 + k * dj); };
    auto add = [&](int c, double v) {
        if (c >= 0) row[static_cast<std::size_t>(c)] += -weight * v;
    };

    // first cell (0,h): quadratic model through F(h)
    double w0 = std::pow(h, -2.0 * s) / (2.0 - 2.0 * s);
    add(col(1), w0);
    add(col(-1), w0);
    add(static_cast<int>(self), -2.0 * w0);
    // -2 u_i over (h, inf)
    add(static_cast<int>(self), -2.0 * kmom0_tail(h, s));

    Pt e = pt(di, dj);
    auto chords = dom.ray_chords(grid.nodes[self], e);

    auto process_side = [&](int sgn) {
        for (const auto& ch : chords) {
            // chord in this side's positive-offset coordinates
            double lo = sgn > 0 ? ch.first : -ch.second;
            double hi = sgn > 0 ? ch.second : -ch.first;
            if (hi <= 1e-14) continue;
            lo = std::max(lo, 0.0);
            // interior lattice offsets inside the chord
            int kmin = static_cast<int>(std::ceil(lo / h - 1e-9));
            int kmax = static_cast<int>(std::floor(hi / h + 1e-9));
            while (kmax >= kmin && col(sgn * kmax) < 0) --kmax;
            while (kmin <= kmax && kmin * h <= lo + 1e-12 * h) ++kmin;
            if (kmin > kmax) continue;  // no nodes on this chord piece
            double start = std::max(lo, h);
            // leading constant piece (chord start up to the first node)
            if (kmin * h > start + 1e-14)
                add(col(sgn * kmin), kmom0(start, kmin * h, s));
            // interior linear pieces
            for (int k = std::max(kmin, 1); k < kmax; ++k) {
                double p = k * h, q = (k + 1) * h;
                if (q <= start + 1e-14) continue;
                double wp, wq;
                linear_kernel_weights(std::max(p, start), q, s, wp, wq);
                if (p >= start - 1e-14) {
                    add(col(sgn * k), wp);
                    add(col(sgn * (k + 1)), wq);
                } else {
                    // partially clipped cell: interpolate the left value
                    double t = (std::max(p, start) - p) / h;
                    add(col(sgn * k), wp * (1.0 - t));
                    add(col(sgn * (k + 1)), wq + wp * t);
                }
            }
            // trailing constant piece (last node to the chord end)
            double tail_lo = std::max(static_cast<double>(kmax) * h, start);
            if (hi > tail_lo + 1e-14) add(col(sgn * kmax), kmom0(tail_lo, hi, s));
        }
    };
    process_side(+1);
    process_side(-1);
}

// ---- 2d polar row assembly (uniform spectral density) -----------------------

struct PolarParams {
    int nang = 64;
    int ladder = 24;
    double cnear = 2.0;  // near-zone radius in grid cells
};

// normalized bilinear interpolation among interior corners; returns up to 4
// (column, weight) pairs for a point strictly inside the domain
inline int interp_cols(const Grid& g, const Pt& x, int cols[4], double wts[4]) {
    double fx = (x[0] - g.origin[0]) / g.h;
    double fy = (x[1] - g.origin[1]) / g.h;
    int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, g.ext[0] - 1);
    int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ext[1] - 1);
    double tx = fx - ix, ty = fy - iy;
    int cc[4] = {g.node_at(ix, iy), g.node_at(ix + 1, iy), g.node_at(ix, iy + 1),
                 g.node_at(ix + 1, iy + 1)};
    double ww[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    double den = 0.0;
    int m = 0;
    for (int k = 0; k < 4; ++k)
        if (cc[k] >= 0) den += ww[k];
    if (den < 1e-13) return 0;
    for (int k = 0; k < 4; ++k) {
        if (cc[k] < 0 || ww[k] == 0.0) continue;
        cols[m] = cc[k];
        wts[m] = ww[k] / den;
        ++m;
    }
    return m;
}

void polar_row(const Grid& grid, const Domain& dom, double s, double density, std::size_t self,
               const PolarParams& pp, std::vector<double>& row) {
    double h = grid.h;
    double m2 = (1.0 - s) * density;
    double rn = pp.cnear * h;
    const Pt x = grid.nodes[self];

    // near zone: angular average of the second difference is pi r^2 Lap(u)
    {
        double wn = m2 * kPi * std::pow(rn, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) / (h * h);
        auto [i0, j0] = grid.ij[self];
        row[self] += 4.0 * wn;
        for (auto [di, dj] : {std::array<int, 2>{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
            int c = grid.node_at(i0 + di, j0 + dj);
            if (c >= 0) row[static_cast<std::size_t>(c)] -= wn;
        }
    }

    double wang = 2.0 * kPi / pp.nang;
    int cols[4];
    double wts[4];
    int K = pp.ladder;
    std::vector<double> radii(K + 1), sample_w(K + 1);
    for (int q = 0; q < pp.nang; ++q) {
        double th = kPi * (q + 0.5) / pp.nang;
        Pt dir = pt(std::cos(th), std::sin(th));
        for (int sgn : {+1, -1}) {
            // exit radius along sgn*dir (convex domains: single chord)
            auto chords = dom.ray_chords(x, scale(static_cast<double>(sgn), dir));
            double rex = 0.0;
            for (const auto& ch : chords)
                if (ch.first < 1e-12 && ch.second > rex) rex = ch.second;
            if (rex <= rn * (1.0 + 1e-9)) continue;
            // geometric ladder rn -> rex, exact exit knot
            double ratio = std::pow(rex / rn, 1.0 / K);
            for (int k = 0; k <= K; ++k) radii[k] = rn * std::pow(ratio, k);
            radii[K] = rex;
            std::fill(sample_w.begin(), sample_w.end(), 0.0);
            for (int k = 0; k < K; ++k) {
                double wp, wq;
                linear_kernel_weights(radii[k], radii[k + 1], s, wp, wq);
                sample_w[k] += wp;
                sample_w[k + 1] += wq;
            }
            for (int k = 0; k <= K; ++k) {
                double r = radii[k] * (1.0 - 1e-12);
                Pt y = axpy(static_cast<double>(sgn) * r, dir, x);
                int m = interp_cols(grid, y, cols, wts);
                double w = -m2 * wang * sample_w[k];
                for (int t = 0; t < m; ++t) row[static_cast<std::size_t>(cols[t])] += w * wts[t];
            }
        }
        // -2 u_i over (rn, inf) for this angle
        row[self] += -m2 * wang * (-2.0) * kmom0_tail(rn, s);
    }
}

// ---- right-hand side --------------------------------------------------------

struct MeasureSplit {
    std::vector<std::pair<Pt, double>> atoms;  // includes d=1 uniform as atoms
    double density = 0.0;
};

MeasureSplit split_measure(const SpectralMeasure& mu) {
    MeasureSplit ms;
    ms.atoms = mu.atoms;
    if (mu.dim == 1 && mu.uniform_density > 0.0) {
        ms.atoms.emplace_back(pt(1.0), mu.uniform_density);
        ms.atoms.emplace_back(pt(-1.0), mu.uniform_density);
    } else {
        ms.density = mu.uniform_density;
    }
    return ms;
}

// g-against-kernel integral along the complement of the domain on the line
// through x in direction dir (full line, r over the reals).
double exterior_line_integral(const Domain& dom, const ScalarField& g, const Pt& x,
                              const Pt& dir, double s, bool subtract, double gz,
                              const GaussRule& gr) {
    double Rg;
    if (g.support_radius >= 0.0) {
        Rg = g.support_radius + norm(x) + 1e-9;
    } else if (g.far_bound) {
        Rg = std::max(8.0, dom.diameter() * 2.0);
        while (g.far_bound(Rg) * kmom0_tail(Rg, s) > 1e-13 && Rg < 1e6) Rg *= 2.0;
    } else {
        throw TailUnknown("exterior datum: no support radius and no far-field model");
    }
    double acc = 0.0;
    // exact constant part: gz times the complement kernel mass of the line
    if (subtract && gz != 0.0) {
        for (int sgn : {+1, -1}) {
            Pt d2 = scale(static_cast<double>(sgn), dir);
            auto chords = dom.ray_chords(x, d2);
            double exit = 0.0;
            for (const auto& ch : chords)
                if (ch.first < 1e-12) exit = std::max(exit, ch.second);
            if (exit <= 0.0) {
                // x effectively on the complement side of this ray: whole ray
                exit = 1e-14;
            }
            double mass = kmom0_tail(exit, s);
            for (const auto& ch : chords)
                if (ch.first > 1e-12) mass -= kmom0(ch.first, ch.second, s);
            acc += gz * mass;
        }
    }
    // residual (g - gz) over complement chords within (-Rg, Rg)
    auto comp = dom.complement_chords(x, dir, -Rg, Rg);
    auto f = [&](double r) { return g(axpy(r, dir, x)) - (subtract ? gz : 0.0); };
    for (const auto& [a, b] : comp) {
        if (b <= 1e-12 && a >= -1e-12) continue;
        double lo = a, hi = b;
        if (lo < 0.0 && hi > 0.0) continue;  // cannot happen for interior x
        acc += [&] {
            // graded toward both ends (g may be singular at the boundary)
            double sum = 0.0;
            double half = 0.5 * (hi - lo);
            double w = half;
            for (int k = 0; k < 36; ++k) {
                for (auto [p, q] : {std::pair<double, double>{lo + 0.5 * w, lo + w},
                                    {hi - w, hi - 0.5 * w}}) {
                    double mid = 0.5 * (p + q), hf = 0.5 * (q - p);
                    for (std::size_t i = 0; i < gr.x.size(); ++i) {
                        double r = mid + hf * gr.x[i];
                        sum += hf * gr.w[i] * f(r) * std::pow(std::abs(r), -1.0 - 2.0 * s);
                    }
                }
                w *= 0.5;
            }
            return sum;
        }();
    }
    // analytic far part beyond Rg: g ~ far_value there (or zero if compact)
    double fv = (g.support_radius >= 0.0) ? 0.0 : g.far_value;
    double base = fv - (subtract ? gz : 0.0);
    if (base != 0.0) acc += base * 2.0 * kmom0_tail(Rg, s);
    return acc;
}

double rhs_entry(const DirichletProblem& p, std::size_t i, const GaussRule& gr,
                 const QuadratureSpec& lift_q) {
    const Grid& grid = p.grid;
    const Pt x = grid.nodes[i];
    double fx = p.f(x);
    if (p.lifting) return fx - apply_As(p.spec, *p.lifting, x, lift_q).value;

    double s = p.spec.s;
    MeasureSplit ms = split_measure(p.spec.measure);
    bool subtract = (p.g.regularity != Regularity::C0);
    double gz = 0.0;
    if (subtract) {
        auto dr = p.dom.dist_to_boundary(x);
        Pt out = dr.z;
        if (dr.d > 0.0) out = axpy(1e-9 / dr.d, sub(dr.z, x), dr.z);
        gz = p.g(out);
        if (!std::isfinite(gz)) {
            subtract = false;
            gz = 0.0;
        }
    }
    double acc = 0.0;
    for (const auto& [dir, w] : ms.atoms)
        acc += w * exterior_line_integral(p.dom, p.g, x, dir, s, subtract, gz, gr);
    if (ms.density > 0.0) {
        int nang = 64;
        double wang = kPi / nang;  // [0, pi) with the full-line integral per angle
        double asum = 0.0;
        for (int q = 0; q < nang; ++q) {
            double th = kPi * (q + 0.5) / nang;
            asum += exterior_line_integral(p.dom, p.g, x, pt(std::cos(th), std::sin(th)), s,
                                           subtract, gz, gr);
        }
        acc += ms.density * 2.0 * wang * asum;  // the sphere integral covers each line twice
    }
    return fx + (1.0 - s) * acc;
}

}  // namespace

double exterior_kernel_mass(const DirichletProblem& p, std::size_t i) {
    // complement kernel mass of node i under the scheme's angular rule
    double s = p.spec.s;
    const Pt x = p.grid.nodes[i];
    MeasureSplit ms = split_measure(p.spec.measure);
    auto line_mass = [&](const Pt& dir) {
        double m = 0.0;
        for (int sgn : {+1, -1}) {
            Pt d2 = scale(static_cast<double>(sgn), dir);
            auto chords = p.dom.ray_chords(x, d2);
            double exit = 0.0;
            for (const auto& ch : chords)
                if (ch.first < 1e-12) exit = std::max(exit, ch.second);
            double mass = kmom0_tail(std::max(exit, 1e-14), s);
            for (const auto& ch : chords)
                if (ch.first > 1e-12) mass -= kmom0(ch.first, ch.second, s);
            m += mass;
        }
        return m;
    };
    double acc = 0.0;
    for (const auto& [dir, w] : ms.atoms) acc += w * line_mass(dir);
    if (ms.density > 0.0) {
        int nang = 64;
        double asum = 0.0;
        for (int q = 0; q < nang; ++q) {
            double th = kPi * (q + 0.5) / nang;
            asum += line_mass(pt(std::cos(th), std::sin(th)));
        }
        acc += ms.density * kPi / nang * asum;
    }
    return (1.0 - s) * acc;
}

DenseSystem assemble(const DirichletProblem& p, int threads) {
    p.spec.validate();
    ellipticity_constant(p.spec.measure, p.spec.s);  // throws DegenerateMeasure
    const Grid& grid = p.grid;
    std::size_t n = grid.size();

    // coarseness guard: h^{2-2s} |f|_inf against the configured bound
    {
        double fmax = 0.0;
        for (std::size_t i = 0; i < n; i += std::max<std::size_t>(1, n / 64))
            fmax = std::max(fmax, std::abs(p.f(grid.nodes[i])));
        if (std::pow(grid.h, 2.0 - 2.0 * p.spec.s) * fmax > p.coarse_bound)
            throw GridTooCoarse("assemble: h^(2-2s) |f| exceeds the configured bound");
    }

    MeasureSplit ms = split_measure(p.spec.measure);
    if (grid.dom.dim() == 2 && !ms.atoms.empty()) {
        for (const auto& [dir, w] : ms.atoms) {
            bool axis = (std::abs(std::abs(dir[0]) - 1.0) < 1e-12 && std::abs(dir[1]) < 1e-12) ||
                        (std::abs(std::abs(dir[1]) - 1.0) < 1e-12 && std::abs(dir[0]) < 1e-12);
            if (!axis)
                throw std::invalid_argument(
                    "assemble: 2d atomic measures must be axis-aligned (use the uniform "
                    "density for rotation-invariant kernels)");
        }
    }
    if (grid.dom.dim() == 2 && ms.density > 0.0 && grid.dom.kind() == Domain::Kind::LShape)
        throw std::invalid_argument("assemble: uniform-density rows need a convex domain");

    DenseSystem sys;
    sys.n = static_cast<int>(n);
    sys.a.assign(n * n, 0.0);
    sys.rhs.assign(n, 0.0);

    // axis weights: atoms at +-e1 / +-e2 act on the same lattice line
    double wx = 0.0, wy = 0.0;
    for (const auto& [dir, w] : ms.atoms) {
        if (std::abs(dir[0]) > 0.5)
            wx += w;
        else
            wy += w;
    }

    QuadratureSpec lift_q;  // defaults for the lifting right-hand side
    const GaussRule& gr = gauss_rule(8);
    PolarParams pp;

    parallel_for(n, threads, [&](std::size_t i) {
        std::vector<double> row(n, 0.0);
        if (grid.dom.dim() == 1) {
            line_row(grid, p.dom, p.spec.s, (1.0 - p.spec.s) * (wx + wy), i, 1, 0, row);
        } else {
            if (wx > 0.0) line_row(grid, p.dom, p.spec.s, (1.0 - p.spec.s) * wx, i, 1, 0, row);
            if (wy > 0.0) line_row(grid, p.dom, p.spec.s, (1.0 - p.spec.s) * wy, i, 0, 1, row);
            if (ms.density > 0.0) polar_row(grid, p.dom, p.spec.s, ms.density, i, pp, row);
        }
        for (std::size_t j = 0; j < n; ++j) sys.a[i + j * n] = row[j];
        sys.rhs[i] = rhs_entry(p, i, gr, lift_q);
    });
    return sys;
}

namespace {

DiscreteSolution solve_system(const DirichletProblem& p, DenseSystem sys, int threads) {
    blas_single_thread();
    (void)threads;
    int n = sys.n, info = 0;
    std::vector<double> lu = sys.a;  // keep the matrix for the residual
    std::vector<int> ipiv(n);
    dgetrf_(&n, &n, lu.data(), &n, ipiv.data(), &info);
    if (info != 0) throw SingularSystem("dgetrf failed: info=" + std::to_string(info));
    std::vector<double> u = sys.rhs;
    int one = 1;
    dgetrs_("N", &n, &one, lu.data(), &n, ipiv.data(), u.data(), &n, &info);
    if (info != 0) throw SingularSystem("dgetrs failed");

    auto residual_vec = [&](const std::vector<double>& uu) {
        std::vector<double> r = sys.rhs;
        // r = b - A u  (column-major accumulate)
        for (int j = 0; j < n; ++j) {
            double uj = uu[j];
            if (uj == 0.0) continue;
            const double* colv = sys.a.data() + static_cast<std::size_t>(j) * n;
            for (int i = 0; i < n; ++i) r[i] -= colv[i] * uj;
        }
        return r;
    };
    auto inf_norm = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (double t : v) m = std::max(m, std::abs(t));
        return m;
    };
    double bnorm = std::max(inf_norm(sys.rhs), 1e-300);
    std::vector<double> r = residual_vec(u);
    if (inf_norm(r) / bnorm > 1e-12) {
        // one step of iterative refinement
        dgetrs_("N", &n, &one, lu.data(), &n, ipiv.data(), r.data(), &n, &info);
        for (int i = 0; i < n; ++i) u[i] += r[i];
        r = residual_vec(u);
    }
    double rel = inf_norm(r) / bnorm;
    if (rel > 1e-10) throw SingularSystem("linear-system residual above 1e-10");

    DiscreteSolution out;
    if (p.lifting) {
        for (int i = 0; i < n; ++i) u[i] += (*p.lifting)(p.grid.nodes[i]);
    }
    out.grid = std::make_shared<Grid>(p.grid);
    out.values = std::make_shared<std::vector<double>>(std::move(u));
    out.g = p.g;
    out.residual = rel;
    return out;
}

}  // namespace

DiscreteSolution solve(const DirichletProblem& p, int threads) {
    return solve_system(p, assemble(p, threads), threads);
}

DiscreteSolution solve_with_estimate(const DirichletProblem& p, int threads) {
    DiscreteSolution fine = solve(p, threads);
    DirichletProblem pc = p;
    pc.grid = make_grid(p.dom, 2.0 * p.grid.h);
    DiscreteSolution coarse = solve(pc, threads);
    ScalarField cf = coarse.as_field();
    double l2 = 0.0, mx = 0.0, vol = 0.0;
    for (std::size_t i = 0; i < fine.grid->size(); ++i) {
        if (fine.grid->dist[i] < 4.0 * pc.grid.h) continue;
        double d = fine.value(i) - cf(fine.grid->nodes[i]);
        double w = std::pow(fine.grid->h, fine.grid->dom.dim());
        l2 += w * d * d;
        vol += w;
        mx = std::max(mx, std::abs(d));
    }
    fine.error_estimate = {std::sqrt(l2), mx};
    return fine;
}

ScalarField DiscreteSolution::as_field() const {
    ScalarField f;
    auto grid_p = grid;
    auto vals = values;
    ScalarField gx = g;
    f.eval = [grid_p, vals, gx](const Pt& y) -> double {
        const Grid& gr = *grid_p;
        if (!gr.dom.contains(y)) return gx(y);
        if (gr.dom.dim() == 1) {
            double fx = (y[0] - gr.origin[0]) / gr.h;
            int i = std::clamp(static_cast<int>(std::floor(fx)), 0, gr.ext[0] - 1);
            double t = fx - i;
            int cl = gr.node_at(i, 0), cr = gr.node_at(i + 1, 0);
            if (cl >= 0 && cr >= 0) return (1 - t) * (*vals)[cl] + t * (*vals)[cr];
            if (cl >= 0) return (*vals)[cl];
            if (cr >= 0) return (*vals)[cr];
            for (int off = 2; off < 5; ++off) {
                if (int c = gr.node_at(i - off + 1, 0); c >= 0) return (*vals)[c];
                if (int c = gr.node_at(i + off, 0); c >= 0) return (*vals)[c];
            }
            return 0.0;
        }
        int cols[4];
        double wts[4];
        int m = interp_cols(gr, y, cols, wts);
        if (m > 0) {
            double v = 0.0;
            for (int k = 0; k < m; ++k) v += wts[k] * (*vals)[cols[k]];
            return v;
        }
        // sliver cell: nearest interior node in a small ring
        double fx = (y[0] - gr.origin[0]) / gr.h;
        double fy = (y[1] - gr.origin[1]) / gr.h;
        int ix = static_cast<int>(std::floor(fx)), iy = static_cast<int>(std::floor(fy));
        double best = 1e300;
        int bc = -1;
        for (int a = -2; a <= 3; ++a) {
            for (int b = -2; b <= 3; ++b) {
                int c = gr.node_at(ix + a, iy + b);
                if (c < 0) continue;
                double d = norm(sub(gr.nodes[c], y));
                if (d < best) {
                    best = d;
                    bc = c;
                }
            }
        }
        return bc >= 0 ? (*vals)[bc] : 0.0;
    };
    f.regularity = Regularity::C2NearX;
    if (gx.support_radius >= 0.0) {
        f.decay = Decay::Compact;
        double far = 0.0;
        for (int k = 0; k < grid_p->dom.dim(); ++k)
            far = std::max({far, std::abs(grid_p->dom.bbox_lo()[k]),
                            std::abs(grid_p->dom.bbox_hi()[k])});
        f.support_radius = std::max(gx.support_radius, far);
    } else {
        f.decay = gx.decay;
        f.far_value = gx.far_value;
        f.far_bound = gx.far_bound;
    }
    return f;
}

void DiscreteSolution::to_csv(std::ostream& os) const {
    int d = grid->dom.dim();
    os << (d == 1 ? "x1" : "x1,x2") << ",value,d_x\n";
    for (std::size_t i = 0; i < grid->size(); ++i) {
        os << fmt(grid->nodes[i][0]);
        if (d == 2) os << "," << fmt(grid->nodes[i][1]);
        os << "," << fmt((*values)[i]) << "," << fmt(grid->dist[i]) << "\n";
    }
}

DiscreteSolution torsion_function(const StableOperatorSpec& spec, const Domain& dom,
                                  const Grid& grid, int threads) {
    DirichletProblem p;
    p.spec = spec;
    p.dom = dom;
    p.f = constant_field(1.0);
    ScalarField zero = constant_field(0.0);
    zero.decay = Decay::Compact;
    zero.support_radius = 0.0;
    p.g = zero;
    p.grid = grid;
    return solve(p, threads);
}

namespace {

double poisson_constant(int d, double s) {
    return std::tgamma(0.5 * d) * std::pow(kPi, -0.5 * d - 1.0) * std::sin(kPi * s);
}

// returns {value with g, kernel mass} for the unit ball at x
std::pair<double, double> poisson_once(double s, int d, const ScalarField& g, const Pt& x,
                                       int nang, int nrad) {
    double c = poisson_constant(d, s);
    double r2 = dot(x, x);
    if (r2 >= 1.0) throw std::invalid_argument("poisson_ball_solve: |x| < 1 required");
    double Rg = g.support_radius >= 0.0 ? std::max(2.0, g.support_radius + 0.1) : 16.0;
    const GaussRule& gr = gauss_rule(10);

    std::vector<Pt> dirs;
    std::vector<double> dw;
    if (d == 1) {
        dirs = {pt(1.0), pt(-1.0)};
        dw = {1.0, 1.0};
    } else {
        for (int q = 0; q < nang; ++q) {
            double th = 2.0 * kPi * (q + 0.5) / nang;
            dirs.push_back(pt(std::cos(th), std::sin(th)));
            dw.push_back(2.0 * kPi / nang);
        }
    }
    double val = 0.0, mass = 0.0;
    // edge zone rho in (1, 2]: substitution rho = 1 + t^{1/(1-s)} removes the
    // (rho^2-1)^{-s} singularity exactly
    double e = 1.0 / (1.0 - s);
    double Tt = 1.0;  // t in (0, 1] covers rho in (1, 2]
    for (int pnl = 0; pnl < nrad; ++pnl) {
        double hi = Tt * std::pow(0.5, pnl);
        double lo = 0.5 * hi;
        if (hi < 1e-14) break;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < gr.x.size(); ++i) {
            double t = mid + half * gr.x[i];
            double rho = 1.0 + std::pow(t, e);
            double jac = half * gr.w[i] * e * std::pow(t, e - 1.0) * std::pow(rho + 1.0, -s) *
                         std::pow(rho, d - 1.0);
            for (std::size_t q = 0; q < dirs.size(); ++q) {
                Pt y = scale(rho, dirs[q]);
                double dd = std::pow(norm(sub(y, x)), -static_cast<double>(d));
                double ker = c * std::pow(1.0 - r2, s) * dd * jac * dw[q];
                mass += ker;
                val += ker * g(y);
            }
        }
    }
    // rho in (2, Rg]: smooth geometric panels
    auto smooth_part = [&](double a, double b, bool with_g) {
        double acc = 0.0;
        double p = a;
        while (p < b * (1 - 1e-15)) {
            double q2 = std::min(b, 1.5 * p);
            double mid = 0.5 * (p + q2), half = 0.5 * (q2 - p);
            for (std::size_t i = 0; i < gr.x.size(); ++i) {
                double rho = mid + half * gr.x[i];
                double jac = half * gr.w[i] * std::pow(rho * rho - 1.0, -s) *
                             std::pow(rho, d - 1.0);
                for (std::size_t q = 0; q < dirs.size(); ++q) {
                    Pt y = scale(rho, dirs[q]);
                    double dd = std::pow(norm(sub(y, x)), -static_cast<double>(d));
                    double ker = c * std::pow(1.0 - r2, s) * dd * jac * dw[q];
                    if (with_g)
                        acc += ker * g(y);
                    else
                        acc += ker;
                }
            }
            p = q2;
        }
        return acc;
    };
    val += smooth_part(2.0, Rg, true);
    mass += smooth_part(2.0, Rg, false);
    mass += smooth_part(Rg, 1e5, false);  // normalization tail
    if (g.support_radius < 0.0 && std::abs(g.far_value) > 0.0)
        val += g.far_value * smooth_part(Rg, 1e5, false);
    return {val, mass};
}

}  // namespace

Estimate poisson_ball_solve(double s, int d, const ScalarField& g, const Pt& x, int nang,
                            int nrad) {
    if (d != 1 && d != 2) throw std::invalid_argument("poisson_ball_solve: d must be 1 or 2");
    auto [v1, m1] = poisson_once(s, d, g, x, nang, nrad);
    auto [v2, m2] = poisson_once(s, d, g, x, 2 * nang, nrad + 6);
    if (std::abs(m2 - 1.0) > 1e-3)
        throw KernelNotNormalized("poisson kernel mass deviates from 1 by " +
                                  std::to_string(std::abs(m2 - 1.0)));
    return {v2, std::abs(v2 - v1)};
}

double classical_harmonic_solve(const Domain& ball, const std::function<double(const Pt&)>& gb,
                                const Pt& x, int n) {
    if (ball.dim() == 1) {
        double a = ball.lo()[0], b = ball.hi()[0];
        double t = (x[0] - a) / (b - a);
        return (1.0 - t) * gb(pt(a)) + t * gb(pt(b));
    }
    if (ball.kind() != Domain::Kind::Ball)
        throw std::invalid_argument("classical_harmonic_solve: ball domains only");
    double R = ball.radius();
    Pt c = ball.center();
    Pt w = sub(x, c);
    double acc = 0.0;
    for (const auto& [z, wt] : ball.boundary_nodes(n)) {
        double d2 = dot(sub(x, z), sub(x, z));
        acc += wt * (R * R - dot(w, w)) / (2.0 * kPi * R * d2) * gb(z);
    }
    return acc;
}

double very_weak_residual(const Domain& dom, const ScalarField& u, const ScalarField& f,
                          const std::function<double(const Pt&)>& g_boundary,
                          const TestFunctionC2& phi, int n) {
    double lhs = 0.0, rhs_f = 0.0;
    const GaussRule& gr = gauss_rule(8);
    if (dom.dim() == 1) {
        double a = dom.lo()[0], b = dom.hi()[0];
        double mid = 0.5 * (a + b);
        // graded panels toward both endpoints
        for (auto [from, to, sgn] : {std::tuple<double, double, int>{a, mid, +1}, {b, mid, -1}}) {
            double w = std::abs(to - from);
            for (int k = 0; k < 40; ++k) {
                double p = from + sgn * 0.5 * w, q = from + sgn * w;
                if (sgn < 0) std::swap(p, q);
                double m = 0.5 * (p + q), hf = 0.5 * (q - p);
                for (std::size_t i = 0; i < gr.x.size(); ++i) {
                    Pt y = pt(m + hf * gr.x[i]);
                    lhs += hf * gr.w[i] * u(y) * (-phi.laplacian(y));
                    rhs_f += hf * gr.w[i] * f(y) * phi.value(y);
                }
                w *= 0.5;
            }
        }
        double rhs_b = 0.0;
        rhs_b += g_boundary(dom.lo()) * (-phi.gradient(dom.lo())[0]);
        rhs_b += g_boundary(dom.hi()) * (+phi.gradient(dom.hi())[0]);
        return std::abs(lhs - rhs_f + rhs_b);
    }
    if (dom.kind() != Domain::Kind::Ball)
        throw std::invalid_argument("very_weak_residual: Interval and Ball only");
    double R = dom.radius();
    Pt c = dom.center();
    int nang = n;
    // radial panels graded toward the boundary
    for (int q = 0; q < nang; ++q) {
        double th = 2.0 * kPi * (q + 0.5) / nang;
        Pt dir = pt(std::cos(th), std::sin(th));
        double w = 0.5 * R;
        // inner half plain, outer half graded
        for (auto [p0, q0] : {std::pair<double, double>{0.0, 0.5 * R}}) {
            int nsub = 8;
            for (int j = 0; j < nsub; ++j) {
                double p = p0 + (q0 - p0) * j / nsub, qq = p0 + (q0 - p0) * (j + 1) / nsub;
                double m = 0.5 * (p + qq), hf = 0.5 * (qq - p);
                for (std::size_t i = 0; i < gr.x.size(); ++i) {
                    double rho = m + hf * gr.x[i];
                    Pt y = axpy(rho, dir, c);
                    double jac = hf * gr.w[i] * rho * 2.0 * kPi / nang;
                    lhs += jac * u(y) * (-phi.laplacian(y));
                    rhs_f += jac * f(y) * phi.value(y);
                }
            }
        }
        for (int k = 0; k < 40; ++k) {
            double p = R - w, qq = R - 0.5 * w;
            double m = 0.5 * (p + qq), hf = 0.5 * (qq - p);
            for (std::size_t i = 0; i < gr.x.size(); ++i) {
                double rho = m + hf * gr.x[i];
                Pt y = axpy(rho, dir, c);
                double jac = hf * gr.w[i] * rho * 2.0 * kPi / nang;
                lhs += jac * u(y) * (-phi.laplacian(y));
                rhs_f += jac * f(y) * phi.value(y);
            }
            w *= 0.5;
        }
    }
    double rhs_b = 0.0;
    for (const auto& [z, wt] : dom.boundary_nodes(4 * nang)) {
        Pt nrm = scale(1.0 / norm(sub(z, c)), sub(z, c));
        rhs_b += wt * g_boundary(z) * dot(phi.gradient(z), nrm);
    }
    return std::abs(lhs - rhs_f + rhs_b);
}

nlohmann::json to_json(const DirichletProblem& p) {
    nlohmann::json j;
    j["spec"] = to_json(p.spec);
    j["domain"] = to_json(p.dom);
    j["grid"] = {{"h", p.grid.h}, {"nodes", p.grid.size()}};
    j["lifted"] = p.lifting.has_value();
    return j;
}

}  // namespace stablepde
