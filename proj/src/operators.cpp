#include "stablepde/operators.hpp"

#include <algorithm>

namespace stablepde {

namespace {

constexpr double kPi = 3.141592653589793238463;

// Atoms of the measure plus the d=1 reading of a uniform density (two atoms).
std::vector<std::pair<Pt, double>> effective_atoms(const SpectralMeasure& mu) {
    auto atoms = mu.atoms;
    if (mu.dim == 1 && mu.uniform_density > 0.0) {
        atoms.emplace_back(pt(1.0), mu.uniform_density);
        atoms.emplace_back(pt(-1.0), mu.uniform_density);
    }
    return atoms;
}

// Quadrature rule for the uniform component over the whole sphere.
struct AngularRule {
    std::vector<Pt> dirs;
    std::vector<double> wts;
};

AngularRule sphere_rule(int d, int n) {
    AngularRule r;
    if (d == 2) {
        for (int i = 0; i < n; ++i) {
            double phi = 2.0 * kPi * (i + 0.5) / n;
            r.dirs.push_back(pt(std::cos(phi), std::sin(phi)));
            r.wts.push_back(2.0 * kPi / n);
        }
    } else if (d == 3) {
        int npol = std::max(4, n / 4);
        const GaussRule& g = gauss_rule(npol);
        for (int i = 0; i < npol; ++i) {
            double ct = g.x[i];
            double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            for (int j = 0; j < n; ++j) {
                double az = 2.0 * kPi * (j + 0.5) / n;
                r.dirs.push_back(pt(st * std::cos(az), st * std::sin(az), ct));
                r.wts.push_back(g.w[i] * 2.0 * kPi / n);
            }
        }
    } else {
        throw std::invalid_argument("sphere_rule: d must be 2 or 3");
    }
    return r;
}

// Gauss panel of f(r) * r^{-1-2s} over [p,q].
double panel_integral(const std::function<double(double)>& f, double p, double q, double s,
                      const GaussRule& g) {
    double mid = 0.5 * (p + q), half = 0.5 * (q - p);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        double r = mid + half * g.x[i];
        acc += half * g.w[i] * f(r) * std::pow(r, -1.0 - 2.0 * s);
    }
    return acc;
}

// int_0^delta F(r) r^{-1-2s} dr for F ~ c r^2 near 0: quadratic model through
// F(delta) plus dyadic correction panels of the remainder. The descent stops
// before the second difference drowns in floating-point cancellation (the
// kernel would amplify that noise); the cut remainder is continued
// geometrically and reported.
double inner_zone(const std::function<double(double)>& F, double delta, double s,
                  const GaussRule& g, int dyads, double* rem_err = nullptr) {
    double Fd = F(delta);
    double acc = Fd * std::pow(delta, -2.0 * s) / (2.0 - 2.0 * s);
    auto corr = [&](double r) { return F(r) - (r / delta) * (r / delta) * Fd; };
    double q = delta;
    double floor_r = std::max(1e-7, delta * std::pow(0.5, dyads));
    double last = 0.0;
    for (int k = 0; k < dyads && q > floor_r * (1.0 + 1e-12); ++k) {
        double p = std::max(0.5 * q, floor_r);
        last = panel_integral(corr, p, q, s, g);
        acc += last;
        q = p;
    }
    if (rem_err) *rem_err += 2.0 * std::abs(last);
    return acc;
}

// Dyadic panels of f * kernel over [a,b]; a width cap keeps panels short for
// oscillatory bounded fields.
double mid_zone(const std::function<double(double)>& f, double a, double b, double s,
                const GaussRule& g, int per_dyad, double width_cap) {
    double acc = 0.0;
    double p = a;
    while (p < b * (1.0 - 1e-15)) {
        double q = std::min(b, 2.0 * p);
        int nsub = per_dyad;
        if (width_cap > 0.0)
            nsub *= std::max(1, static_cast<int>(std::ceil((q - p) / width_cap)));
        nsub = std::min(nsub, 16384);
        for (int j = 0; j < nsub; ++j) {
            double pj = p + (q - p) * j / nsub;
            double qj = p + (q - p) * (j + 1) / nsub;
            acc += panel_integral(f, pj, qj, s, g);
        }
        p = q;
    }
    return acc;
}

struct TailModel {
    double R;           // tail start
    double limit;       // limit of the radial profile at infinity
    double err;         // bound on the neglected deviation from the limit
    double exact() const { return limit; }
};

// Tail radius and rigorous deviation bound from the decay metadata.
// flimit: limit of the radial profile, fb_scale: |profile - flimit| <= fb_scale * far_bound(R).
TailModel make_tail(const ScalarField& u, const Pt& x, double base_R, double s, double flimit,
                    double fb_scale) {
    TailModel t;
    t.limit = flimit;
    if (u.support_radius >= 0.0) {
        t.R = std::max(base_R, u.support_radius + norm(x) + 1.0);
        t.err = 0.0;
        return t;
    }
    if (u.far_bound) {
        double R = base_R;
        if (u.decay == Decay::VanishingAtInfty) {
            while (fb_scale * u.far_bound(R) * kmom0_tail(R, s) >
                       1e-12 * (1.0 + std::abs(flimit)) &&
                   R < 1e7)
                R *= 2.0;
        }
        t.R = R;
        t.err = fb_scale * u.far_bound(R) * kmom0_tail(R, s);
        return t;
    }
    throw TailUnknown("field tail: no support radius and no far-field model");
}

// single-resolution A_s evaluation; terr accumulates rigorous tail bounds
double apply_As_once(const StableOperatorSpec& spec, const ScalarField& u, const Pt& x,
                     const QuadratureSpec& q, double* tail_err) {
    double s = spec.s;
    const GaussRule& g = gauss_rule(q.gauss_order);
    double ux = u(x);
    const int inner_dyads = 26;
    bool bounded_tail = (u.support_radius < 0.0 && u.decay == Decay::Bounded);
    double width_cap = bounded_tail ? q.osc_panel_width : q.panel_width;
    double base_R = bounded_tail ? 16.0 * q.outer_cut : q.outer_cut;
    TailModel tail = make_tail(u, x, base_R, s, 2.0 * u.far_value - 2.0 * ux, 2.0);
    double terr = 0.0;

    auto ray_integral = [&](const Pt& th) {
        auto F = [&](double r) { return u(axpy(r, th, x)) + u(axpy(-r, th, x)) - 2.0 * ux; };
        double acc = inner_zone(F, q.inner_cut, s, g, inner_dyads, &terr);
        acc += mid_zone(F, q.inner_cut, tail.R, s, g, q.panels_per_dyad, width_cap);
        acc += tail.exact() * kmom0_tail(tail.R, s);
        terr += tail.err;
        return acc;
    };

    double total = 0.0;
    for (const auto& [dir, w] : effective_atoms(symmetrize(spec.measure)))
        total += w * ray_integral(dir);
    if (spec.measure.dim >= 2 && spec.measure.uniform_density > 0.0) {
        AngularRule rule = sphere_rule(spec.measure.dim, q.angular_nodes);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i)
            acc += rule.wts[i] * ray_integral(rule.dirs[i]);
        total += spec.measure.uniform_density * acc;
    }
    if (tail_err) *tail_err = terr;
    return -(1.0 - s) * total;
}

}  // namespace

Estimate apply_As(const StableOperatorSpec& spec, const ScalarField& u, const Pt& x,
                  const QuadratureSpec& q) {
    spec.validate();
    q.validate();
    if (u.regularity == Regularity::C0)
        throw InsufficientRegularity("apply_As needs a field that is C^2 near x");
    double te1 = 0.0, te2 = 0.0;
    double coarse = apply_As_once(spec, u, x, q, &te1);
    double fine = apply_As_once(spec, u, x, q.refined(), &te2);
    return {fine, std::abs(fine - coarse) + te2};
}

std::vector<Estimate> apply_As_batch(const StableOperatorSpec& spec, const ScalarField& u,
                                     const std::vector<Pt>& xs, const QuadratureSpec& q,
                                     int threads) {
    std::vector<Estimate> out(xs.size());
    parallel_for(xs.size(), threads, [&](std::size_t i) { out[i] = apply_As(spec, u, xs[i], q); });
    return out;
}

std::pair<Estimate, Estimate> scaling_check(const StableOperatorSpec& spec, const ScalarField& u,
                                            const Pt& x, double lambda, const QuadratureSpec& q) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scaling_check: lambda > 0");
    Estimate lhs = apply_As(spec, scaled_argument(u, lambda), x, q);
    Estimate rhs = apply_As(spec, u, scale(lambda, x), q);
    double f = std::pow(lambda, 2.0 * spec.s);
    return {lhs, {f * rhs.value, f * rhs.error}};
}

namespace {

double carre_once(const StableOperatorSpec& spec, const ScalarField& u, const Pt& x,
                  const QuadratureSpec& q, double* rig_err) {
    double s = spec.s;
    const GaussRule& g = gauss_rule(q.gauss_order);
    double ux = u(x);
    bool bounded_tail = (u.support_radius < 0.0 && u.decay == Decay::Bounded);
    double width_cap = bounded_tail ? q.osc_panel_width : q.panel_width;
    bool rough = (u.regularity == Regularity::C0);
    double dev = std::abs(ux - u.far_value);
    TailModel tail = make_tail(u, x, bounded_tail ? 16.0 * q.outer_cut : q.outer_cut, s,
                               2.0 * dev * dev, 4.0 * dev + 2.0);
    double terr = 0.0;

    auto ray_integral = [&](const Pt& th) {
        auto G = [&](double r) {
            double a = ux - u(axpy(r, th, x));
            double b = ux - u(axpy(-r, th, x));
            return a * a + b * b;
        };
        double acc;
        if (!rough) {
            acc = inner_zone(G, q.inner_cut, s, g, 26, &terr);
        } else {
            double rmin = 1e-9;
            acc = mid_zone(G, rmin, q.inner_cut, s, g, q.panels_per_dyad, -1.0);
            // remainder from the measured local quotient (Lipschitz model)
            double qh = std::sqrt(std::max(G(rmin), 0.0)) / rmin;
            terr += qh * qh * std::pow(rmin, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
        }
        acc += mid_zone(G, q.inner_cut, tail.R, s, g, q.panels_per_dyad, width_cap);
        acc += tail.exact() * kmom0_tail(tail.R, s);
        terr += tail.err;
        return acc;
    };

    double total = 0.0;
    for (const auto& [dir, w] : effective_atoms(symmetrize(spec.measure)))
        total += w * ray_integral(dir);
    if (spec.measure.dim >= 2 && spec.measure.uniform_density > 0.0) {
        AngularRule rule = sphere_rule(spec.measure.dim, q.angular_nodes);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i)
            acc += rule.wts[i] * ray_integral(rule.dirs[i]);
        total += spec.measure.uniform_density * acc;
    }
    if (rig_err) *rig_err = terr;
    return (1.0 - s) * total;
}

}  // namespace

Estimate carre_du_champ(const StableOperatorSpec& spec, const ScalarField& u, const Pt& x,
                        const QuadratureSpec& q) {
    spec.validate();
    q.validate();
    if (u.regularity == Regularity::C0 && spec.s >= 0.5)
        throw InsufficientRegularity("carre_du_champ: C0 fields only for s < 1/2");
    double e1 = 0.0, e2 = 0.0;
    double coarse = carre_once(spec, u, x, q, &e1);
    double fine = carre_once(spec, u, x, q.refined(), &e2);
    return {std::max(fine, 0.0), std::abs(fine - coarse) + e2};
}

namespace {

// integral of f(r) |r|^{-1-2s} over a chord [a,b] with 0 outside, dyadically
// graded toward both endpoints (integrable endpoint singularities expected).
double chord_integral(const std::function<double(double)>& f, double a, double b, double s,
                      const GaussRule& g, int grade_levels) {
    if (b - a < 1e-300) return 0.0;
    auto fa = [&](double r) { return f(r) * std::pow(std::abs(r), -1.0 - 2.0 * s); };
    double half = 0.5 * (b - a);
    double acc = 0.0;
    double w = half;
    for (int k = 0; k < grade_levels; ++k) {
        // panel [a + w/2, a + w] and its mirror [b - w, b - w/2]
        double p = a + 0.5 * w, q = a + w;
        double gm = 0.5 * (p + q), gh = 0.5 * (q - p);
        for (std::size_t i = 0; i < g.x.size(); ++i) acc += gh * g.w[i] * fa(gm + gh * g.x[i]);
        p = b - w;
        q = b - 0.5 * w;
        gm = 0.5 * (p + q);
        gh = 0.5 * (q - p);
        for (std::size_t i = 0; i < g.x.size(); ++i) acc += gh * g.w[i] * fa(gm + gh * g.x[i]);
        w *= 0.5;
    }
    return acc;
}

double normal_derivative_once(const StableOperatorSpec& spec, const Domain& dom,
                              const ScalarField& u, const Pt& x, const QuadratureSpec& q,
                              int grade) {
    double s = spec.s;
    const GaussRule& g = gauss_rule(q.gauss_order);
    double ux = u(x);

    auto dir_integral = [&](const Pt& th) {
        double acc = 0.0;
        for (const auto& [a, b] : dom.ray_chords(x, th)) {
            auto f = [&](double r) { return ux - u(axpy(r, th, x)); };
            acc += chord_integral(f, a, b, s, g, grade);
        }
        return acc;
    };

    double total = 0.0;
    for (const auto& [dir, w] : effective_atoms(spec.measure)) total += w * dir_integral(dir);
    if (spec.measure.dim >= 2 && spec.measure.uniform_density > 0.0) {
        AngularRule rule = sphere_rule(spec.measure.dim, q.angular_nodes);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i)
            acc += rule.wts[i] * dir_integral(rule.dirs[i]);
        total += spec.measure.uniform_density * acc;
    }
    return (1.0 - s) * total;
}

}  // namespace

Estimate normal_derivative(const StableOperatorSpec& spec, const Domain& dom,
                           const ScalarField& u, const Pt& x, const QuadratureSpec& q) {
    spec.validate();
    q.validate();
    auto dr = dom.dist_to_boundary(x);
    if (dr.inside || dr.d <= 0.0)
        throw PointInsideDomain("normal_derivative: x must be outside the closed domain");
    double coarse = normal_derivative_once(spec, dom, u, x, q, 40);
    double fine = normal_derivative_once(spec, dom, u, x, q.refined(), 46);
    return {fine, std::abs(fine - coarse)};
}

namespace {

double nu_star_exact_chord(double a, double b, double s) {
    // int_a^b (1+|r|)^{-1-2s} dr, exact; 0 may lie inside
    auto F = [&](double lo, double hi) {  // 0 <= lo <= hi
        return (std::pow(1.0 + lo, -2.0 * s) - std::pow(1.0 + hi, -2.0 * s)) / (2.0 * s);
    };
    if (a >= 0.0) return F(a, b);
    if (b <= 0.0) return F(-b, -a);
    return F(0.0, -a) + F(0.0, b);
}

double nu_star_once(const StableOperatorSpec& spec, const Domain& dom, const Pt& x,
                    int angular_nodes) {
    double s = spec.s;
    auto dir_mass = [&](const Pt& th) {
        double acc = 0.0;
        for (const auto& [a, b] : dom.ray_chords(x, th)) acc += nu_star_exact_chord(a, b, s);
        return acc;
    };
    double total = 0.0;
    for (const auto& [dir, w] : effective_atoms(spec.measure)) total += w * dir_mass(dir);
    if (spec.measure.dim >= 2 && spec.measure.uniform_density > 0.0) {
        AngularRule rule = sphere_rule(spec.measure.dim, angular_nodes);
        double acc = 0.0;
        for (std::size_t i = 0; i < rule.dirs.size(); ++i)
            acc += rule.wts[i] * dir_mass(rule.dirs[i]);
        total += spec.measure.uniform_density * acc;
    }
    return (1.0 - s) * total;
}

}  // namespace

Estimate nu_star(const StableOperatorSpec& spec, const Domain& dom, const Pt& x,
                 const QuadratureSpec& q) {
    spec.validate();
    double v1 = nu_star_once(spec, dom, x, q.angular_nodes);
    if (spec.measure.uniform_density == 0.0 || spec.measure.dim == 1) return {v1, 0.0};
    double v2 = nu_star_once(spec, dom, x, 2 * q.angular_nodes);
    return {v2, std::abs(v2 - v1)};
}

Estimate tau_s(const StableOperatorSpec& spec, const Domain& dom, const Pt& x,
               const QuadratureSpec& q) {
    auto dr = dom.dist_to_boundary(x);
    if (dr.inside) throw PointInsideDomain("tau_s: x must lie outside the domain");
    Estimate nu = nu_star(spec, dom, x, q);
    Estimate out = nu;
    if (dr.d < 1.0 && dr.d > 0.0 && nu.value > kNuStarSupportThreshold)
        out.value += (1.0 - spec.s) * std::pow(dr.d, -spec.s);
    return out;
}

namespace {

// composite interior rule over Interval or Ball for smooth integrands
struct VolRule {
    std::vector<Pt> pts;
    std::vector<double> wts;
};

VolRule interior_rule(const Domain& dom, int n_per_dim, int gauss_order) {
    VolRule r;
    const GaussRule& g = gauss_rule(gauss_order);
    if (dom.dim() == 1) {
        double a = dom.lo()[0], b = dom.hi()[0];
        for (int p = 0; p < n_per_dim; ++p) {
            double pa = a + (b - a) * p / n_per_dim;
            double pb = a + (b - a) * (p + 1) / n_per_dim;
            double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                r.pts.push_back(pt(mid + half * g.x[i]));
                r.wts.push_back(half * g.w[i]);
            }
        }
    } else if (dom.kind() == Domain::Kind::Ball) {
        Pt c = dom.center();
        double R = dom.radius();
        int nang = 4 * n_per_dim;
        for (int p = 0; p < n_per_dim; ++p) {
            double pa = R * p / n_per_dim, pb = R * (p + 1) / n_per_dim;
            double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                double rho = mid + half * g.x[i];
                for (int j = 0; j < nang; ++j) {
                    double th = 2.0 * kPi * (j + 0.5) / nang;
                    r.pts.push_back(axpy(rho, pt(std::cos(th), std::sin(th)), c));
                    r.wts.push_back(half * g.w[i] * rho * 2.0 * kPi / nang);
                }
            }
        }
    } else {
        throw std::invalid_argument("interior_rule: Interval and Ball only");
    }
    return r;
}

}  // namespace

// Integrates H(t) over t in (0, T] with an integrable t^{-s}-type singularity
// at 0, via the power-law substitution t = tau^{1/(1-s)} and panels graded
// toward tau = 0.
Estimate collar_weighted_integral(const std::function<Estimate(double)>& H, double T, double s,
                                  int gauss_order, int panels) {
    const GaussRule& g = gauss_rule(gauss_order);
    double e = 1.0 / (1.0 - s);
    double Tt = std::pow(T, 1.0 - s);
    Estimate acc;
    double hi = Tt;
    for (int k = 0; k < panels && hi > Tt * 1e-8; ++k) {
        double lo = 0.5 * hi;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < g.x.size(); ++i) {
            double tau = mid + half * g.x[i];
            double t = std::pow(tau, e);
            if (t < T * 1e-12) continue;
            double jac = half * g.w[i] * e * std::pow(tau, e - 1.0);
            Estimate h = H(t);
            acc.value += jac * h.value;
            acc.error += jac * h.error;
        }
        hi = lo;
    }
    return acc;
}

double collar_weighted_integral(const std::function<double(double)>& H, double T, double s,
                                int gauss_order, int panels) {
    return collar_weighted_integral(
               [&](double t) -> Estimate {
                   return {H(t), 0.0};
               },
               T, s, gauss_order, panels)
        .value;
}

Estimate gauss_green_residual(const StableOperatorSpec& spec, const Domain& dom,
                              const ScalarField& phi, const ScalarField& w,
                              const QuadratureSpec& q) {
    spec.validate();
    {
        Rng rng(77031ULL);
        double diam = dom.diameter();
        Pt blo = dom.bbox_lo(), bhi = dom.bbox_hi();
        for (int t = 0; t < 64; ++t) {
            Pt p = {0, 0, 0};
            for (int k = 0; k < dom.dim(); ++k)
                p[k] = rng.uniform(blo[k] - 0.7 * diam, bhi[k] + 0.7 * diam);
            if (dom.contains(p)) continue;
            if (std::abs(phi(p)) > 1e-12)
                throw SupportViolation("gauss_green_residual: phi nonzero outside the domain");
        }
    }

    VolRule vol = interior_rule(dom, dom.dim() == 1 ? 12 : 8, q.gauss_order);
    double I1 = 0.0, I2 = 0.0, err = 0.0;
    for (std::size_t i = 0; i < vol.pts.size(); ++i) {
        Estimate a_phi = apply_As(spec, phi, vol.pts[i], q);
        Estimate a_w = apply_As(spec, w, vol.pts[i], q);
        double wv = w(vol.pts[i]);
        double pv = phi(vol.pts[i]);
        I1 += vol.wts[i] * a_phi.value * wv;
        I2 += vol.wts[i] * pv * a_w.value;
        err += vol.wts[i] * (a_phi.error * std::abs(wv) + a_w.error * std::abs(pv));
    }

    // exterior integral of N_s(phi) * w over the complement, power-law
    // substitution in the boundary offset, truncated where w decays
    double Rw = std::max(dom.diameter() * 2.0, 4.0);
    if (w.support_radius >= 0.0)
        Rw = w.support_radius + 0.1;
    else if (w.far_bound)
        while (w.far_bound(Rw) > 1e-10 && Rw < 1e4) Rw *= 2.0;

    auto line_integral = [&](const Pt& base, const Pt& nrm, double jac_lin) {
        // area element (1 + jac_lin * t) along the outward line from base
        return collar_weighted_integral(
            [&](double t) -> Estimate {
                Pt y = axpy(t, nrm, base);
                double wv = w(y);
                if (std::abs(wv) < 1e-15) return {0.0, 0.0};
                Estimate ns = normal_derivative(spec, dom, phi, y, q);
                double jac = 1.0 + jac_lin * t;
                return {ns.value * wv * jac, ns.error * std::abs(wv) * jac};
            },
            Rw, spec.s, q.gauss_order, 34);
    };
    Estimate I3;
    if (dom.dim() == 1) {
        I3 = combine(line_integral(dom.lo(), pt(-1.0), 0.0),
                     line_integral(dom.hi(), pt(1.0), 0.0));
    } else if (dom.kind() == Domain::Kind::Ball) {
        int nang = std::max(8, q.angular_nodes / 4);
        Pt c = dom.center();
        double R = dom.radius();
        for (int j = 0; j < nang; ++j) {
            double th = 2.0 * kPi * (j + 0.5) / nang;
            Pt nrm = pt(std::cos(th), std::sin(th));
            Estimate li = line_integral(axpy(R, nrm, c), nrm, 1.0 / R);
            double wj = R * 2.0 * kPi / nang;
            I3.value += wj * li.value;
            I3.error += wj * li.error;
        }
    } else {
        throw std::invalid_argument("gauss_green_residual: Interval and Ball only");
    }

    return {std::abs(I1 - I2 + I3.value), err + I3.error};
}

nlohmann::json to_json(const QuadratureSpec& q) {
    return nlohmann::json{{"inner_cut", q.inner_cut},
                          {"outer_cut", q.outer_cut},
                          {"panels_per_dyad", q.panels_per_dyad},
                          {"gauss_order", q.gauss_order},
                          {"angular_nodes", q.angular_nodes},
                          {"osc_panel_width", q.osc_panel_width}};
}

QuadratureSpec quadrature_from_json(const nlohmann::json& j) {
    QuadratureSpec q;
    q.inner_cut = j.value("inner_cut", q.inner_cut);
    q.outer_cut = j.value("outer_cut", q.outer_cut);
    q.panels_per_dyad = j.value("panels_per_dyad", q.panels_per_dyad);
    q.gauss_order = j.value("gauss_order", q.gauss_order);
    q.angular_nodes = j.value("angular_nodes", q.angular_nodes);
    q.osc_panel_width = j.value("osc_panel_width", q.osc_panel_width);
    q.validate();
    return q;
}

}  // namespace stablepde
