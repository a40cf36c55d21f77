#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stablepde/operators.hpp"

#include <cmath>

using namespace stablepde;

namespace {
constexpr double kPi = 3.141592653589793238463;

// Independent 1D oracle for the fractional Laplacian of a compactly supported
// profile: composite Simpson on the symmetrized integrand plus a central
// finite-difference Taylor term near zero and the exact constant tail.
// Deliberately shares no code with apply_As.
double frac1d_oracle(const std::function<double(double)>& u, double x, double s, double supp) {
    double C = std::pow(4.0, s) * std::tgamma(0.5 + s) / (std::sqrt(kPi) * std::abs(std::tgamma(-s)));
    double ux = u(x);
    double eps = 1e-5;
    double upp = (u(x + eps) + u(x - eps) - 2 * ux) / (eps * eps);
    double a = 2e-4;  // Taylor zone
    double total = upp * std::pow(a, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    double R = supp + std::abs(x) + 1.0;
    // Simpson on [a, R] with graded knots
    int N = 300000;
    auto F = [&](double r) {
        return (u(x + r) + u(x - r) - 2.0 * ux) * std::pow(r, -1.0 - 2.0 * s);
    };
    // geometric composite Simpson
    double ratio = std::pow(R / a, 1.0 / N);
    double p = a;
    for (int i = 0; i < N; ++i) {
        double q = p * ratio;
        double m = 0.5 * (p + q);
        total += (q - p) / 6.0 * (F(p) + 4.0 * F(m) + F(q));
        p = q;
    }
    total += -2.0 * ux * std::pow(R, -2.0 * s) / (2.0 * s);
    return -C * total;
}

StableOperatorSpec frac1(double s) { return frac_laplacian_spec(1, s); }
StableOperatorSpec frac2(double s) { return frac_laplacian_spec(2, s); }
}  // namespace

TEST_CASE("apply_As annihilates constants exactly") {
    auto u = constant_field(3.5);
    for (double s : {0.3, 0.7}) {
        auto r = apply_As(frac1(s), u, pt(0.2), {});
        CHECK(r.value == 0.0);
        auto r2 = apply_As(frac2(s), u, pt(0.1, -0.4), {});
        CHECK(r2.value == 0.0);
    }
}

TEST_CASE("cos is an eigenfunction at the symmetric point: d=1") {
    auto spec = frac1(0.5);
    auto u = cos_wave(1, pt(1.0), pt(0.0));
    auto r = apply_As(spec, u, pt(0.0), {});
    CHECK(r.value == doctest::Approx(fourier_symbol(spec, pt(1.0))).epsilon(1e-4));
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("plane-wave eigenrelation at random points, d=1 and d=2") {
    Rng rng(2024);
    for (int d : {1, 2}) {
        for (int i = 0; i < 4; ++i) {
            double s = rng.uniform(0.3, 0.9);
            auto spec = frac_laplacian_spec(d, s);
            Pt xi = {0, 0, 0}, x0 = {0, 0, 0};
            for (int k = 0; k < d; ++k) {
                xi[k] = rng.uniform(-2, 2);
                x0[k] = rng.uniform(-1, 1);
            }
            if (norm(xi) < 0.3) xi[0] += 1.0;
            auto u = cos_wave(d, xi, x0);
            auto r = apply_As(spec, u, x0, {});
            double want = fourier_symbol(spec, xi);
            CHECK(r.value == doctest::Approx(want).epsilon(1e-4));
        }
    }
}

TEST_CASE("torsion profile: A_s (1-x^2)_+^s = Gamma(2s+1) in d=1") {
    double s = 0.5;
    auto u = ball_power_profile(1, 1.0, s);
    auto r = apply_As(frac1(s), u, pt(0.3), {});
    CHECK(r.value == doctest::Approx(std::tgamma(2.0 * s + 1.0)).epsilon(0.005));

    // cross-check the closed-form candidate with the independent oracle at
    // interior points before trusting it
    auto ufn = [s](double y) {
        double q = 1.0 - y * y;
        return q > 0 ? std::pow(q, s) : 0.0;
    };
    for (double x : {0.0, 0.15, 0.3, -0.45, 0.6}) {
        double o = frac1d_oracle(ufn, x, s, 1.0);
        CHECK(o == doctest::Approx(1.0).epsilon(0.005));
    }
}

TEST_CASE("apply_As matches the independent oracle on a smooth field") {
    double s = 0.7;
    Rng rng(5);
    auto u = gaussian_mixture(1, 3, rng);
    auto ufn = [&](double y) { return u(pt(y)); };
    for (double x : {-0.3, 0.1, 0.62}) {
        double want = frac1d_oracle(ufn, x, s, 6.0);
        auto r = apply_As(frac1(s), u, pt(x), {});
        CHECK(r.value == doctest::Approx(want).epsilon(2e-4));
    }
}

TEST_CASE("scaling behavior") {
    auto spec = frac1(0.5);
    auto u = gaussian(1, pt(0.0), 0.7);
    SUBCASE("lambda = 1 gives identical entries") {
        auto [a, b] = scaling_check(spec, u, pt(0.1), 1.0, {});
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    }
    SUBCASE("lambda = 2") {
        auto [a, b] = scaling_check(spec, u, pt(0.1), 2.0, {});
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-3));
    }
    SUBCASE("constants: both zero") {
        auto [a, b] = scaling_check(spec, constant_field(1.0), pt(0.1), 3.0, {});
        CHECK(a.value == 0.0);
        CHECK(b.value == 0.0);
    }
}

TEST_CASE("translation invariance") {
    auto spec = frac1(0.6);
    Rng rng(31);
    auto u = gaussian_mixture(1, 2, rng);
    for (int i = 0; i < 3; ++i) {
        double h = rng.uniform(-1.5, 1.5);
        auto r0 = apply_As(spec, u, pt(0.2), {});
        auto r1 = apply_As(spec, shifted(u, pt(h)), pt(0.2 + h), {});
        CHECK(r1.value == doctest::Approx(r0.value).epsilon(1e-6));
    }
}

TEST_CASE("apply_As unchanged under measure symmetrization") {
    SpectralMeasure mu;
    mu.dim = 1;
    mu.atoms = {{pt(1.0), 2.0}};
    StableOperatorSpec spec{0.4, mu};
    StableOperatorSpec spec_sym{0.4, symmetrize(mu)};
    auto u = gaussian(1, pt(0.3), 0.5);
    auto a = apply_As(spec, u, pt(0.0), {});
    auto b = apply_As(spec_sym, u, pt(0.0), {});
    CHECK(a.value == b.value);  // evaluator symmetrizes internally
}

TEST_CASE("maximum-principle sign at a global minimum") {
    auto spec = frac2(0.6);
    auto u = gaussian(2, pt(0.2, -0.1), 0.5, -1.0);  // global min at the center
    auto r = apply_As(spec, u, pt(0.2, -0.1), {});
    CHECK(r.value <= r.error + 1e-10);
}

TEST_CASE("carre du champ") {
    auto spec = frac1(0.5);
    SUBCASE("constants give zero") {
        auto r = carre_du_champ(spec, constant_field(2.0), pt(0.1), {});
        CHECK(r.value == 0.0);
    }
    SUBCASE("capped linear field, s=0.3: positive") {
        // x clamped to [-2,2], compactly modified far away
        ScalarField u;
        u.eval = [](const Pt& p) {
            double t = std::clamp(p[0], -2.0, 2.0);
            double win = std::max(0.0, 1.0 - std::pow(std::abs(p[0]) / 8.0, 2));
            return t * win;
        };
        u.regularity = Regularity::C2NearX;
        u.decay = Decay::Compact;
        u.support_radius = 8.0;
        auto spec3 = frac1(0.3);
        auto r = carre_du_champ(spec3, u, pt(0.0), {});
        CHECK(r.value > 0.0);
    }
    SUBCASE("identity Gamma_s(u) = 2u A_s u - A_s(u^2) at random points") {
        Rng rng(77);
        auto u = gaussian_mixture(1, 3, rng);
        for (int i = 0; i < 10; ++i) {
            Pt x = pt(rng.uniform(-1, 1));
            auto g = carre_du_champ(spec, u, x, {});
            auto au = apply_As(spec, u, x, {});
            auto au2 = apply_As(spec, squared(u), x, {});
            double rhs = 2.0 * u(x) * au.value - au2.value;
            double tol = 3.0 * (g.error + 2.0 * std::abs(u(x)) * au.error + au2.error) + 1e-9;
            CHECK(std::abs(g.value - rhs) <= tol);
        }
    }
    SUBCASE("C0 field rejected for s >= 1/2") {
        ScalarField rough;
        rough.eval = [](const Pt& p) { return std::abs(p[0]) < 1 ? 1.0 - std::abs(p[0]) : 0.0; };
        rough.regularity = Regularity::C0;
        rough.support_radius = 1.0;
        CHECK_THROWS_AS(carre_du_champ(frac1(0.6), rough, pt(0.2), {}), InsufficientRegularity);
        auto ok = carre_du_champ(frac1(0.3), rough, pt(0.2), {});
        CHECK(ok.value > 0.0);
    }
}

TEST_CASE("apply_As rejects C0 fields") {
    ScalarField rough;
    rough.eval = [](const Pt& p) { return std::abs(p[0]); };
    rough.regularity = Regularity::C0;
    rough.support_radius = 1.0;
    CHECK_THROWS_AS(apply_As(frac1(0.3), rough, pt(0.0), {}), InsufficientRegularity);
}

TEST_CASE("normal derivative") {
    auto dom = Domain::ball(pt(0, 0), 1.0);
    double s = 0.5;
    auto spec = frac2(s);

    SUBCASE("throws inside") {
        CHECK_THROWS_AS(normal_derivative(spec, dom, constant_field(1.0), pt(0.3, 0.0), {}),
                        PointInsideDomain);
    }
    SUBCASE("global constants give zero") {
        auto r = normal_derivative(spec, dom, constant_field(1.0), pt(1.5, 0.0), {});
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("indicator mass vs Monte Carlo oracle") {
        // u = 1 at x, 0 on the domain: N_s(u)(x) = (1-s) * kernel mass of the
        // chords of Omega seen from x
        Pt x = pt(1.4, 0.3);
        ScalarField u;
        u.eval = [x](const Pt& y) { return norm(sub(y, x)) < 0.05 ? 1.0 : 0.0; };
        u.regularity = Regularity::C0;
        u.support_radius = norm(x) + 0.1;
        auto r = normal_derivative(spec, dom, u, x, {});
        CHECK(r.value > 0.0);

        // importance-sampled Monte Carlo of (1-s) rho int int 1_Omega |r|^{-1-2s}
        double rho = frac_laplacian_density(2, s);
        double dx = dom.dist_to_boundary(x).d;
        double D = dx + 2.0 * dom.radius() + 0.5;
        double Z = kmom0(dx, D, s);
        Rng rng(1234);
        double acc = 0.0;
        int nmc = 2000000;
        for (int i = 0; i < nmc; ++i) {
            double phi = rng.uniform(0, 2 * kPi);
            // inverse CDF of r^{-1-2s} on [dx, D]
            double uu = rng.uniform();
            double rr = std::pow(std::pow(dx, -2 * s) * (1 - uu) + std::pow(D, -2 * s) * uu,
                                 -1.0 / (2 * s));
            Pt y = axpy(rr, pt(std::cos(phi), std::sin(phi)), x);
            if (dom.contains(y)) acc += 1.0;
        }
        double mc = (1 - s) * rho * 2.0 * (2 * kPi) * Z * (acc / nmc);
        CHECK(r.value == doctest::Approx(mc).epsilon(0.01));
    }
    SUBCASE("Lemma 2.1 collar bound at a sample point") {
        // -N_s(d^s)(x) <= (2 Lambda / s) tau_s(x) in the collar
        auto ds = dist_power(dom, s);
        Pt x = pt(1.5, 0.0);  // d_x = 0.5
        auto ns = normal_derivative(spec, dom, ds, x, {});
        auto tau = tau_s(spec, dom, x, {});
        double Lambda = total_mass(spec.measure);
        CHECK(-ns.value <= (2.0 * Lambda / s) * tau.value + ns.error);
    }
}

TEST_CASE("nu_star") {
    SUBCASE("axis atoms miss the ball from (10,10), hit it from (10,0)") {
        SpectralMeasure mu;
        mu.dim = 2;
        mu.atoms = {{pt(1, 0), 1.0}, {pt(0, 1), 1.0}};
        StableOperatorSpec spec{0.5, mu};
        auto dom = Domain::ball(pt(0, 0), 0.5);
        CHECK(nu_star(spec, dom, pt(10, 10), {}).value == 0.0);
        CHECK(nu_star(spec, dom, pt(10, 0), {}).value > 0.0);
    }
    SUBCASE("frac-Laplacian weight is comparable to (1-s)(1+|x|)^{-d-2s}") {
        double s = 0.5;
        auto spec = frac2(s);
        auto dom = Domain::ball(pt(0, 0), 1.0);
        double lo = 1e300, hi = 0.0;
        for (double R : {5.0, 10.0, 20.0}) {
            double v = nu_star(spec, dom, pt(R, 0), {}).value;
            double ratio = v * std::pow(1.0 + R, 2.0 + 2.0 * s) / (1.0 - s);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        CHECK(hi / lo <= 4.0);
    }
    SUBCASE("1d interval: exact, zero error") {
        auto spec = frac1(0.4);
        auto dom = Domain::interval(-1, 1);
        auto r = nu_star(spec, dom, pt(3.0), {});
        // chord [-4,-2] along +1 ray and [2,4] along -1 ray, weights rho each
        double rho = frac_laplacian_density(1, 0.4);
        double s = 0.4;
        double one = (std::pow(3.0, -2 * s) - std::pow(5.0, -2 * s)) / (2 * s);
        CHECK(r.value == doctest::Approx((1 - s) * rho * 2.0 * one).epsilon(1e-13));
        CHECK(r.error == 0.0);
    }
}

TEST_CASE("tau_s") {
    double s = 0.5;
    auto spec = frac2(s);
    auto dom = Domain::ball(pt(0, 0), 1.0);
    SUBCASE("far points: just nu_star") {
        Pt x = pt(2.5, 0.0);  // d_x = 1.5 >= 1
        CHECK(tau_s(spec, dom, x, {}).value ==
              doctest::Approx(nu_star(spec, dom, x, {}).value).epsilon(1e-14));
    }
    SUBCASE("collar point adds (1-s) d^{-s}") {
        Pt x = pt(1.25, 0.0);  // d_x = 0.25
        double nu = nu_star(spec, dom, x, {}).value;
        CHECK(tau_s(spec, dom, x, {}).value == doctest::Approx(0.5 * 2.0 + nu).epsilon(1e-10));
    }
    SUBCASE("support indicator follows nu_star threshold") {
        SpectralMeasure mu;
        mu.dim = 2;
        mu.atoms = {{pt(1, 0), 1.0}, {pt(0, 1), 1.0}};
        StableOperatorSpec aspec{s, mu};
        auto small = Domain::ball(pt(0, 0), 0.5);
        Pt x = pt(0.9, 0.9);  // off-axis: no ray hits the ball
        double nu = nu_star(aspec, small, x, {}).value;
        double tv = tau_s(aspec, small, x, {}).value;
        if (nu > kNuStarSupportThreshold) {
            CHECK(tv > nu);
        } else {
            CHECK(tv == nu);
        }
    }
    SUBCASE("throws inside") {
        CHECK_THROWS_AS(tau_s(spec, dom, pt(0.1, 0.1), {}), PointInsideDomain);
    }
}

TEST_CASE("gauss-green residual") {
    double s = 0.5;
    auto spec = frac1(s);
    auto dom = Domain::interval(-1, 1);
    auto phi = bump(1, pt(0.0), 1.0);

    SUBCASE("w = 0 gives zero") {
        auto r = gauss_green_residual(spec, dom, phi, constant_field(0.0), {});
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("phi = 0 gives zero") {
        ScalarField zero = constant_field(0.0);
        zero.support_radius = 0.0;
        zero.decay = Decay::Compact;
        auto r = gauss_green_residual(spec, dom, zero, gaussian(1, pt(0), 0.6), {});
        CHECK(r.value == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("smooth bump against a gaussian: small residual") {
        auto w = gaussian(1, pt(0.2), 0.7);
        auto r = gauss_green_residual(spec, dom, phi, w, {});
        // scale of the three terms
        double scale = 1.0;
        CHECK(r.value <= 1e-3 * scale);
    }
    SUBCASE("support violation detected") {
        auto w = gaussian(1, pt(0.0), 0.6);
        CHECK_THROWS_AS(gauss_green_residual(spec, dom, w, w, {}), SupportViolation);
    }
}

TEST_CASE("batch evaluation is ordered and thread-count independent") {
    auto spec = frac1(0.5);
    Rng rng(4);
    auto u = gaussian_mixture(1, 2, rng);
    std::vector<Pt> xs;
    for (int i = 0; i < 8; ++i) xs.push_back(pt(-0.8 + 0.2 * i));
    auto a = apply_As_batch(spec, u, xs, {}, 1);
    auto b = apply_As_batch(spec, u, xs, {}, 2);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].value == b[i].value);
}
