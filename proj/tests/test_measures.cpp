#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stablepde/measures.hpp"

#include <cmath>

using namespace stablepde;

namespace {
constexpr double kPi = 3.141592653589793238463;

// closed-form oracle for c(s) (test-only; production uses quadrature):
// int_0^inf (1-cos t)/t^{1+2s} dt = pi / (2 sin(pi s) Gamma(1+2s))
double symbol_constant_oracle(double s) {
    return 2.0 * (1.0 - s) * kPi / (2.0 * std::sin(kPi * s) * std::tgamma(1.0 + 2.0 * s));
}
}  // namespace

TEST_CASE("total_mass") {
    SpectralMeasure uni;
    uni.dim = 2;
    uni.uniform_density = 1.0;
    CHECK(total_mass(uni) == doctest::Approx(2.0 * kPi).epsilon(1e-14));

    SpectralMeasure two;
    two.dim = 2;
    two.atoms = {{pt(1, 0), 1.0}, {pt(0, 1), 1.0}};
    CHECK(total_mass(two) == doctest::Approx(2.0));

    SpectralMeasure d1;
    d1.dim = 1;
    d1.atoms = {{pt(1), 0.7}, {pt(-1), 1.9}};
    CHECK(total_mass(d1) == doctest::Approx(2.6));
}

TEST_CASE("measure validation") {
    SpectralMeasure bad;
    bad.dim = 2;
    bad.atoms = {{pt(1, 1), 1.0}};  // not unit
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    SpectralMeasure empty;
    empty.dim = 2;
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("ellipticity constant: two axis atoms, s=1/2") {
    SpectralMeasure mu;
    mu.dim = 2;
    mu.atoms = {{pt(1, 0), 1.0}, {pt(0, 1), 1.0}};
    double lam = ellipticity_constant(mu, 0.5, 64);
    // brute-force oracle over 1e6 sphere samples of |w1| + |w2|
    double best = 1e30;
    for (int i = 0; i < 1000000; ++i) {
        double phi = kPi * i / 1000000.0;
        best = std::min(best, std::abs(std::cos(phi)) + std::abs(std::sin(phi)));
    }
    CHECK(lam == doctest::Approx(best).epsilon(1e-3));
    CHECK(lam == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("ellipticity constant: degenerate single atom") {
    SpectralMeasure mu;
    mu.dim = 2;
    mu.atoms = {{pt(1, 0), 1.0}};
    CHECK_THROWS_AS(ellipticity_constant(mu, 0.5), DegenerateMeasure);
}

TEST_CASE("ellipticity constant: uniform density, s=1/2") {
    SpectralMeasure mu;
    mu.dim = 2;
    mu.uniform_density = 1.0;
    double lam = ellipticity_constant(mu, 0.5, 64);
    // 1d quadrature oracle: int_0^{2pi} |cos t| dt = 4, independent of omega
    double simpson = 0.0;
    int n = 200000;
    for (int i = 0; i <= n; ++i) {
        double t = 2.0 * kPi * i / n;
        double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        simpson += w * std::abs(std::cos(t));
    }
    simpson *= 2.0 * kPi / n / 3.0;
    CHECK(lam == doctest::Approx(simpson).epsilon(1e-3));
    CHECK(lam == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("symmetrize") {
    SpectralMeasure mu;
    mu.dim = 2;
    mu.atoms = {{pt(1, 0), 2.0}};
    auto sym = symmetrize(mu);
    REQUIRE(sym.atoms.size() == 2);
    CHECK(sym.atoms[0].second == doctest::Approx(1.0));
    CHECK(sym.atoms[1].second == doctest::Approx(1.0));
    CHECK(total_mass(sym) == doctest::Approx(total_mass(mu)));

    auto sym2 = symmetrize(sym);  // idempotent
    REQUIRE(sym2.atoms.size() == 2);
    CHECK(sym2.atoms[0].second == doctest::Approx(1.0));

    SpectralMeasure uni;
    uni.dim = 2;
    uni.uniform_density = 0.7;
    auto symu = symmetrize(uni);
    CHECK(symu.uniform_density == doctest::Approx(0.7));
    CHECK(symu.atoms.empty());
}

TEST_CASE("frac_laplacian_measure d=1 s=1/2: atom weights 1/pi") {
    auto mu = frac_laplacian_measure(1, 0.5);
    REQUIRE(mu.atoms.size() == 2);
    CHECK(mu.atoms[0].second == doctest::Approx(1.0 / kPi).epsilon(1e-12));
    CHECK(mu.atoms[1].second == doctest::Approx(1.0 / kPi).epsilon(1e-12));
}

TEST_CASE("frac_laplacian densities positive and finite") {
    for (double s : {0.3, 0.6, 0.9}) {
        double rho = frac_laplacian_density(2, s);
        CHECK(rho > 0.0);
        CHECK(std::isfinite(rho));
    }
}

TEST_CASE("symbol constant: quadrature vs closed-form oracle") {
    for (double s : {0.1, 0.3, 0.5, 0.5000001, 0.7, 0.9, 0.95}) {
        CHECK(symbol_constant(s) ==
              doctest::Approx(symbol_constant_oracle(s)).epsilon(1e-9));
    }
}

TEST_CASE("fourier_symbol: fractional Laplacian normalization") {
    for (int d : {1, 2}) {
        for (double s : {0.3, 0.5, 0.7, 0.9}) {
            auto spec = frac_laplacian_spec(d, s);
            for (Pt xi : {pt(1, 0), pt(2, 0), d == 2 ? pt(1, 1) : pt(-3, 0)}) {
                double want = std::pow(norm(xi), 2.0 * s);
                CHECK(fourier_symbol(spec, xi) == doctest::Approx(want).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("fourier_symbol: exact homogeneity") {
    auto spec = frac_laplacian_spec(2, 0.7);
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        Pt xi = pt(rng.uniform(-2, 2), rng.uniform(-2, 2));
        if (norm(xi) < 0.1) continue;
        double t = rng.uniform(0.5, 3.0);
        double lhs = fourier_symbol(spec, scale(t, xi));
        double rhs = std::pow(t, 2.0 * spec.s) * fourier_symbol(spec, xi);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
    CHECK(fourier_symbol(spec, pt(0, 0)) == 0.0);  // documented zero-frequency convention
}

TEST_CASE("fourier_symbol: four axis atoms give 2 c(s) at xi=e1") {
    double s = 0.6;
    SpectralMeasure mu;
    mu.dim = 2;
    mu.atoms = {{pt(1, 0), 1.0}, {pt(-1, 0), 1.0}, {pt(0, 1), 1.0}, {pt(0, -1), 1.0}};
    StableOperatorSpec spec{s, mu};
    CHECK(fourier_symbol(spec, pt(1, 0)) ==
          doctest::Approx(2.0 * symbol_constant(s)).epsilon(1e-12));
}

TEST_CASE("nondegeneracy bound of the symbol") {
    SpectralMeasure mu;
    mu.dim = 2;
    mu.atoms = {{pt(1, 0), 1.0}, {pt(0, 1), 2.0}};
    double s = 0.55;
    StableOperatorSpec spec{s, mu};
    double lam = ellipticity_constant(mu, s);
    Rng rng(5);
    for (int i = 0; i < 40; ++i) {
        double phi = rng.uniform(0, 2 * kPi);
        Pt omega = pt(std::cos(phi), std::sin(phi));
        CHECK(fourier_symbol(spec, omega) >= symbol_constant(s) * lam - 1e-6);
    }
}

TEST_CASE("fourier_symbol: rotation invariance for the frac-Laplacian measure") {
    auto spec = frac_laplacian_spec(2, 0.42);
    Rng rng(99);
    double ref = fourier_symbol(spec, pt(1, 0));
    for (int i = 0; i < 16; ++i) {
        double phi = rng.uniform(0, 2 * kPi);
        double v = fourier_symbol(spec, pt(std::cos(phi), std::sin(phi)));
        CHECK(v == doctest::Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("measure JSON round trip, rejects unnormalized directions") {
    SpectralMeasure mu;
    mu.dim = 2;
    mu.atoms = {{pt(1, 0), 0.5}, {pt(0, -1), 2.0}};
    mu.uniform_density = 0.25;
    auto j = to_json(mu);
    auto back = measure_from_json(j);
    CHECK(back.dim == 2);
    CHECK(back.uniform_density == doctest::Approx(0.25));
    REQUIRE(back.atoms.size() == 2);
    CHECK(total_mass(back) == doctest::Approx(total_mass(mu)).epsilon(1e-14));

    j["atoms"][0][0] = std::vector<double>{0.5, 0.5};  // not unit length
    CHECK_THROWS_AS(measure_from_json(j), std::invalid_argument);
}

TEST_CASE("spec JSON with frac_laplacian shorthand") {
    nlohmann::json j = {{"s", 0.5}, {"frac_laplacian", 1}};
    auto spec = spec_from_json(j);
    CHECK(spec.measure.atoms.size() == 2);
    CHECK(fourier_symbol(spec, pt(1)) == doctest::Approx(1.0).epsilon(1e-6));
}
