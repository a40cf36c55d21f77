#pragma once

#include "stablepde/common.hpp"
#include "stablepde/geometry.hpp"

namespace stablepde {

enum class Regularity { C0, C2NearX, Smooth };
enum class Decay { Compact, Bounded, VanishingAtInfty };

// Point-evaluable function on R^d with the metadata the singular quadratures
// need: regularity tag, support radius (exact zero outside the origin-centered
// ball), decay tag, and an optional far-field model
//   |eval(y) - far_value| <= far_bound(R) for |y| >= R.
struct ScalarField {
    std::function<double(const Pt&)> eval;
    Regularity regularity = Regularity::Smooth;
    Decay decay = Decay::Compact;
    double support_radius = -1.0;  // >= 0 means exact zero outside
    double far_value = 0.0;
    std::function<double(double)> far_bound;  // optional

    double operator()(const Pt& x) const { return eval(x); }
};

ScalarField constant_field(double c);

// sum of k Gaussians with seeded centers in [-c,c]^d, widths in [0.3,0.8],
// amplitudes in [-1,1]; exact far bound.
ScalarField gaussian_mixture(int d, int k, Rng& rng, double center_range = 0.6);

// single Gaussian a*exp(-|x-c|^2/(2 sig^2))
ScalarField gaussian(int d, const Pt& c, double sig, double amp = 1.0);

// C^inf bump exp(1 - 1/(1-|x-c|^2/R^2)) on B_R(c), zero outside.
ScalarField bump(int d, const Pt& c, double R, double amp = 1.0);

// cos(xi . (x - x0))
ScalarField cos_wave(int d, const Pt& xi, const Pt& x0);

// (R^2 - |x|^2)_+^s on the ball B_R(0) (profile of the torsion function)
ScalarField ball_power_profile(int d, double R, double s);

// d_x^alpha with respect to a domain, everywhere (alpha >= 0), Bounded decay
// with far model d ~ |x|.
ScalarField dist_power(const Domain& dom, double alpha);

// g(x) = 1_{Omega^1}(x) * d_x^alpha, supported on the exterior collar.
ScalarField collar_power(const Domain& dom, double alpha);

ScalarField scaled_argument(const ScalarField& u, double lambda);  // x -> u(lambda x)
ScalarField shifted(const ScalarField& u, const Pt& h);            // x -> u(x - h)
ScalarField squared(const ScalarField& u);
ScalarField linear_combination(double a, const ScalarField& u, double b, const ScalarField& v);

}  // namespace stablepde
