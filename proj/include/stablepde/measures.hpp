#pragma once

#include "stablepde/common.hpp"

#include "json.hpp"

namespace stablepde {

// Finite measure on the unit sphere S^{d-1}: a list of atoms plus a constant
// density per unit surface measure. This is the directional weighting of the
// operator; its mass is the Lambda used in all constant-tracking reports.
struct SpectralMeasure {
    int dim = 1;
    std::vector<std::pair<Pt, double>> atoms;  // (unit direction, positive weight)
    double uniform_density = 0.0;

    void validate() const;
};

double total_mass(const SpectralMeasure& mu);

// Certified lower estimate of inf_omega int |omega . theta|^{2s} mu(dtheta)
// over the unit sphere. Nested grids (angle grid in d=2, Fibonacci lattice in
// d=3) with two refinements and golden-section polish around the minimizer.
// Throws DegenerateMeasure below 1e-10.
double ellipticity_constant(const SpectralMeasure& mu, double s, int resolution = 64);

// Even part (mu + mu o (-id))/2. The induced Levy measure is unchanged.
SpectralMeasure symmetrize(const SpectralMeasure& mu);

// Uniform measure with density rho(d,s) = C(d,s)/(2(1-s)),
// C(d,s) = 4^s Gamma(d/2+s) / (pi^{d/2} |Gamma(-s)|), so that the induced
// operator is exactly the fractional Laplacian (symbol |xi|^{2s}).
// In d=1 the "uniform" measure is the pair of atoms at +-1.
SpectralMeasure frac_laplacian_measure(int d, double s);
double frac_laplacian_density(int d, double s);  // rho(d,s)

struct StableOperatorSpec {
    double s = 0.5;  // order in (0,1); the (1-s) normalization is always on
    SpectralMeasure measure;

    void validate() const;
};

// c(s) = 2(1-s) int_0^inf (1-cos t)/t^{1+2s} dt, computed by quadrature and
// cached (single-writer init, concurrent read safe).
double symbol_constant(double s);

// int_{S^{d-1}} |omega . theta|^{2s} mu(dtheta) for unit omega.
double directional_moment(const SpectralMeasure& mu, double s, const Pt& omega);

// |S^{d-1}|-moment of |omega . theta|^{2s} against the uniform density 1:
// J(d,s) = 2 pi^{(d-1)/2} Gamma(s+1/2)/Gamma(s+d/2).
double uniform_moment(int d, double s);

// Fourier symbol psi(xi) = c(s) * directional_moment(mu,s,xi/|xi|) * |xi|^{2s}.
// Returns 0 for xi = 0 (documented convention).
double fourier_symbol(const StableOperatorSpec& spec, const Pt& xi);

StableOperatorSpec frac_laplacian_spec(int d, double s);

nlohmann::json to_json(const SpectralMeasure& mu);
SpectralMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StableOperatorSpec& spec);
StableOperatorSpec spec_from_json(const nlohmann::json& j);

}  // namespace stablepde
