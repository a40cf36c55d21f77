#pragma once

#include "stablepde/fields.hpp"
#include "stablepde/geometry.hpp"
#include "stablepde/measures.hpp"

#include "json.hpp"

namespace stablepde {

// Radial/angular quadrature parameters for the pointwise operator evaluators.
struct QuadratureSpec {
    double inner_cut = 1e-3;   // Taylor zone radius (delta)
    double outer_cut = 64.0;   // start of the tail treatment (R)
    int panels_per_dyad = 1;
    int gauss_order = 8;
    int angular_nodes = 64;    // uniform-density component
    double panel_width = 0.75;     // radial panel width cap (smooth fields)
    double osc_panel_width = 1.5;  // panel width cap for bounded oscillatory tails

    QuadratureSpec refined() const {
        QuadratureSpec r = *this;
        r.inner_cut *= 0.5;
        r.panels_per_dyad *= 2;
        r.gauss_order += 4;
        r.angular_nodes *= 2;
        r.outer_cut *= 2.0;
        return r;
    }
    void validate() const {
        if (!(inner_cut > 0.0) || !(outer_cut > inner_cut) || gauss_order < 4)
            throw std::invalid_argument("QuadratureSpec: need delta>0, R>delta, gauss_order>=4");
    }
};

nlohmann::json to_json(const QuadratureSpec& q);
QuadratureSpec quadrature_from_json(const nlohmann::json& j);

// Pointwise principal value A_s u(x), symmetric-second-difference form.
// Requires u C^2 near x (InsufficientRegularity for C0 tags); the tail needs
// a support radius or a far-field model (TailUnknown otherwise).
// Returns value with a one-refinement error estimate.
Estimate apply_As(const StableOperatorSpec& spec, const ScalarField& u, const Pt& x,
                  const QuadratureSpec& q = {});

// (A_s[u(lambda .)](x), lambda^{2s} A_s[u](lambda x))
std::pair<Estimate, Estimate> scaling_check(const StableOperatorSpec& spec, const ScalarField& u,
                                            const Pt& x, double lambda,
                                            const QuadratureSpec& q = {});

// Gamma_s(u)(x) = int (u(x)-u(x+h))^2 d nu_s(h), nonnegative.
Estimate carre_du_champ(const StableOperatorSpec& spec, const ScalarField& u, const Pt& x,
                        const QuadratureSpec& q = {});

// Nonlocal normal derivative N_s(u)(x) at an exterior point.
Estimate normal_derivative(const StableOperatorSpec& spec, const Domain& dom,
                           const ScalarField& u, const Pt& x, const QuadratureSpec& q = {});

// Tail weight nu_s^star(x); exact antiderivative in r on every chord.
Estimate nu_star(const StableOperatorSpec& spec, const Domain& dom, const Pt& x,
                 const QuadratureSpec& q = {});

// tau_s(x) = (1-s) d_x^{-s} 1_{Omega^1 cap supp nu*}(x) + nu*(x), exterior x.
Estimate tau_s(const StableOperatorSpec& spec, const Domain& dom, const Pt& x,
               const QuadratureSpec& q = {});

constexpr double kNuStarSupportThreshold = 1e-14;

// | int_Omega (A_s phi) w - int_Omega phi (A_s w) + int_{Omega^c} N_s(phi) w |
// for phi vanishing on the complement. Interval and Ball domains.
Estimate gauss_green_residual(const StableOperatorSpec& spec, const Domain& dom,
                              const ScalarField& phi, const ScalarField& w,
                              const QuadratureSpec& q = {});

// Batch evaluation, results ordered by input index.
std::vector<Estimate> apply_As_batch(const StableOperatorSpec& spec, const ScalarField& u,
                                     const std::vector<Pt>& xs, const QuadratureSpec& q = {},
                                     int threads = 1);

// int_0^T H(t) dt where H carries an integrable t^{-s}-type singularity at 0:
// power-law substitution t = tau^{1/(1-s)} with panels graded toward zero.
Estimate collar_weighted_integral(const std::function<Estimate(double)>& H, double T, double s,
                                  int gauss_order = 8, int panels = 34);
double collar_weighted_integral(const std::function<double(double)>& H, double T, double s,
                                int gauss_order, int panels);

}  // namespace stablepde
