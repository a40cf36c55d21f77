#pragma once

#include "stablepde/operators.hpp"

#include <memory>
#include <optional>
#include <span>

namespace stablepde {

// Uniform lattice over the domain's bounding box; nodes strictly inside the
// domain are the unknowns. Boundary-characteristic points (interval endpoints,
// ball center) sit on the lattice.
struct Grid {
    Domain dom = Domain::interval(-1, 1);
    double h = 0.1;
    Pt origin{};            // lattice point (0,0)
    int ext[2] = {0, 0};    // lattice index ranges 0..ext[k]
    std::vector<int> index;              // lattice -> interior index or -1
    std::vector<Pt> nodes;               // interior nodes
    std::vector<double> dist;            // cached boundary distances
    std::vector<std::array<int, 2>> ij;  // interior -> lattice coords

    std::size_t size() const { return nodes.size(); }
    int lat(int i, int j) const { return j * (ext[0] + 1) + i; }
    int node_at(int i, int j) const {
        if (i < 0 || i > ext[0] || j < 0 || j > ext[1]) return -1;
        return index[lat(i, j)];
    }
};

Grid make_grid(const Domain& dom, double h, std::size_t node_cap = 200000);

struct DirichletProblem {
    StableOperatorSpec spec;
    Domain dom = Domain::interval(-1, 1);
    ScalarField f;
    ScalarField g;
    Grid grid;
    // Optional C^2 global field agreeing with g on the complement; the solve
    // is carried out for u - lifting (zero exterior data) and shifted back.
    std::optional<ScalarField> lifting;
    double coarse_bound = 10.0;  // GridTooCoarse when h^{2-2s} |f|_inf exceeds this
};

struct DenseSystem {
    int n = 0;
    std::vector<double> a;  // column-major n*n
    std::vector<double> rhs;
};

// Collocation rows: exact kernel moments against the partition-of-unity nodal
// interpolation, quadratic second-difference model on the first radial cell
// (plus, in 2d, a five-point near-zone model), exterior datum integrated
// against the kernel into the right-hand side.
DenseSystem assemble(const DirichletProblem& p, int threads = 1);

// Exterior kernel mass of node i under the row quadrature (for row-sum checks).
double exterior_kernel_mass(const DirichletProblem& p, std::size_t i);

struct DiscreteSolution {
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const std::vector<double>> values;  // interior nodal values
    ScalarField g;
    double residual = 0.0;        // linear-system relative residual
    Estimate error_estimate;      // nodal delta vs a 2h solve (when computed)

    double value(std::size_t i) const { return (*values)[i]; }
    // Interpolating field: nodal interpolation inside, g(x) exactly outside.
    ScalarField as_field() const;
    void to_csv(std::ostream& os) const;  // columns x1..xd, value, d_x
};

DiscreteSolution solve(const DirichletProblem& p, int threads = 1);
// solve + refinement delta against a 2h grid (interpolated to the fine nodes)
DiscreteSolution solve_with_estimate(const DirichletProblem& p, int threads = 1);

// Factored collocation operator for one (spec, domain, grid); reusable across
// data pairs (the factorization dominates the cost of a solve).
class AssembledOperator {
  public:
    AssembledOperator(StableOperatorSpec spec, Domain dom, Grid grid, int threads = 1);
    DiscreteSolution solve_data(const ScalarField& f, const ScalarField& g,
                                const std::optional<ScalarField>& lifting = std::nullopt,
                                int threads = 1) const;
    const Grid& grid() const { return grid_; }

  private:
    StableOperatorSpec spec_;
    Domain dom_;
    Grid grid_;
    std::vector<double> a_;   // column-major matrix (kept for residuals)
    std::vector<double> lu_;  // factorization
    std::vector<int> ipiv_;
};

// A_s phi = 1 in Omega, phi = 0 outside.
DiscreteSolution torsion_function(const StableOperatorSpec& spec, const Domain& dom,
                                  const Grid& grid, int threads = 1);

// u(x) = int_{|y|>1} g(y) P_s(x,y) dy on the unit ball (d = 1 or 2), with the
// alpha-harmonic Poisson kernel; KernelNotNormalized if the computed kernel
// mass deviates from 1 by more than 1e-3.
Estimate poisson_ball_solve(double s, int d, const ScalarField& g, const Pt& x,
                            int nang = 512, int nrad = 80);

// Classical Poisson integral on the unit ball (d=2) / linear interpolation of
// the endpoint data (d=1).
double classical_harmonic_solve(const Domain& ball, const std::function<double(const Pt&)>& gb,
                                const Pt& x, int n = 2048);

struct TestFunctionC2 {
    std::function<double(const Pt&)> value;
    std::function<double(const Pt&)> laplacian;
    std::function<Pt(const Pt&)> gradient;
};

// | int_Omega u (-lap phi) - int_Omega f phi + int_bdry g dphi/dn |
double very_weak_residual(const Domain& dom, const ScalarField& u, const ScalarField& f,
                          const std::function<double(const Pt&)>& g_boundary,
                          const TestFunctionC2& phi, int n = 256);

nlohmann::json to_json(const DirichletProblem& p);

}  // namespace stablepde
