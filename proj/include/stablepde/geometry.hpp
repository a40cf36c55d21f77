#pragma once

#include "stablepde/common.hpp"

#include "json.hpp"

namespace stablepde {

// Computational domains with exact distance functions and exact ray chords.
// Catalogue: Interval(a,b) in d=1; Ball, Box and LShape (outer box minus a
// closed axis-aligned quadrant box) in d=2.
class Domain {
  public:
    enum class Kind { Interval, Ball, Box, LShape };

    static Domain interval(double a, double b);
    static Domain ball(Pt center, double radius, int dim = 2);
    static Domain box(Pt lo, Pt hi, int dim = 2);
    static Domain lshape(Pt outer_lo, Pt outer_hi, Pt notch_lo, Pt notch_hi);
    // The section 3 counterexample domain (-2,2)^2 minus [0,1]^2.
    static Domain lshape_canonical();

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool contains(const Pt& x) const;  // open interior

    struct DistResult {
        bool inside;
        double d;  // exact Euclidean distance to the boundary
        Pt z;      // nearest boundary point (lexicographic tie-break)
    };
    DistResult dist_to_boundary(const Pt& x) const;
    double boundary_distance(const Pt& x) const { return dist_to_boundary(x).d; }

    // Maximal open r-intervals with x + r*dir in the domain, r over all reals,
    // sorted; dir is a unit vector. Closed forms per variant, no sampling.
    using Chord = std::pair<double, double>;
    std::vector<Chord> ray_chords(const Pt& x, const Pt& dir) const;
    // Complement chords of (lo,hi) minus the domain chords.
    std::vector<Chord> complement_chords(const Pt& x, const Pt& dir, double lo, double hi) const;

    // Boundary quadrature: (point, surface weight), sum of weights = |bdry|.
    std::vector<std::pair<Pt, double>> boundary_nodes(int n) const;
    double boundary_measure() const;

    Pt bbox_lo() const { return bb_lo_; }
    Pt bbox_hi() const { return bb_hi_; }
    double diameter() const;
    double volume() const;

    // parameters
    Pt lo() const { return lo_; }
    Pt hi() const { return hi_; }
    Pt center() const { return center_; }
    double radius() const { return radius_; }
    Pt notch_lo() const { return nlo_; }
    Pt notch_hi() const { return nhi_; }

  private:
    Kind kind_ = Kind::Interval;
    int dim_ = 1;
    Pt lo_{}, hi_{};      // interval/box bounds; lshape outer box
    Pt center_{};         // ball
    double radius_ = 1.0;
    Pt nlo_{}, nhi_{};    // lshape notch
    Pt bb_lo_{}, bb_hi_{};
};

// Whitney ball covering: 2 r_B <= dist(x_B, complement) <= 4 r_B for every
// ball, bounded overlap of the 7/4-dilates.
struct WhitneyCover {
    struct Ball {
        Pt center;
        double radius;
    };
    std::vector<Ball> balls;
    double dilation = 1.75;
    int overlap_bound = 0;  // measured N at 1e4 seeded random points
};

WhitneyCover whitney_cover(const Domain& dom, double min_radius);

nlohmann::json to_json(const Domain& dom);
Domain domain_from_json(const nlohmann::json& j);

}  // namespace stablepde
