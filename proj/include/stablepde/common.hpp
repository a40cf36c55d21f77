#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablepde {

// Point in R^d, d <= 3; unused components stay zero.
using Pt = std::array<double, 3>;

inline Pt pt(double x, double y = 0.0, double z = 0.0) { return {x, y, z}; }

inline double dot(const Pt& a, const Pt& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Pt& a) { return std::sqrt(dot(a, a)); }
inline Pt axpy(double t, const Pt& d, const Pt& x) {
    return {x[0] + t * d[0], x[1] + t * d[1], x[2] + t * d[2]};
}
inline Pt sub(const Pt& a, const Pt& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Pt scale(double t, const Pt& a) { return {t * a[0], t * a[1], t * a[2]}; }
inline bool lex_less(const Pt& a, const Pt& b) {
    for (int k = 0; k < 3; ++k) {
        if (a[k] < b[k] - 1e-15) return true;
        if (a[k] > b[k] + 1e-15) return false;
    }
    return false;
}

// Value with a refinement-based error estimate. The harness treats the
// error as a one-sigma tolerance.
struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

inline Estimate combine(const Estimate& a, const Estimate& b, double fa = 1.0, double fb = 1.0) {
    return {fa * a.value + fb * b.value, std::abs(fa) * a.error + std::abs(fb) * b.error};
}

// Deterministic RNG (splitmix64 core). Used instead of std:: distributions so
// streams are identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal() {
        // Box-Muller, always consumes two uniforms.
        double u1 = uniform(), u2 = uniform();
        u1 = std::max(u1, 1e-300);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

  private:
    std::uint64_t state_;
};

// Static-partition parallel map: slot i is written by exactly one worker, so
// results are independent of the thread count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Gauss-Legendre rule on [-1,1]; cached per order.
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_rule(int order);

// Exact moments of the radial kernel r^{-1-2s} over [p,q], 0 < p < q:
//   kmom0 = int r^{-1-2s} dr, kmom1 = int r^{-2s} dr.
inline double kmom0(double p, double q, double s) {
    return (std::pow(p, -2.0 * s) - std::pow(q, -2.0 * s)) / (2.0 * s);
}
inline double kmom0_tail(double p, double s) { return std::pow(p, -2.0 * s) / (2.0 * s); }
inline double kmom1(double p, double q, double s) {
    if (std::abs(s - 0.5) < 1e-13) return std::log(q / p);
    return (std::pow(q, 1.0 - 2.0 * s) - std::pow(p, 1.0 - 2.0 * s)) / (1.0 - 2.0 * s);
}
// Weights of the linear-profile integral: int_p^q v(r) r^{-1-2s} dr with v
// linear, v(p)=vp, v(q)=vq, equals wp*vp + wq*vq.
inline void linear_kernel_weights(double p, double q, double s, double& wp, double& wq) {
    double i0 = kmom0(p, q, s), i1 = kmom1(p, q, s);
    wq = (i1 - p * i0) / (q - p);
    wp = i0 - wq;
}

double sphere_area(int d);  // |S^{d-1}|: 2, 2*pi, 4*pi

// Fixed formatting used by every CSV/report writer (byte-stable reruns).
std::string fmt(double v);

struct DegenerateMeasure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroFrequency : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InsufficientRegularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TailUnknown : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PointInsideDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SupportViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GridTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct KernelNotNormalized : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stablepde
