#include "stablepde/measures.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace stablepde {

namespace {
constexpr double kPi = 3.141592653589793238463;
}

void SpectralMeasure::validate() const {
    if (dim < 1 || dim > 3) throw std::invalid_argument("SpectralMeasure: dim must be 1..3");
    if (atoms.empty() && uniform_density <= 0.0)
        throw std::invalid_argument("SpectralMeasure: empty measure");
    if (uniform_density < 0.0)
        throw std::invalid_argument("SpectralMeasure: negative uniform_density");
    for (const auto& [dir, w] : atoms) {
        if (w <= 0.0) throw std::invalid_argument("SpectralMeasure: nonpositive atom weight");
        if (std::abs(norm(dir) - 1.0) > 1e-12)
            throw std::invalid_argument("SpectralMeasure: atom direction not on the unit sphere");
        for (int k = dim; k < 3; ++k)
            if (dir[k] != 0.0)
                throw std::invalid_argument("SpectralMeasure: direction has components beyond dim");
    }
}

double total_mass(const SpectralMeasure& mu) {
    double m = mu.uniform_density * sphere_area(mu.dim);
    for (const auto& [dir, w] : mu.atoms) m += w;
    return m;
}

double directional_moment(const SpectralMeasure& mu, double s, const Pt& omega) {
    double v = 0.0;
    for (const auto& [dir, w] : mu.atoms) v += w * std::pow(std::abs(dot(omega, dir)), 2.0 * s);
    if (mu.uniform_density > 0.0) v += mu.uniform_density * uniform_moment(mu.dim, s);
    return v;
}

double uniform_moment(int d, double s) {
    return 2.0 * std::pow(kPi, 0.5 * (d - 1)) * std::tgamma(s + 0.5) / std::tgamma(s + 0.5 * d);
}

namespace {

double min_on_angle_grid(const SpectralMeasure& mu, double s, int n, double& arg) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double phi = kPi * (i + 0.5) / n;  // |.|^{2s} has period pi
        double v = directional_moment(mu, s, pt(std::cos(phi), std::sin(phi)));
        if (v < best) {
            best = v;
            arg = phi;
        }
    }
    return best;
}

double golden_polish_1d(const std::function<double(double)>& f, double a, double b) {
    const double gr = 0.6180339887498949;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

double min_d3(const SpectralMeasure& mu, double s, int n, double& th_out, double& ph_out) {
    // Fibonacci lattice on the sphere.
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / n;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = ga * i;
        double v = directional_moment(mu, s, pt(r * std::cos(phi), r * std::sin(phi), z));
        if (v < best) {
            best = v;
            th_out = std::acos(z);
            ph_out = phi;
        }
    }
    return best;
}

}  // namespace

double ellipticity_constant(const SpectralMeasure& mu, double s, int resolution) {
    mu.validate();
    if (resolution < 8) throw std::invalid_argument("ellipticity_constant: resolution >= 8");
    double lambda;
    if (mu.dim == 1) {
        // |omega . theta| = 1 for every theta in S^0
        lambda = total_mass(mu);
    } else if (mu.dim == 2) {
        double arg = 0.0;
        double prev = min_on_angle_grid(mu, s, resolution, arg);
        int n = 2 * resolution;
        for (int ref = 0; ref < 8; ++ref, n *= 2) {
            double cur = min_on_angle_grid(mu, s, n, arg);
            if (std::abs(cur - prev) <= 1e-3 * std::max(1e-30, std::abs(cur)) && ref >= 1) {
                prev = cur;
                break;
            }
            prev = cur;
        }
        double w = kPi / n;
        lambda = golden_polish_1d(
            [&](double phi) { return directional_moment(mu, s, pt(std::cos(phi), std::sin(phi))); },
            arg - w, arg + w);
        lambda = std::min(lambda, prev);
    } else {
        double th = 0.0, ph = 0.0;
        double prev = min_d3(mu, s, resolution * resolution, th, ph);
        int n = 2 * resolution * resolution;
        for (int ref = 0; ref < 6; ++ref, n *= 2) {
            double cur = min_d3(mu, s, n, th, ph);
            if (std::abs(cur - prev) <= 1e-3 * std::max(1e-30, std::abs(cur)) && ref >= 1) {
                prev = cur;
                break;
            }
            prev = cur;
        }
        double w = 2.0 * kPi / std::sqrt(static_cast<double>(n));
        auto val = [&](double t, double p) {
            return directional_moment(mu, s, pt(std::sin(t) * std::cos(p), std::sin(t) * std::sin(p), std::cos(t)));
        };
        double cur = prev;
        for (int round = 0; round < 4; ++round) {
            cur = golden_polish_1d([&](double t) { return val(t, ph); }, th - w, th + w);
            cur = golden_polish_1d([&](double p) { return val(th, p); }, ph - w, ph + w);
            w *= 0.5;
        }
        lambda = std::min(cur, prev);
    }
    if (lambda < 1e-10)
        throw DegenerateMeasure("spectral measure is (numerically) supported on a hyperplane");
    return lambda;
}

SpectralMeasure symmetrize(const SpectralMeasure& mu) {
    SpectralMeasure out;
    out.dim = mu.dim;
    out.uniform_density = mu.uniform_density;
    for (const auto& [dir, w] : mu.atoms) {
        out.atoms.emplace_back(dir, 0.5 * w);
        out.atoms.emplace_back(scale(-1.0, dir), 0.5 * w);
    }
    // merge coincident directions
    std::vector<std::pair<Pt, double>> merged;
    for (const auto& [dir, w] : out.atoms) {
        bool found = false;
        for (auto& [d2, w2] : merged) {
            if (norm(sub(dir, d2)) < 1e-12) {
                w2 += w;
                found = true;
                break;
            }
        }
        if (!found) merged.emplace_back(dir, w);
    }
    std::sort(merged.begin(), merged.end(),
              [](const auto& a, const auto& b) { return lex_less(a.first, b.first); });
    out.atoms = std::move(merged);
    return out;
}

double frac_laplacian_density(int d, double s) {
    double C = std::pow(4.0, s) * std::tgamma(0.5 * d + s) /
               (std::pow(kPi, 0.5 * d) * std::abs(std::tgamma(-s)));
    return C / (2.0 * (1.0 - s));
}

SpectralMeasure frac_laplacian_measure(int d, double s) {
    if (d < 1 || d > 3) throw std::invalid_argument("frac_laplacian_measure: d must be 1..3");
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("frac_laplacian_measure: s in (0,1)");
    SpectralMeasure mu;
    mu.dim = d;
    double rho = frac_laplacian_density(d, s);
    if (d == 1) {
        mu.atoms.emplace_back(pt(1.0), rho);
        mu.atoms.emplace_back(pt(-1.0), rho);
    } else {
        mu.uniform_density = rho;
    }
    return mu;
}

void StableOperatorSpec::validate() const {
    if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("StableOperatorSpec: s in (0,1)");
    measure.validate();
}

StableOperatorSpec frac_laplacian_spec(int d, double s) {
    return {s, frac_laplacian_measure(d, s)};
}

namespace {

// int_0^inf (1-cos t)/t^{1+2s} dt by quadrature. Near zero the integrand is
// smooth after the series split; the oscillatory tail is integrated by parts
// four times so the remaining integral decays like t^{-5-2s}.
double one_minus_cos_moment(double s) {
    const GaussRule& gr = gauss_rule(12);
    double total = 0.0;
    // (eps, 1] on dyadic panels, series remainder below eps;
    // 1 - cos t = 2 sin^2(t/2) keeps full relative accuracy near zero
    const double eps = 1e-6;
    {
        double q = 1.0;
        while (q > eps) {
            double p = std::max(eps, 0.5 * q);
            double mid = 0.5 * (p + q), half = 0.5 * (q - p);
            for (int i = 0; i < 12; ++i) {
                double t = mid + half * gr.x[i];
                double st = std::sin(0.5 * t);
                total += half * gr.w[i] * 2.0 * st * st * std::pow(t, -1.0 - 2.0 * s);
            }
            q = p;
        }
        // 1-cos t = t^2/2 - t^4/24 + O(t^6)
        total += std::pow(eps, 2.0 - 2.0 * s) / (2.0 * (2.0 - 2.0 * s)) -
                 std::pow(eps, 4.0 - 2.0 * s) / (24.0 * (4.0 - 2.0 * s));
    }
    // [1, inf): int t^{-1-2s} - int cos t * t^{-1-2s}
    total += 1.0 / (2.0 * s);
    {
        // g = t^{-1-2s}; four integrations by parts at t=1, then numeric
        // integral of g'''' cos on [1,T] and a second-mean-value tail bound.
        double a = 1.0 + 2.0 * s;
        double g1 = 1.0, dg1 = -a, d2g1 = a * (a + 1.0), d3g1 = -a * (a + 1.0) * (a + 2.0);
        double c4 = a * (a + 1.0) * (a + 2.0) * (a + 3.0);
        double osc = -g1 * std::sin(1.0) - dg1 * std::cos(1.0) + d2g1 * std::sin(1.0) +
                     d3g1 * std::cos(1.0);
        const double T = 600.0;
        double p = 1.0;
        while (p < T) {
            double q = std::min(T, p + 0.5);
            double mid = 0.5 * (p + q), half = 0.5 * (q - p);
            for (int i = 0; i < 12; ++i) {
                double t = mid + half * gr.x[i];
                osc += half * gr.w[i] * c4 * std::pow(t, -5.0 - 2.0 * s) * std::cos(t);
            }
            p = q;
        }
        total -= osc;
    }
    return total;
}

}  // namespace

double symbol_constant(double s) {
    static std::map<double, double> cache;
    static std::mutex mtx;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(s);
        if (it != cache.end()) return it->second;
    }
    double v = 2.0 * (1.0 - s) * one_minus_cos_moment(s);
    std::lock_guard<std::mutex> lock(mtx);
    cache.emplace(s, v);
    return v;
}

double fourier_symbol(const StableOperatorSpec& spec, const Pt& xi) {
    double r = norm(xi);
    if (r == 0.0) return 0.0;
    Pt omega = scale(1.0 / r, xi);
    return symbol_constant(spec.s) * directional_moment(spec.measure, spec.s, omega) *
           std::pow(r, 2.0 * spec.s);
}

nlohmann::json to_json(const SpectralMeasure& mu) {
    nlohmann::json j;
    j["d"] = mu.dim;
    j["atoms"] = nlohmann::json::array();
    for (const auto& [dir, w] : mu.atoms) {
        std::vector<double> v(dir.begin(), dir.begin() + mu.dim);
        j["atoms"].push_back(nlohmann::json::array({v, w}));
    }
    j["uniform_density"] = mu.uniform_density;
    return j;
}

SpectralMeasure measure_from_json(const nlohmann::json& j) {
    SpectralMeasure mu;
    mu.dim = j.at("d").get<int>();
    mu.uniform_density = j.value("uniform_density", 0.0);
    if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
            auto v = a.at(0).get<std::vector<double>>();
            Pt dir = {0, 0, 0};
            for (std::size_t k = 0; k < v.size() && k < 3; ++k) dir[k] = v[k];
            mu.atoms.emplace_back(dir, a.at(1).get<double>());
        }
    }
    mu.validate();  // unnormalized directions are rejected, not fixed up
    return mu;
}

nlohmann::json to_json(const StableOperatorSpec& spec) {
    nlohmann::json j;
    j["s"] = spec.s;
    j["measure"] = to_json(spec.measure);
    return j;
}

StableOperatorSpec spec_from_json(const nlohmann::json& j) {
    StableOperatorSpec spec;
    if (j.contains("frac_laplacian")) {
        spec = frac_laplacian_spec(j.at("frac_laplacian").get<int>(), j.at("s").get<double>());
    } else {
        spec.s = j.at("s").get<double>();
        spec.measure = measure_from_json(j.at("measure"));
    }
    spec.validate();
    return spec;
}

}  // namespace stablepde
