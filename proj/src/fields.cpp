#include "stablepde/fields.hpp"

namespace stablepde {

ScalarField constant_field(double c) {
    ScalarField f;
    f.eval = [c](const Pt&) { return c; };
    f.regularity = Regularity::Smooth;
    f.decay = Decay::Bounded;
    f.far_value = c;
    f.far_bound = [](double) { return 0.0; };
    return f;
}

ScalarField gaussian(int d, const Pt& c, double sig, double amp) {
    ScalarField f;
    double s2 = 2.0 * sig * sig;
    f.eval = [c, s2, amp](const Pt& x) {
        Pt w = sub(x, c);
        return amp * std::exp(-dot(w, w) / s2);
    };
    f.regularity = Regularity::Smooth;
    f.decay = Decay::VanishingAtInfty;
    double cn = norm(c), aamp = std::abs(amp);
    f.far_bound = [cn, s2, aamp](double R) {
        double t = std::max(0.0, R - cn);
        return aamp * std::exp(-t * t / s2);
    };
    (void)d;
    return f;
}

ScalarField gaussian_mixture(int d, int k, Rng& rng, double center_range) {
    struct Term {
        Pt c;
        double s2, a;
    };
    auto terms = std::make_shared<std::vector<Term>>();
    double max_cn = 0.0, sum_a = 0.0, min_s2 = 1e30;
    for (int i = 0; i < k; ++i) {
        Term t;
        t.c = {0, 0, 0};
        for (int q = 0; q < d; ++q) t.c[q] = rng.uniform(-center_range, center_range);
        double sig = rng.uniform(0.3, 0.8);
        t.s2 = 2.0 * sig * sig;
        t.a = rng.uniform(-1.0, 1.0);
        max_cn = std::max(max_cn, norm(t.c));
        sum_a += std::abs(t.a);
        min_s2 = std::min(min_s2, t.s2);
        terms->push_back(t);
    }
    ScalarField f;
    f.eval = [terms](const Pt& x) {
        double v = 0.0;
        for (const auto& t : *terms) {
            Pt w = sub(x, t.c);
            v += t.a * std::exp(-dot(w, w) / t.s2);
        }
        return v;
    };
    f.regularity = Regularity::Smooth;
    f.decay = Decay::VanishingAtInfty;
    f.far_bound = [max_cn, sum_a, min_s2](double R) {
        double t = std::max(0.0, R - max_cn);
        return sum_a * std::exp(-t * t / min_s2);
    };
    return f;
}

ScalarField bump(int d, const Pt& c, double R, double amp) {
    ScalarField f;
    f.eval = [c, R, amp](const Pt& x) {
        Pt w = sub(x, c);
        double q = dot(w, w) / (R * R);
        if (q >= 1.0) return 0.0;
        return amp * std::exp(1.0 - 1.0 / (1.0 - q));
    };
    f.regularity = Regularity::Smooth;
    f.decay = Decay::Compact;
    f.support_radius = norm(c) + R;
    (void)d;
    return f;
}

ScalarField cos_wave(int d, const Pt& xi, const Pt& x0) {
    ScalarField f;
    f.eval = [xi, x0](const Pt& x) { return std::cos(dot(xi, sub(x, x0))); };
    f.regularity = Regularity::Smooth;
    f.decay = Decay::Bounded;
    f.far_value = 0.0;
    f.far_bound = [](double) { return 1.0; };  // bounded, no decay
    (void)d;
    return f;
}

ScalarField ball_power_profile(int d, double R, double s) {
    ScalarField f;
    f.eval = [R, s](const Pt& x) {
        double q = R * R - dot(x, x);
        return q > 0.0 ? std::pow(q, s) : 0.0;
    };
    f.regularity = Regularity::C2NearX;  // C^2 in the open ball, C^s at the boundary
    f.decay = Decay::Compact;
    f.support_radius = R;
    (void)d;
    return f;
}

ScalarField dist_power(const Domain& dom, double alpha) {
    ScalarField f;
    f.eval = [dom, alpha](const Pt& x) { return std::pow(dom.dist_to_boundary(x).d, alpha); };
    f.regularity = Regularity::C2NearX;
    f.decay = Decay::Bounded;
    double diam = dom.diameter();
    f.far_bound = [alpha, diam](double R) { return std::pow(R + diam, alpha); };
    return f;
}

ScalarField collar_power(const Domain& dom, double alpha) {
    ScalarField f;
    f.eval = [dom, alpha](const Pt& x) {
        auto dr = dom.dist_to_boundary(x);
        if (dr.inside || dr.d >= 1.0 || dr.d <= 0.0) return 0.0;
        return std::pow(dr.d, alpha);
    };
    f.regularity = Regularity::C0;
    f.decay = Decay::Compact;
    Pt lo = dom.bbox_lo(), hi = dom.bbox_hi();
    double far = 0.0;
    for (int k = 0; k < dom.dim(); ++k)
        far = std::max({far, std::abs(lo[k]), std::abs(hi[k])});
    f.support_radius = far + 1.0;
    return f;
}

ScalarField scaled_argument(const ScalarField& u, double lambda) {
    ScalarField f = u;
    auto base = u.eval;
    f.eval = [base, lambda](const Pt& x) { return base(scale(lambda, x)); };
    if (u.support_radius >= 0.0) f.support_radius = u.support_radius / lambda;
    if (u.far_bound) {
        auto fb = u.far_bound;
        f.far_bound = [fb, lambda](double R) { return fb(lambda * R); };
    }
    return f;
}

ScalarField shifted(const ScalarField& u, const Pt& h) {
    ScalarField f = u;
    auto base = u.eval;
    f.eval = [base, h](const Pt& x) { return base(sub(x, h)); };
    if (u.support_radius >= 0.0) f.support_radius = u.support_radius + norm(h);
    if (u.far_bound) {
        auto fb = u.far_bound;
        double hn = norm(h);
        f.far_bound = [fb, hn](double R) { return fb(std::max(0.0, R - hn)); };
    }
    return f;
}

ScalarField squared(const ScalarField& u) {
    ScalarField f = u;
    auto base = u.eval;
    f.eval = [base](const Pt& x) {
        double v = base(x);
        return v * v;
    };
    f.far_value = u.far_value * u.far_value;
    if (u.far_bound) {
        auto fb = u.far_bound;
        double fv = u.far_value;
        f.far_bound = [fb, fv](double R) {
            double e = fb(R);
            return e * (e + 2.0 * std::abs(fv));
        };
    }
    return f;
}

ScalarField linear_combination(double a, const ScalarField& u, double b, const ScalarField& v) {
    ScalarField f;
    auto eu = u.eval, ev = v.eval;
    f.eval = [a, b, eu, ev](const Pt& x) { return a * eu(x) + b * ev(x); };
    f.regularity = std::min(u.regularity, v.regularity);
    if (u.support_radius >= 0.0 && v.support_radius >= 0.0) {
        f.decay = Decay::Compact;
        f.support_radius = std::max(u.support_radius, v.support_radius);
    } else {
        f.decay = std::max(u.decay, v.decay);
        f.support_radius = -1.0;
    }
    f.far_value = a * u.far_value + b * v.far_value;
    if ((u.far_bound || u.support_radius >= 0.0) && (v.far_bound || v.support_radius >= 0.0)) {
        auto fu = u.far_bound, fv = v.far_bound;
        double su = u.support_radius, sv = v.support_radius;
        f.far_bound = [a, b, fu, fv, su, sv](double R) {
            double eu2 = fu ? fu(R) : (R >= su ? 0.0 : 1e300);
            double ev2 = fv ? fv(R) : (R >= sv ? 0.0 : 1e300);
            return std::abs(a) * eu2 + std::abs(b) * ev2;
        };
    }
    return f;
}

}  // namespace stablepde
