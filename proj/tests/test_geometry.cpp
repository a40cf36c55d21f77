#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "stablepde/geometry.hpp"

#include <cmath>

using namespace stablepde;

namespace {
constexpr double kPi = 3.141592653589793238463;

// brute-force distance oracle: min over sampled boundary points
double brute_dist(const Domain& dom, const Pt& x, int n = 100000) {
    double best = 1e300;
    for (const auto& [z, w] : dom.boundary_nodes(n)) best = std::min(best, norm(sub(x, z)));
    return best;
}

std::vector<Domain> catalogue() {
    return {Domain::interval(-1, 1), Domain::ball(pt(0.2, -0.1), 1.3),
            Domain::box(pt(-1, -0.5), pt(0.7, 1.1)), Domain::lshape_canonical()};
}
}  // namespace

TEST_CASE("dist_to_boundary examples") {
    auto ball = Domain::ball(pt(0, 0), 1.0);
    auto r = ball.dist_to_boundary(pt(0, 0));
    CHECK(r.inside);
    CHECK(r.d == doctest::Approx(1.0));
    CHECK(r.z[0] == doctest::Approx(-1.0));  // lexicographic tie-break
    CHECK(r.z[1] == doctest::Approx(0.0));

    auto iv = Domain::interval(-1, 1);
    auto r2 = iv.dist_to_boundary(pt(1.5));
    CHECK_FALSE(r2.inside);
    CHECK(r2.d == doctest::Approx(0.5));
    CHECK(r2.z[0] == doctest::Approx(1.0));

    // x = (-t,-t): nearest boundary point is the notch corner (0,0), d = t*sqrt(2)
    auto L = Domain::lshape_canonical();
    double t = 0.25;
    auto r3 = L.dist_to_boundary(pt(-t, -t));
    CHECK(r3.inside);
    CHECK(r3.d == doctest::Approx(t * std::sqrt(2.0)).epsilon(1e-12));
    CHECK(r3.z[0] == doctest::Approx(0.0));
    CHECK(r3.z[1] == doctest::Approx(0.0));
}

TEST_CASE("dist_to_boundary agrees with the brute-force boundary oracle") {
    Rng rng(42);
    for (const auto& dom : catalogue()) {
        Pt lo = dom.bbox_lo(), hi = dom.bbox_hi();
        for (int i = 0; i < 100; ++i) {
            Pt x = {0, 0, 0};
            for (int k = 0; k < dom.dim(); ++k)
                x[k] = rng.uniform(lo[k] - 0.5, hi[k] + 0.5);
            auto r = dom.dist_to_boundary(x);
            if (dom.kind() == Domain::Kind::Interval) {
                // boundary is two points; oracle trivial
                double want = std::min(std::abs(x[0] - lo[0]), std::abs(x[0] - hi[0]));
                CHECK(r.d == doctest::Approx(want).epsilon(1e-12));
            } else {
                CHECK(r.d == doctest::Approx(brute_dist(dom, x)).epsilon(0.0).scale(1.0).epsilon(0.0001));
                CHECK(std::abs(r.d - brute_dist(dom, x)) < 1e-3);
            }
            // the reported nearest point lies on the boundary and attains d
            auto rz = dom.dist_to_boundary(r.z);
            CHECK(std::abs(rz.d) < 1e-12);
            CHECK(norm(sub(r.z, x)) == doctest::Approx(r.d).epsilon(1e-12));
        }
    }
}

TEST_CASE("membership boundary characterization") {
    auto L = Domain::lshape_canonical();
    CHECK(L.contains(pt(-1, -1)));
    CHECK(L.contains(pt(1.5, 0.5)));
    CHECK_FALSE(L.contains(pt(0.5, 0.5)));   // in the notch
    CHECK_FALSE(L.contains(pt(0.0, 0.5)));   // notch is closed
    CHECK_FALSE(L.contains(pt(2.5, 0.0)));
    CHECK(L.dist_to_boundary(pt(1.0, 0.5)).d == doctest::Approx(0.0));
}

TEST_CASE("ray chords: endpoints on the boundary, interiors inside") {
    Rng rng(7);
    for (const auto& dom : catalogue()) {
        Pt lo = dom.bbox_lo(), hi = dom.bbox_hi();
        int found = 0;
        while (found < 60) {
            Pt x = {0, 0, 0};
            for (int k = 0; k < dom.dim(); ++k) x[k] = rng.uniform(lo[k] - 1.0, hi[k] + 1.0);
            Pt d = {0, 0, 0};
            if (dom.dim() == 1) {
                d[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
            } else {
                double phi = rng.uniform(0, 2 * kPi);
                d = pt(std::cos(phi), std::sin(phi));
            }
            auto chords = dom.ray_chords(x, d);
            if (chords.empty()) continue;
            ++found;
            for (const auto& [a, b] : chords) {
                CHECK(a < b);
                CHECK(dom.dist_to_boundary(axpy(a, d, x)).d < 1e-9);
                CHECK(dom.dist_to_boundary(axpy(b, d, x)).d < 1e-9);
                CHECK(dom.contains(axpy(0.5 * (a + b), d, x)));
                for (double t : {0.1, 0.35, 0.8})
                    CHECK(dom.contains(axpy(a + t * (b - a), d, x)));
            }
            // complement chords tile the remainder
            auto comp = dom.complement_chords(x, d, -5.0, 5.0);
            for (const auto& [a, b] : comp) {
                Pt mid = axpy(0.5 * (a + b), d, x);
                CHECK_FALSE(dom.contains(mid));
            }
        }
    }
}

TEST_CASE("boundary_nodes weights") {
    auto ball = Domain::ball(pt(0, 0), 1.0);
    double sum = 0.0;
    for (const auto& [z, w] : ball.boundary_nodes(360)) sum += w;
    CHECK(sum == doctest::Approx(2 * kPi).epsilon(1e-10));

    auto iv = Domain::interval(-1, 1);
    auto bn = iv.boundary_nodes(8);
    REQUIRE(bn.size() == 2);
    CHECK(bn[0].second == doctest::Approx(1.0));
    CHECK(bn[1].second == doctest::Approx(1.0));

    auto box = Domain::box(pt(0, 0), pt(1, 1));
    sum = 0.0;
    for (const auto& [z, w] : box.boundary_nodes(400)) sum += w;
    CHECK(sum == doctest::Approx(4.0).epsilon(1e-10));

    auto L = Domain::lshape_canonical();
    sum = 0.0;
    for (const auto& [z, w] : L.boundary_nodes(500)) sum += w;
    CHECK(sum == doctest::Approx(20.0).epsilon(1e-10));
}

TEST_CASE("whitney cover: radius comparability is a hard invariant") {
    for (const auto& dom : {Domain::interval(0, 1), Domain::ball(pt(0, 0), 1.0),
                            Domain::box(pt(0, 0), pt(1, 1))}) {
        auto cover = whitney_cover(dom, 1.0 / 64);
        REQUIRE(!cover.balls.empty());
        for (const auto& b : cover.balls) {
            double d = dom.dist_to_boundary(b.center).d;
            CHECK(2.0 * b.radius <= d * (1 + 1e-12));
            CHECK(d <= 4.0 * b.radius * (1 + 1e-12));
        }
    }
}

TEST_CASE("whitney cover: covers the d_x > 1e-4 test grid") {
    auto dom = Domain::ball(pt(0, 0), 1.0);
    auto cover = whitney_cover(dom, 2e-5);
    // test grid
    int n = 256;
    int misses = 0, tested = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Pt x = pt(-1.0 + 2.0 * (i + 0.5) / n, -1.0 + 2.0 * (j + 0.5) / n);
            auto dr = dom.dist_to_boundary(x);
            if (!dr.inside || dr.d <= 1e-4) continue;
            ++tested;
            bool covered = false;
            for (const auto& b : cover.balls) {
                if (norm(sub(x, b.center)) < b.radius) {
                    covered = true;
                    break;
                }
            }
            if (!covered) ++misses;
        }
    }
    CHECK(tested > 1000);
    CHECK(misses == 0);
}

TEST_CASE("whitney cover: overlap of dilated balls stays small") {
    auto box = Domain::box(pt(0, 0), pt(1, 1));
    auto cover = whitney_cover(box, 1.0 / 256);
    CHECK(cover.overlap_bound <= 20);

    // exhaustive count on a 512^2 grid
    int n = 512, maxcnt = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Pt x = pt((i + 0.5) / n, (j + 0.5) / n);
            if (!box.contains(x)) continue;
            int cnt = 0;
            for (const auto& b : cover.balls)
                if (norm(sub(x, b.center)) < cover.dilation * b.radius) ++cnt;
            maxcnt = std::max(maxcnt, cnt);
        }
    }
    CHECK(maxcnt <= 20);

    auto ball = Domain::ball(pt(0, 0), 1.0);
    CHECK(whitney_cover(ball, 1.0 / 256).overlap_bound <= 20);
}

TEST_CASE("exterior collar membership is consistent with dist_to_boundary") {
    Rng rng(3);
    auto dom = Domain::ball(pt(0, 0), 1.0);
    for (int i = 0; i < 200; ++i) {
        Pt x = pt(rng.uniform(-3, 3), rng.uniform(-3, 3));
        auto dr = dom.dist_to_boundary(x);
        bool in_collar = !dr.inside && dr.d > 0 && dr.d < 1.0;
        double r = norm(x);
        CHECK(in_collar == (r > 1.0 && r < 2.0));
    }
}

TEST_CASE("domain JSON round trip") {
    for (const auto& dom : catalogue()) {
        auto j = to_json(dom);
        auto back = domain_from_json(j);
        CHECK(back.kind() == dom.kind());
        CHECK(back.dim() == dom.dim());
        Rng rng(1);
        for (int i = 0; i < 50; ++i) {
            Pt x = {0, 0, 0};
            for (int k = 0; k < dom.dim(); ++k)
                x[k] = rng.uniform(dom.bbox_lo()[k] - 1, dom.bbox_hi()[k] + 1);
            CHECK(back.contains(x) == dom.contains(x));
        }
    }
}
