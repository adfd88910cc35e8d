#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "charkin/charfn.hpp"
#include "charkin/quadrature.hpp"

using namespace charkin;

namespace {

DiscreteMeasure three_point_zero_mean() {
    DiscreteMeasure F;
    F.w = {0.5, 0.3, 0.2};
    F.v = {{1.0, 0.0, 0.2}, {-0.8, 0.3, -0.2}, {-1.3, -0.45, -0.2}};
    const Vec3 m = F.mean();
    for (Vec3& v : F.v) v -= m;
    return F;
}

double knorm_estimate(const CharEval& phi, double alpha, std::mt19937_64& rng,
                      const std::vector<Vec3>& extra) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double sup = 0.0;
    auto ratio = [&](const Vec3& xi) {
        const double n = xi.norm();
        return n < 1e-12 ? 0.0 : std::abs(phi(xi) - 1.0) / std::pow(n, alpha);
    };
    for (int it = 0; it < 4096; ++it) {
        const double scale = std::pow(10.0, -3.0 + 5.0 * (it / 4096.0));
        sup = std::max(sup, ratio(scale * Vec3{u(rng), u(rng), u(rng)}));
    }
    for (const Vec3& xi : extra) sup = std::max(sup, ratio(xi));
    return sup;
}

}  // namespace

TEST_CASE("discrete measure validation") {
    DiscreteMeasure F;
    F.w = {0.5, 0.6};
    F.v = {{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(F.validate(), std::invalid_argument);
    F.w = {0.5, 0.5};
    CHECK_NOTHROW(F.validate());
    F.w = {-0.25, 1.25};
    CHECK_THROWS_AS(F.validate(), std::invalid_argument);
}

TEST_CASE("from_measure: point masses") {
    DiscreteMeasure delta0;
    delta0.w = {1.0};
    delta0.v = {{0, 0, 0}};
    const CharGrid g0 = from_measure(delta0, 2.0, 17);
    CHECK(g0.at_origin().real() == doctest::Approx(1.0));
    for (const Complex& c : g0.data()) REQUIRE(std::abs(c - 1.0) < 1e-15);

    DiscreteMeasure dv;
    dv.w = {1.0};
    dv.v = {{0.5, -1.0, 0.25}};
    const CharGrid gv = from_measure(dv, 2.0, 17);
    for (int ix = 0; ix < 17; ++ix)
        for (int iy = 0; iy < 17; ++iy)
            for (int iz = 0; iz < 17; ++iz) {
                const Vec3 xi = gv.node(ix, iy, iz);
                REQUIRE(std::abs(std::abs(gv.at(ix, iy, iz)) - 1.0) < 1e-14);
                const double phase = -dv.v[0].dot(xi);
                REQUIRE(std::abs(gv.at(ix, iy, iz) - Complex{std::cos(phase), std::sin(phase)}) <
                        1e-14);
            }

    DiscreteMeasure sym;
    sym.w = {0.5, 0.5};
    sym.v = {{0.7, 0.1, -0.4}, {-0.7, -0.1, 0.4}};
    const CharGrid gs = from_measure(sym, 2.0, 17);
    for (int ix = 0; ix < 17; ++ix)
        for (int iy = 0; iy < 17; ++iy)
            for (int iz = 0; iz < 17; ++iz) {
                const Vec3 xi = gs.node(ix, iy, iz);
                REQUIRE(std::fabs(gs.at(ix, iy, iz).imag()) < 1e-15);
                REQUIRE(gs.at(ix, iy, iz).real() ==
                        doctest::Approx(std::cos(sym.v[0].dot(xi))).epsilon(1e-12));
            }
}

TEST_CASE("char grids are Hermitian and bounded by one") {
    std::mt19937_64 rng(555);
    const DiscreteMeasure F = random_discrete_measure(rng, 5, 1.5);
    const CharGrid g = from_measure(F, 3.0, 33);
    CHECK(g.hermitian_defect() == 0.0);
    CHECK(g.max_abs() <= 1.0 + 1e-12);

    // Trilinear interpolation is a convex combination of node values.
    std::uniform_real_distribution<double> u(-2.9, 2.9);
    for (int it = 0; it < 500; ++it) {
        const Vec3 xi{u(rng), u(rng), u(rng)};
        REQUIRE(std::abs(g.interp(xi)) <= 1.0 + 1e-12);
    }
    CHECK_THROWS_AS(g.interp(Vec3{3.5, 0, 0}), std::out_of_range);
}

TEST_CASE("levy boundary case equals the Gaussian") {
    const CharGrid levy = levy_char(2.0, 2.0, 21);
    const CharGrid gauss = gaussian_char(2.0, 2.0, 21);
    for (std::size_t i = 0; i < levy.size(); ++i)
        REQUIRE(std::abs(levy.data()[i] - gauss.data()[i]) < 1e-14);
}

TEST_CASE("knorm: constants, Gaussian limit, distance") {
    const CharGrid ones = CharGrid::sample([](const Vec3&) { return Complex{1.0, 0.0}; }, 1.0, 9);
    CHECK(knorm(ones, 1.5) == doctest::Approx(0.0));

    // sup (1 - e^{-x/2})/x is attained as x -> 0+ with value 1/2.
    const CharGrid fine = gaussian_char(1.0, 0.5, 65);
    const CharGrid coarse = gaussian_char(1.0, 0.5, 17);
    CHECK(knorm(fine, 2.0) == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(knorm(coarse, 2.0) < knorm(fine, 2.0));
    CHECK(knorm(fine, 2.0) < 0.5);

    CHECK(kdistance(fine, fine, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("levy norms: finite at alpha, divergent beyond") {
    const double alpha = 1.2;
    const CharGrid g1 = levy_char(alpha, 1.0, 33);
    const CharGrid g2 = levy_char(alpha, 1.0, 129);
    // At the order alpha the norm stays bounded under refinement.
    CHECK(knorm(g2, alpha) <= 1.05 * std::max(knorm(g1, alpha), 1.0));
    // Above alpha the grid sup grows as the grid refines toward 0.
    const double a2 = 1.8;
    CHECK(knorm(g2, a2) > 1.5 * knorm(g1, a2));
}

TEST_CASE("embedding: lower-order norms controlled by higher-order ones") {
    std::mt19937_64 rng(99);
    for (int it = 0; it < 20; ++it) {
        const DiscreteMeasure F = random_discrete_measure(rng, 4, 1.0);
        const CharGrid g = from_measure(F, 2.0, 33);
        const double alpha = 2.0, alpha0 = 0.7;  // alpha = 1 excluded elsewhere
        const double bound = std::max(knorm(g, alpha) * std::pow(g.R() * std::sqrt(3.0), alpha - alpha0),
                                      2.0);
        REQUIRE(knorm(g, alpha0) <= bound * (1.0 + 1e-12));
    }
}

TEST_CASE("positive definiteness: measures pass, a non-characteristic function fails") {
    std::mt19937_64 rng(2718);
    for (int seed = 0; seed < 20; ++seed) {
        const DiscreteMeasure F = random_discrete_measure(rng, 4, 2.0);
        const PsdVerdict v = check_positive_definite(make_discrete_eval(F), 16, seed, 4.0);
        REQUIRE(v.psd);
        REQUIRE(v.hermitian_defect < 1e-12);
    }

    const CharEval bogus = [](const Vec3& xi) { return Complex{1.0 + xi.norm2(), 0.0}; };
    const PsdVerdict v = check_positive_definite(bogus, 16, 3, 2.0);
    CHECK(!v.psd);

    // Convex combinations of characteristic functions stay positive definite.
    const CharEval a = make_gaussian_eval(1.0);
    DiscreteMeasure F;
    F.w = {0.5, 0.5};
    F.v = {{1, 0, 0}, {-1, 0, 0}};
    const CharEval b = make_discrete_eval(F);
    const CharEval mix = [a, b](const Vec3& xi) { return 0.3 * a(xi) + 0.7 * b(xi); };
    for (int seed = 0; seed < 10; ++seed) REQUIRE(check_positive_definite(mix, 16, seed, 3.0).psd);
}

TEST_CASE("positive-definite function inequalities") {
    const CharEval ones = [](const Vec3&) { return Complex{1.0, 0.0}; };
    const PdResiduals r0 = pd_inequality_residuals(ones, {1, 0, 0}, {0, 1, 0}, 1.5, 0.0);
    CHECK(r0.r1 == doctest::Approx(0.0));
    CHECK(r0.r2 == doctest::Approx(0.0));
    CHECK(r0.r3 == doctest::Approx(0.0));

    const CharEval gauss = make_gaussian_eval(1.0);
    const Vec3 xi{0.3, -0.2, 0.1};
    const PdResiduals req = pd_inequality_residuals(gauss, xi, xi, 2.0, 0.5);
    CHECK(req.r1 == doctest::Approx(0.0).epsilon(1e-12));

    std::mt19937_64 rng(321);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int rep = 0; rep < 10; ++rep) {
        const DiscreteMeasure F = random_discrete_measure(rng, 5, 1.5);
        const CharEval phi = make_discrete_eval(F);
        const double alpha = 1.5;
        for (int it = 0; it < 100; ++it) {
            const Vec3 a{u(rng), u(rng), u(rng)};
            const Vec3 b{u(rng), u(rng), u(rng)};
            const double norm_alpha = knorm_estimate(phi, alpha, rng, {a, b, a + b, a - b});
            const PdResiduals r = pd_inequality_residuals(phi, a, b, alpha, norm_alpha);
            REQUIRE(r.r1 >= -1e-10);
            REQUIRE(r.r2 >= -1e-10);
            REQUIRE(r.r3 >= -1e-10);
        }
    }
}

TEST_CASE("moments from char: point mass, Gaussian, mixtures") {
    DiscreteMeasure dv;
    dv.w = {1.0};
    dv.v = {{1.0, 2.0, 3.0}};
    const Moments m = moments_from_char(from_measure(dv, 0.5, 41));
    CHECK(m.mass == doctest::Approx(1.0));
    CHECK(m.momentum.x == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(m.momentum.y == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(m.momentum.z == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(m.energy == doctest::Approx(14.0).epsilon(1e-6));
    CHECK(m.energy_finite);

    const Moments mg = moments_from_char(gaussian_char(1.0, 0.5, 41));
    CHECK(mg.momentum.norm() < 1e-12);
    CHECK(mg.energy == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(mg.energy_finite);

    std::mt19937_64 rng(12);
    const DiscreteMeasure F = random_discrete_measure(rng, 6, 1.2);
    const Moments mf = moments_from_char(from_measure(F, 0.5, 41));
    const Vec3 pref = F.mean();
    CHECK((mf.momentum - pref).norm() <= 1e-6 * std::max(1.0, pref.norm()));
    CHECK(mf.energy == doctest::Approx(F.energy()).epsilon(1e-6));
}

TEST_CASE("moments: infinite-energy data are flagged") {
    const Moments ml = moments_from_char(levy_char(1.5, 0.5, 41));
    CHECK(!ml.energy_finite);
    CHECK_THROWS_AS(moments_from_char(gaussian_char(1.0, 1.0, 7)), std::invalid_argument);
}

TEST_CASE("fractional moments: calibrated point mass and Gaussian") {
    DiscreteMeasure unit;
    unit.w = {1.0};
    unit.v = {{0.0, 0.0, 1.0}};
    const double m1 = fractional_moment(radial_average(unit), 1.0, 1e-3);
    CHECK(m1 == doctest::Approx(1.0).epsilon(0.01));

    DiscreteMeasure origin;
    origin.w = {1.0};
    origin.v = {{0, 0, 0}};
    CHECK(fractional_moment(radial_average(origin), 1.0, 1e-3) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-10));

    // Gaussian alpha -> 2^- tracks the energy (= 3 for unit variance).
    const double oracle =
        4.0 * M_PI *
        adaptive_integrate(
            [](double r) {
                return std::pow(r, 2.0 + 1.99) * std::exp(-0.5 * r * r) /
                       std::pow(2.0 * M_PI, 1.5);
            },
            0.0, 12.0);
    const double mg = fractional_moment(radial_average_gaussian(1.0), 1.99, 1e-3);
    CHECK(mg == doctest::Approx(oracle).epsilon(0.05));
    CHECK(mg == doctest::Approx(3.0).epsilon(0.08));

    CHECK_THROWS_AS(fractional_moment(radial_average_gaussian(1.0), 2.0, 1e-3),
                    std::invalid_argument);
    CHECK_THROWS_AS(fractional_moment(radial_average_gaussian(1.0), 1.0, 1.5),
                    std::invalid_argument);
}

TEST_CASE("fractional moments from a grid stay close to the analytic backend") {
    // Interpolation bias near the origin limits how small delta can be for
    // grid-backed profiles; boundedness diagnostics use moderate delta.
    const CharGrid g = gaussian_char(1.0, 6.0, 97);
    const RadialAverage grid_avg = radial_average_grid(g, 12);
    const RadialAverage exact_avg = radial_average_gaussian(1.0);
    RadialAverage capped = exact_avg;
    capped.rho_cap = grid_avg.rho_cap;
    const double a = 1.3, delta = 0.2;
    const double from_grid = fractional_moment_integral(grid_avg, a, delta);
    const double from_exact = fractional_moment_integral(capped, a, delta);
    CHECK(from_grid == doctest::Approx(from_exact).epsilon(0.05));
}

TEST_CASE("every constructor yields a positive-definite evaluator on 20 seeds") {
    std::mt19937_64 rng(864);
    const DiscreteMeasure F = random_discrete_measure(rng, 5, 1.0);
    const CharEval evals[] = {make_discrete_eval(F), make_gaussian_eval(0.7), make_levy_eval(1.4)};
    for (const CharEval& phi : evals)
        for (int seed = 0; seed < 20; ++seed)
            REQUIRE(check_positive_definite(phi, 16, 1000 + seed, 3.0).psd);
}

TEST_CASE("three-point zero-mean helper is balanced") {
    const DiscreteMeasure F = three_point_zero_mean();
    F.validate();
    CHECK(F.mean().norm() < 1e-15);
}
