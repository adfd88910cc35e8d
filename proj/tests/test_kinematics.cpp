#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "charkin/kernels.hpp"
#include "charkin/kinematics.hpp"

using namespace charkin;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    while (v.norm() < 1e-6) v = Vec3{g(rng), g(rng), g(rng)};
    return v.normalized();
}

Vec3 random_vec(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

double pair_energy(const VelocityPair& p) { return p.v.norm2() + p.v_star.norm2(); }

}  // namespace

TEST_CASE("restitution parameters") {
    const RestitutionParams rp(0.5);
    CHECK(rp.a_plus == doctest::Approx(0.75));
    CHECK(rp.a_minus == doctest::Approx(0.25));
    CHECK(rp.a_plus + rp.a_minus == doctest::Approx(1.0));
    CHECK(rp.a_plus - rp.a_minus == doctest::Approx(rp.e));
    CHECK_THROWS_AS(RestitutionParams(0.0), std::invalid_argument);
    CHECK_THROWS_AS(RestitutionParams(1.5), std::invalid_argument);
}

TEST_CASE("post_collision: coincident velocities are a fixed point") {
    const RestitutionParams rp(0.7);
    const VelocityPair pair{{1, 2, 3}, {1, 2, 3}};
    const auto out = post_collision(pair, SphereDirection({0, 1, 0}), rp);
    CHECK((out.v - pair.v).norm() == 0.0);
    CHECK((out.v_star - pair.v_star).norm() == 0.0);
}

TEST_CASE("post_collision: elastic grazing identity") {
    const RestitutionParams rp(1.0);
    const VelocityPair pair{{2, 1, 0}, {-1, 0.5, 0.25}};
    const Vec3 u = pair.v - pair.v_star;
    const auto out = post_collision(pair, SphereDirection(u.normalized()), rp);
    CHECK((out.v - pair.v).norm() < 1e-14);
    CHECK((out.v_star - pair.v_star).norm() < 1e-14);
}

TEST_CASE("post_collision: head-on example, e = 0.5") {
    const RestitutionParams rp(0.5);
    const VelocityPair pair{{1, 0, 0}, {-1, 0, 0}};
    const auto out = post_collision(pair, SphereDirection({0, 1, 0}), rp);
    // (v+v*)/2 = 0, (a-/2)(v-v*) = (0.25,0,0), (a+/2)|v-v*|sigma = (0,0.75,0)
    CHECK(out.v.x == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.v.y == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(out.v.z == doctest::Approx(0.0));
    CHECK(out.v_star.x == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(out.v_star.y == doctest::Approx(-0.75).epsilon(1e-14));
    CHECK(pair_energy(out) <= pair_energy(pair));
}

TEST_CASE("momentum conservation and energy dissipation over random samples") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> edist(0.05, 1.0);
    for (int it = 0; it < 10000; ++it) {
        const RestitutionParams rp(edist(rng));
        const VelocityPair pair{random_vec(rng, 3.0), random_vec(rng, 3.0)};
        const SphereDirection sigma(random_unit(rng));
        const auto out = post_collision(pair, sigma, rp);

        const Vec3 ptotal = pair.v + pair.v_star;
        const Vec3 drift = out.v + out.v_star - ptotal;
        REQUIRE(drift.norm() <= 1e-12 * std::max(1.0, ptotal.norm()));

        const double scale = std::max(1.0, pair_energy(pair));
        REQUIRE(pair_energy(out) - pair_energy(pair) <= 1e-12 * scale);
    }
}

TEST_CASE("elastic collisions conserve energy") {
    std::mt19937_64 rng(777);
    const RestitutionParams rp(1.0);
    for (int it = 0; it < 2000; ++it) {
        const VelocityPair pair{random_vec(rng, 2.0), random_vec(rng, 2.0)};
        const auto out = post_collision(pair, SphereDirection(random_unit(rng)), rp);
        const double scale = std::max(1.0, pair_energy(pair));
        REQUIRE(std::fabs(pair_energy(out) - pair_energy(pair)) <= 1e-12 * scale);
    }
}

TEST_CASE("pre_collision: elastic case reduces to post_collision") {
    std::mt19937_64 rng(99);
    const RestitutionParams rp(1.0);
    for (int it = 0; it < 200; ++it) {
        const VelocityPair pair{random_vec(rng, 2.0), random_vec(rng, 2.0)};
        const SphereDirection sigma(random_unit(rng));
        const auto pre = pre_collision(pair, sigma, rp);
        const auto post = post_collision(pair, sigma, rp);
        REQUIRE((pre.v - post.v).norm() < 1e-13);
        REQUIRE((pre.v_star - post.v_star).norm() < 1e-13);
    }
}

TEST_CASE("pre_collision: coincident velocities, momentum, energy growth") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> edist(0.05, 0.999);

    const RestitutionParams rp(0.5);
    const VelocityPair same{{0.3, -1, 2}, {0.3, -1, 2}};
    const auto fixed = pre_collision(same, SphereDirection({1, 0, 0}), rp);
    CHECK((fixed.v - same.v).norm() == 0.0);

    int energy_drops = 0;
    for (int it = 0; it < 10000; ++it) {
        const RestitutionParams rpe(edist(rng));
        const VelocityPair pair{random_vec(rng, 2.0), random_vec(rng, 2.0)};
        const auto pre = pre_collision(pair, SphereDirection(random_unit(rng)), rpe);
        const Vec3 drift = pre.v + pre.v_star - pair.v - pair.v_star;
        REQUIRE(drift.norm() <= 1e-12 * std::max(1.0, (pair.v + pair.v_star).norm()));
        if (pair_energy(pre) < pair_energy(pair) - 1e-12 * std::max(1.0, pair_energy(pair)))
            ++energy_drops;
    }
    // Pre-collisional states carry at least the post-collisional energy.
    CHECK(energy_drops == 0);
}

TEST_CASE("pre/post composition with the same sigma is not the identity map") {
    // Inelastic collisions are not revertible with the same direction; the
    // measured gap is recorded here as the documented finding.
    const RestitutionParams rp(0.5);
    const VelocityPair pair{{1, 0, 0}, {-1, 0, 0}};
    const SphereDirection sigma({0, 1, 0});
    const auto round1 = post_collision(pre_collision(pair, sigma, rp), sigma, rp);
    const auto round2 = pre_collision(post_collision(pair, sigma, rp), sigma, rp);
    CHECK((round1.v - pair.v).norm() > 0.1);
    CHECK((round2.v - pair.v).norm() > 0.1);
    // Momentum is still conserved through either composition.
    CHECK((round1.v + round1.v_star - pair.v - pair.v_star).norm() < 1e-12);
    CHECK((round2.v + round2.v_star - pair.v - pair.v_star).norm() < 1e-12);
}

TEST_CASE("pre_collision rejects e = 0 by construction") {
    CHECK_THROWS_AS(RestitutionParams(0.0), std::invalid_argument);
}

TEST_CASE("omega form: tangential impact direction is the identity") {
    const RestitutionParams rp(0.3);
    const VelocityPair pair{{1, 0, 0}, {0, 0, 0}};
    const auto out = omega_post_collision(pair, SphereDirection({0, 0, 1}), rp);
    CHECK((out.v - pair.v).norm() == 0.0);
    CHECK((out.v_star - pair.v_star).norm() == 0.0);
}

TEST_CASE("omega form: energy delta is -(1-e^2)/2 [(v-v*).w]^2") {
    const RestitutionParams rp(0.5);
    const VelocityPair pair{{1, 0, 0}, {0, 0, 0}};
    const SphereDirection omega({1, 0, 0});
    const auto out = omega_post_collision(pair, omega, rp);
    const double delta = pair_energy(out) - pair_energy(pair);
    CHECK(delta == doctest::Approx(-0.375).epsilon(1e-13));

    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> edist(0.05, 1.0);
    for (int it = 0; it < 10000; ++it) {
        const RestitutionParams rpe(edist(rng));
        const VelocityPair p{random_vec(rng, 2.0), random_vec(rng, 2.0)};
        const SphereDirection w(random_unit(rng));
        const auto o = omega_post_collision(p, w, rpe);
        const double d = pair_energy(o) - pair_energy(p);
        const double proj = (p.v - p.v_star).dot(w.sigma);
        const double expect = -0.5 * (1.0 - rpe.e * rpe.e) * proj * proj;
        const double scale = std::max(1.0, pair_energy(p));
        REQUIRE(std::fabs(d - expect) <= 1e-12 * scale);
        REQUIRE(d <= 1e-12 * scale);
        const Vec3 drift = o.v + o.v_star - p.v - p.v_star;
        REQUIRE(drift.norm() <= 1e-12 * std::max(1.0, (p.v + p.v_star).norm()));
    }
}

TEST_CASE("omega form: elastic limit conserves energy") {
    std::mt19937_64 rng(5150);
    const RestitutionParams rp(1.0);
    for (int it = 0; it < 2000; ++it) {
        const VelocityPair p{random_vec(rng, 2.0), random_vec(rng, 2.0)};
        const auto o = omega_post_collision(p, SphereDirection(random_unit(rng)), rp);
        REQUIRE(std::fabs(pair_energy(o) - pair_energy(p)) <= 1e-12 * std::max(1.0, pair_energy(p)));
    }
}

TEST_CASE("xi split: sum and norm identities") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> edist(0.05, 1.0);
    for (int it = 0; it < 10000; ++it) {
        const RestitutionParams rp(edist(rng));
        const Vec3 xi = random_vec(rng, 5.0);
        const Vec3 sigma = random_unit(rng);
        const auto [plus, minus] = xi_split(xi, sigma, rp);

        const double scale = std::max(1.0, xi.norm());
        REQUIRE((plus + minus - xi).norm() <= 1e-12 * scale);

        const double lhs = plus.norm2() + minus.norm2();
        const double ap = rp.a_plus, am = rp.a_minus;
        const double rhs =
            0.5 * (1.0 + ap * ap + am * am) * xi.norm2() + ap * am * xi.norm() * xi.dot(sigma);
        REQUIRE(std::fabs(lhs - rhs) <= 1e-12 * std::max(1.0, xi.norm2()));
    }
}

TEST_CASE("xi split: elastic reduction and aligned direction") {
    const RestitutionParams elastic(1.0);
    const Vec3 xi{1.0, -2.0, 0.5};
    const Vec3 sigma = Vec3{0.2, 0.3, -0.4}.normalized();
    const auto [plus, minus] = xi_split(xi, sigma, elastic);
    CHECK((plus - 0.5 * (xi + xi.norm() * sigma)).norm() < 1e-14);
    CHECK((minus - 0.5 * (xi - xi.norm() * sigma)).norm() < 1e-14);
    CHECK(plus.norm2() + minus.norm2() == doctest::Approx(xi.norm2()).epsilon(1e-13));

    for (double e : {0.2, 0.5, 0.9, 1.0}) {
        const RestitutionParams rp(e);
        const auto [p2, m2] = xi_split(xi, xi.normalized(), rp);
        CHECK((p2 - xi).norm() < 1e-13);
        CHECK(m2.norm() < 1e-13);
    }

    const auto [pz, mz] = xi_split(Vec3{}, sigma, elastic);
    CHECK(pz.norm() == 0.0);
    CHECK(mz.norm() == 0.0);
}

TEST_CASE("xi split: two-sided bound inequalities on the symmetrized hemisphere") {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> edist(0.05, 1.0);
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
        for (int it = 0; it < 2500; ++it) {
            const RestitutionParams rp(edist(rng));
            const Vec3 xi = random_vec(rng, 4.0);
            if (xi.norm() < 1e-3) continue;
            Vec3 sigma = random_unit(rng);
            if (xi.dot(sigma) < 0.0) sigma = -sigma;  // theta in [0, pi/2]

            const auto [plus, minus] = xi_split(xi, sigma, rp);
            const double cosw = xi.dot(sigma) / xi.norm();
            const double ap = rp.a_plus, am = rp.a_minus;
            const double xa = std::pow(xi.norm(), alpha);
            const double base = std::pow(1.0 + cosw, 0.5 * alpha) * xa;

            const double lower = std::pow(0.5 * ap * (1.0 + am), 0.5 * alpha) * base;
            const double cplus = std::pow(0.25 * (1.0 + am) * (1.0 + am) + 0.25 * ap * ap,
                                          0.5 * alpha);
            const double upper = cplus * base;
            const double plus_a = std::pow(plus.norm(), alpha);
            REQUIRE(plus_a >= lower - 1e-10 * std::max(1.0, upper));
            REQUIRE(plus_a <= upper + 1e-10 * std::max(1.0, upper));

            const double minus_exact =
                std::pow(0.5 * ap * ap, 0.5 * alpha) * std::pow(1.0 - cosw, 0.5 * alpha) * xa;
            REQUIRE(std::pow(minus.norm(), alpha) ==
                    doctest::Approx(minus_exact).epsilon(1e-10).scale(std::max(1.0, xa)));
        }
    }
}

TEST_CASE("sphere basis: orthonormal right-handed frame") {
    const VelocityPair pair{{1, 0, 0}, {0, 1, 0}};
    const SphereBasis b = sphere_basis(pair);
    CHECK(!b.degenerate);
    CHECK((b.q_hat - Vec3{1, -1, 0}.normalized()).norm() < 1e-14);

    std::mt19937_64 rng(11);
    for (int it = 0; it < 500; ++it) {
        const VelocityPair p{random_vec(rng, 2.0), random_vec(rng, 2.0)};
        const SphereBasis f = sphere_basis(p);
        REQUIRE(std::fabs(f.q_hat.norm() - 1.0) < 1e-12);
        REQUIRE(std::fabs(f.h_hat.norm() - 1.0) < 1e-12);
        REQUIRE(std::fabs(f.j_hat.norm() - 1.0) < 1e-12);
        REQUIRE(std::fabs(f.q_hat.dot(f.h_hat)) < 1e-12);
        REQUIRE(std::fabs(f.q_hat.dot(f.j_hat)) < 1e-12);
        REQUIRE(std::fabs(f.h_hat.dot(f.j_hat)) < 1e-12);
        // sigma = q cos t + h sin t cos p + j sin t sin p decomposes correctly.
        REQUIRE((f.q_hat.cross(f.h_hat) - f.j_hat).norm() < 1e-12);
    }
}

TEST_CASE("sphere basis: collinear pairs signal degeneracy") {
    const VelocityPair collinear{{1, 1, 0}, {2, 2, 0}};
    const SphereBasis b = sphere_basis(collinear);
    CHECK(b.degenerate);
    CHECK(std::fabs(b.q_hat.dot(b.h_hat)) < 1e-12);
    CHECK((b.q_hat.cross(b.h_hat) - b.j_hat).norm() < 1e-12);
}

TEST_CASE("sphere symmetry: quadrature of b_n(s.q)[(s.q)q - s] vanishes") {
    KernelConfig cfg;
    cfg.s = 0.25;
    cfg.n = 8;
    const AngularKernel bn = cutoff_angular(make_angular(cfg), cfg.n);
    const AngularRule rule = make_angular_rule(bn, 16, false);

    const VelocityPair pair{{0.7, -0.2, 0.4}, {-0.5, 0.6, 0.1}};
    const SphereBasis f = sphere_basis(pair);
    const int n_az = 8;
    Vec3 acc{};
    for (std::size_t i = 0; i < rule.t.size(); ++i) {
        const double ct = rule.t[i], st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < n_az; ++k) {
            const double psi = 2.0 * M_PI * k / n_az;
            const Vec3 sigma = ct * f.q_hat + st * (std::cos(psi) * f.h_hat + std::sin(psi) * f.j_hat);
            acc += (rule.wb[i] / n_az) * (sigma.dot(f.q_hat) * f.q_hat - sigma);
        }
    }
    CHECK(acc.norm() < 1e-12 * rule.mass);
}
