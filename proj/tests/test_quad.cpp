#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cw2/exact.hpp"
#include "cw2/quad.hpp"

using Catch::Approx;
using namespace cw2;

namespace {

CriticalParams reference() { return make_critical_params(CouplingMatrix{1.5, 1.5, 0.5}, Fractions{0.5, 0.5}); }

CriticalParams asymmetric()
{
    return make_critical_params(InverseCoupling{0.9, 0.6, std::sqrt(0.06)}, Fractions{0.6, 0.4});
}

CriticalParams swap_groups(const CriticalParams& p)
{
    return make_critical_params(InverseCoupling{p.L2, p.L1, p.Lbar}, Fractions{p.alpha2, p.alpha1});
}

} // namespace

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly", "[quad]")
{
    for (const int order : {4, 8, 10, 15, 20}) {
        const auto [x, w] = gauss_legendre(order);
        REQUIRE(static_cast<int>(x.size()) == order);
        for (int d = 0; d < 2 * order; ++d) {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * ipow(x[i], d);
            const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
            CHECK(std::abs(s - exact) < 1e-13);
        }
    }
    CHECK_THROWS_AS(gauss_legendre(7), invalid_input);
}

TEST_CASE("odd orders vanish", "[quad]")
{
    const auto p = reference();
    for (const double N : {10.0, 100.0, 1e4}) {
        CHECK(std::abs(z_integral(N, 1, 0, p.inverse(), p.fractions())) < 1e-12);
        CHECK(std::abs(correlation_ratio(N, 2, 1, p.inverse(), p.fractions())) < 1e-12);
    }
    CHECK(correlation_ratio(50.0, 0, 0, p.inverse(), p.fractions()) == 1.0);
}

TEST_CASE("self-convergence under panel doubling", "[quad]")
{
    const auto p = reference();
    QuadratureSpec spec;
    spec.check_convergence = true;
    const auto r = z_integrals(100.0, {{0, 0}, {2, 0}, {2, 2}}, p.inverse(), p.fractions(), spec);
    CHECK(r.self_convergence < 1e-8);
    CHECK(r.tail_estimate < 1e-8);
    CHECK(r.values[0] > 0.0);
    CHECK(std::isfinite(r.values[0]));

    const auto base = z_integral(100.0, 0, 0, p.inverse(), p.fractions());
    CHECK(std::abs(base - r.values[0]) < 1e-8 * r.values[0]);
}

TEST_CASE("leading order of Z_N(0,0)", "[quad]")
{
    const auto p = reference();
    const double limit =
        std::sqrt(2.0 * std::numbers::pi) * lanczos_gamma(0.25) / (2.0 * std::pow(p.c, 0.25)) / (2.0 * std::sqrt(p.g1 * p.g2));
    double prev = 1.0;
    for (const double N : {1e4, 1e6, 1e8}) {
        const double err = std::abs(z_integral(N, 0, 0, p.inverse(), p.fractions()) * std::pow(N, 0.75) / limit - 1.0);
        INFO("N=" << N << " err=" << err);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("ratios equal exact distinct-spin correlations at finite N", "[quad]")
{
    const CouplingMatrix J{1.5, 1.5, 0.5};
    for (const auto& [N1, N2] : {std::pair{32, 32}, {20, 30}}) {
        const auto d = magnetization_distribution(J, N1, N2);
        const auto g = GroupStructure::from_sizes(N1, N2);
        const std::vector<Order> orders{{2, 0}, {0, 2}, {1, 1}, {4, 0}, {2, 2}, {3, 1}};
        const auto r = correlation_ratios(N1 + N2, orders, invert_coupling(J), g.alpha);
        for (std::size_t o = 0; o < orders.size(); ++o) {
            const double e = exact_correlation(d, orders[o].K, orders[o].L);
            INFO("N1=" << N1 << " N2=" << N2 << " K=" << orders[o].K << " L=" << orders[o].L);
            CHECK(std::abs(r[o] - e) < 1e-9 * std::abs(e));
        }
    }
}

TEST_CASE("group relabeling symmetry", "[quad]")
{
    const auto p = asymmetric();
    const auto q = swap_groups(p);
    for (const auto& [K, L] : {std::pair{2, 0}, {1, 1}, {3, 1}, {2, 4}}) {
        const double a = z_integral(500.0, K, L, p.inverse(), p.fractions());
        const double b = z_integral(500.0, L, K, q.inverse(), q.fractions());
        CHECK(a == Approx(b).epsilon(1e-10));
    }
}

TEST_CASE("adaptive rule agrees with the tensor rule", "[quad]")
{
    const auto p = reference();
    QuadratureSpec ad;
    ad.rule = QuadratureRule::Adaptive;
    for (const auto& [K, L] : {std::pair{0, 0}, {2, 0}, {1, 1}}) {
        const double t = z_integral(1000.0, K, L, p.inverse(), p.fractions());
        const double a = z_integral(1000.0, K, L, p.inverse(), p.fractions(), ad);
        CHECK(a == Approx(t).epsilon(1e-7));
    }
}

TEST_CASE("quartic Taylor model of F", "[quad]")
{
    const auto p = reference();
    CHECK(taylor_quartic_F(0.0, 0.0, p) == 0.0);

    // along (sqrt g2, sqrt g1) only the quartic terms remain
    const double n = std::sqrt(p.g1 + p.g2);
    for (const double t : {0.1, 0.5, 2.0}) {
        const double y1 = t * std::sqrt(p.g2) / n, y2 = t * std::sqrt(p.g1) / n;
        CHECK(taylor_quartic_F(y1, y2, p) ==
              Approx(0.5 * (p.alpha1 / 6.0 * ipow(y1, 4) + p.alpha2 / 6.0 * ipow(y2, 4))).epsilon(1e-13));
    }

    for (const auto& q : {reference(), asymmetric()}) {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi), rad(0.02, 0.1);
        double worst = 0.0;
        for (int i = 0; i < 2000; ++i) {
            const double th = ang(rng), r = rad(rng);
            const double y1 = r * std::cos(th), y2 = r * std::sin(th);
            const double d = std::abs(free_energy(y1, y2, q.inverse(), q.fractions()) - taylor_quartic_F(y1, y2, q));
            worst = std::max(worst, d / ipow(r, 6));
        }
        // sixth-order coefficient of alpha log cosh is alpha / 45
        CHECK(worst <= (q.alpha1 + q.alpha2) / 45.0 * 1.01);
    }
}

TEST_CASE("Laplace convergence for the second moment", "[quad]")
{
    const auto p = reference();
    const auto rep = laplace_limit_check(2, 0, p, {1e2, 1e3, 1e4});
    CHECK(rep.decreasing);
    CHECK(rep.final_error() < 0.05);
    CHECK(rep.rows.size() == 3);

    const auto odd = laplace_limit_check(1, 0, p, {1e2, 1e3, 1e4});
    for (const auto& row : odd.rows) CHECK(std::abs(row.scaled_ratio) < 1e-10);
    const auto zero = laplace_limit_check(0, 0, p, {1e2, 1e3, 1e4});
    for (const auto& row : zero.rows) CHECK(row.rel_error == 0.0);
    CHECK(zero.decreasing);

    CHECK_THROWS_AS(laplace_limit_check(2, 0, p, {1e2, 1e3}), invalid_input);
    CHECK_THROWS_AS(laplace_limit_check(2, 0, p, {1e3, 1e2, 1e4}), invalid_input);
}

TEST_CASE("quadrature settings validation", "[quad]")
{
    const auto p = reference();
    QuadratureSpec bad;
    bad.panels = 7;
    CHECK_THROWS_AS(z_integral(10.0, 0, 0, p.inverse(), p.fractions(), bad), invalid_input);
    bad = {};
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(z_integral(10.0, 0, 0, p.inverse(), p.fractions(), bad), invalid_input);
    CHECK_THROWS_AS(z_integral(0.5, 0, 0, p.inverse(), p.fractions()), invalid_input);
}
