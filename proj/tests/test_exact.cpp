#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "cw2/asympt.hpp"
#include "cw2/exact.hpp"

using Catch::Approx;
using namespace cw2;

namespace {

const CouplingMatrix kCritical{1.5, 1.5, 0.5};

const std::vector<CouplingMatrix> kCouplings{
    {1.5, 1.5, 0.5}, {1.0, 1.0, 0.3}, {2.0, 1.0, 0.5}, {0.4, 2.2, 0.9}, {3.0, 3.0, 2.5}};

// Average of prod_{a<K} X_a * prod_{b<L} Y_b over all 2^(N1+N2) weighted configurations.
double brute_force_product(const CouplingMatrix& J, int N1, int N2, int K, int L)
{
    const double n = N1 + N2;
    double num = 0.0, den = 0.0;
    for (std::uint32_t c = 0; c < (1u << (N1 + N2)); ++c) {
        int s1 = 0, s2 = 0;
        double prod = 1.0;
        for (int i = 0; i < N1; ++i) {
            const int x = (c >> i) & 1u ? 1 : -1;
            s1 += x;
            if (i < K) prod *= x;
        }
        for (int j = 0; j < N2; ++j) {
            const int y = (c >> (N1 + j)) & 1u ? 1 : -1;
            s2 += y;
            if (j < L) prod *= y;
        }
        const double w = std::exp((J.J1 * s1 * s1 + J.J2 * s2 * s2 + 2.0 * J.Jbar * s1 * s2) / (2.0 * n));
        num += prod * w;
        den += w;
    }
    return num / den;
}

} // namespace

TEST_CASE("distribution basics", "[exact]")
{
    const auto d = magnetization_distribution({0.7, 1.3, 0.2}, 1, 1);
    REQUIRE(d.size() == 4);
    CHECK(d(1, 1) == d(-1, -1));
    CHECK(d(1, -1) == d(-1, 1));
    double total = 0.0;
    for (double p : d.table()) {
        CHECK(p >= 0.0);
        total += p;
    }
    CHECK(total == Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(d(0, 1), invalid_input);
}

TEST_CASE("free spins give a product of binomials", "[exact]")
{
    const double eps = 1e-9;
    const auto d = magnetization_distribution({eps, eps, 0.0}, 2, 2);
    const double c[3] = {1.0, 2.0, 1.0};
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) CHECK(d(2 * i - 2, 2 * j - 2) == Approx(c[i] * c[j] / 16.0).epsilon(1e-8));
}

TEST_CASE("enumeration matches the 2^N brute force", "[exact]")
{
    for (const auto& J : kCouplings)
        for (int N1 = 1; N1 <= 8; ++N1)
            for (int N2 = 1; N1 + N2 <= 16; ++N2) {
                const auto a = magnetization_distribution(J, N1, N2);
                const auto b = brute_force_distribution(J, N1, N2);
                INFO("N1=" << N1 << " N2=" << N2 << " J=(" << J.J1 << "," << J.J2 << "," << J.Jbar << ")");
                CHECK(total_variation(a, b) < 1e-12);
                CHECK(a.log_partition() == Approx(b.log_partition()).epsilon(1e-12));
            }

    const auto a = magnetization_distribution(kCritical, 2, 2);
    const auto b = brute_force_distribution(kCritical, 2, 2);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a.table()[k] - b.table()[k]) < 1e-14);
}

TEST_CASE("brute force factorizes without inter-group coupling", "[exact]")
{
    const auto d = brute_force_distribution({0.8, 1.9, 0.0}, 1, 1);
    const double p1 = d(1, 1) + d(1, -1), q1 = d(1, 1) + d(-1, 1);
    CHECK(d(1, 1) == Approx(p1 * q1).epsilon(1e-14));
    CHECK(d(-1, 1) == Approx((1 - p1) * q1).epsilon(1e-14));
    double total = 0.0;
    const auto big = brute_force_distribution({1.1, 0.4, 0.6}, 7, 9);
    for (double p : big.table()) total += p;
    CHECK(std::abs(total - 1.0) < 1e-13);
}

TEST_CASE("brute force rejects oversized systems", "[exact]")
{
    CHECK_THROWS_AS(brute_force_distribution(kCritical, 13, 12), invalid_input);
    CHECK_THROWS_AS(magnetization_distribution(kCritical, 20000, 20000, 1e8), invalid_input);
}

TEST_CASE("moments: mass, parity and symmetry", "[exact]")
{
    const auto d = magnetization_distribution({1.2, 0.9, 0.4}, 37, 52);
    CHECK(exact_moment(d, 0, 0) == 1.0);
    for (auto norm : {Normalization::Raw, Normalization::PerSpin, Normalization::Critical, Normalization::Sqrt})
        for (int K = 0; K <= 7; ++K)
            for (int L = 0; L <= 7; ++L)
                if ((K + L) % 2 == 1) CHECK(exact_moment(d, K, L, norm) == 0.0);
    CHECK(exact_moment(d, 2, 0) > 0.0);
    CHECK(exact_moment(d, 1, 1) > 0.0);

    const auto t = exact_moment_table(d, 4, 4, Normalization::Critical);
    CHECK(t.at(0, 0) == 1.0);
    CHECK(t.at(1, 2) == 0.0);
    CHECK(t.at(2, 2) == Approx(exact_moment(d, 2, 2, Normalization::Critical)));
}

TEST_CASE("moments against the brute-force distribution", "[exact]")
{
    const CouplingMatrix J{2.0, 1.0, 0.5};
    const auto a = magnetization_distribution(J, 5, 7);
    const auto b = brute_force_distribution(J, 5, 7);
    for (int K = 0; K <= 4; ++K)
        for (int L = 0; L <= 4; ++L) {
            double direct = 0.0;
            for (std::size_t k = 0; k < b.size(); ++k)
                direct += std::pow(b.s1_of(k), K) * std::pow(b.s2_of(k), L) * b.table()[k];
            CHECK(exact_moment(a, K, L) == Approx(direct).epsilon(1e-11).margin(1e-11));
        }
}

TEST_CASE("distinct-spin correlations against configuration brute force", "[exact]")
{
    const auto d = magnetization_distribution(kCritical, 4, 4);
    CHECK(exact_correlation(d, 0, 0) == 1.0);
    CHECK(std::abs(exact_correlation(d, 2, 0) - brute_force_product(kCritical, 4, 4, 2, 0)) < 1e-12);
    const double xy = exact_correlation(d, 1, 1);
    CHECK(std::abs(xy - brute_force_product(kCritical, 4, 4, 1, 1)) < 1e-12);
    CHECK(xy >= 0.0);
    CHECK(exact_correlation(d, 1, 0) == 0.0);
    CHECK(exact_correlation(d, 2, 1) == 0.0);

    const CouplingMatrix J{0.4, 2.2, 0.9};
    const auto e = magnetization_distribution(J, 5, 6);
    for (int K = 0; K <= 5; ++K)
        for (int L = 0; L <= 6; ++L)
            CHECK(std::abs(exact_correlation(e, K, L) - brute_force_product(J, 5, 6, K, L)) < 1e-12);

    CHECK_THROWS_AS(exact_correlation(d, 5, 0), invalid_input);
}

TEST_CASE("critical second moment drifts toward the limit moment", "[exact]")
{
    const auto p = make_critical_params(kCritical, {0.5, 0.5});
    const double m20 = limit_moment(2, 0, p);
    double prev_err = 1e9, prev_lln = 1e9;
    for (int N : {256, 512, 1024, 2048, 4096}) {
        const auto d = magnetization_distribution(kCritical, N / 2, N / 2);
        const double err = std::abs(exact_moment(d, 2, 0, Normalization::Critical) - m20) / m20;
        const double lln = exact_moment(d, 2, 0, Normalization::PerSpin);
        INFO("N = " << N);
        CHECK(err < prev_err);
        CHECK(lln < prev_lln);
        prev_err = err;
        prev_lln = lln;
    }
}
