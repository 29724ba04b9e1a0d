#pragma once

// Exact finite-N Gibbs law of the group magnetizations (S1, S2).

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cw2/error.hpp"
#include "cw2/model.hpp"
#include "cw2/special.hpp"

namespace cw2 {

enum class Normalization { Raw, PerSpin, Critical, Sqrt };

inline std::string_view to_string(Normalization n)
{
    switch (n) {
    case Normalization::Raw: return "raw";
    case Normalization::PerSpin: return "per-spin";
    case Normalization::Critical: return "critical";
    case Normalization::Sqrt: return "sqrt";
    }
    return "?";
}

inline Normalization parse_normalization(std::string_view s)
{
    if (s == "raw") return Normalization::Raw;
    if (s == "per-spin" || s == "per_spin") return Normalization::PerSpin;
    if (s == "critical") return Normalization::Critical;
    if (s == "sqrt") return Normalization::Sqrt;
    throw invalid_input("unknown normalization '" + std::string(s) + "'");
}

/// Divisor applied to a single group sum of size n.
inline double group_scale(int n, Normalization norm)
{
    switch (norm) {
    case Normalization::Raw: return 1.0;
    case Normalization::PerSpin: return n;
    case Normalization::Critical: return std::pow(static_cast<double>(n), 0.75);
    case Normalization::Sqrt: return std::sqrt(static_cast<double>(n));
    }
    return 1.0;
}

/**
 * Probability table p(s1, s2) over s_nu in {-N_nu, -N_nu + 2, ..., N_nu}.
 * Storage is row-major in (i, j) with s1 = 2i - N1 and s2 = 2j - N2, so the
 * flip partner of linear index k is size() - 1 - k.
 */
class MagnetizationDistribution {
public:
    MagnetizationDistribution(int n1, int n2, std::vector<double> p, double log_z)
        : n1_(n1), n2_(n2), p_(std::move(p)), log_z_(log_z)
    {
    }

    [[nodiscard]] int N1() const { return n1_; }
    [[nodiscard]] int N2() const { return n2_; }
    [[nodiscard]] double log_partition() const { return log_z_; }
    [[nodiscard]] std::size_t size() const { return p_.size(); }
    [[nodiscard]] const std::vector<double>& table() const { return p_; }

    [[nodiscard]] int s1_of(std::size_t k) const { return 2 * static_cast<int>(k / (n2_ + 1)) - n1_; }
    [[nodiscard]] int s2_of(std::size_t k) const { return 2 * static_cast<int>(k % (n2_ + 1)) - n2_; }

    [[nodiscard]] double operator()(int s1, int s2) const
    {
        require(std::abs(s1) <= n1_ && std::abs(s2) <= n2_ && (s1 + n1_) % 2 == 0 && (s2 + n2_) % 2 == 0,
                "magnetization off the lattice");
        return p_[static_cast<std::size_t>((s1 + n1_) / 2) * (n2_ + 1) + (s2 + n2_) / 2];
    }

private:
    int n1_;
    int n2_;
    std::vector<double> p_;
    double log_z_;
};

namespace detail {

// Compensated running sum (Neumaier).
struct CompensatedSum {
    double sum = 0.0;
    double c = 0.0;
    void add(double x)
    {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            c += (sum - t) + x;
        else
            c += (x - t) + sum;
        sum = t;
    }
    [[nodiscard]] double value() const { return sum + c; }
};

// Sum of f(k) over all table entries, adding each flip pair f(k) + f(partner) first.
template <class F>
double symmetric_accumulate(std::size_t n, F&& f)
{
    CompensatedSum acc;
    for (std::size_t k = 0; k < n / 2; ++k) acc.add(f(k) + f(n - 1 - k));
    if (n % 2 == 1) acc.add(f(n / 2));
    return acc.value();
}

} // namespace detail

inline constexpr double default_table_cap = 1e8;

/**
 * Exact law of (S1, S2) from binomial multiplicities and exp(-H), accumulated in
 * log space. Flip partners are averaged so p(s) = p(-s) bit-exactly.
 */
inline MagnetizationDistribution magnetization_distribution(const CouplingMatrix& J, int N1, int N2,
                                                            double max_entries = default_table_cap)
{
    require(N1 >= 1 && N2 >= 1, "group sizes must be positive");
    require(static_cast<double>(N1) * static_cast<double>(N2) <= max_entries,
            "N1*N2 exceeds the enumeration table cap");

    std::vector<double> lb1(N1 + 1), lb2(N2 + 1);
    for (int i = 0; i <= N1; ++i) lb1[i] = log_binomial(N1, i);
    for (int j = 0; j <= N2; ++j) lb2[j] = log_binomial(N2, j);

    const std::size_t rows = N1 + 1, cols = N2 + 1;
    std::vector<double> lw(rows * cols);
    const double inv2n = 1.0 / (2.0 * (static_cast<double>(N1) + N2));
    for (std::size_t i = 0; i < rows; ++i) {
        const double s1 = 2.0 * static_cast<double>(i) - N1;
        for (std::size_t j = 0; j < cols; ++j) {
            const double s2 = 2.0 * static_cast<double>(j) - N2;
            lw[i * cols + j] = lb1[i] + lb2[j] + (J.J1 * s1 * s1 + J.J2 * s2 * s2 + 2.0 * J.Jbar * s1 * s2) * inv2n;
        }
    }

    const double log_z = log_sum_exp(lw);
    std::vector<double> p(lw.size());
    for (std::size_t k = 0; k < lw.size(); ++k) p[k] = std::exp(lw[k] - log_z);
    for (std::size_t k = 0; k < p.size() / 2; ++k) {
        const double m = 0.5 * (p[k] + p[p.size() - 1 - k]);
        p[k] = p[p.size() - 1 - k] = m;
    }
    return {N1, N2, std::move(p), log_z};
}

inline constexpr int brute_force_max_spins = 24;

/// Literal sum of exp(-H) over all 2^(N1+N2) configurations, bucketed by (S1, S2).
inline MagnetizationDistribution brute_force_distribution(const CouplingMatrix& J, int N1, int N2)
{
    require(N1 >= 1 && N2 >= 1, "group sizes must be positive");
    require(N1 + N2 <= brute_force_max_spins, "brute force enumeration is limited to N1 + N2 <= 24");

    const std::uint32_t mask1 = (1u << N1) - 1u;
    const std::size_t cols = N2 + 1;
    const double n = static_cast<double>(N1 + N2);
    // exp(-H) is bounded by exp(shift); dividing by it keeps weights <= 1.
    const double shift = (J.J1 * N1 * N1 + J.J2 * N2 * N2 + 2.0 * std::abs(J.Jbar) * N1 * N2) / (2.0 * n);

    std::vector<double> w((N1 + 1) * cols, 0.0);
    const std::uint64_t configs = std::uint64_t{1} << (N1 + N2);
    for (std::uint64_t c = 0; c < configs; ++c) {
        const auto bits = static_cast<std::uint32_t>(c);
        const int up1 = std::popcount(bits & mask1);
        const int up2 = std::popcount(bits >> N1);
        const double x = 2.0 * up1 - N1;
        const double y = 2.0 * up2 - N2;
        const double h = -(J.J1 * x * x + J.J2 * y * y + 2.0 * J.Jbar * x * y) / (2.0 * n);
        w[static_cast<std::size_t>(up1) * cols + up2] += std::exp(-h - shift);
    }
    double total = 0.0;
    for (double v : w) total += v;
    for (double& v : w) v /= total;
    return {N1, N2, std::move(w), std::log(total) + shift};
}

inline double total_variation(const MagnetizationDistribution& a, const MagnetizationDistribution& b)
{
    require(a.N1() == b.N1() && a.N2() == b.N2(), "distributions have different group sizes");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a.table()[k] - b.table()[k]);
    return 0.5 * s;
}

/// E[(S1/n1)^K (S2/n2)^L] with n_nu given by the normalization; odd K+L is exactly 0.
inline double exact_moment(const MagnetizationDistribution& d, int K, int L, Normalization norm = Normalization::Raw)
{
    require(K >= 0 && L >= 0, "moment orders must be nonnegative");
    if (K == 0 && L == 0) return 1.0; // total mass
    const double n1 = group_scale(d.N1(), norm);
    const double n2 = group_scale(d.N2(), norm);
    const auto& p = d.table();
    return detail::symmetric_accumulate(p.size(), [&](std::size_t k) {
        return ipow(d.s1_of(k) / n1, K) * ipow(d.s2_of(k) / n2, L) * p[k];
    });
}

/**
 * E[X_1 ... X_K | k of n spins are +1] for K distinct spins of one group,
 * indexed by k = 0..n. Values for k > n/2 are mirrored from n - k with sign
 * (-1)^K so that flip symmetry holds exactly.
 */
inline std::vector<double> conditional_spin_products(int n, int K)
{
    std::vector<double> out(n + 1);
    const double denom = binomial(n, K);
    for (int k = 0; 2 * k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= K; ++j) {
            const double term = binomial(k, j) * binomial(n - k, K - j);
            s += ((K - j) % 2 == 0) ? term : -term;
        }
        out[k] = s / denom;
        out[n - k] = (K % 2 == 0) ? out[k] : -out[k];
    }
    return out;
}

/// E[X_1 ... X_K Y_1 ... Y_L] for distinct spins, via exchangeability given (S1, S2).
inline double exact_correlation(const MagnetizationDistribution& d, int K, int L)
{
    require(K >= 0 && L >= 0, "correlation orders must be nonnegative");
    require(K <= d.N1() && L <= d.N2(), "correlation order exceeds group size");
    if (K == 0 && L == 0) return 1.0;
    const auto c1 = conditional_spin_products(d.N1(), K);
    const auto c2 = conditional_spin_products(d.N2(), L);
    const auto& p = d.table();
    const std::size_t cols = d.N2() + 1;
    return detail::symmetric_accumulate(p.size(), [&](std::size_t k) { return c1[k / cols] * c2[k % cols] * p[k]; });
}

/// Table of moments m[K][L] for 0 <= K <= kmax, 0 <= L <= lmax.
struct MomentTable {
    int kmax = 0;
    int lmax = 0;
    Normalization normalization = Normalization::Raw;
    std::vector<double> values;

    [[nodiscard]] double at(int K, int L) const
    {
        require(K >= 0 && K <= kmax && L >= 0 && L <= lmax, "moment index out of range");
        return values[static_cast<std::size_t>(K) * (lmax + 1) + L];
    }
};

inline MomentTable exact_moment_table(const MagnetizationDistribution& d, int kmax, int lmax, Normalization norm)
{
    require(kmax >= 0 && lmax >= 0, "moment orders must be nonnegative");
    MomentTable t{kmax, lmax, norm, {}};
    t.values.reserve(static_cast<std::size_t>(kmax + 1) * (lmax + 1));
    for (int K = 0; K <= kmax; ++K)
        for (int L = 0; L <= lmax; ++L) t.values.push_back(exact_moment(d, K, L, norm));
    return t;
}

} // namespace cw2
