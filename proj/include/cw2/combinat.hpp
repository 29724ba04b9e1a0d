#pragma once

// Index-tuple profiles and the moment method: E[(sum X)^K (sum Y)^L] rebuilt
// from distinct-spin correlations weighted by exact tuple counts.

#include <algorithm>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cw2/error.hpp"
#include "cw2/exact.hpp"

namespace cw2 {

using BigInt = boost::multiprecision::cpp_int;

/// r[m-1] = number of distinct indices occurring exactly m times in a K-tuple.
struct Profile {
    int K = 0;
    std::vector<int> r;

    [[nodiscard]] int distinct() const
    {
        int s = 0;
        for (int v : r) s += v;
        return s;
    }

    /// Indices that survive X_i^2 = 1, i.e. those with odd multiplicity.
    [[nodiscard]] int odd_count() const
    {
        int s = 0;
        for (std::size_t m = 0; m < r.size(); m += 2) s += r[m];
        return s;
    }

    friend bool operator==(const Profile&, const Profile&) = default;
};

/// All profiles of K-tuples over an index set of size N, lexicographically descending in r.
inline std::vector<Profile> enumerate_profiles(int K, int N)
{
    require(K >= 0, "tuple length must be nonnegative");
    require(N >= 1, "index set must be nonempty");
    std::vector<Profile> out;
    std::vector<int> counts(K, 0);
    // Partitions of `rest` into parts <= max_part, recorded as multiplicity counts.
    std::function<void(int, int, int)> rec = [&](int rest, int max_part, int used) {
        if (rest == 0) {
            if (used <= N) out.push_back({K, counts});
            return;
        }
        for (int part = std::min(rest, max_part); part >= 1; --part) {
            ++counts[part - 1];
            rec(rest - part, part, used + 1);
            --counts[part - 1];
        }
    };
    rec(K, K, 0);
    std::sort(out.begin(), out.end(), [](const Profile& a, const Profile& b) { return a.r > b.r; });
    return out;
}

inline BigInt factorial(int n)
{
    BigInt f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// Number of tuples in {1..N}^K with profile r: N! / (prod r_m! (N - sum r)!) * K! / prod (m!)^{r_m}.
inline BigInt multiplicity_w(int K, const Profile& p, int N)
{
    require(p.K == K && static_cast<int>(p.r.size()) == K, "profile does not match tuple length");
    int weight = 0;
    for (int m = 1; m <= K; ++m) {
        require(p.r[m - 1] >= 0, "profile counts must be nonnegative");
        weight += m * p.r[m - 1];
    }
    require(weight == K, "profile counts do not sum to the tuple length");
    const int distinct = p.distinct();
    require(distinct <= N, "profile uses more distinct indices than available");

    BigInt num = 1; // N! / (N - distinct)!
    for (int i = 0; i < distinct; ++i) num *= (N - i);
    num *= factorial(K);
    BigInt den = 1;
    for (int m = 1; m <= K; ++m) {
        den *= factorial(p.r[m - 1]);
        const BigInt fm = factorial(m);
        for (int j = 0; j < p.r[m - 1]; ++j) den *= fm;
    }
    return num / den;
}

inline constexpr int profile_order_cap = 8;

/**
 * E[(S1)^K (S2)^L] as sum over profile pairs of w_K(r) w_L(s) E[X(r) Y(s)],
 * where X(r) reduces to a product of odd_count(r) distinct spins.
 */
inline double moment_via_profiles(int K, int L, const MagnetizationDistribution& d)
{
    require(K >= 0 && L >= 0, "moment orders must be nonnegative");
    require(K <= profile_order_cap && L <= profile_order_cap, "moment orders above 8 are not supported");
    const auto pr = enumerate_profiles(K, d.N1());
    const auto ps = enumerate_profiles(L, d.N2());
    detail::CompensatedSum acc;
    for (const auto& r : pr) {
        const BigInt wr = multiplicity_w(K, r, d.N1());
        for (const auto& s : ps) {
            const BigInt w = wr * multiplicity_w(L, s, d.N2());
            acc.add(w.convert_to<double>() * exact_correlation(d, r.odd_count(), s.odd_count()));
        }
    }
    return acc.value();
}

struct ProfileBound {
    double exponent1 = 0.0; // power of N1^{-1} in the normalized summand bound
    double exponent2 = 0.0;
    double bound = 0.0;     // alpha1^{1/4} alpha2^{1/4} N1^{-exponent1} N2^{-exponent2}
    bool surviving = false; // only k = K, l = L keeps a nonvanishing contribution
};

/// Bound on a normalized summand whose profiles reduce to k and l distinct spins.
inline ProfileBound dominant_profile_bound(int K, int L, int k, int l, double N1, double N2, const Fractions& alpha)
{
    require(k >= 0 && l >= 0 && k <= K && l <= L, "reduced orders must satisfy 0 <= k <= K, 0 <= l <= L");
    ProfileBound b;
    b.exponent1 = (K - k) / 4.0;
    b.exponent2 = (L - l) / 4.0;
    b.bound = std::pow(alpha.alpha1, 0.25) * std::pow(alpha.alpha2, 0.25) * std::pow(N1, -b.exponent1) *
              std::pow(N2, -b.exponent2);
    b.surviving = k == K && l == L;
    return b;
}

} // namespace cw2
