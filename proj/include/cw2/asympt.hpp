#pragma once

// Limiting quantities in the critical regime: moments of the N^{3/4}-scaled
// magnetizations, asymptotic distinct-spin correlations, the quartic gamma
// integral and the domination constant for the scaled Laplace integrand.

#include <cmath>
#include <vector>

#include "cw2/error.hpp"
#include "cw2/exact.hpp"
#include "cw2/model.hpp"
#include "cw2/special.hpp"

namespace cw2 {

struct CriticalParams {
    double L1 = 0.0, L2 = 0.0, Lbar = 0.0;
    double alpha1 = 0.5, alpha2 = 0.5;
    double g1 = 0.0; // L1 - alpha1
    double g2 = 0.0; // L2 - alpha2
    double c = 0.0;  // (alpha1/g1^2 + alpha2/g2^2) / (2^6 * 3)

    [[nodiscard]] InverseCoupling inverse() const { return {L1, L2, Lbar}; }
    [[nodiscard]] Fractions fractions() const { return {alpha1, alpha2}; }
    [[nodiscard]] double A() const { return alpha1 / (g1 * g1); }
    [[nodiscard]] double B() const { return alpha2 / (g2 * g2); }
};

/// Throws unless g1, g2 > 0 and g1 * g2 = Lbar^2 within tol * max(1, Lbar^2).
inline CriticalParams make_critical_params(const InverseCoupling& L, const Fractions& a, double tol = 1e-9)
{
    a.validate();
    CriticalParams p{L.L1, L.L2, L.Lbar, a.alpha1, a.alpha2, L.L1 - a.alpha1, L.L2 - a.alpha2, 0.0};
    require(p.g1 > 0.0 && p.g2 > 0.0, "parameters are not critical: L_nu - alpha_nu must be positive");
    require(std::abs(p.g1 * p.g2 - L.Lbar * L.Lbar) <= tol * std::max(1.0, L.Lbar * L.Lbar),
            "parameters are not critical: (L1 - alpha1)(L2 - alpha2) != Lbar^2");
    p.c = (p.A() + p.B()) / 192.0;
    return p;
}

inline CriticalParams make_critical_params(const CouplingMatrix& J, const Fractions& a, double tol = 1e-9)
{
    return make_critical_params(invert_coupling(J), a, tol);
}

/// Prefactor of N^{-(K+L)/4} in the asymptotic correlation E(X1..XK Y1..YL).
inline double limit_constant(int K, int L, const CriticalParams& p)
{
    require(K >= 0 && L >= 0, "orders must be nonnegative");
    const int k = K + L;
    if (k % 2 != 0) return 0.0;
    const double b = p.alpha1 * p.g2 * p.g2 + p.alpha2 * p.g1 * p.g1;
    // the gaps enter crossed: g1 with L/2, g2 with K/2
    return std::pow(12.0 / b, k / 4.0) * std::pow(p.g1, L / 2.0) * std::pow(p.g2, K / 2.0) *
           lanczos_gamma((k + 1) / 4.0) / lanczos_gamma(0.25);
}

/// m_KL of the limit law of (S1 / N1^{3/4}, S2 / N2^{3/4}).
inline double limit_moment(int K, int L, const CriticalParams& p)
{
    if ((K + L) % 2 != 0) return 0.0;
    return limit_constant(K, L, p) * std::pow(p.alpha1, K / 4.0) * std::pow(p.alpha2, L / 4.0);
}

inline double correlation_asymptotic(int K, int L, double N, const CriticalParams& p)
{
    require(N >= 1.0, "N must be at least 1");
    if ((K + L) % 2 != 0) return 0.0;
    return limit_constant(K, L, p) / std::pow(N, (K + L) / 4.0);
}

inline MomentTable limit_moment_table(int kmax, int lmax, const CriticalParams& p)
{
    require(kmax >= 0 && lmax >= 0, "moment orders must be nonnegative");
    MomentTable t{kmax, lmax, Normalization::Critical, {}};
    for (int K = 0; K <= kmax; ++K)
        for (int L = 0; L <= lmax; ++L) t.values.push_back(limit_moment(K, L, p));
    return t;
}

/// Integral of exp(-c v^4) v^k over the real line.
inline double gamma_quartic_integral(double c, int k)
{
    require(c > 0.0, "quartic coefficient must be positive");
    require(k >= 0, "power must be nonnegative");
    if (k % 2 != 0) return 0.0;
    const double s = (k + 1) / 4.0;
    return lanczos_gamma(s) / (2.0 * std::pow(c, s));
}

/**
 * Closed form for the domination constant as printed with the proof:
 * a = A (2 B^{1/3} / S)^{1/4} + B (2 A^{1/3} / S)^{1/4}, S = A^{1/3} + B^{1/3},
 * with A = alpha1 / g1^2 and B = alpha2 / g2^2. Equals 2A when A = B.
 */
inline double domination_constant_a(const CriticalParams& p)
{
    const double a3 = std::cbrt(p.A()), b3 = std::cbrt(p.B());
    const double s = a3 + b3;
    const double a = p.A() * std::pow(2.0 * b3 / s, 0.25) + p.B() * std::pow(2.0 * a3 / s, 0.25);
    require(a > 0.0, "domination constant must be positive");
    return a;
}

/// min over x of A (x + 1)^4 + B (1 - x)^4, i.e. 16 A B / (A^{1/3} + B^{1/3})^3.
inline double domination_constant_exact(const CriticalParams& p)
{
    const double s = std::cbrt(p.A()) + std::cbrt(p.B());
    return 16.0 * p.A() * p.B() / (s * s * s);
}

struct DominationGrid {
    int points = 201; // per axis
    double half_width = 10.0;
};

struct DominationViolation {
    double u, v;
    double integrand;
    double bound;
};

struct DominationReport {
    double a = 0.0;                 // constant used in the bound (exact minimum)
    double a_closed_form = 0.0;     // domination_constant_a
    double worst_ratio = 0.0;       // max integrand / bound over points with bound > 0
    double edge_max = 0.0;          // max of the bound on the box boundary
    std::vector<DominationViolation> violations;
    std::vector<DominationViolation> limit_violations; // N -> infinity integrand

    [[nodiscard]] bool ok() const { return violations.empty() && limit_violations.empty(); }
};

namespace detail {

inline double domination_bound(double u, double v, int K, int L, double a_scaled)
{
    const double env = std::exp(-0.5 * (u * u + a_scaled * v * v * v * v));
    const double au = std::abs(u), av = std::abs(v);
    double s = 0.0;
    for (int k = 0; k <= K; ++k)
        for (int l = 0; l <= L; ++l)
            s += binomial(K, k) * binomial(L, l) * ipow(au, L + k - l) * ipow(av, K + l - k);
    return env * s;
}

} // namespace detail

/**
 * Pointwise check that the scaled Laplace integrand
 *   exp(-1/2 [u^2 + A/96 (u N^{-1/4} + v)^4 + B/96 (v - u N^{-1/4})^4])
 *     * |u N^{-1/4} + v|^K |v - u N^{-1/4}|^L
 * is bounded by sum_{k,l} C(K,k) C(L,l) exp(-1/2 [u^2 + a/96 v^4]) |u|^{L+k-l} |v|^{K+l-k}
 * on a square grid. The quartic coefficient keeps the 1/(2^5 * 3) factor that
 * multiplies both quartic terms of the integrand.
 */
inline DominationReport check_domination(double N, int K, int L, const CriticalParams& p,
                                         const DominationGrid& grid = {})
{
    require(N >= 1.0, "N must be at least 1");
    require(K >= 0 && L >= 0, "orders must be nonnegative");
    require(grid.points >= 2 && grid.half_width > 0.0, "invalid domination grid");

    DominationReport rep;
    rep.a = domination_constant_exact(p);
    rep.a_closed_form = domination_constant_a(p);
    const double qa = p.A() / 96.0, qb = p.B() / 96.0;
    const double as = rep.a / 96.0;
    const double shrink = std::pow(N, -0.25);
    const double h = 2.0 * grid.half_width / (grid.points - 1);

    for (int i = 0; i < grid.points; ++i) {
        const double u = -grid.half_width + h * i;
        for (int j = 0; j < grid.points; ++j) {
            const double v = -grid.half_width + h * j;
            const double bound = detail::domination_bound(u, v, K, L, as);
            const double x = u * shrink + v, y = v - u * shrink;
            const double f = std::exp(-0.5 * (u * u + qa * ipow(x, 4) + qb * ipow(y, 4))) *
                             std::abs(ipow(x, K) * ipow(y, L));
            const double flim = std::exp(-0.5 * (u * u + (qa + qb) * ipow(v, 4))) * ipow(std::abs(v), K + L);
            if (bound > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, std::max(f, flim) / bound);
            if (f > bound * (1.0 + 1e-12)) rep.violations.push_back({u, v, f, bound});
            if (flim > bound * (1.0 + 1e-12)) rep.limit_violations.push_back({u, v, flim, bound});
            if (i == 0 || j == 0 || i == grid.points - 1 || j == grid.points - 1)
                rep.edge_max = std::max(rep.edge_max, bound);
        }
    }
    return rep;
}

} // namespace cw2
