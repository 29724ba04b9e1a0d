#pragma once

// Two-group Curie-Weiss model: couplings, group sizes, regime classification
// and the free-energy function F(y1, y2) governing the Laplace analysis.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "cw2/error.hpp"
#include "cw2/special.hpp"

namespace cw2 {

/// Symmetric interaction matrix [[J1, Jbar], [Jbar, J2]].
struct CouplingMatrix {
    double J1 = 0.0;
    double J2 = 0.0;
    double Jbar = 0.0;

    [[nodiscard]] double determinant() const { return J1 * J2 - Jbar * Jbar; }

    /// Throws unless J1, J2 > 0, Jbar >= 0 and the matrix is positive definite.
    void validate() const
    {
        require(std::isfinite(J1) && std::isfinite(J2) && std::isfinite(Jbar), "coupling entries must be finite");
        require(J1 > 0.0 && J2 > 0.0, "J1 and J2 must be positive");
        require(Jbar >= 0.0, "Jbar must be nonnegative");
        require(determinant() > 0.0, "coupling matrix is not positive definite (J1*J2 - Jbar^2 <= 0)");
    }
};

/// Group fractions alpha_nu; finite systems use N_nu / N, limit formulas may use supplied values.
struct Fractions {
    double alpha1 = 0.5;
    double alpha2 = 0.5;

    void validate() const
    {
        require(alpha1 > 0.0 && alpha1 < 1.0 && alpha2 > 0.0 && alpha2 < 1.0,
                "group fractions must lie strictly between 0 and 1");
        require(std::abs(alpha1 + alpha2 - 1.0) <= 1e-12, "group fractions must sum to 1");
    }
};

struct GroupStructure {
    int N1 = 1;
    int N2 = 1;
    Fractions alpha;

    [[nodiscard]] int total() const { return N1 + N2; }

    static GroupStructure from_sizes(int n1, int n2)
    {
        require(n1 >= 1 && n2 >= 1, "group sizes must be positive");
        const double n = static_cast<double>(n1) + static_cast<double>(n2);
        return {n1, n2, {n1 / n, n2 / n}};
    }

    /// Splits a total size N by the fractions, rounding group 1 to nearest.
    static GroupStructure split(int n, Fractions f)
    {
        f.validate();
        const int n1 = static_cast<int>(std::lround(f.alpha1 * n));
        require(n1 >= 1 && n - n1 >= 1, "total size too small for the requested fractions");
        return from_sizes(n1, n - n1);
    }
};

/// J^{-1} = [[L1, -Lbar], [-Lbar, L2]] with Lbar = Jbar / Delta >= 0.
struct InverseCoupling {
    double L1 = 0.0;
    double L2 = 0.0;
    double Lbar = 0.0;
};

inline InverseCoupling invert_coupling(const CouplingMatrix& J)
{
    J.validate();
    const double d = J.determinant();
    return {J.J2 / d, J.J1 / d, J.Jbar / d};
}

/// Inverse of invert_coupling.
inline CouplingMatrix to_coupling(const InverseCoupling& L)
{
    const double d = L.L1 * L.L2 - L.Lbar * L.Lbar;
    require(d > 0.0, "inverse coupling is not positive definite");
    return {L.L2 / d, L.L1 / d, L.Lbar / d};
}

enum class RegimeTag { HighTemperature, Critical, OutOfScope };

inline std::string_view to_string(RegimeTag t)
{
    switch (t) {
    case RegimeTag::HighTemperature: return "HighTemperature";
    case RegimeTag::Critical: return "Critical";
    case RegimeTag::OutOfScope: return "OutOfScope";
    }
    return "?";
}

struct Regime {
    RegimeTag tag = RegimeTag::OutOfScope;
    double slack = 0.0;               // (1/a1 - J1)(1/a2 - J2) - Jbar^2
    double gap1 = 0.0;                // L1 - alpha1
    double gap2 = 0.0;                // L2 - alpha2
    double det_inverse_minus_alpha = 0.0;
    bool matrix_form_critical = false; // singular J^{-1} - diag(alpha) with positive diagonal
};

inline Regime classify_regime(const CouplingMatrix& J, const Fractions& alpha, double tol = 1e-9)
{
    alpha.validate();
    require(tol >= 0.0, "tolerance must be nonnegative");
    const auto L = invert_coupling(J);

    Regime r;
    const double d1 = 1.0 / alpha.alpha1 - J.J1;
    const double d2 = 1.0 / alpha.alpha2 - J.J2;
    r.slack = d1 * d2 - J.Jbar * J.Jbar;
    const double scale = std::max(1.0, J.Jbar * J.Jbar);
    const bool diagonal_ok = d1 > 0.0 && d2 > 0.0;
    if (diagonal_ok && std::abs(r.slack) <= tol * scale)
        r.tag = RegimeTag::Critical;
    else if (diagonal_ok && r.slack > tol * scale)
        r.tag = RegimeTag::HighTemperature;
    else
        r.tag = RegimeTag::OutOfScope;

    r.gap1 = L.L1 - alpha.alpha1;
    r.gap2 = L.L2 - alpha.alpha2;
    r.det_inverse_minus_alpha = r.gap1 * r.gap2 - L.Lbar * L.Lbar;
    const double mscale = std::max(1.0, L.Lbar * L.Lbar);
    r.matrix_form_critical = r.gap1 > 0.0 && r.gap2 > 0.0 && std::abs(r.det_inverse_minus_alpha) <= tol * mscale;
    return r;
}

/// H(s1, s2) = -(1/2N)[J1 s1^2 + J2 s2^2 + 2 Jbar s1 s2], N = N1 + N2.
inline double hamiltonian(int s1, int s2, const CouplingMatrix& J, int N1, int N2)
{
    require(N1 >= 1 && N2 >= 1, "group sizes must be positive");
    require(std::abs(s1) <= N1 && std::abs(s2) <= N2, "magnetization exceeds group size");
    require((s1 - N1) % 2 == 0 && (s2 - N2) % 2 == 0, "magnetization parity must match group size");
    const double a = s1, b = s2;
    const double n = static_cast<double>(N1) + static_cast<double>(N2);
    return -(J.J1 * a * a + J.J2 * b * b + 2.0 * J.Jbar * a * b) / (2.0 * n);
}

inline double free_energy(double y1, double y2, const InverseCoupling& L, const Fractions& a)
{
    return 0.5 * L.L1 * y1 * y1 + 0.5 * L.L2 * y2 * y2 - L.Lbar * y1 * y2 - a.alpha1 * ln_cosh(y1) -
           a.alpha2 * ln_cosh(y2);
}

inline std::array<double, 2> grad_free_energy(double y1, double y2, const InverseCoupling& L, const Fractions& a)
{
    return {L.L1 * y1 - L.Lbar * y2 - a.alpha1 * std::tanh(y1),
            L.L2 * y2 - L.Lbar * y1 - a.alpha2 * std::tanh(y2)};
}

/// d^2/dt^2 F(t x0, t y0) along the unit direction (x0, y0).
inline double directional_second_derivative(double t, double x0, double y0, const InverseCoupling& L,
                                            const Fractions& a)
{
    require(std::abs(x0 * x0 + y0 * y0 - 1.0) <= 1e-12, "direction must be a unit vector");
    const double c1 = std::cosh(t * x0);
    const double c2 = std::cosh(t * y0);
    return L.L1 * x0 * x0 + L.L2 * y0 * y0 - 2.0 * L.Lbar * x0 * y0 - a.alpha1 * x0 * x0 / (c1 * c1) -
           a.alpha2 * y0 * y0 / (c2 * c2);
}

struct RadialGrid {
    int directions = 360;
    double t_max = 10.0;
    int radii = 200;
};

struct MinimumViolation {
    double x0, y0, t;
    double second_derivative;
    double free_energy;
};

struct MinimumReport {
    double min_second_derivative = 0.0; // over sampled t > 0
    double min_free_energy = 0.0;       // over sampled t > 0
    double min_second_derivative_at_origin = 0.0;
    int degenerate_directions = 0;      // t = 0 directions where d2F vanishes (allowed)
    double hessian_det = 0.0;
    bool hessian_positive_definite = false;
    std::vector<MinimumViolation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
};

/**
 * Scans F along rays from the origin. Every sampled t > 0 must give
 * d2F/dt2 > 0 and F > 0; t = 0 may vanish only along the degenerate
 * directions, which are counted rather than reported as violations.
 * In the critical regime the two degenerate directions +-(sqrt g2, sqrt g1)
 * are always included in the scan.
 */
inline MinimumReport verify_unique_minimum(const InverseCoupling& L, const Fractions& a, const RadialGrid& grid = {})
{
    require(grid.directions >= 1 && grid.radii >= 1 && grid.t_max > 0.0, "invalid radial grid");
    const double g1 = L.L1 - a.alpha1;
    const double g2 = L.L2 - a.alpha2;

    std::vector<std::array<double, 2>> dirs;
    dirs.reserve(static_cast<std::size_t>(grid.directions) + 2);
    for (int i = 0; i < grid.directions; ++i) {
        const double th = 2.0 * std::numbers::pi * i / grid.directions;
        dirs.push_back({std::cos(th), std::sin(th)});
    }
    if (g1 > 0.0 && g2 > 0.0) {
        const double n = std::sqrt(g1 + g2);
        for (const double sg : {1.0, -1.0}) {
            const std::array<double, 2> d{sg * std::sqrt(g2) / n, sg * std::sqrt(g1) / n};
            const bool present = std::any_of(dirs.begin(), dirs.end(), [&](const auto& e) {
                return std::abs(e[0] - d[0]) < 1e-12 && std::abs(e[1] - d[1]) < 1e-12;
            });
            if (!present) dirs.push_back(d);
        }
    }

    MinimumReport rep;
    rep.min_second_derivative = std::numeric_limits<double>::infinity();
    rep.min_free_energy = std::numeric_limits<double>::infinity();
    rep.min_second_derivative_at_origin = std::numeric_limits<double>::infinity();
    rep.hessian_det = g1 * g2 - L.Lbar * L.Lbar;
    rep.hessian_positive_definite = g1 > 0.0 && rep.hessian_det > 0.0;

    for (const auto& [x0, y0] : dirs) {
        const double d0 = directional_second_derivative(0.0, x0, y0, L, a);
        rep.min_second_derivative_at_origin = std::min(rep.min_second_derivative_at_origin, d0);
        if (std::abs(d0) <= 1e-12)
            ++rep.degenerate_directions;
        else if (d0 < 0.0)
            rep.violations.push_back({x0, y0, 0.0, d0, 0.0});

        for (int j = 1; j <= grid.radii; ++j) {
            const double t = grid.t_max * j / grid.radii;
            const double d2 = directional_second_derivative(t, x0, y0, L, a);
            const double f = free_energy(t * x0, t * y0, L, a);
            rep.min_second_derivative = std::min(rep.min_second_derivative, d2);
            rep.min_free_energy = std::min(rep.min_free_energy, f);
            if (!(d2 > 0.0) || !(f > 0.0)) rep.violations.push_back({x0, y0, t, d2, f});
        }
    }
    return rep;
}

} // namespace cw2
