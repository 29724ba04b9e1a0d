#pragma once

// Numerical evaluation of Z_N(K, L) = int exp(-N F(y)) tanh^K(y1) tanh^L(y2) d^2y
// in the rotated coordinates u = sqrt(g1) y1 - sqrt(g2) y2, v = sqrt(g1) y1 + sqrt(g2) y2,
// rescaled as u' = N^{1/2} u, v' = N^{1/4} v so that the integrand stays O(1)
// wide for every N.

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cw2/asympt.hpp"
#include "cw2/error.hpp"
#include "cw2/model.hpp"
#include "cw2/special.hpp"

namespace cw2 {

enum class QuadratureRule { TensorGaussLegendre, Adaptive };

struct QuadratureSpec {
    QuadratureRule rule = QuadratureRule::TensorGaussLegendre;
    int panels = 256;            // per axis over the full box; must be even
    int order = 8;               // Gauss-Legendre points per panel
    double half_width_u = 12.0;  // in scaled coordinates
    double half_width_v = 12.0;
    double u_exponent = 0.5;     // u' = N^{u_exponent} u
    double v_exponent = 0.25;    // v' = N^{v_exponent} v
    double tolerance = 1e-8;
    bool check_convergence = false; // repeat with doubled panels until results agree
    int max_panels = 2048;

    void validate() const
    {
        require(panels >= 2 && panels % 2 == 0, "panel count must be even and positive");
        require(tolerance > 0.0, "quadrature tolerance must be positive");
        require(half_width_u > 0.0 && half_width_v > 0.0, "box half-widths must be positive");
        require(max_panels >= panels, "max_panels must be at least panels");
    }
};

/// Gauss-Legendre abscissae and weights on [-1, 1] for the supported orders.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order)
{
    auto build = [](const auto& absc, const auto& wts, bool odd) {
        std::vector<double> x, w;
        for (std::size_t i = 0; i < absc.size(); ++i) {
            if (odd && i == 0) {
                x.push_back(0.0);
                w.push_back(wts[0]);
                continue;
            }
            x.push_back(absc[i]);
            w.push_back(wts[i]);
            x.push_back(-absc[i]);
            w.push_back(wts[i]);
        }
        return std::pair{x, w};
    };
    using namespace boost::math::quadrature;
    switch (order) {
    case 4: return build(gauss<double, 4>::abscissa(), gauss<double, 4>::weights(), false);
    case 8: return build(gauss<double, 8>::abscissa(), gauss<double, 8>::weights(), false);
    case 10: return build(gauss<double, 10>::abscissa(), gauss<double, 10>::weights(), false);
    case 15: return build(gauss<double, 15>::abscissa(), gauss<double, 15>::weights(), true);
    case 20: return build(gauss<double, 20>::abscissa(), gauss<double, 20>::weights(), false);
    default: throw invalid_input("unsupported Gauss-Legendre order (use 4, 8, 10, 15 or 20)");
    }
}

/// Composite Gauss-Legendre nodes on [0, h] with `panels` equal panels.
inline std::pair<std::vector<double>, std::vector<double>> half_line_nodes(int panels, int order, double h)
{
    const auto [x, w] = gauss_legendre(order);
    std::vector<double> nodes, weights;
    const double width = h / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * width;
        for (std::size_t i = 0; i < x.size(); ++i) {
            nodes.push_back(mid + 0.5 * width * x[i]);
            weights.push_back(0.5 * width * w[i]);
        }
    }
    return {nodes, weights};
}

/// Adaptive Gauss-Kronrod (7/15) integration; infinite limits are allowed.
template <class F>
double adaptive_integrate(F f, double a, double b, double rel_tol = 1e-12, double* error = nullptr)
{
    double err = 0.0;
    const double r = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 30, rel_tol, &err);
    if (error) *error = err;
    return r;
}

struct Order {
    int K = 0;
    int L = 0;
};

struct ZResult {
    std::vector<double> values;   // Z_N(K, L) per requested order
    int panels_used = 0;
    double self_convergence = 0.0; // max |change| / Z_N(0,0) at the last doubling
    double tail_estimate = 0.0;    // boundary integrand mass relative to Z_N(0,0)
    double half_width_u = 0.0;
    double half_width_v = 0.0;
};

namespace detail {

struct Rotation {
    double s1, s2;    // 1 / (2 sqrt g_nu)
    double su, sv;    // N^{-u_exponent}, N^{-v_exponent}
    double jacobian;  // dy1 dy2 = jacobian du' dv'

    Rotation(double N, double g1, double g2, const QuadratureSpec& spec)
        : s1(0.5 / std::sqrt(g1)), s2(0.5 / std::sqrt(g2)), su(std::pow(N, -spec.u_exponent)),
          sv(std::pow(N, -spec.v_exponent)), jacobian(su * sv / (2.0 * std::sqrt(g1 * g2)))
    {
    }

    [[nodiscard]] std::array<double, 2> operator()(double up, double vp) const
    {
        const double u = up * su, v = vp * sv;
        return {(u + v) * s1, (v - u) * s2};
    }
};

struct TensorPass {
    std::vector<double> sums;  // per order, scaled coordinates
    double boundary_max = 0.0; // max of exp(-NF) over the outermost nodes
};

// One tensor-rule pass. Nodes are symmetric about 0, so each point is evaluated
// together with its reflection through the origin, where F takes the same value.
inline TensorPass tensor_pass(double N, const std::vector<Order>& orders, const InverseCoupling& Lc,
                              const Fractions& a, const Rotation& rot, int panels, int order, double hu, double hv)
{
    const auto [un, uw] = half_line_nodes(panels / 2, order, hu);
    const auto [vn, vw] = half_line_nodes(panels / 2, order, hv);
    const std::size_t no = orders.size();
    std::vector<std::vector<double>> rows(no, std::vector<double>(un.size()));
    TensorPass out;
    out.sums.assign(no, 0.0);

    std::vector<CompensatedSum> acc(no);
    for (std::size_t i = 0; i < un.size(); ++i) {
        for (auto& c : acc) c = {};
        for (std::size_t j = 0; j < vn.size(); ++j) {
            const double w = uw[i] * vw[j];
            for (const double sgn : {1.0, -1.0}) {
                const auto [y1, y2] = rot(un[i], sgn * vn[j]);
                const double e = std::exp(-N * free_energy(y1, y2, Lc, a));
                if (i + 1 == un.size() || j + 1 == vn.size()) out.boundary_max = std::max(out.boundary_max, e);
                const double t1 = std::tanh(y1), t2 = std::tanh(y2);
                for (std::size_t o = 0; o < no; ++o) {
                    const int K = orders[o].K, L = orders[o].L;
                    if ((K + L) % 2 != 0) continue; // point and reflection cancel exactly
                    acc[o].add(2.0 * w * e * ipow(t1, K) * ipow(t2, L));
                }
            }
        }
        for (std::size_t o = 0; o < no; ++o) rows[o][i] = acc[o].value();
    }
    for (std::size_t o = 0; o < no; ++o) out.sums[o] = pairwise_sum(rows[o]);
    return out;
}

inline std::vector<double> adaptive_pass(double N, const std::vector<Order>& orders, const InverseCoupling& Lc,
                                         const Fractions& a, const Rotation& rot, double hu, double hv, double tol)
{
    std::vector<double> out;
    for (const auto& o : orders) {
        if ((o.K + o.L) % 2 != 0) {
            out.push_back(0.0);
            continue;
        }
        auto inner = [&](double up) {
            return adaptive_integrate(
                [&](double vp) {
                    const auto [y1, y2] = rot(up, vp);
                    return std::exp(-N * free_energy(y1, y2, Lc, a)) * ipow(std::tanh(y1), o.K) *
                           ipow(std::tanh(y2), o.L);
                },
                -hv, hv, tol);
        };
        out.push_back(adaptive_integrate(inner, -hu, hu, tol));
    }
    return out;
}

} // namespace detail

/**
 * Z_N(K, L) for several orders sharing one set of integrand evaluations.
 * The rotation uses g_nu = L_nu - alpha_nu, which must be positive (critical
 * or high-temperature parameters). The box grows by 1.5x (up to three times)
 * while the boundary mass exceeds tolerance; with check_convergence the panel
 * count doubles until successive results agree to tolerance * Z_N(0,0).
 */
inline ZResult z_integrals(double N, const std::vector<Order>& orders, const InverseCoupling& Lc, const Fractions& a,
                           const QuadratureSpec& spec = {})
{
    require(N >= 1.0, "N must be at least 1");
    spec.validate();
    a.validate();
    const double g1 = Lc.L1 - a.alpha1, g2 = Lc.L2 - a.alpha2;
    require(g1 > 0.0 && g2 > 0.0, "L_nu - alpha_nu must be positive for the rotated integral");
    for (const auto& o : orders) require(o.K >= 0 && o.L >= 0, "orders must be nonnegative");

    std::vector<Order> all = orders;
    all.insert(all.begin(), Order{0, 0});
    const detail::Rotation rot(N, g1, g2, spec);

    ZResult res;
    double hu = spec.half_width_u, hv = spec.half_width_v;

    if (spec.rule == QuadratureRule::Adaptive) {
        auto v = detail::adaptive_pass(N, all, Lc, a, rot, hu, hv, spec.tolerance * 1e-2);
        for (std::size_t o = 1; o < v.size(); ++o) res.values.push_back(v[o] * rot.jacobian);
        res.half_width_u = hu;
        res.half_width_v = hv;
        return res;
    }

    int panels = spec.panels;
    detail::TensorPass pass;
    for (int grow = 0;; ++grow) {
        pass = detail::tensor_pass(N, all, Lc, a, rot, panels, spec.order, hu, hv);
        res.tail_estimate = pass.boundary_max * (4.0 * hu * hv) / pass.sums[0];
        if (res.tail_estimate <= spec.tolerance) break;
        if (grow == 3) throw numerical_failure("integration box could not be widened enough to capture the integrand");
        hu *= 1.5;
        hv *= 1.5;
        panels = std::min(spec.max_panels, panels + panels / 2 + (panels / 2) % 2);
    }

    if (spec.check_convergence) {
        for (;;) {
            if (2 * panels > spec.max_panels)
                throw numerical_failure("quadrature did not self-converge within max_panels");
            auto finer = detail::tensor_pass(N, all, Lc, a, rot, 2 * panels, spec.order, hu, hv);
            double delta = 0.0;
            for (std::size_t o = 0; o < all.size(); ++o)
                delta = std::max(delta, std::abs(finer.sums[o] - pass.sums[o]) / finer.sums[0]);
            pass = std::move(finer);
            panels *= 2;
            res.self_convergence = delta;
            if (delta <= spec.tolerance) break;
        }
    }

    for (std::size_t o = 1; o < all.size(); ++o) res.values.push_back(pass.sums[o] * rot.jacobian);
    res.panels_used = panels;
    res.half_width_u = hu;
    res.half_width_v = hv;
    return res;
}

inline double z_integral(double N, int K, int L, const InverseCoupling& Lc, const Fractions& a,
                         const QuadratureSpec& spec = {})
{
    return z_integrals(N, {{K, L}}, Lc, a, spec).values.front();
}

/// Z_N(K, L) / Z_N(0, 0) for each order, from a single set of evaluations.
inline std::vector<double> correlation_ratios(double N, const std::vector<Order>& orders, const InverseCoupling& Lc,
                                              const Fractions& a, const QuadratureSpec& spec = {})
{
    std::vector<Order> all = orders;
    all.insert(all.begin(), Order{0, 0});
    const auto z = z_integrals(N, all, Lc, a, spec).values;
    std::vector<double> out;
    for (std::size_t o = 1; o < z.size(); ++o) out.push_back(z[o] / z[0]);
    return out;
}

inline double correlation_ratio(double N, int K, int L, const InverseCoupling& Lc, const Fractions& a,
                                const QuadratureSpec& spec = {})
{
    if (K == 0 && L == 0) return 1.0;
    return correlation_ratios(N, {{K, L}}, Lc, a, spec).front();
}

struct LaplaceRow {
    double N = 0.0;
    double ratio = 0.0;
    double scaled_ratio = 0.0; // ratio * N^{(K+L)/4}
    double limit_constant = 0.0;
    double rel_error = 0.0;    // absolute error when the limit constant is 0
};

struct LaplaceReport {
    int K = 0;
    int L = 0;
    std::vector<LaplaceRow> rows;
    bool decreasing = false;   // strictly, or identically zero

    [[nodiscard]] double final_error() const { return rows.empty() ? 0.0 : rows.back().rel_error; }
};

inline LaplaceRow make_laplace_row(double N, const Order& o, double ratio, const CriticalParams& p)
{
    LaplaceRow row;
    row.N = N;
    row.ratio = (o.K == 0 && o.L == 0) ? 1.0 : ratio;
    row.scaled_ratio = row.ratio * std::pow(N, (o.K + o.L) / 4.0);
    row.limit_constant = limit_constant(o.K, o.L, p);
    const double diff = std::abs(row.scaled_ratio - row.limit_constant);
    row.rel_error = row.limit_constant != 0.0 ? diff / std::abs(row.limit_constant) : diff;
    return row;
}

/// Strictly decreasing relative errors, or identically zero ones.
inline bool errors_decreasing(const std::vector<LaplaceRow>& rows)
{
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double prev = rows[i - 1].rel_error, cur = rows[i].rel_error;
        if (!(cur < prev || (cur == 0.0 && prev == 0.0))) return false;
    }
    return true;
}

inline void require_increasing_grid(const std::vector<double>& n_grid)
{
    require(n_grid.size() >= 3, "N grid needs at least 3 points");
    for (std::size_t i = 1; i < n_grid.size(); ++i) require(n_grid[i] > n_grid[i - 1], "N grid must be increasing");
}

/// Convergence of N^{(K+L)/4} Z_N(K,L)/Z_N(0,0) to the asymptotic constant, for several orders.
inline std::vector<LaplaceReport> laplace_limit_checks(const std::vector<Order>& orders, const CriticalParams& p,
                                                       const std::vector<double>& n_grid,
                                                       const QuadratureSpec& spec = {})
{
    require_increasing_grid(n_grid);
    std::vector<LaplaceReport> reps;
    for (const auto& o : orders) reps.push_back({o.K, o.L, {}, false});
    for (double N : n_grid) {
        const auto r = correlation_ratios(N, orders, p.inverse(), p.fractions(), spec);
        for (std::size_t o = 0; o < orders.size(); ++o) reps[o].rows.push_back(make_laplace_row(N, orders[o], r[o], p));
    }
    for (auto& rep : reps) rep.decreasing = errors_decreasing(rep.rows);
    return reps;
}

inline LaplaceReport laplace_limit_check(int K, int L, const CriticalParams& p, const std::vector<double>& n_grid,
                                         const QuadratureSpec& spec = {})
{
    return laplace_limit_checks({{K, L}}, p, n_grid, spec).front();
}

/// Fourth-order Taylor polynomial of F at the origin in the critical regime.
inline double taylor_quartic_F(double y1, double y2, const CriticalParams& p)
{
    const double q = std::sqrt(p.g1) * y1 - std::sqrt(p.g2) * y2;
    return 0.5 * (q * q + p.alpha1 / 6.0 * ipow(y1, 4) + p.alpha2 / 6.0 * ipow(y2, 4));
}

} // namespace cw2
