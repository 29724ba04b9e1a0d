// Acceptance criteria 1-10: one PASS/FAIL line each, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cw2/asympt.hpp"
#include "cw2/combinat.hpp"
#include "cw2/exact.hpp"
#include "cw2/mcmc.hpp"
#include "cw2/model.hpp"
#include "cw2/quad.hpp"
#include "cw2/scaling.hpp"

using namespace cw2;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

const CouplingMatrix kCritical{1.5, 1.5, 0.5};
const Fractions kHalf{0.5, 0.5};

std::string fmt(const char* f, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome ac1()
{
    const std::vector<std::pair<int, int>> sizes{{4, 4}, {5, 3}, {6, 6}, {2, 10}};
    const std::vector<CouplingMatrix> couplings{
        {1.5, 1.5, 0.5}, {1.0, 1.0, 0.3}, {0.4, 2.2, 0.9}, {2.5, 0.7, 0.1}, {0.9, 0.9, 0.0}};
    double worst = 0.0;
    for (const auto& [N1, N2] : sizes)
        for (const auto& J : couplings)
            worst = std::max(worst, total_variation(magnetization_distribution(J, N1, N2), brute_force_distribution(J, N1, N2)));
    return {worst < 1e-12, "max TV " + fmt("%.3g", worst)};
}

Outcome ac2()
{
    double worst = 0.0;
    for (const auto& [N1, N2] : {std::pair{6, 6}, {5, 7}}) {
        const auto d = magnetization_distribution(kCritical, N1, N2);
        for (int K = 0; K <= 6; ++K)
            for (int L = 0; K + L <= 6; ++L) {
                const double e = exact_moment(d, K, L, Normalization::Raw);
                const double m = moment_via_profiles(K, L, d);
                worst = std::max(worst, e == 0.0 ? std::abs(m) : std::abs(m - e) / std::abs(e));
            }
    }
    return {worst < 1e-10, "max rel err " + fmt("%.3g", worst)};
}

Outcome ac3()
{
    const auto p = make_critical_params(kCritical, kHalf);
    const std::vector<Order> orders{{2, 0}, {0, 2}, {1, 1}, {4, 0}, {2, 2}};
    const auto reps = laplace_limit_checks(orders, p, {1e2, 1e3, 1e4});
    bool ok = true;
    std::string detail;
    for (const auto& r : reps) {
        ok = ok && r.decreasing && r.final_error() < 0.05;
        detail += "(" + std::to_string(r.K) + "," + std::to_string(r.L) + ") " + fmt("%.5f", r.rows[0].rel_error) + ">" +
                  fmt("%.5f", r.rows[1].rel_error) + ">" + fmt("%.5f", r.rows[2].rel_error) + (r.decreasing ? "" : " !dec") +
                  "; ";
    }
    return {ok, detail};
}

Outcome ac4()
{
    const auto p = make_critical_params(kCritical, kHalf);
    const double m20 = limit_moment(2, 0, p);
    std::vector<double> errs;
    for (const int N : {256, 1024, 4096}) {
        const auto d = magnetization_distribution(kCritical, N / 2, N / 2);
        errs.push_back(std::abs(exact_moment(d, 2, 0, Normalization::Critical) - m20) / m20);
    }
    const bool ok = errs[1] < errs[0] && errs[2] < errs[1] && errs[2] < 0.20;
    return {ok, "m20 " + fmt("%.6f", m20) + ", rel err " + fmt("%.4f", errs[0]) + " > " + fmt("%.4f", errs[1]) + " > " +
                    fmt("%.4f", errs[2])};
}

Outcome ac5()
{
    auto fit = [](const CouplingMatrix& J, double* lln) {
        std::vector<std::pair<double, double>> pts;
        for (const int N : {256, 512, 1024, 2048, 4096}) {
            const auto d = magnetization_distribution(J, N / 2, N / 2);
            pts.emplace_back(N, exact_moment(d, 2, 0, Normalization::Raw));
            if (lln) *lln = exact_moment(d, 2, 0, Normalization::PerSpin);
        }
        return fit_power_law(pts);
    };
    double lln = 1.0;
    const auto crit = fit(kCritical, &lln);
    const auto high = fit({1.0, 1.0, 0.3}, nullptr);
    const bool ok = crit.exponent >= 1.40 && crit.exponent <= 1.55 && high.exponent >= 0.95 && high.exponent <= 1.05 &&
                    crit.r_squared > 0.999 && high.r_squared > 0.999 && lln < 0.05;
    return {ok, "critical slope " + fmt("%.4f", crit.exponent) + " (r2 " + fmt("%.7f", crit.r_squared) +
                    "), high-temperature slope " + fmt("%.4f", high.exponent) + " (r2 " + fmt("%.7f", high.r_squared) +
                    "), E[(S1/N1)^2] at 4096 " + fmt("%.4f", lln)};
}

Outcome ac6()
{
    const auto L = invert_coupling(kCritical);
    const double g1 = L.L1 - 0.5, g2 = L.L2 - 0.5;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> box(-3.0, 3.0), ang(0.0, 2.0 * std::numbers::pi);
    double grad = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double y1 = box(rng), y2 = box(rng), h = 1e-5;
        const auto g = grad_free_energy(y1, y2, L, kHalf);
        const double f1 = (free_energy(y1 + h, y2, L, kHalf) - free_energy(y1 - h, y2, L, kHalf)) / (2 * h);
        const double f2 = (free_energy(y1, y2 + h, L, kHalf) - free_energy(y1, y2 - h, L, kHalf)) / (2 * h);
        grad = std::max(grad, std::hypot(f1 - g[0], f2 - g[1]) / std::hypot(g[0], g[1]));
    }
    double d2 = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double th = ang(rng), x0 = std::cos(th), y0 = std::sin(th);
        const double q = std::sqrt(g1) * x0 - std::sqrt(g2) * y0;
        d2 = std::max(d2, std::abs(directional_second_derivative(0.0, x0, y0, L, kHalf) - q * q));
    }
    const auto rep = verify_unique_minimum(L, kHalf);
    const bool ok = grad < 1e-6 && d2 < 1e-10 && rep.ok() && rep.min_free_energy > 0.0 && rep.min_second_derivative > 0.0;
    return {ok, "grad rel err " + fmt("%.3g", grad) + ", d2F(0) err " + fmt("%.3g", d2) + ", min F " +
                    fmt("%.3g", rep.min_free_energy) + ", min d2F " + fmt("%.3g", rep.min_second_derivative)};
}

Outcome ac7()
{
    double worst = 0.0;
    for (const double c : {0.5, 1.0, 2.0})
        for (const int k : {0, 2, 4, 6}) {
            const double q =
                2.0 * adaptive_integrate([&](double v) { return std::exp(-c * ipow(v, 4)) * ipow(v, k); }, 0.0, 12.0, 1e-13);
            worst = std::max(worst, std::abs(gamma_quartic_integral(c, k) - q) / q);
        }
    bool odd = true;
    for (const double c : {0.5, 1.0, 2.0})
        for (const int k : {1, 3, 5, 7}) odd = odd && gamma_quartic_integral(c, k) == 0.0;
    return {worst < 1e-8 && odd, "max rel err " + fmt("%.3g", worst) + (odd ? ", odd k exactly 0" : ", odd k nonzero")};
}

Outcome ac8()
{
    const auto p = make_critical_params(kCritical, kHalf);
    bool ok = true;
    double worst = 0.0;
    std::size_t violations = 0;
    for (const double N : {1.0, 16.0, 256.0})
        for (const auto& [K, L] : {std::pair{0, 0}, {2, 2}, {4, 0}}) {
            const auto rep = check_domination(N, K, L, p);
            ok = ok && rep.ok();
            violations += rep.violations.size() + rep.limit_violations.size();
            worst = std::max(worst, rep.worst_ratio);
        }
    const auto q = make_critical_params(InverseCoupling{0.9, 0.6, std::sqrt(0.06)}, Fractions{0.6, 0.4});
    const auto qs = make_critical_params(InverseCoupling{0.6, 0.9, std::sqrt(0.06)}, Fractions{0.4, 0.6});
    const double a = domination_constant_a(q), as = domination_constant_a(qs);
    const bool sym = std::abs(a - as) <= 1e-14 * a;
    ok = ok && a > 0.0 && domination_constant_a(p) > 0.0 && sym;
    return {ok, std::to_string(violations) + " violations, worst ratio " + fmt("%.4f", worst) + ", a = " +
                    fmt("%.6g", domination_constant_a(p)) + " (reference), " + fmt("%.6g", a) + " vs swapped " +
                    fmt("%.6g", as)};
}

Outcome ac9()
{
    const double exact = exact_moment(magnetization_distribution(kCritical, 32, 32), 2, 0, Normalization::Critical);
    int excursions = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ChainConfig cfg;
        cfg.seed = seed;
        const auto e = sample_moments(kCritical, 32, 32, 2, 0, Normalization::Critical, cfg);
        const double z = std::abs(e.value - exact) / e.standard_error;
        worst = std::max(worst, z);
        if (z > 3.0) ++excursions;
    }
    ChainConfig cfg;
    cfg.seed = 4;
    const auto a = sample_moments(kCritical, 32, 32, 2, 0, Normalization::Critical, cfg);
    const auto b = sample_moments(kCritical, 32, 32, 2, 0, Normalization::Critical, cfg);
    const bool same = a.value == b.value && a.standard_error == b.standard_error;
    return {excursions <= 1 && same, std::to_string(excursions) + "/10 beyond 3 SE (max |z| " + fmt("%.2f", worst) +
                                         "), rerun " + (same ? "bit-identical" : "differs")};
}

Outcome ac10()
{
    const auto p = make_critical_params(kCritical, kHalf);
    bool ok = limit_moment(0, 0, p) == 1.0;
    for (const auto& [N1, N2] : {std::pair{6, 6}, {5, 7}, {64, 64}, {31, 50}}) {
        const auto d = magnetization_distribution(kCritical, N1, N2);
        for (const auto norm : {Normalization::Raw, Normalization::Critical}) {
            ok = ok && exact_moment(d, 0, 0, norm) == 1.0;
            for (int K = 0; K <= 8; ++K)
                for (int L = 0; L <= 8; ++L)
                    if ((K + L) % 2) ok = ok && exact_moment(d, K, L, norm) == 0.0;
        }
    }
    for (int K = 0; K <= 8; ++K)
        for (int L = 0; L <= 8; ++L)
            if ((K + L) % 2) ok = ok && limit_moment(K, L, p) == 0.0 && correlation_asymptotic(K, L, 1e4, p) == 0.0;
    return {ok, ok ? "odd moments exactly 0, m00 = 1" : "parity broken"};
}

} // namespace

int main()
{
    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"AC1 oracle equivalence", 10, ac1},   {"AC2 moment-method identity", 10, ac2},
        {"AC3 quadrature vs asymptotic correlations", 120, ac3},
        {"AC4 finite-size trend of m20", 60, ac4}, {"AC5 scaling exponents", 120, ac5},
        {"AC6 analytic identities", 5, ac6},   {"AC7 quartic gamma integral", 5, ac7},
        {"AC8 domination", 30, ac8},           {"AC9 MCMC consistency", 120, ac9},
        {"AC10 parity exactness", 60, ac10},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && s < c.budget_seconds;
        if (!pass) ++failed;
        std::printf("%s %s [%.2fs / %.0fs] %s\n", pass ? "PASS" : "FAIL", c.name, s, c.budget_seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
