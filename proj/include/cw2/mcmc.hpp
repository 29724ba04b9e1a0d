#pragma once

// Metropolis single-spin-flip sampler for the two-group model.
//
// Generator: std::mt19937_64 seeded through std::seed_seq{seed_lo, seed_hi,
// stream}. Uniform variates are built from raw 64-bit outputs (53-bit
// doubles, multiply-shift site selection) so results do not depend on the
// standard library's distribution implementations.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "cw2/error.hpp"
#include "cw2/exact.hpp"
#include "cw2/model.hpp"
#include "cw2/special.hpp"

namespace cw2 {

enum class Start { Hot, Cold };

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Unbiased integer in [0, n) (Lemire's multiply-shift with rejection).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    unsigned __int128 m = static_cast<unsigned __int128>(rng()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = -n % n;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(rng()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

class SpinState {
public:
    SpinState(std::vector<std::int8_t> x, std::vector<std::int8_t> y, Rng rng) : x_(std::move(x)), y_(std::move(y)), rng_(std::move(rng))
    {
        require(!x_.empty() && !y_.empty(), "group sizes must be positive");
        recount();
    }

    [[nodiscard]] int N1() const { return static_cast<int>(x_.size()); }
    [[nodiscard]] int N2() const { return static_cast<int>(y_.size()); }
    [[nodiscard]] int N() const { return N1() + N2(); }
    [[nodiscard]] int s1() const { return s1_; }
    [[nodiscard]] int s2() const { return s2_; }
    [[nodiscard]] std::span<const std::int8_t> group1() const { return x_; }
    [[nodiscard]] std::span<const std::int8_t> group2() const { return y_; }
    Rng& rng() { return rng_; }

    /// Spin at combined site index (group 1 first).
    [[nodiscard]] int spin(int site) const { return site < N1() ? x_[site] : y_[site - N1()]; }

    /// Energy change of flipping the spin at `site`, from the cached sums.
    [[nodiscard]] double delta_energy(int site, const CouplingMatrix& J) const
    {
        const double n = N();
        if (site < N1()) {
            const double x = x_[site];
            return 2.0 / n * (J.J1 * (x * s1_ - 1.0) + J.Jbar * x * s2_);
        }
        const double y = y_[site - N1()];
        return 2.0 / n * (J.J2 * (y * s2_ - 1.0) + J.Jbar * y * s1_);
    }

    void flip(int site)
    {
        if (site < N1()) {
            s1_ -= 2 * x_[site];
            x_[site] = static_cast<std::int8_t>(-x_[site]);
        } else {
            s2_ -= 2 * y_[site - N1()];
            y_[site - N1()] = static_cast<std::int8_t>(-y_[site - N1()]);
        }
        assert(sums_consistent());
    }

    /// Full recount of both sums against the cached values.
    [[nodiscard]] bool sums_consistent() const
    {
        int a = 0, b = 0;
        for (auto v : x_) a += v;
        for (auto v : y_) b += v;
        return a == s1_ && b == s2_;
    }

private:
    void recount()
    {
        s1_ = s2_ = 0;
        for (auto v : x_) {
            require(v == 1 || v == -1, "spins must be +1 or -1");
            s1_ += v;
        }
        for (auto v : y_) {
            require(v == 1 || v == -1, "spins must be +1 or -1");
            s2_ += v;
        }
    }

    std::vector<std::int8_t> x_;
    std::vector<std::int8_t> y_;
    int s1_ = 0;
    int s2_ = 0;
    Rng rng_;
};

inline SpinState init_state(std::uint64_t seed, int N1, int N2, Start start = Start::Hot, std::uint64_t stream = 0)
{
    require(N1 >= 1 && N2 >= 1, "group sizes must be positive");
    auto rng = make_rng(seed, stream);
    std::vector<std::int8_t> x(N1, 1), y(N2, 1);
    if (start == Start::Hot) {
        for (auto& v : x) v = (rng() >> 63) ? 1 : -1;
        for (auto& v : y) v = (rng() >> 63) ? 1 : -1;
    }
    return {std::move(x), std::move(y), std::move(rng)};
}

/// N = N1 + N2 Metropolis proposals at uniformly chosen sites; returns the number accepted.
inline int sweep(SpinState& s, const CouplingMatrix& J)
{
    const auto n = static_cast<std::uint64_t>(s.N());
    int accepted = 0;
    for (std::uint64_t step = 0; step < n; ++step) {
        const int site = static_cast<int>(uniform_index(s.rng(), n));
        const double dh = s.delta_energy(site, J);
        if (dh <= 0.0 || uniform01(s.rng()) < std::exp(-dh)) {
            s.flip(site);
            ++accepted;
        }
    }
    return accepted;
}

struct ChainConfig {
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    long burn_in = -1; // sweeps; negative selects 100 * N
    long n_sweeps = 100000;
    int batch_count = 32;
    Start start = Start::Hot;
};

struct MomentEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    long n_samples = 0;
    int batch_count = 0;
    double lag1_autocorrelation = 0.0; // of the batch means
    bool converged = true;             // lag-1 autocorrelation below 3 / sqrt(batch_count)
};

/// Non-overlapping batch-means summary of a series of batch averages.
inline MomentEstimate batch_means_estimate(std::span<const double> means, long samples_per_batch)
{
    const auto b = static_cast<double>(means.size());
    MomentEstimate e;
    e.batch_count = static_cast<int>(means.size());
    e.n_samples = samples_per_batch * static_cast<long>(means.size());
    double m = 0.0;
    for (double v : means) m += v;
    m /= b;
    double ss = 0.0, lag = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        ss += (means[i] - m) * (means[i] - m);
        if (i + 1 < means.size()) lag += (means[i] - m) * (means[i + 1] - m);
    }
    e.value = m;
    e.standard_error = std::sqrt(ss / (b - 1.0) / b);
    e.lag1_autocorrelation = ss > 0.0 ? lag / ss : 0.0;
    e.converged = e.lag1_autocorrelation < 3.0 / std::sqrt(b);
    return e;
}

using TraceSink = std::function<void(long sweep, int s1, int s2)>;

/**
 * Time averages of (S1/n1)^K (S2/n2)^L for several orders from one chain:
 * n_sweeps sweeps after burn-in, one sample per sweep, batch-means standard
 * errors. Lack of convergence is reported through MomentEstimate::converged
 * and never throws.
 */
inline std::vector<MomentEstimate> sample_moment_set(const CouplingMatrix& J, int N1, int N2,
                                                     const std::vector<std::pair<int, int>>& orders, Normalization norm,
                                                     const ChainConfig& cfg, const TraceSink& trace = {})
{
    require(!orders.empty(), "no moment orders requested");
    for (const auto& [K, L] : orders) require(K >= 0 && L >= 0, "moment orders must be nonnegative");
    require(cfg.batch_count >= 8, "batch_count must be at least 8");
    require(cfg.n_sweeps >= 8L * cfg.batch_count, "n_sweeps must be at least 8 * batch_count");
    J.validate();

    auto s = init_state(cfg.seed, N1, N2, cfg.start, cfg.stream);
    const long burn = cfg.burn_in < 0 ? 100L * (N1 + N2) : cfg.burn_in;
    long t = 0;
    for (; t < burn; ++t) {
        sweep(s, J);
        if (trace) trace(t, s.s1(), s.s2());
    }

    const double n1 = group_scale(N1, norm);
    const double n2 = group_scale(N2, norm);
    const long per_batch = cfg.n_sweeps / cfg.batch_count;
    const std::size_t no = orders.size();
    std::vector<std::vector<double>> means(no);
    std::vector<double> acc(no);
    for (int b = 0; b < cfg.batch_count; ++b) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (long i = 0; i < per_batch; ++i, ++t) {
            sweep(s, J);
            if (trace) trace(t, s.s1(), s.s2());
            const double x = s.s1() / n1, y = s.s2() / n2;
            for (std::size_t o = 0; o < no; ++o) acc[o] += ipow(x, orders[o].first) * ipow(y, orders[o].second);
        }
        for (std::size_t o = 0; o < no; ++o) means[o].push_back(acc[o] / static_cast<double>(per_batch));
    }
    std::vector<MomentEstimate> out;
    for (std::size_t o = 0; o < no; ++o) out.push_back(batch_means_estimate(means[o], per_batch));
    return out;
}

inline MomentEstimate sample_moments(const CouplingMatrix& J, int N1, int N2, int K, int L, Normalization norm,
                                     const ChainConfig& cfg, const TraceSink& trace = {})
{
    return sample_moment_set(J, N1, N2, {{K, L}}, norm, cfg, trace).front();
}

/// Equal-weight combination of independent chains.
inline MomentEstimate combine_estimates(std::span<const MomentEstimate> chains)
{
    require(!chains.empty(), "no chains to combine");
    MomentEstimate out;
    double var = 0.0;
    out.converged = true;
    out.lag1_autocorrelation = -std::numeric_limits<double>::infinity(); // worst chain
    for (const auto& c : chains) {
        out.value += c.value;
        var += c.standard_error * c.standard_error;
        out.n_samples += c.n_samples;
        out.batch_count += c.batch_count;
        out.lag1_autocorrelation = std::max(out.lag1_autocorrelation, c.lag1_autocorrelation);
        out.converged = out.converged && c.converged;
    }
    const auto n = static_cast<double>(chains.size());
    out.value /= n;
    out.standard_error = std::sqrt(var) / n;
    return out;
}

} // namespace cw2
