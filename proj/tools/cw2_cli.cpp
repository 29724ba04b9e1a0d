// cw2: command-line front end for the two-group Curie-Weiss toolkit.
//
// Exit codes: 0 ok, 1 verification failure (or numerical failure), 2 invalid input.
// CW2_NUM_THREADS caps the number of worker threads used over grid points.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cw2/asympt.hpp"
#include "cw2/combinat.hpp"
#include "cw2/exact.hpp"
#include "cw2/io.hpp"
#include "cw2/mcmc.hpp"
#include "cw2/model.hpp"
#include "cw2/quad.hpp"
#include "cw2/scaling.hpp"

using namespace cw2;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_invalid = 2;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format = "csv";
    std::optional<int> max_order;
    std::optional<double> J1, J2, Jbar, alpha1, alpha2;
    std::optional<int> N1, N2;
    std::string grid;
    std::string orders;
    std::optional<double> enum_cap;
    // mcmc
    std::optional<long> sweeps, burn_in;
    std::optional<int> batches;
    std::optional<int> chains;
    std::string start;
    std::string normalization = "critical";
    std::string trace;
    // quadrature
    std::optional<int> panels;
    std::optional<int> gl_order;
    std::optional<double> half_width;
    bool adaptive = false;
    bool self_check = false;
    // scaling
    std::string synthetic;
    // profiles
    std::optional<int> profile_K;
    std::optional<int> profile_N;
    // verify
    std::string inject_fault;
    std::string brute;
};

// ---------------------------------------------------------------- parallelism

unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CW2_NUM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        require(end != env && *end == '\0' && v >= 1, "CW2_NUM_THREADS must be a positive integer");
        n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

// Evaluates f(0..n-1) on up to worker_count() threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& f)
{
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned k = std::min<std::size_t>(worker_count(), n);
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < k; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

// ---------------------------------------------------------------- config

struct Experiment {
    json raw = json::object();
    ModelConfig model;
    std::uint64_t seed = 1;
};

std::vector<double> parse_number_list(const std::string& s)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            require(used == item.size(), "bad number in list: " + item);
        } catch (const std::logic_error&) {
            throw invalid_input("bad number in list: " + item);
        }
    }
    return v;
}

Experiment load(const Options& o)
{
    Experiment e;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        require(in.good(), "cannot read config file " + o.config_path);
        try {
            e.raw = json::parse(in);
        } catch (const json::exception& ex) {
            throw invalid_input(std::string("config is not valid JSON: ") + ex.what());
        }
        require(e.raw.is_object(), "config must be a JSON object");
    }
    json m = e.raw.value("model", json{{"J1", 1.5}, {"J2", 1.5}, {"Jbar", 0.5}, {"alpha1", 0.5}, {"alpha2", 0.5}});
    require(m.is_object(), "\"model\" must be an object");
    if (o.J1) m["J1"] = *o.J1;
    if (o.J2) m["J2"] = *o.J2;
    if (o.Jbar) m["Jbar"] = *o.Jbar;
    if (o.alpha1) m["alpha1"] = *o.alpha1;
    if (o.alpha2) m["alpha2"] = *o.alpha2;
    if (o.N1) m["N1"] = *o.N1;
    if (o.N2) m["N2"] = *o.N2;
    e.model = parse_model_config(m);
    e.model.J.validate();
    try {
        e.seed = o.seed ? *o.seed : e.raw.value("seed", std::uint64_t{1});
    } catch (const json::exception& ex) {
        throw invalid_input(std::string("bad seed: ") + ex.what());
    }
    return e;
}

template <class T>
T config_value(const json& block, const char* key, T fallback)
{
    if (!block.is_object() || !block.contains(key)) return fallback;
    try {
        return block.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw invalid_input(std::string("bad value for \"") + key + "\": " + ex.what());
    }
}

std::vector<double> grid_of(const Options& o, const Experiment& e, std::vector<double> fallback)
{
    std::vector<double> g = fallback;
    if (!o.grid.empty())
        g = parse_number_list(o.grid);
    else if (e.raw.contains("grid"))
        g = config_value<std::vector<double>>(e.raw, "grid", fallback);
    require(!g.empty(), "N grid is empty");
    for (std::size_t i = 0; i < g.size(); ++i) {
        require(g[i] >= 2.0, "grid sizes must be at least 2");
        if (i) require(g[i] > g[i - 1], "N grid must be strictly increasing");
    }
    return g;
}

int max_order_of(const Options& o, const Experiment& e, int fallback)
{
    const int k = o.max_order ? *o.max_order : config_value<int>(e.raw, "max_order", fallback);
    require(k >= 0 && k <= 8, "max-order must lie in [0, 8]");
    return k;
}

std::vector<Order> orders_of(const Options& o, const Experiment& e, int fallback_max)
{
    std::vector<Order> out;
    if (!o.orders.empty()) {
        std::stringstream ss(o.orders);
        std::string item;
        while (std::getline(ss, item, ';')) {
            const auto v = parse_number_list(item);
            require(v.size() == 2, "orders are written K,L;K,L;...");
            out.push_back({static_cast<int>(v[0]), static_cast<int>(v[1])});
        }
    } else if (e.raw.contains("orders")) {
        for (const auto& p : config_value<std::vector<std::vector<int>>>(e.raw, "orders", {})) {
            require(p.size() == 2, "orders entries are [K, L] pairs");
            out.push_back({p[0], p[1]});
        }
    } else {
        const int k = max_order_of(o, e, fallback_max);
        for (int t = 0; t <= k; ++t)
            for (int K = t; K >= 0; --K) out.push_back({K, t - K});
    }
    require(!out.empty(), "no moment orders requested");
    for (const auto& x : out) require(x.K >= 0 && x.L >= 0 && x.K + x.L <= 8, "moment orders need 0 <= K + L <= 8");
    return out;
}

ChainConfig chain_of(const Options& o, const Experiment& e)
{
    const json c = e.raw.value("chain", json::object());
    ChainConfig cfg;
    cfg.seed = e.seed;
    cfg.burn_in = o.burn_in ? *o.burn_in : config_value<long>(c, "burn_in", -1);
    cfg.n_sweeps = o.sweeps ? *o.sweeps : config_value<long>(c, "n_sweeps", cfg.n_sweeps);
    cfg.batch_count = o.batches ? *o.batches : config_value<int>(c, "batch_count", cfg.batch_count);
    const std::string start = o.start.empty() ? config_value<std::string>(c, "start", "hot") : o.start;
    require(start == "hot" || start == "cold", "start must be hot or cold");
    cfg.start = start == "hot" ? Start::Hot : Start::Cold;
    require(cfg.n_sweeps >= 8L * cfg.batch_count && cfg.batch_count >= 8,
            "chain needs batch_count >= 8 and n_sweeps >= 8 * batch_count");
    return cfg;
}

QuadratureSpec quad_of(const Options& o, const Experiment& e)
{
    const json q = e.raw.value("quadrature", json::object());
    QuadratureSpec s;
    s.panels = o.panels ? *o.panels : config_value<int>(q, "panels", s.panels);
    s.order = o.gl_order ? *o.gl_order : config_value<int>(q, "order", s.order);
    const double hw = o.half_width ? *o.half_width : -1.0;
    s.half_width_u = hw > 0 ? hw : config_value<double>(q, "half_width_u", s.half_width_u);
    s.half_width_v = hw > 0 ? hw : config_value<double>(q, "half_width_v", s.half_width_v);
    s.tolerance = config_value<double>(q, "tolerance", s.tolerance);
    s.check_convergence = o.self_check || config_value<bool>(q, "check_convergence", false);
    s.max_panels = std::max(s.panels, config_value<int>(q, "max_panels", s.max_panels));
    const std::string rule = o.adaptive ? "adaptive" : config_value<std::string>(q, "rule", "tensor");
    require(rule == "tensor" || rule == "adaptive", "quadrature rule must be tensor or adaptive");
    s.rule = rule == "adaptive" ? QuadratureRule::Adaptive : QuadratureRule::TensorGaussLegendre;
    s.validate();
    gauss_legendre(s.order); // rejects unsupported orders up front
    return s;
}

double enum_cap_of(const Options& o, const Experiment& e)
{
    const double cap = o.enum_cap ? *o.enum_cap : config_value<double>(e.raw, "enumeration_cap", 1e7);
    require(cap >= 1.0, "enumeration cap must be at least 1");
    return cap;
}

Normalization normalization_of(const Options& o)
{
    if (o.normalization == "raw") return Normalization::Raw;
    if (o.normalization == "per-spin") return Normalization::PerSpin;
    if (o.normalization == "sqrt") return Normalization::Sqrt;
    require(o.normalization == "critical", "normalization must be raw, per-spin, sqrt or critical");
    return Normalization::Critical;
}

CriticalParams require_critical(const Experiment& e)
{
    const Fractions a = e.model.limit_fractions();
    const auto r = classify_regime(e.model.J, a, e.model.tol);
    require(r.tag == RegimeTag::Critical,
            "parameters are not in the critical regime (classified " + std::string(to_string(r.tag)) + ")");
    return make_critical_params(e.model.J, a, std::max(e.model.tol, 1e-12));
}

GroupStructure split_sizes(double N, const Fractions& a)
{
    require(N <= 2.0e9, "grid size too large");
    return GroupStructure::split(static_cast<int>(std::lround(N)), a);
}

// ---------------------------------------------------------------- output

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;
    json summary = json::object();
};

std::string csv_cell(const json& v)
{
    if (v.is_null()) return "";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            require(file_.good(), "cannot open output file " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

json metadata(const std::string& command, const Experiment& e)
{
    return json{{"version", format_version}, {"command", command}, {"model", e.model.to_json()}, {"seed", e.seed}};
}

void emit(Sink& sink, const std::string& format, json meta, const Table& t)
{
    auto& os = sink.stream();
    if (format == "json") {
        json rows = json::array();
        for (const auto& r : t.rows) {
            json obj = json::object();
            for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = r[c];
            rows.push_back(obj);
        }
        os << json{{"meta", meta}, {"summary", t.summary}, {"rows", rows}}.dump(2) << '\n';
        return;
    }
    if (!t.summary.empty()) meta["summary"] = t.summary;
    std::string header;
    for (std::size_t c = 0; c < t.columns.size(); ++c) header += (c ? "," : "") + t.columns[c];
    write_csv_header(os, meta, header);
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << csv_cell(r[c]);
        os << '\n';
    }
}

json rel_or_abs(double value, double target)
{
    const double d = std::abs(value - target);
    return target != 0.0 ? d / std::abs(target) : d;
}

// ---------------------------------------------------------------- commands

int cmd_classify(const Options& o, Sink& sink)
{
    const auto e = load(o);
    const auto a = e.model.limit_fractions();
    const auto r = classify_regime(e.model.J, a, e.model.tol);
    const auto L = invert_coupling(e.model.J);
    Table t;
    t.columns = {"regime", "slack", "L1", "L2", "Lbar", "g1", "g2", "det_inverse_minus_alpha", "matrix_form_critical"};
    t.rows.push_back({std::string(to_string(r.tag)), r.slack, L.L1, L.L2, L.Lbar, r.gap1, r.gap2,
                      r.det_inverse_minus_alpha, r.matrix_form_critical});
    emit(sink, o.format, metadata("classify", e), t);
    return exit_ok;
}

int cmd_compare_moments(const Options& o, Sink& sink)
{
    const auto e = load(o);
    const auto p = require_critical(e);
    const auto grid = grid_of(o, e, {256, 1024, 4096});
    const auto orders = orders_of(o, e, 2);
    const double cap = enum_cap_of(o, e);
    const auto cfg = chain_of(o, e);

    struct Point {
        GroupStructure g;
        bool exact = true;
        std::vector<double> value, se;
    };
    std::vector<std::pair<int, int>> pairs;
    for (const auto& x : orders) pairs.emplace_back(x.K, x.L);

    const auto points = parallel_map<Point>(grid.size(), [&](std::size_t i) {
        Point pt{split_sizes(grid[i], p.fractions()), true, {}, {}};
        if (static_cast<double>(pt.g.N1) * pt.g.N2 <= cap) {
            const auto d = magnetization_distribution(e.model.J, pt.g.N1, pt.g.N2);
            for (const auto& x : orders) {
                pt.value.push_back(exact_moment(d, x.K, x.L, Normalization::Critical));
                pt.se.push_back(0.0);
            }
        } else {
            pt.exact = false;
            auto c = cfg;
            c.stream = i;
            for (const auto& m : sample_moment_set(e.model.J, pt.g.N1, pt.g.N2, pairs, Normalization::Critical, c)) {
                pt.value.push_back(m.value);
                pt.se.push_back(m.standard_error);
            }
        }
        return pt;
    });

    Table t;
    t.columns = {"N", "N1", "N2", "K", "L", "method", "moment", "std_error", "limit_moment", "rel_error"};
    json trend = json::array();
    for (std::size_t k = 0; k < orders.size(); ++k) {
        const double limit = limit_moment(orders[k].K, orders[k].L, p);
        std::vector<double> errs;
        for (const auto& pt : points) {
            const json err = rel_or_abs(pt.value[k], limit);
            errs.push_back(err.get<double>());
            t.rows.push_back({pt.g.total(), pt.g.N1, pt.g.N2, orders[k].K, orders[k].L, pt.exact ? "exact" : "mcmc",
                              pt.value[k], pt.exact ? json(nullptr) : json(pt.se[k]), limit, err});
        }
        bool dec = true;
        for (std::size_t i = 1; i < errs.size(); ++i)
            if (!(errs[i] < errs[i - 1] || (errs[i] == 0.0 && errs[i - 1] == 0.0))) dec = false;
        const bool checked = (orders[k].K + orders[k].L) % 2 == 0;
        if (checked && !dec)
            std::cerr << "warning: relative error not decreasing in N for K=" << orders[k].K << ", L=" << orders[k].L
                      << '\n';
        trend.push_back({{"K", orders[k].K}, {"L", orders[k].L}, {"decreasing", dec}, {"flagged", checked && !dec}});
    }
    t.summary["trend"] = trend;
    emit(sink, o.format, metadata("compare-moments", e), t);
    return exit_ok;
}

int cmd_scaling(const Options& o, Sink& sink)
{
    const auto e = load(o);
    const auto grid = grid_of(o, e, {256, 512, 1024, 2048, 4096});
    require(grid.size() >= 3, "scaling fit needs at least 3 grid points");

    struct Point {
        GroupStructure g;
        std::string method;
        double var = 0.0, var_se = 0.0, lln = 0.0, lln_se = 0.0;
    };
    std::vector<Point> points;
    if (!o.synthetic.empty()) {
        const auto ab = parse_number_list(o.synthetic);
        require(ab.size() == 2 && ab[0] > 0.0, "synthetic takes A,B for values A * N^B with A > 0");
        for (double N : grid)
            points.push_back({GroupStructure::from_sizes(1, 1), "synthetic", ab[0] * std::pow(N, ab[1]), 0.0, 0.0, 0.0});
    } else {
        const auto a = e.model.limit_fractions();
        const double cap = enum_cap_of(o, e);
        const auto cfg = chain_of(o, e);
        points = parallel_map<Point>(grid.size(), [&](std::size_t i) {
            Point pt{split_sizes(grid[i], a), "exact"};
            if (static_cast<double>(pt.g.N1) * pt.g.N2 <= cap) {
                const auto d = magnetization_distribution(e.model.J, pt.g.N1, pt.g.N2);
                pt.var = exact_moment(d, 2, 0, Normalization::Raw);
                pt.lln = exact_moment(d, 2, 0, Normalization::PerSpin);
            } else {
                pt.method = "mcmc";
                auto c = cfg;
                c.stream = i;
                const auto m = sample_moment_set(e.model.J, pt.g.N1, pt.g.N2, {{2, 0}}, Normalization::Raw, c).front();
                const double n1 = pt.g.N1;
                pt.var = m.value;
                pt.var_se = m.standard_error;
                pt.lln = m.value / (n1 * n1);
                pt.lln_se = m.standard_error / (n1 * n1);
            }
            return pt;
        });
    }

    std::vector<std::pair<double, double>> fit_points;
    for (std::size_t i = 0; i < grid.size(); ++i) fit_points.emplace_back(grid[i], points[i].var);
    const auto fit = fit_power_law(fit_points);
    const bool conclusive = fit.r_squared >= 0.99;

    Table t;
    const bool synth = !o.synthetic.empty();
    t.columns = {"N", "N1", "N2", "method", "var_s1", "var_s1_se", "lln_second_moment", "lln_se"};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& pt = points[i];
        const bool mc = pt.method == "mcmc";
        t.rows.push_back({grid[i], synth ? json(nullptr) : json(pt.g.N1), synth ? json(nullptr) : json(pt.g.N2),
                          pt.method, pt.var, mc ? json(pt.var_se) : json(nullptr),
                          synth ? json(nullptr) : json(pt.lln), mc ? json(pt.lln_se) : json(nullptr)});
    }
    t.summary = {{"exponent", fit.exponent},
                 {"intercept", fit.intercept},
                 {"r_squared", fit.r_squared},
                 {"conclusive", conclusive}};
    emit(sink, o.format, metadata("scaling", e), t);
    if (!conclusive) {
        std::cerr << "scaling fit inconclusive: r_squared = " << fit.r_squared << " < 0.99\n";
        return exit_failed;
    }
    return exit_ok;
}

int cmd_laplace(const Options& o, Sink& sink)
{
    const auto e = load(o);
    const auto p = require_critical(e);
    const auto grid = grid_of(o, e, {1e2, 1e3, 1e4});
    require_increasing_grid(grid);
    const auto orders = orders_of(o, e, 2);
    const auto spec = quad_of(o, e);

    const auto ratios = parallel_map<std::vector<double>>(grid.size(), [&](std::size_t i) {
        return correlation_ratios(grid[i], orders, p.inverse(), p.fractions(), spec);
    });

    Table t;
    t.columns = {"K", "L", "N", "ratio", "scaled_ratio", "limit_constant", "rel_error"};
    json trend = json::array();
    for (std::size_t k = 0; k < orders.size(); ++k) {
        std::vector<LaplaceRow> rows;
        for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back(make_laplace_row(grid[i], orders[k], ratios[i][k], p));
        for (const auto& r : rows)
            t.rows.push_back({orders[k].K, orders[k].L, r.N, r.ratio, r.scaled_ratio, r.limit_constant, r.rel_error});
        trend.push_back({{"K", orders[k].K},
                         {"L", orders[k].L},
                         {"decreasing", errors_decreasing(rows)},
                         {"final_error", rows.back().rel_error}});
    }
    t.summary["trend"] = trend;
    emit(sink, o.format, metadata("laplace", e), t);
    return exit_ok;
}

int cmd_mcmc(const Options& o, Sink& sink)
{
    const auto e = load(o);
    require(e.model.has_sizes(), "mcmc needs group sizes N1 and N2");
    const int N1 = *e.model.N1, N2 = *e.model.N2;
    const auto orders = orders_of(o, e, 2);
    const auto cfg = chain_of(o, e);
    const auto norm = normalization_of(o);
    const int chains = o.chains ? *o.chains : config_value<int>(e.raw.value("chain", json::object()), "chains", 1);
    require(chains >= 1, "chains must be at least 1");
    require(o.trace.empty() || chains == 1, "trace output needs a single chain");

    std::ofstream trace;
    if (!o.trace.empty()) {
        trace.open(o.trace);
        require(trace.good(), "cannot open trace file " + o.trace);
        write_csv_header(trace, metadata("mcmc-trace", e), "sweep,s1,s2");
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& x : orders) pairs.emplace_back(x.K, x.L);

    const auto per_chain = parallel_map<std::vector<MomentEstimate>>(static_cast<std::size_t>(chains), [&](std::size_t c) {
        auto cc = cfg;
        cc.stream = c;
        TraceSink sinkfn;
        if (trace.is_open()) sinkfn = [&](long s, int a, int b) { trace << s << ',' << a << ',' << b << '\n'; };
        return sample_moment_set(e.model.J, N1, N2, pairs, norm, cc, sinkfn);
    });

    std::optional<MagnetizationDistribution> dist;
    if (static_cast<double>(N1) * N2 <= enum_cap_of(o, e)) dist = magnetization_distribution(e.model.J, N1, N2);

    Table t;
    t.columns = {"K", "L", "estimate", "std_error", "n_samples", "batch_count", "lag1_autocorrelation", "converged",
                 "exact"};
    bool all_converged = true;
    for (std::size_t k = 0; k < orders.size(); ++k) {
        std::vector<MomentEstimate> v;
        for (const auto& c : per_chain) v.push_back(c[k]);
        const auto m = combine_estimates(v);
        all_converged = all_converged && m.converged;
        t.rows.push_back({orders[k].K, orders[k].L, m.value, m.standard_error, m.n_samples, m.batch_count,
                          m.lag1_autocorrelation, m.converged,
                          dist ? json(exact_moment(*dist, orders[k].K, orders[k].L, norm)) : json(nullptr)});
    }
    if (!all_converged) std::cerr << "warning: batch means show strong lag-1 autocorrelation; run longer chains\n";
    auto meta = metadata("mcmc", e);
    meta["chain"] = {{"burn_in", cfg.burn_in < 0 ? 100L * (N1 + N2) : cfg.burn_in},
                     {"n_sweeps", cfg.n_sweeps},
                     {"batch_count", cfg.batch_count},
                     {"chains", chains},
                     {"start", cfg.start == Start::Hot ? "hot" : "cold"},
                     {"normalization", to_string(norm)},
                     {"rng", "mt19937_64"}};
    emit(sink, o.format, meta, t);
    return exit_ok;
}

int cmd_profiles(const Options& o, Sink& sink)
{
    const auto e = load(o);
    const int K = o.profile_K ? *o.profile_K : max_order_of(o, e, 4);
    require(K >= 0 && K <= 20, "K must lie in [0, 20]");
    const int N = o.profile_N ? *o.profile_N : (e.model.N1 ? *e.model.N1 : 10);
    require(N >= 1, "N must be positive");
    Table t;
    t.columns = {"K", "r", "distinct", "odd_count", "w"};
    BigInt total = 0;
    for (const auto& p : enumerate_profiles(K, N)) {
        std::string r;
        for (std::size_t m = 0; m < p.r.size(); ++m) r += (m ? " " : "") + std::to_string(p.r[m]);
        const BigInt w = multiplicity_w(K, p, N);
        total += w;
        t.rows.push_back({K, r, p.distinct(), p.odd_count(), w.str()});
    }
    BigInt power = 1;
    for (int i = 0; i < K; ++i) power *= N;
    t.summary = {{"N", N}, {"total", total.str()}, {"N_pow_K", power.str()}, {"complete", total == power}};
    emit(sink, o.format, metadata("profiles", e), t);
    return total == power ? exit_ok : exit_failed;
}

// ---------------------------------------------------------------- verify

struct Check {
    std::string name;
    bool pass;
    double value; // worst error or margin behind the verdict
};

using Suite = std::function<std::vector<Check>()>;

std::vector<Check> model_suite(const Experiment& e, bool flip_lbar)
{
    std::vector<Check> out;
    // reference critical point plus the configured model
    std::vector<std::pair<InverseCoupling, Fractions>> cases{
        {invert_coupling({1.5, 1.5, 0.5}), {0.5, 0.5}},
        {invert_coupling(e.model.J), e.model.limit_fractions()}};
    if (flip_lbar)
        for (auto& c : cases) c.first.Lbar = -c.first.Lbar;

    std::mt19937_64 rng(e.seed);
    std::uniform_real_distribution<double> box(-2.0, 2.0), ang(0.0, 2.0 * std::numbers::pi);
    double grad_err = 0.0, d2_err = 0.0;
    bool minimum_ok = true;
    for (const auto& [L, a] : cases) {
        for (int i = 0; i < 100; ++i) {
            const double y1 = box(rng), y2 = box(rng), h = 1e-5;
            const auto g = grad_free_energy(y1, y2, L, a);
            const double f1 = (free_energy(y1 + h, y2, L, a) - free_energy(y1 - h, y2, L, a)) / (2 * h);
            const double f2 = (free_energy(y1, y2 + h, L, a) - free_energy(y1, y2 - h, L, a)) / (2 * h);
            grad_err = std::max(grad_err, std::hypot(f1 - g[0], f2 - g[1]) / std::max(std::hypot(g[0], g[1]), 1e-3));
        }
        const double g1 = L.L1 - a.alpha1, g2 = L.L2 - a.alpha2;
        if (g1 > 0.0 && g2 > 0.0 && std::abs(g1 * g2 - L.Lbar * L.Lbar) < 1e-9) {
            for (int i = 0; i < 100; ++i) {
                const double th = ang(rng), x0 = std::cos(th), y0 = std::sin(th);
                const double q = std::sqrt(g1) * x0 - std::sqrt(g2) * y0;
                d2_err = std::max(d2_err, std::abs(directional_second_derivative(0.0, x0, y0, L, a) - q * q));
            }
        }
        minimum_ok = minimum_ok && verify_unique_minimum(L, a).ok();
    }
    out.push_back({"gradient_vs_central_differences", grad_err < 1e-6, grad_err});
    out.push_back({"second_derivative_identity", d2_err < 1e-10, d2_err});
    out.push_back({"unique_minimum", minimum_ok, 0.0});

    double rt = 0.0;
    bool rt_ok = true;
    try {
        const auto J = to_coupling(cases[0].first);
        J.validate();
        rt = std::abs(J.J1 - 1.5) + std::abs(J.J2 - 1.5) + std::abs(J.Jbar - 0.5);
        rt_ok = rt < 1e-12;
    } catch (const invalid_input&) {
        rt_ok = false;
        rt = 1.0;
    }
    out.push_back({"inversion_round_trip", rt_ok, rt});
    return out;
}

std::vector<Check> exact_suite(const std::vector<std::pair<int, int>>& sizes)
{
    const std::vector<CouplingMatrix> couplings{
        {1.5, 1.5, 0.5}, {1.0, 1.0, 0.3}, {0.4, 2.2, 0.9}, {2.5, 0.7, 0.1}, {0.9, 0.9, 0.0}};
    double worst = 0.0;
    for (const auto& [N1, N2] : sizes)
        for (const auto& J : couplings)
            worst = std::max(worst, total_variation(magnetization_distribution(J, N1, N2), brute_force_distribution(J, N1, N2)));
    double parity = 0.0;
    const auto d = magnetization_distribution({1.5, 1.5, 0.5}, 64, 64);
    for (int K = 0; K <= 7; ++K)
        for (int L = 0; L <= 7; ++L)
            if ((K + L) % 2) parity = std::max(parity, std::abs(exact_moment(d, K, L)));
    return {{"total_variation_vs_brute_force", worst < 1e-12, worst}, {"odd_moments_zero", parity == 0.0, parity}};
}

std::vector<Check> combinat_suite()
{
    bool complete = true;
    for (const int N : {1, 2, 5, 10, 30})
        for (int K = 0; K <= 6; ++K) {
            BigInt total = 0, power = 1;
            for (const auto& r : enumerate_profiles(K, N)) total += multiplicity_w(K, r, N);
            for (int i = 0; i < K; ++i) power *= N;
            complete = complete && total == power;
        }
    double worst = 0.0;
    for (const auto& [N1, N2] : {std::pair{6, 6}, {5, 7}}) {
        const auto d = magnetization_distribution({1.5, 1.5, 0.5}, N1, N2);
        for (int K = 0; K <= 6; ++K)
            for (int L = 0; K + L <= 6; ++L) {
                const double ex = exact_moment(d, K, L, Normalization::Raw);
                const double mv = moment_via_profiles(K, L, d);
                worst = std::max(worst, ex == 0.0 ? std::abs(mv) : std::abs(mv - ex) / std::abs(ex));
            }
    }
    return {{"profile_counts_sum_to_N_pow_K", complete, 0.0}, {"moment_method_identity", worst < 1e-10, worst}};
}

std::vector<Check> asympt_suite()
{
    const auto p = make_critical_params(CouplingMatrix{1.5, 1.5, 0.5}, Fractions{0.5, 0.5});
    double homogeneous = 0.0;
    for (int K = 0; K <= 8; ++K)
        for (int L = 0; K + L <= 8; ++L) {
            const int k = K + L;
            const double want = k % 2 ? 0.0
                                      : std::pow(12.0, k / 4.0) * lanczos_gamma((k + 1) / 4.0) / lanczos_gamma(0.25) *
                                            std::pow(0.5, k / 4.0);
            homogeneous = std::max(homogeneous, std::abs(limit_moment(K, L, p) - want));
        }
    double gam = 0.0;
    for (const double c : {0.5, 1.0, 2.0})
        for (const int k : {0, 2, 4, 6}) {
            const double q =
                2.0 * adaptive_integrate([&](double v) { return std::exp(-c * ipow(v, 4)) * ipow(v, k); }, 0.0, 12.0, 1e-13);
            gam = std::max(gam, std::abs(gamma_quartic_integral(c, k) - q) / q);
        }
    bool dom = true;
    double worst_ratio = 0.0;
    for (const double N : {1.0, 16.0, 256.0})
        for (const auto& [K, L] : {std::pair{0, 0}, {2, 2}, {4, 0}}) {
            const auto rep = check_domination(N, K, L, p);
            dom = dom && rep.ok();
            worst_ratio = std::max(worst_ratio, rep.worst_ratio);
        }
    return {{"homogeneous_special_case", homogeneous < 1e-12, homogeneous},
            {"quartic_gamma_integral", gam < 1e-8, gam},
            {"domination", dom, worst_ratio}};
}

std::vector<Check> quad_suite()
{
    const CouplingMatrix J{1.5, 1.5, 0.5};
    const auto d = magnetization_distribution(J, 32, 32);
    const std::vector<Order> orders{{2, 0}, {1, 1}, {2, 2}};
    const auto r = correlation_ratios(64.0, orders, invert_coupling(J), {0.5, 0.5});
    double worst = 0.0;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        const double ex = exact_correlation(d, orders[i].K, orders[i].L);
        worst = std::max(worst, std::abs(r[i] - ex) / std::abs(ex));
    }
    const auto p = make_critical_params(J, Fractions{0.5, 0.5});
    const auto rep = laplace_limit_check(2, 0, p, {1e2, 1e3, 1e4});
    return {{"ratio_equals_exact_correlation", worst < 1e-9, worst},
            {"laplace_second_moment", rep.decreasing && rep.final_error() < 0.05, rep.final_error()}};
}

std::vector<Check> mcmc_suite(std::uint64_t seed)
{
    const CouplingMatrix J{1.5, 1.5, 0.5};
    ChainConfig cfg;
    cfg.seed = seed;
    const auto ex = exact_moment(magnetization_distribution(J, 32, 32), 2, 0, Normalization::Critical);
    const auto a = sample_moments(J, 32, 32, 2, 0, Normalization::Critical, cfg);
    const auto b = sample_moments(J, 32, 32, 2, 0, Normalization::Critical, cfg);
    const double z = std::abs(a.value - ex) / a.standard_error;
    return {{"moment_within_3_standard_errors", z < 3.0, z},
            {"deterministic_given_seed", a.value == b.value && a.standard_error == b.standard_error, 0.0}};
}

int cmd_verify(const Options& o, Sink& sink)
{
    const auto e = load(o);
    require(o.inject_fault.empty() || o.inject_fault == "lbar-sign", "unknown fault (supported: lbar-sign)");
    std::vector<std::pair<int, int>> sizes{{4, 4}, {5, 3}, {6, 6}, {2, 10}};
    if (!o.brute.empty()) {
        const auto v = parse_number_list(o.brute);
        require(v.size() == 2, "brute takes N1,N2");
        const int n1 = static_cast<int>(v[0]), n2 = static_cast<int>(v[1]);
        require(n1 >= 1 && n2 >= 1, "brute-force sizes must be positive");
        require(n1 + n2 <= brute_force_max_spins, "brute force enumeration is limited to N1 + N2 <= 24");
        sizes = {{n1, n2}};
    }

    const std::vector<std::pair<std::string, Suite>> suites{
        {"model", [&] { return model_suite(e, o.inject_fault == "lbar-sign"); }},
        {"exact", [&] { return exact_suite(sizes); }},
        {"combinat", [] { return combinat_suite(); }},
        {"asympt", [] { return asympt_suite(); }},
        {"quad", [] { return quad_suite(); }},
        {"mcmc", [&] { return mcmc_suite(e.seed); }},
    };

    struct Result {
        std::vector<Check> checks;
        double seconds = 0.0;
        std::string error;
    };
    const auto results = parallel_map<Result>(suites.size(), [&](std::size_t i) {
        Result r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            r.checks = suites[i].second();
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    });

    Table t;
    t.columns = {"suite", "check", "pass", "value"};
    json summary = json::object(), timings = json::object();
    bool all = true;
    for (std::size_t i = 0; i < suites.size(); ++i) {
        const auto& r = results[i];
        bool ok = r.error.empty();
        if (!ok) t.rows.push_back({suites[i].first, "error: " + r.error, false, nullptr});
        for (const auto& c : r.checks) {
            t.rows.push_back({suites[i].first, c.name, c.pass, c.value});
            ok = ok && c.pass;
        }
        summary[suites[i].first] = ok;
        timings[suites[i].first] = r.seconds;
        all = all && ok;
    }
    summary["all"] = all;
    t.summary = summary;
    auto meta = metadata("verify", e);
    meta["timings_seconds"] = timings; // the only run-dependent field
    if (!o.inject_fault.empty()) meta["injected_fault"] = o.inject_fault;
    emit(sink, o.format, meta, t);
    return all ? exit_ok : exit_failed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-group Curie-Weiss model: exact enumeration, sampling and critical asymptotics"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;

    app.add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "RNG seed");
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--max-order", o.max_order, "largest total moment order K+L (profiles: K)");
    app.add_option("--J1", o.J1);
    app.add_option("--J2", o.J2);
    app.add_option("--Jbar", o.Jbar);
    app.add_option("--alpha1", o.alpha1);
    app.add_option("--alpha2", o.alpha2);
    app.add_option("--N1", o.N1);
    app.add_option("--N2", o.N2);

    auto* classify = app.add_subcommand("classify", "regime, slack, inverse coupling and gaps");
    auto* compare = app.add_subcommand("compare-moments", "finite-N normalized moments against the limit law");
    auto* scaling = app.add_subcommand("scaling", "log-log fit of Var(S1) against N");
    auto* laplace = app.add_subcommand("laplace", "quadrature check of the asymptotic correlations");
    auto* mcmc = app.add_subcommand("mcmc", "Metropolis estimates of normalized moments");
    auto* profiles = app.add_subcommand("profiles", "index-tuple profiles and their multiplicities");
    auto* verify = app.add_subcommand("verify", "run the invariant suites");

    for (auto* sub : {compare, scaling, laplace})
        sub->add_option("--grid", o.grid, "comma-separated increasing N values");
    for (auto* sub : {compare, laplace, mcmc}) sub->add_option("--orders", o.orders, "moment orders as K,L;K,L;...");
    for (auto* sub : {compare, scaling, mcmc}) {
        sub->add_option("--enum-cap", o.enum_cap, "largest N1*N2 handled by exact enumeration");
        sub->add_option("--sweeps", o.sweeps, "sweeps after burn-in");
        sub->add_option("--burn-in", o.burn_in, "burn-in sweeps (default 100 N)");
        sub->add_option("--batches", o.batches, "batch count for error bars");
        sub->add_option("--start", o.start, "hot or cold start");
    }
    mcmc->add_option("--chains", o.chains, "independent chains (distinct streams)");
    mcmc->add_option("--normalization", o.normalization, "raw, per-spin, sqrt or critical");
    mcmc->add_option("--trace", o.trace, "CSV trace of (sweep, s1, s2)");
    laplace->add_option("--panels", o.panels, "panels per axis");
    laplace->add_option("--gl-order", o.gl_order, "Gauss-Legendre points per panel");
    laplace->add_option("--half-width", o.half_width, "box half-width in scaled coordinates");
    laplace->add_flag("--adaptive", o.adaptive, "nested adaptive Gauss-Kronrod instead of the tensor rule");
    laplace->add_flag("--self-check", o.self_check, "double panels until results agree");
    scaling->add_option("--synthetic", o.synthetic, "fit A * N^B instead of model data (A,B)");
    profiles->add_option("--K", o.profile_K, "tuple length");
    profiles->add_option("--N", o.profile_N, "index set size");
    verify->add_option("--inject-fault", o.inject_fault, "corrupt an input on purpose (lbar-sign)");
    verify->add_option("--brute", o.brute, "brute-force oracle sizes N1,N2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_invalid;
    }

    try {
        Sink sink(o.out);
        if (*classify) return cmd_classify(o, sink);
        if (*compare) return cmd_compare_moments(o, sink);
        if (*scaling) return cmd_scaling(o, sink);
        if (*laplace) return cmd_laplace(o, sink);
        if (*mcmc) return cmd_mcmc(o, sink);
        if (*profiles) return cmd_profiles(o, sink);
        if (*verify) return cmd_verify(o, sink);
    } catch (const invalid_input& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_invalid;
    } catch (const numerical_failure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_failed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_failed;
    }
    return exit_invalid;
}
