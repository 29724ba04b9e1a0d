#pragma once

// JSON configuration and CSV/JSON export.

#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cw2/error.hpp"
#include "cw2/exact.hpp"
#include "cw2/model.hpp"

namespace cw2 {

using json = nlohmann::json;

inline constexpr const char* format_version = "cw2-1";

/// Model block of a config: {"J1", "J2", "Jbar", "N1", "N2", "alpha1", "alpha2", "tol"}.
struct ModelConfig {
    CouplingMatrix J;
    std::optional<int> N1;
    std::optional<int> N2;
    std::optional<Fractions> alpha;
    double tol = 1e-9;

    [[nodiscard]] bool has_sizes() const { return N1.has_value() && N2.has_value(); }

    /// Fractions of the finite system: N_nu / N when sizes are given.
    [[nodiscard]] Fractions finite_fractions() const
    {
        if (has_sizes()) return GroupStructure::from_sizes(*N1, *N2).alpha;
        require(alpha.has_value(), "config needs N1/N2 or alpha1/alpha2");
        return *alpha;
    }

    /// Fractions for limit formulas: supplied alpha, else N_nu / N.
    [[nodiscard]] Fractions limit_fractions() const
    {
        if (alpha) return *alpha;
        return finite_fractions();
    }

    [[nodiscard]] json to_json() const
    {
        json j{{"J1", J.J1}, {"J2", J.J2}, {"Jbar", J.Jbar}, {"tol", tol}};
        if (N1) j["N1"] = *N1;
        if (N2) j["N2"] = *N2;
        if (alpha) {
            j["alpha1"] = alpha->alpha1;
            j["alpha2"] = alpha->alpha2;
        }
        return j;
    }
};

inline ModelConfig parse_model_config(const json& j)
{
    require(j.is_object(), "config must be a JSON object");
    ModelConfig m;
    try {
        m.J.J1 = j.at("J1").get<double>();
        m.J.J2 = j.at("J2").get<double>();
        m.J.Jbar = j.at("Jbar").get<double>();
        if (j.contains("N1") || j.contains("N2")) {
            m.N1 = j.at("N1").get<int>();
            m.N2 = j.at("N2").get<int>();
            require(*m.N1 >= 1 && *m.N2 >= 1, "N1 and N2 must be positive");
        }
        if (j.contains("alpha1") || j.contains("alpha2")) {
            Fractions f{j.at("alpha1").get<double>(), j.at("alpha2").get<double>()};
            f.validate();
            m.alpha = f;
        }
        if (j.contains("tol")) m.tol = j.at("tol").get<double>();
    } catch (const json::exception& e) {
        throw invalid_input(std::string("bad model config: ") + e.what());
    }
    require(m.tol >= 0.0, "tol must be nonnegative");
    return m;
}

inline std::string format_double(double x)
{
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

/// Single '#'-prefixed metadata line followed by the column header.
inline void write_csv_header(std::ostream& os, const json& metadata, const std::string& columns)
{
    os << "# " << metadata.dump() << '\n' << columns << '\n';
}

inline void write_distribution_csv(std::ostream& os, const MagnetizationDistribution& d, const json& metadata)
{
    write_csv_header(os, metadata, "s1,s2,p");
    for (std::size_t k = 0; k < d.size(); ++k)
        os << d.s1_of(k) << ',' << d.s2_of(k) << ',' << format_double(d.table()[k]) << '\n';
}

/// Moments keyed "K,L".
inline json moments_to_json(const MomentTable& t)
{
    json m = json::object();
    for (int K = 0; K <= t.kmax; ++K)
        for (int L = 0; L <= t.lmax; ++L) m[std::to_string(K) + "," + std::to_string(L)] = t.at(K, L);
    return m;
}

} // namespace cw2
