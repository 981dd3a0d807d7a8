#ifndef MBOP_CONFIG_HPP
#define MBOP_CONFIG_HPP

// Problem configuration: a versioned JSON schema describing the field, the
// moment source, and an optional Uvarov perturbation. Rational mode keeps
// every value exact: scalars are strings "num/den" (or integers); binary
// floats are rejected. The full schema is documented in docs/schema.md.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mbop/field.hpp"
#include "mbop/matrix.hpp"
#include "mbop/moments.hpp"

namespace mbop {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class FieldMode { ExactRational, Float64 };

struct Config {
    FieldMode field = FieldMode::ExactRational;
    std::size_t p = 1;
    std::size_t n_max = 0;
    double tolerance = 1e-12;  // float-mode pivot threshold
    Json source;
    std::optional<Json> perturbation;
};

namespace detail {

inline const Json& require_key(const Json& j, const std::string& key,
                               const std::string& context) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(context + ": missing \"" + key + "\"");
    return *it;
}

inline std::size_t require_size(const Json& j, const std::string& key,
                                const std::string& context) {
    const Json& v = require_key(j, key, context);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(context + ": \"" + key + "\" must be a nonnegative integer");
    return v.get<std::size_t>();
}

}  // namespace detail

template <typename F>
F scalar_from_json(const Json& j) {
    if (j.is_string()) return field_from_string<F>(j.get<std::string>());
    if (j.is_number_integer()) return F(j.get<long long>());
    if (j.is_number_float()) {
        if constexpr (is_exact_field_v<F>) {
            throw ConfigError("binary float \"" + j.dump() +
                              "\" not allowed in rational mode; use \"num/den\" strings");
        } else {
            return F(j.get<double>());
        }
    }
    throw ConfigError("expected a scalar, got " + j.dump());
}

template <typename F>
Json scalar_to_json(const F& x) {
    if constexpr (is_exact_field_v<F>) {
        return rational_to_string(x);
    } else {
        return x;
    }
}

// Blocks are p x p nested arrays; a bare scalar is accepted when p = 1.
template <typename F>
Block<F> block_from_json(const Json& j, std::size_t p) {
    if (!j.is_array()) {
        if (p == 1) {
            Block<F> b(1, 1);
            b(0, 0) = scalar_from_json<F>(j);
            return b;
        }
        throw ConfigError("expected a " + std::to_string(p) + "x" + std::to_string(p) +
                          " block, got " + j.dump());
    }
    if (j.size() != p)
        throw ConfigError("block has " + std::to_string(j.size()) + " rows, expected " +
                          std::to_string(p));
    Block<F> b(p, p);
    for (std::size_t r = 0; r < p; ++r) {
        const Json& row = j[r];
        if (!row.is_array() || row.size() != p)
            throw ConfigError("block row " + std::to_string(r) + " must have " +
                              std::to_string(p) + " entries");
        for (std::size_t c = 0; c < p; ++c) b(r, c) = scalar_from_json<F>(row[c]);
    }
    return b;
}

template <typename F>
Json block_to_json(const Block<F>& b) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < b.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < b.cols(); ++c) row.push_back(scalar_to_json<F>(b(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename F>
Json poly_to_json(const MatPoly<F>& poly) {
    Json coeffs = Json::array();
    for (std::size_t k = 0; k < poly.coeff_count(); ++k)
        coeffs.push_back(block_to_json<F>(poly.coeff(k)));
    return coeffs;
}

template <typename F>
std::vector<F> scalars_from_json(const Json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + ": expected an array of scalars");
    std::vector<F> out;
    for (const Json& v : j) out.push_back(scalar_from_json<F>(v));
    return out;
}

inline std::vector<std::size_t> sizes_from_json(const Json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + ": expected an array of integers");
    std::vector<std::size_t> out;
    for (const Json& v : j) {
        if (!v.is_number_integer() || v.get<long long>() <= 0)
            throw ConfigError(context + ": entries must be positive integers");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

inline Config parse_config(const Json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    const std::size_t version = detail::require_size(j, "schema_version", "config");
    if (version != 1)
        throw ConfigError("config: unsupported schema_version " + std::to_string(version));

    Config cfg;
    const std::string field = detail::require_key(j, "field", "config").get<std::string>();
    if (field == "rational") {
        cfg.field = FieldMode::ExactRational;
    } else if (field == "float64") {
        cfg.field = FieldMode::Float64;
    } else {
        throw ConfigError("config: field must be \"rational\" or \"float64\"");
    }

    cfg.p = detail::require_size(j, "p", "config");
    if (cfg.p == 0) throw ConfigError("config: p must be >= 1");
    cfg.n_max = detail::require_size(j, "n_max", "config");
    if (auto it = j.find("tolerance"); it != j.end()) cfg.tolerance = it->get<double>();

    cfg.source = detail::require_key(j, "source", "config");
    if (auto it = j.find("perturbation"); it != j.end() && !it->is_null())
        cfg.perturbation = *it;
    return cfg;
}

// The fully typed problem: a moment source and an optional perturbation.
template <typename F>
struct Problem {
    MomentSourcePtr<F> source;
    std::optional<UvarovSpec<F>> perturbation;
};

namespace detail {

template <typename F>
MomentSourcePtr<F> source_from_json(const Json& j, std::size_t p) {
    const std::string type = require_key(j, "type", "source").get<std::string>();
    if (type == "hankel") {
        const Json& entries = require_key(j, "moments", "hankel source");
        if (!entries.is_array() || entries.empty())
            throw ConfigError("hankel source: \"moments\" must be a nonempty array");
        std::vector<Block<F>> ms;
        for (const Json& e : entries) ms.push_back(block_from_json<F>(e, p));
        return hankel_source(std::move(ms));
    }
    if (type == "discrete") {
        auto points = scalars_from_json<F>(require_key(j, "points", "discrete source"),
                                           "discrete source points");
        const Json& wjson = require_key(j, "weights", "discrete source");
        if (!wjson.is_array() || wjson.size() != points.size())
            throw ConfigError("discrete source: weights must match points");
        std::vector<Block<F>> weights;
        for (const Json& e : wjson) weights.push_back(block_from_json<F>(e, p));
        return discrete_measure_source<F>(std::move(points), std::move(weights));
    }
    throw ConfigError("source: unknown type \"" + type + "\"");
}

}  // namespace detail

template <typename F>
Problem<F> build_problem(const Config& cfg) {
    Problem<F> prob;
    const std::size_t p = cfg.p;
    // One table length covers polynomial pairings and Gram perturbation.
    const std::size_t degree_bound = 2 * cfg.n_max + 2;

    const std::string stype =
        detail::require_key(cfg.source, "type", "source").get<std::string>();
    if (stype == "lebesgue") {
        const F a = scalar_from_json<F>(detail::require_key(cfg.source, "a", "lebesgue"));
        const F b = scalar_from_json<F>(detail::require_key(cfg.source, "b", "lebesgue"));
        if (!(a < b)) throw ConfigError("lebesgue source: requires a < b");
        const Block<F> w =
            block_from_json<F>(detail::require_key(cfg.source, "weight", "lebesgue"), p);
        prob.source = hankel_source(lebesgue_moments<F>(a, b, w, degree_bound + 1));
    } else {
        prob.source = detail::source_from_json<F>(cfg.source, p);
    }

    if (!cfg.perturbation) return prob;
    const Json& pj = *cfg.perturbation;
    const std::string type = detail::require_key(pj, "type", "perturbation").get<std::string>();

    if (type == "general") {
        auto points = scalars_from_json<F>(detail::require_key(pj, "points", "general"),
                                           "perturbation points");
        auto mults = sizes_from_json(detail::require_key(pj, "mults", "general"),
                                     "perturbation mults");
        Support<F> support(std::move(points), std::move(mults));
        const Json& tables = detail::require_key(pj, "tables", "general perturbation");
        if (!tables.is_array() || tables.size() != support.total())
            throw ConfigError("general perturbation: need one moment table per (point, order)");
        std::vector<Functional<F>> betas;
        for (const Json& t : tables) {
            if (!t.is_array() || t.empty())
                throw ConfigError("general perturbation: moment tables must be nonempty arrays");
            std::vector<Block<F>> table;
            for (const Json& e : t) table.push_back(block_from_json<F>(e, p));
            betas.push_back(Functional<F>(p, std::move(table)));
        }
        prob.perturbation = make_general_spec(std::move(support), std::move(betas));
        return prob;
    }

    if (type == "diagonal") {
        auto points = scalars_from_json<F>(detail::require_key(pj, "points", "diagonal"),
                                           "perturbation points");
        auto mults = sizes_from_json(detail::require_key(pj, "mults", "diagonal"),
                                     "perturbation mults");
        const Json& bj = detail::require_key(pj, "betas", "diagonal perturbation");
        if (!bj.is_array() || bj.size() != points.size())
            throw ConfigError("diagonal perturbation: one beta list per point");
        std::vector<std::vector<Block<F>>> raws;
        for (std::size_t j = 0; j < bj.size(); ++j) {
            const Json& list = bj[j];
            if (!list.is_array() || list.size() != mults[j])
                throw ConfigError("diagonal perturbation: beta list " + std::to_string(j) +
                                  " must have kappa entries");
            std::vector<Block<F>> row;
            for (const Json& e : list) row.push_back(block_from_json<F>(e, p));
            raws.push_back(std::move(row));
        }
        prob.perturbation = make_diagonal_spec<F>(points, mults, raws, degree_bound);
        return prob;
    }

    if (type == "discrete_x") {
        auto xp = scalars_from_json<F>(detail::require_key(pj, "x_points", "discrete_x"),
                                       "x_points");
        auto xm = sizes_from_json(detail::require_key(pj, "x_mults", "discrete_x"), "x_mults");
        auto yp = scalars_from_json<F>(detail::require_key(pj, "y_points", "discrete_x"),
                                       "y_points");
        auto ym = sizes_from_json(detail::require_key(pj, "y_mults", "discrete_x"), "y_mults");
        Support<F> sx(std::move(xp), std::move(xm));
        Support<F> sy(std::move(yp), std::move(ym));
        const Json& cj = detail::require_key(pj, "couplings", "discrete_x perturbation");
        if (!cj.is_array() || cj.size() != sx.total())
            throw ConfigError("discrete_x perturbation: couplings must have Ntilde rows");
        BlockGrid<F> couplings(sx.total(), sy.total(), p);
        for (std::size_t r = 0; r < sx.total(); ++r) {
            const Json& row = cj[r];
            if (!row.is_array() || row.size() != sy.total())
                throw ConfigError("discrete_x perturbation: coupling row " + std::to_string(r) +
                                  " must have N entries");
            for (std::size_t c = 0; c < sy.total(); ++c)
                couplings.block(r, c) = block_from_json<F>(row[c], p);
        }
        prob.perturbation = make_discrete_spec<F>(std::move(sx), std::move(sy), couplings,
                                                  degree_bound);
        return prob;
    }

    throw ConfigError("perturbation: unknown type \"" + type + "\"");
}

}  // namespace mbop

#endif  // MBOP_CONFIG_HPP
