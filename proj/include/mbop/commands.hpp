#ifndef MBOP_COMMANDS_HPP
#define MBOP_COMMANDS_HPP

// Command drivers behind the CLI: factorize, transform, verify. Each returns
// a machine-readable JSON report plus a process exit code:
//   0 success, 1 config error, 2 breakdown, 3 coupling singular,
//   4 verification checks failed.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "mbop/cdkernel.hpp"
#include "mbop/config.hpp"
#include "mbop/gaussborel.hpp"
#include "mbop/matrix.hpp"
#include "mbop/report.hpp"
#include "mbop/uvarov.hpp"

namespace mbop {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_breakdown = 2;
inline constexpr int exit_coupling_singular = 3;
inline constexpr int exit_checks_failed = 4;

struct CommandResult {
    Json report;
    int exit_code = exit_ok;
};

namespace detail {

// Comparison tolerance for verification reports: exact in rational mode,
// pinned to 1e-9 relative blockwise in float mode.
template <typename F>
F compare_tol() {
    if constexpr (is_exact_field_v<F>) {
        return F(0);
    } else {
        return F(1e-9);
    }
}

template <typename F>
Json report_header(const Config& cfg, const std::string& command) {
    Json j;
    j["schema_version"] = 1;
    j["command"] = command;
    j["field"] = is_exact_field_v<F> ? "rational" : "float64";
    j["p"] = cfg.p;
    j["n_max"] = cfg.n_max;
    return j;
}

inline Json check_report_to_json(const CheckReport& report) {
    Json j;
    j["pass"] = report.all_pass();
    j["checked"] = report.total();
    j["failed"] = report.total() - report.passed();
    j["failures"] = report.failures();
    return j;
}

template <typename F>
Json transform_result_to_json(const TransformResult<F>& res) {
    Json j;
    j["n"] = res.n;
    j["p1_hat"] = poly_to_json<F>(res.p1_hat);
    j["p2_hat"] = poly_to_json<F>(res.p2_hat);
    j["h_hat"] = block_to_json<F>(res.h_hat);
    return j;
}

template <typename F>
CommandResult run_factorize_impl(const Config& cfg) {
    const Problem<F> prob = build_problem<F>(cfg);
    const FactorizeOptions opts{cfg.tolerance};
    CommandResult out;
    out.report = report_header<F>(cfg, "factorize");

    auto outcome = factorize(prob.source, cfg.n_max, opts);
    if (std::holds_alternative<Breakdown>(outcome)) {
        const std::size_t k = std::get<Breakdown>(outcome).degree;
        out.report["breakdown"] = Json{{"degree", k}};
        out.report["degrees"] = Json::array();
        out.exit_code = exit_breakdown;
        return out;
    }
    const auto& f = std::get<Factorization<F>>(outcome);
    out.report["breakdown"] = nullptr;

    Json degrees = Json::array();
    for (std::size_t n = 0; n <= f.n_max(); ++n) {
        Json d;
        d["n"] = n;
        d["h"] = block_to_json<F>(f.h(n));
        d["p1"] = poly_to_json<F>(f.polynomial1(n));
        d["p2"] = poly_to_json<F>(f.polynomial2(n));
        degrees.push_back(std::move(d));
    }
    out.report["degrees"] = std::move(degrees);

    const F tol = compare_tol<F>();
    const auto biorth = verify_biorthogonality(f, tol);
    const auto repro = verify_reproducing(f, f.n_max(), 10, 7, tol);
    out.report["checks"] = Json{{"biorthogonality", check_report_to_json(biorth)},
                                {"reproducing", check_report_to_json(repro)}};
    if (!biorth.all_pass() || !repro.all_pass()) out.exit_code = exit_checks_failed;
    return out;
}

template <typename F>
TransformOutcome<F> dispatch_transform(const Factorization<F>& f, const UvarovSpec<F>& spec,
                                       std::size_t n, const FactorizeOptions& opts) {
    switch (spec.kind) {
        case SpecKind::DiagonalHankel:
            return transform_diagonal(f, spec.y_support.points, spec.y_support.mults,
                                      spec.diagonal_betas, n, opts);
        case SpecKind::DiscreteX:
            return transform_discrete(f, spec, n, opts);
        case SpecKind::General:
        default:
            return transform(f, spec, n, opts);
    }
}

template <typename F>
CommandResult run_transform_impl(const Config& cfg, std::size_t degree, bool with_oracle) {
    const Problem<F> prob = build_problem<F>(cfg);
    if (!prob.perturbation) throw ConfigError("transform: perturbation required");
    if (degree > cfg.n_max)
        throw ConfigError("transform: --degree exceeds n_max");
    const FactorizeOptions opts{cfg.tolerance};

    CommandResult out;
    out.report = report_header<F>(cfg, "transform");
    out.report["degree"] = degree;

    auto base = factorize(prob.source, cfg.n_max, opts);
    if (std::holds_alternative<Breakdown>(base)) {
        out.report["breakdown"] = Json{{"degree", std::get<Breakdown>(base).degree}};
        out.exit_code = exit_breakdown;
        return out;
    }
    const auto& f = std::get<Factorization<F>>(base);
    out.report["breakdown"] = nullptr;

    auto outcome = dispatch_transform(f, *prob.perturbation, degree, opts);
    if (std::holds_alternative<CouplingSingular>(outcome)) {
        out.report["coupling_nonsingular"] = false;
        out.exit_code = exit_coupling_singular;
        return out;
    }
    const auto& res = std::get<TransformResult<F>>(outcome);
    out.report["coupling_nonsingular"] = true;
    out.report["result"] = transform_result_to_json<F>(res);

    if (with_oracle) {
        auto oracle = oracle_transform(prob.source, *prob.perturbation, degree, opts);
        if (std::holds_alternative<Breakdown>(oracle)) {
            out.report["oracle"] =
                Json{{"breakdown", Json{{"degree", std::get<Breakdown>(oracle).degree}}}};
            out.exit_code = exit_breakdown;
            return out;
        }
        const auto& ores = std::get<TransformResult<F>>(oracle);
        out.report["oracle"] = transform_result_to_json<F>(ores);
        const F tol = compare_tol<F>();
        const bool match = polys_close(res.p1_hat, ores.p1_hat, tol) &&
                           polys_close(res.p2_hat, ores.p2_hat, tol) &&
                           blocks_close(res.h_hat, ores.h_hat, tol);
        out.report["oracle_matches"] = match;
        if (!match) out.exit_code = exit_checks_failed;
    }
    return out;
}

inline Json uvarov_degree_to_json(const UvarovDegreeRecord& rec) {
    auto tri = [](const std::optional<bool>& v) {
        return v.has_value() ? Json(*v) : Json(nullptr);
    };
    Json j;
    j["n"] = rec.n;
    j["coupling_singular"] = rec.coupling_singular;
    j["oracle_unavailable"] = rec.oracle_unavailable;
    j["theorem_matches_oracle"] = tri(rec.theorem_matches_oracle);
    j["h_hat_consistent"] = tri(rec.h_hat_consistent);
    j["degree_bound_ok"] = tri(rec.degree_bound_ok);
    j["specialization_ok"] = tri(rec.specialization_ok);
    j["pass"] = rec.pass();
    return j;
}

template <typename F>
CommandResult run_verify_impl(const Config& cfg) {
    const Problem<F> prob = build_problem<F>(cfg);
    if (!prob.perturbation) throw ConfigError("verify: perturbation required");
    const FactorizeOptions opts{cfg.tolerance};

    CommandResult out;
    out.report = report_header<F>(cfg, "verify");

    const auto report =
        verify_uvarov(prob.source, *prob.perturbation, cfg.n_max, opts, compare_tol<F>());

    out.report["base_breakdown"] = report.base_breakdown
                                       ? Json{{"degree", *report.base_breakdown}}
                                       : Json(nullptr);
    out.report["oracle_breakdown"] = report.oracle_breakdown
                                         ? Json{{"degree", *report.oracle_breakdown}}
                                         : Json(nullptr);
    Json degrees = Json::array();
    for (const auto& rec : report.degrees) degrees.push_back(uvarov_degree_to_json(rec));
    out.report["degrees"] = std::move(degrees);
    out.report["all_pass"] = report.all_pass();
    out.report["fully_verified"] = report.fully_verified();

    if (report.base_breakdown || report.oracle_breakdown) {
        out.exit_code = exit_breakdown;
    } else if (!report.all_pass()) {
        out.exit_code = exit_checks_failed;
    }
    return out;
}

}  // namespace detail

inline CommandResult run_factorize(const Config& cfg) {
    return cfg.field == FieldMode::ExactRational ? detail::run_factorize_impl<Rational>(cfg)
                                                 : detail::run_factorize_impl<double>(cfg);
}

inline CommandResult run_transform(const Config& cfg, std::size_t degree, bool with_oracle) {
    return cfg.field == FieldMode::ExactRational
               ? detail::run_transform_impl<Rational>(cfg, degree, with_oracle)
               : detail::run_transform_impl<double>(cfg, degree, with_oracle);
}

inline CommandResult run_verify(const Config& cfg) {
    return cfg.field == FieldMode::ExactRational ? detail::run_verify_impl<Rational>(cfg)
                                                 : detail::run_verify_impl<double>(cfg);
}

}  // namespace mbop

#endif  // MBOP_COMMANDS_HPP
