#ifndef MBOP_UVAROV_HPP
#define MBOP_UVAROV_HPP

// Christoffel-Uvarov transformation: coupling matrices built from spectral
// jets of the CD kernel, the quasi-determinant Theta_*, the perturbed
// polynomials and H matrices, the two structured specializations, the
// brute-force refactorization oracle, and the equivalence verifier.
//
// Theta_* operand order: for M = [[A,B],[C,D]] with A the Np x Np pivot,
// only D - C A^{-1} B is conformable, and it is the contraction the closed
// formulas actually use.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mbop/cdkernel.hpp"
#include "mbop/field.hpp"
#include "mbop/gaussborel.hpp"
#include "mbop/matpoly.hpp"
#include "mbop/matrix.hpp"
#include "mbop/moments.hpp"
#include "mbop/report.hpp"

namespace mbop {

class SingularPivot : public std::domain_error {
public:
    explicit SingularPivot(const std::string& what) : std::domain_error(what) {}
};

struct CouplingSingular {
    std::size_t degree;
};

template <typename F>
struct TransformResult {
    std::size_t n = 0;
    MatPoly<F> p1_hat;
    MatPoly<F> p2_hat;
    Block<F> h_hat;
    bool coupling_det_ok = false;

    TransformResult() : p1_hat(0), p2_hat(0) {}
};

template <typename F>
using TransformOutcome = std::variant<TransformResult<F>, CouplingSingular>;

template <typename F>
using OracleOutcome = std::variant<TransformResult<F>, Breakdown>;

// Theta_*([[A,B],[C,D]]) = D - C A^{-1} B. Throws SingularPivot when A is not
// invertible (under the float pivot rule when F is floating).
template <typename F>
BlockGrid<F> theta_star(const BlockGrid<F>& a, const BlockGrid<F>& b, const BlockGrid<F>& c,
                        const BlockGrid<F>& d, const F& tol = F(0)) {
    if (a.block_rows() != a.block_cols())
        throw std::invalid_argument("theta_star: pivot block A must be square");
    if (a.block_rows() != b.block_rows() || c.block_cols() != a.block_cols() ||
        d.block_rows() != c.block_rows() || d.block_cols() != b.block_cols())
        throw std::invalid_argument("theta_star: blocks not conformable for D - C A^{-1} B");
    auto x = solve(a.flatten(), b.flatten(), tol);
    if (!x) throw SingularPivot("theta_star: pivot block A is singular");
    const Matrix<F> result = d.flatten() - c.flatten() * (*x);
    return BlockGrid<F>::from_flat(result, a.block_size());
}

// <P(x), (beta)_x>: 1 x N row of blocks <P, beta^(j)_m>, point-major,
// derivative-minor.
template <typename F>
BlockGrid<F> beta_row(const MatPoly<F>& poly, const UvarovSpec<F>& spec) {
    BlockGrid<F> row(1, spec.degree_total(), poly.block_size());
    for (std::size_t c = 0; c < spec.degree_total(); ++c)
        row.block(0, c) = functional_pair(poly, spec.betas[c]);
    return row;
}

namespace detail {

// <K(x,y), (beta)_x>: the functional consumes the kernel's x variable,
// leaving the y-polynomial sum_l (sum_k C_{k,l} M_k) y^l.
template <typename F>
MatPoly<F> kernel_beta_poly(const MatKernel<F>& kernel, const Functional<F>& beta) {
    const std::size_t p = kernel.block_size();
    std::vector<Block<F>> cs(kernel.y_terms(), Block<F>(p, p));
    for (std::size_t l = 0; l < kernel.y_terms(); ++l)
        for (std::size_t k = 0; k < kernel.x_terms(); ++k) {
            const Block<F> ckl = kernel.coeff(k, l);
            if (ckl.is_zero()) continue;
            cs[l] += ckl * beta.moment(k);
        }
    return MatPoly<F>::from_coeffs(p, std::move(cs));
}

template <typename F>
struct CouplingData {
    MatKernel<F> kernel;               // K_{n-1}
    std::vector<MatPoly<F>> jet_col;   // J^{[0,1]}_{K_{n-1}}(x), N x-polynomials
    BlockGrid<F> coupling;             // I_{Np} + <J^{[0,1]}_{K_{n-1}}, beta>
};

template <typename F>
CouplingData<F> build_coupling(const Factorization<F>& f, const UvarovSpec<F>& spec,
                               std::size_t n) {
    if (n == 0 || n > f.n_max())
        throw std::out_of_range("coupling requires 1 <= n <= n_max");
    const std::size_t nblocks = spec.degree_total();
    CouplingData<F> data{cd_kernel(f, n - 1), {}, BlockGrid<F>::identity(nblocks, f.block_size())};
    data.jet_col = kernel_jet_col(data.kernel, spec.y_support);
    for (std::size_t r = 0; r < nblocks; ++r)
        for (std::size_t c = 0; c < nblocks; ++c)
            data.coupling.block(r, c) += functional_pair(data.jet_col[r], spec.betas[c]);
    return data;
}

template <typename F>
F transform_tol(const FactorizeOptions& opts) {
    if constexpr (is_exact_field_v<F>) {
        (void)opts;
        return F(0);
    } else {
        return F(opts.pivot_tol);
    }
}

// Row vector through the inverse coupling: E = C A^{-1}, via A^T X = C^T.
template <typename F>
std::optional<BlockGrid<F>> row_through_inverse(const BlockGrid<F>& c, const BlockGrid<F>& a,
                                                const F& tol) {
    auto x = solve(a.flatten().transposed(), c.flatten().transposed(), tol);
    if (!x) return std::nullopt;
    return BlockGrid<F>::from_flat(x->transposed(), a.block_size());
}

template <typename F>
std::optional<BlockGrid<F>> col_through_inverse(const BlockGrid<F>& a, const BlockGrid<F>& b,
                                                const F& tol) {
    auto x = solve(a.flatten(), b.flatten(), tol);
    if (!x) return std::nullopt;
    return BlockGrid<F>::from_flat(*x, a.block_size());
}

// D(x) - sum_i E_i B_i(x) for a constant row E and polynomial column B.
template <typename F>
MatPoly<F> poly_theta_row(const MatPoly<F>& d, const BlockGrid<F>& e,
                          const std::vector<MatPoly<F>>& b) {
    MatPoly<F> acc = d;
    for (std::size_t i = 0; i < b.size(); ++i) acc = acc - b[i].left_mul(e.block(0, i));
    return acc;
}

// D(y) - sum_i C_i(y) F_i for a polynomial row C and constant column F.
template <typename F>
MatPoly<F> poly_theta_col(const MatPoly<F>& d, const std::vector<MatPoly<F>>& c,
                          const BlockGrid<F>& fcol) {
    MatPoly<F> acc = d;
    for (std::size_t i = 0; i < c.size(); ++i) acc = acc - c[i].right_mul(fcol.block(i, 0));
    return acc;
}

template <typename F>
TransformResult<F> degree_zero_result(const Factorization<F>& f, const Block<F>& v00) {
    TransformResult<F> res;
    res.n = 0;
    res.p1_hat = MatPoly<F>::constant(identity_block<F>(f.block_size()));
    res.p2_hat = res.p1_hat;
    res.h_hat = f.h(0) + v00;
    res.coupling_det_ok = true;
    return res;
}

}  // namespace detail

// I_{Np} + <J^{[0,1]}_{K_{n-1}}(x), (beta)_x>: rows indexed by kernel-jet
// entries, columns by functionals.
template <typename F>
BlockGrid<F> coupling_matrix(const Factorization<F>& f, const UvarovSpec<F>& spec,
                             std::size_t n) {
    return detail::build_coupling(f, spec, n).coupling;
}

// General Christoffel-Uvarov transformation at degree n. Degree 0 falls back
// to the additive perturbation directly (K_{-1} is the empty sum).
template <typename F>
TransformOutcome<F> transform(const Factorization<F>& f, const UvarovSpec<F>& spec,
                              std::size_t n, const FactorizeOptions& opts = {}) {
    if (n > f.n_max()) throw std::out_of_range("transform: degree exceeds factorization depth");
    const std::size_t p = f.block_size();
    const F tol = detail::transform_tol<F>(opts);
    if (n == 0) {
        const MatPoly<F> one = MatPoly<F>::constant(identity_block<F>(p));
        return detail::degree_zero_result(f, v_pairing(one, one, spec));
    }

    const auto data = detail::build_coupling(f, spec, n);
    const MatPoly<F> p1 = f.polynomial1(n);
    const MatPoly<F> p2 = f.polynomial2(n);

    // P1-hat = Theta_*[[A, J^{[0,1]}(x)], [<P1, beta>, P1(x)]]
    const BlockGrid<F> c1 = beta_row(p1, spec);
    const auto e = detail::row_through_inverse(c1, data.coupling, tol);
    if (!e) return CouplingSingular{n};

    TransformResult<F> res;
    res.n = n;
    res.coupling_det_ok = true;
    res.p1_hat = detail::poly_theta_row(p1, *e, data.jet_col);

    // P2-hat^T = Theta_*[[A, (J_{P2})^T], [<K(x,y), beta>, P2(y)^T]]
    const BlockGrid<F> b2 = jet_row(p2, spec.y_support).transposed();
    const auto f2 = detail::col_through_inverse(data.coupling, b2, tol);
    std::vector<MatPoly<F>> c2;
    c2.reserve(spec.degree_total());
    for (std::size_t c = 0; c < spec.degree_total(); ++c)
        c2.push_back(detail::kernel_beta_poly(data.kernel, spec.betas[c]));
    res.p2_hat = detail::poly_theta_col(p2.transposed(), c2, *f2).transposed();

    // H-hat = Theta_*[[A, -(J_{P2})^T], [<P1, beta>, H_n]] = H_n + E (J_{P2})^T
    res.h_hat = f.h(n) + ((*e) * b2).block(0, 0);
    return res;
}

// Diagonal (total-derivative) specialization: the coupling is built from the
// double spectral jet of K_{n-1} and the block-diagonal of block-Hankel
// matrices assembled from the raw beta^(j)_m.
template <typename F>
TransformOutcome<F> transform_diagonal(const Factorization<F>& f, const std::vector<F>& points,
                                       const std::vector<std::size_t>& mults,
                                       const std::vector<std::vector<Block<F>>>& raw_betas,
                                       std::size_t n, const FactorizeOptions& opts = {}) {
    if (n > f.n_max())
        throw std::out_of_range("transform_diagonal: degree exceeds factorization depth");
    const std::size_t p = f.block_size();
    const Support<F> support(points, mults);
    if (raw_betas.size() != support.count())
        throw std::invalid_argument("transform_diagonal: one beta list per point required");
    const F tol = detail::transform_tol<F>(opts);

    if (n == 0) {
        // Only the order-zero mass survives against constants.
        Block<F> v00(p, p);
        for (std::size_t j = 0; j < support.count(); ++j) v00 += raw_betas[j][0];
        return detail::degree_zero_result(f, v00);
    }

    const std::size_t nblocks = support.total();
    BlockGrid<F> beta(nblocks, nblocks, p);
    std::size_t offset = 0;
    for (std::size_t j = 0; j < support.count(); ++j) {
        const std::size_t kappa = support.mults[j];
        if (raw_betas[j].size() != kappa)
            throw std::invalid_argument("transform_diagonal: beta grid does not match mults");
        for (std::size_t r = 0; r < kappa; ++r)
            for (std::size_t c = 0; r + c < kappa; ++c)
                beta.block(offset + r, offset + c) = raw_betas[j][r + c];
        offset += kappa;
    }

    const MatKernel<F> kernel = cd_kernel(f, n - 1);
    const BlockGrid<F> coupling =
        BlockGrid<F>::identity(nblocks, p) + beta * kernel_double_jet(kernel, support);

    const MatPoly<F> p1 = f.polynomial1(n);
    const MatPoly<F> p2 = f.polynomial2(n);

    // P1-hat = Theta_*[[I + beta J_K, beta J^{[0,1]}(x)], [J_{P1}, P1(x)]]
    const BlockGrid<F> c1 = jet_row(p1, support);
    const auto e = detail::row_through_inverse(c1, coupling, tol);
    if (!e) return CouplingSingular{n};

    const std::vector<MatPoly<F>> jcol = kernel_jet_col(kernel, support);
    std::vector<MatPoly<F>> beta_jcol(nblocks, MatPoly<F>::zero(p));
    for (std::size_t i = 0; i < nblocks; ++i)
        for (std::size_t t = 0; t < nblocks; ++t) {
            if (beta.block(i, t).is_zero()) continue;
            beta_jcol[i] = beta_jcol[i] + jcol[t].left_mul(beta.block(i, t));
        }

    TransformResult<F> res;
    res.n = n;
    res.coupling_det_ok = true;
    res.p1_hat = detail::poly_theta_row(p1, *e, beta_jcol);

    // P2-hat^T = Theta_*[[I + beta J_K, beta (J_{P2})^T], [J^{[1,0]}(y), P2(y)^T]]
    const BlockGrid<F> b2 = beta * jet_row(p2, support).transposed();
    const auto f2 = detail::col_through_inverse(coupling, b2, tol);
    const std::vector<MatPoly<F>> c2 = kernel_jet_row(kernel, support);
    res.p2_hat = detail::poly_theta_col(p2.transposed(), c2, *f2).transposed();

    // H-hat = H_n + J_{P1} A^{-1} beta (J_{P2})^T
    res.h_hat = f.h(n) + ((*e) * b2).block(0, 0);
    return res;
}

// Discrete-x specialization: coupling I_{Np} + Jmix_{K_{n-1}} beta with the
// mixed double jet (Np x Ntilde-p) against the rectangular coupling grid.
template <typename F>
TransformOutcome<F> transform_discrete(const Factorization<F>& f, const UvarovSpec<F>& spec,
                                       std::size_t n, const FactorizeOptions& opts = {}) {
    if (spec.kind != SpecKind::DiscreteX)
        throw std::invalid_argument("transform_discrete: spec lacks discrete-x data");
    if (n > f.n_max())
        throw std::out_of_range("transform_discrete: degree exceeds factorization depth");
    const std::size_t p = f.block_size();
    const F tol = detail::transform_tol<F>(opts);

    if (n == 0) {
        const MatPoly<F> one = MatPoly<F>::constant(identity_block<F>(p));
        return detail::degree_zero_result(f, v_pairing(one, one, spec));
    }

    const Support<F>& sx = spec.x_support;
    const Support<F>& sy = spec.y_support;
    const BlockGrid<F>& beta = spec.couplings;
    const std::size_t nblocks = sy.total();

    const MatKernel<F> kernel = cd_kernel(f, n - 1);
    const BlockGrid<F> coupling =
        BlockGrid<F>::identity(nblocks, p) + kernel_mixed_jet(kernel, sx, sy) * beta;

    const MatPoly<F> p1 = f.polynomial1(n);
    const MatPoly<F> p2 = f.polynomial2(n);

    // <P1, beta> = Jtilde_{P1} beta; <K, beta> row likewise via the x-jets.
    const BlockGrid<F> c1 = jet_row(p1, sx) * beta;
    const auto e = detail::row_through_inverse(c1, coupling, tol);
    if (!e) return CouplingSingular{n};

    TransformResult<F> res;
    res.n = n;
    res.coupling_det_ok = true;
    res.p1_hat = detail::poly_theta_row(p1, *e, kernel_jet_col(kernel, sy));

    const BlockGrid<F> b2 = jet_row(p2, sy).transposed();
    const auto f2 = detail::col_through_inverse(coupling, b2, tol);
    const std::vector<MatPoly<F>> xrow = kernel_jet_row(kernel, sx);
    std::vector<MatPoly<F>> c2(nblocks, MatPoly<F>::zero(p));
    for (std::size_t c = 0; c < nblocks; ++c)
        for (std::size_t r = 0; r < sx.total(); ++r) {
            if (beta.block(r, c).is_zero()) continue;
            c2[c] = c2[c] + xrow[r].right_mul(beta.block(r, c));
        }
    res.p2_hat = detail::poly_theta_col(p2.transposed(), c2, *f2).transposed();

    res.h_hat = f.h(n) + ((*e) * b2).block(0, 0);
    return res;
}

// Independent path: refactorize the perturbed moments and read off degree n.
template <typename F>
OracleOutcome<F> oracle_transform(const MomentSourcePtr<F>& src, const UvarovSpec<F>& spec,
                                  std::size_t n, const FactorizeOptions& opts = {}) {
    auto fac = factorize(perturb_source(src, spec), n, opts);
    if (std::holds_alternative<Breakdown>(fac)) return std::get<Breakdown>(fac);
    const auto& f = std::get<Factorization<F>>(fac);
    TransformResult<F> res;
    res.n = n;
    res.p1_hat = f.polynomial1(n);
    res.p2_hat = f.polynomial2(n);
    res.h_hat = f.h(n);
    res.coupling_det_ok = true;
    return res;
}

namespace detail {

template <typename F>
bool results_close(const TransformResult<F>& a, const TransformResult<F>& b, const F& tol) {
    return polys_close(a.p1_hat, b.p1_hat, tol) && polys_close(a.p2_hat, b.p2_hat, tol) &&
           blocks_close(a.h_hat, b.h_hat, tol);
}

template <typename F>
bool degree_bound_holds(const MatPoly<F>& hat, const MatPoly<F>& orig, std::size_t n) {
    const MatPoly<F> diff = hat - orig;
    if (diff.is_zero()) return true;
    return n >= 1 && *diff.degree() <= n - 1;
}

}  // namespace detail

// Full equivalence sweep: theorem vs oracle at every degree, the two additive
// forms of H-hat, degree bounds, and structured-spec agreement. Coupling
// singularities and perturbed-Gram breakdowns are recorded side by side
// rather than inferred from one another.
template <typename F>
UvarovReport verify_uvarov(const MomentSourcePtr<F>& src, const UvarovSpec<F>& spec,
                           std::size_t n_max, const FactorizeOptions& opts = {},
                           const F& tol = F(0)) {
    UvarovReport report;

    auto base = factorize(src, n_max, opts);
    if (std::holds_alternative<Breakdown>(base)) {
        report.base_breakdown = std::get<Breakdown>(base).degree;
        return report;
    }
    const auto& f = std::get<Factorization<F>>(base);

    std::optional<Factorization<F>> fhat;
    auto hat = factorize(perturb_source(src, spec), n_max, opts);
    if (std::holds_alternative<Breakdown>(hat)) {
        const std::size_t k = std::get<Breakdown>(hat).degree;
        report.oracle_breakdown = k;
        if (k > 0) {
            auto partial = factorize(perturb_source(src, spec), k - 1, opts);
            if (std::holds_alternative<Factorization<F>>(partial))
                fhat = std::get<Factorization<F>>(std::move(partial));
        }
    } else {
        fhat = std::get<Factorization<F>>(std::move(hat));
    }

    for (std::size_t n = 0; n <= n_max; ++n) {
        UvarovDegreeRecord rec;
        rec.n = n;
        const bool oracle_ok = fhat && n <= fhat->n_max();
        if (!oracle_ok) rec.oracle_unavailable = true;

        auto outcome = transform(f, spec, n, opts);
        if (std::holds_alternative<CouplingSingular>(outcome)) {
            rec.coupling_singular = true;
            report.degrees.push_back(rec);
            continue;
        }
        const auto& res = std::get<TransformResult<F>>(outcome);

        if (oracle_ok) {
            TransformResult<F> oracle;
            oracle.n = n;
            oracle.p1_hat = fhat->polynomial1(n);
            oracle.p2_hat = fhat->polynomial2(n);
            oracle.h_hat = fhat->h(n);
            rec.theorem_matches_oracle = detail::results_close(res, oracle, tol);
        }

        const Block<F> via_p1 = f.h(n) + v_pairing(res.p1_hat, f.polynomial2(n), spec);
        const Block<F> via_p2 = f.h(n) + v_pairing(f.polynomial1(n), res.p2_hat, spec);
        rec.h_hat_consistent =
            blocks_close(res.h_hat, via_p1, tol) && blocks_close(res.h_hat, via_p2, tol);

        rec.degree_bound_ok = res.p1_hat.is_monic() && res.p2_hat.is_monic() &&
                              detail::degree_bound_holds(res.p1_hat, f.polynomial1(n), n) &&
                              detail::degree_bound_holds(res.p2_hat, f.polynomial2(n), n);

        if (spec.kind == SpecKind::DiagonalHankel) {
            auto special = transform_diagonal(f, spec.y_support.points, spec.y_support.mults,
                                              spec.diagonal_betas, n, opts);
            rec.specialization_ok =
                std::holds_alternative<TransformResult<F>>(special) &&
                detail::results_close(std::get<TransformResult<F>>(special), res, tol);
        } else if (spec.kind == SpecKind::DiscreteX) {
            auto special = transform_discrete(f, spec, n, opts);
            rec.specialization_ok =
                std::holds_alternative<TransformResult<F>>(special) &&
                detail::results_close(std::get<TransformResult<F>>(special), res, tol);
        }

        report.degrees.push_back(rec);
    }
    return report;
}

}  // namespace mbop

#endif  // MBOP_UVAROV_HPP
