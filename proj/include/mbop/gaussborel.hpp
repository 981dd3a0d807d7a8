#ifndef MBOP_GAUSSBOREL_HPP
#define MBOP_GAUSSBOREL_HPP

// Block Gauss-Borel factorization of truncated Gram matrices,
// G = S1^{-1} H S2^{-T} with S1, S2 block lower unitriangular and H block
// diagonal, via sequential block elimination. Breakdown at the first singular
// Schur pivot is a first-class result, not an exception.

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mbop/field.hpp"
#include "mbop/matpoly.hpp"
#include "mbop/matrix.hpp"
#include "mbop/moments.hpp"
#include "mbop/report.hpp"

namespace mbop {

struct Breakdown {
    std::size_t degree;
};

struct FactorizeOptions {
    // Float mode only: pivot block H_k is singular when |det| <= tol * max
    // entry magnitude. Exact mode tests det == 0.
    double pivot_tol = 1e-12;
};

template <typename F>
class Factorization {
public:
    std::size_t n_max() const { return n_max_; }
    std::size_t block_size() const { return p_; }

    const Block<F>& h(std::size_t n) const {
        check_degree(n);
        return h_[n];
    }

    const BlockGrid<F>& s1() const { return s1_; }
    const BlockGrid<F>& s2() const { return s2_; }
    const MomentSourcePtr<F>& source() const { return src_; }

    // P^{[1]}_n(x): coefficient k is (S1)_{n,k}; monic of degree exactly n.
    MatPoly<F> polynomial1(std::size_t n) const { return row_poly(s1_, n); }

    // P^{[2]}_n(y): coefficient k is (S2)_{n,k}.
    MatPoly<F> polynomial2(std::size_t n) const { return row_poly(s2_, n); }

    // Continues the elimination to a higher degree, reusing all prior pivots.
    std::optional<Breakdown> extend(std::size_t new_n_max) {
        while (n_max_ < new_n_max) {
            if (auto brk = push_degree()) return brk;
        }
        return std::nullopt;
    }

    template <typename G>
    friend std::variant<Factorization<G>, Breakdown> factorize(MomentSourcePtr<G>, std::size_t,
                                                               const FactorizeOptions&);

private:
    Factorization(MomentSourcePtr<F> src, const FactorizeOptions& opts)
        : src_(std::move(src)), p_(src_->block_size()), opts_(opts) {}

    void check_degree(std::size_t n) const {
        if (n > n_max_) throw std::out_of_range("degree exceeds factorization depth");
    }

    MatPoly<F> row_poly(const BlockGrid<F>& s, std::size_t n) const {
        check_degree(n);
        std::vector<Block<F>> cs;
        cs.reserve(n + 1);
        for (std::size_t k = 0; k <= n; ++k) cs.push_back(s.block(n, k));
        return MatPoly<F>::from_coeffs(p_, std::move(cs));
    }

    const Block<F>& gram(std::size_t k, std::size_t l) {
        return gram_[k * gram_stride_ + l];
    }

    void grow_gram(std::size_t upto) {
        // Re-reads nothing already cached; sources are deterministic.
        const std::size_t stride = upto + 1;
        std::vector<Block<F>> grid(stride * stride, Block<F>(p_, p_));
        for (std::size_t k = 0; k < stride; ++k)
            for (std::size_t l = 0; l < stride; ++l)
                grid[k * stride + l] = (k < size_ && l < size_) ? gram_[k * gram_stride_ + l]
                                                                : src_->moment(k, l);
        gram_ = std::move(grid);
        gram_stride_ = stride;
    }

    static BlockGrid<F> grow_grid(const BlockGrid<F>& g, std::size_t n, std::size_t p) {
        BlockGrid<F> out(n, n, p);
        for (std::size_t i = 0; i < g.block_rows(); ++i)
            for (std::size_t j = 0; j < g.block_cols(); ++j) out.block(i, j) = g.block(i, j);
        return out;
    }

    // Adds block row/column `k = size_` of the Doolittle factors
    // G = L H U (L, U unitriangular), then the matching rows of S1 = L^{-1}
    // and columns of V = U^{-1} (so S2 rows are V columns transposed).
    std::optional<Breakdown> push_degree() {
        const std::size_t k = size_;
        grow_gram(k);
        l_ = grow_grid(l_, k + 1, p_);
        u_ = grow_grid(u_, k + 1, p_);
        s1_ = grow_grid(s1_, k + 1, p_);
        v_ = grow_grid(v_, k + 1, p_);

        // New row of L and column of U against all prior pivots.
        for (std::size_t j = 0; j < k; ++j) {
            Block<F> row_acc = gram(k, j);
            Block<F> col_acc = gram(j, k);
            for (std::size_t t = 0; t < j; ++t) {
                row_acc -= l_.block(k, t) * h_[t] * u_.block(t, j);
                col_acc -= l_.block(j, t) * h_[t] * u_.block(t, k);
            }
            l_.block(k, j) = row_acc * hinv_[j];
            u_.block(j, k) = hinv_[j] * col_acc;
        }
        l_.block(k, k) = identity_block<F>(p_);
        u_.block(k, k) = identity_block<F>(p_);

        // Schur pivot H_k.
        Block<F> pivot = gram(k, k);
        for (std::size_t t = 0; t < k; ++t) pivot -= l_.block(k, t) * h_[t] * u_.block(t, k);

        const F tol = tolerance();
        if (block_is_singular(pivot, tol)) return Breakdown{k};
        auto inv = inverse(pivot, tol);
        if (!inv) return Breakdown{k};
        h_.push_back(pivot);
        hinv_.push_back(*inv);

        // S1 row k: L*S1 = I, both lower unitriangular.
        for (std::size_t c = 0; c < k; ++c) {
            Block<F> acc(p_, p_);
            for (std::size_t t = c; t < k; ++t) acc -= l_.block(k, t) * s1_.block(t, c);
            s1_.block(k, c) = acc;
        }
        s1_.block(k, k) = identity_block<F>(p_);

        // V column k: U*V = I, both upper unitriangular.
        v_.block(k, k) = identity_block<F>(p_);
        for (std::size_t r = k; r-- > 0;) {
            Block<F> acc(p_, p_);
            for (std::size_t t = r + 1; t <= k; ++t) acc -= u_.block(r, t) * v_.block(t, k);
            v_.block(r, k) = acc;
        }

        size_ = k + 1;
        n_max_ = k;
        rebuild_s2();
        return std::nullopt;
    }

    void rebuild_s2() {
        // S2^{-T} = U, hence S2 = (U^{-1})^T = V^T blockwise.
        s2_ = v_.transposed();
    }

    F tolerance() const {
        if constexpr (is_exact_field_v<F>) {
            return F(0);
        } else {
            return F(opts_.pivot_tol);
        }
    }

    MomentSourcePtr<F> src_;
    std::size_t p_;
    FactorizeOptions opts_;
    std::size_t size_ = 0;   // number of completed degrees
    std::size_t n_max_ = 0;  // valid only when size_ > 0
    std::size_t gram_stride_ = 0;
    std::vector<Block<F>> gram_;
    BlockGrid<F> l_, u_, v_;
    BlockGrid<F> s1_, s2_;
    std::vector<Block<F>> h_;
    std::vector<Block<F>> hinv_;
};

// Factorizes the (n_max+1)-block truncation of the Gram matrix. Returns the
// factorization, or Breakdown(k) when the k-th Schur pivot is singular,
// meaning the truncated Gram is not quasidefinite.
template <typename F>
std::variant<Factorization<F>, Breakdown> factorize(MomentSourcePtr<F> src, std::size_t n_max,
                                                    const FactorizeOptions& opts = {}) {
    Factorization<F> f(std::move(src), opts);
    for (std::size_t k = 0; k <= n_max; ++k) {
        if (auto brk = f.push_degree()) return *brk;
    }
    return f;
}

// Sesquilinear pairing through the Gram entries:
// <P, Q> = sum_{k,l} p_k G_{k,l} (q_l)^T.
template <typename F>
Block<F> pair(const MomentSource<F>& src, const MatPoly<F>& pl, const MatPoly<F>& q) {
    const std::size_t p = src.block_size();
    Block<F> acc(p, p);
    for (std::size_t k = 0; k < pl.coeff_count(); ++k) {
        const Block<F> pk = pl.coeff(k);
        if (pk.is_zero()) continue;
        for (std::size_t l = 0; l < q.coeff_count(); ++l) {
            const Block<F> ql = q.coeff(l);
            if (ql.is_zero()) continue;
            acc += pk * src.moment(k, l) * ql.transposed();
        }
    }
    return acc;
}

template <typename F>
Block<F> pair(const MomentSourcePtr<F>& src, const MatPoly<F>& pl, const MatPoly<F>& q) {
    return pair(*src, pl, q);
}

// Checks <P1_n, P2_m> = delta_{nm} H_n for all n, m <= n_max, plus the
// monomial orthogonality relations <P1_n, y^m> and <x^m, P2_n>.
template <typename F>
CheckReport verify_biorthogonality(const Factorization<F>& f, const F& tol = F(0)) {
    CheckReport report;
    const auto& src = *f.source();
    const std::size_t p = f.block_size();
    std::vector<MatPoly<F>> p1, p2;
    for (std::size_t n = 0; n <= f.n_max(); ++n) {
        p1.push_back(f.polynomial1(n));
        p2.push_back(f.polynomial2(n));
    }
    const Block<F> zero(p, p);
    for (std::size_t n = 0; n <= f.n_max(); ++n) {
        for (std::size_t m = 0; m <= f.n_max(); ++m) {
            const Block<F> got = pair(src, p1[n], p2[m]);
            const Block<F>& want = (n == m) ? f.h(n) : zero;
            report.add("<P1_" + std::to_string(n) + ", P2_" + std::to_string(m) + ">",
                       blocks_close(got, want, tol));
        }
        for (std::size_t m = 0; m <= n; ++m) {
            const MatPoly<F> mono = MatPoly<F>::identity_monomial(p, m);
            const Block<F>& want = (m == n) ? f.h(n) : zero;
            report.add("<P1_" + std::to_string(n) + ", y^" + std::to_string(m) + ">",
                       blocks_close(pair(src, p1[n], mono), want, tol));
            report.add("<x^" + std::to_string(m) + ", P2_" + std::to_string(n) + ">",
                       blocks_close(pair(src, mono, p2[n]), want, tol));
        }
    }
    return report;
}

}  // namespace mbop

#endif  // MBOP_GAUSSBOREL_HPP
