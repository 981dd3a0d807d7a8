#ifndef MBOP_CDKERNEL_HPP
#define MBOP_CDKERNEL_HPP

// Christoffel-Darboux kernels K_n(x,y) = sum_{k<=n} (P2_k(y))^T H_k^{-1}
// P1_k(x), materialized as explicit coefficient grids, and the reproducing
// property checks.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "mbop/field.hpp"
#include "mbop/gaussborel.hpp"
#include "mbop/matpoly.hpp"
#include "mbop/matrix.hpp"
#include "mbop/report.hpp"

namespace mbop {

template <typename F>
MatKernel<F> cd_kernel(const Factorization<F>& f, std::size_t n) {
    if (n > f.n_max()) throw std::out_of_range("cd_kernel: degree exceeds factorization depth");
    const std::size_t p = f.block_size();
    MatKernel<F> kernel(p, n + 1, n + 1);
    const F tol = F(0);  // H_k nonsingular by construction
    for (std::size_t k = 0; k <= n; ++k) {
        const auto hinv = inverse(f.h(k), tol);
        // coefficient (a,b) accumulates (S2_{k,b})^T H_k^{-1} S1_{k,a}
        for (std::size_t b = 0; b <= k; ++b) {
            const Block<F> left = f.s2().block(k, b).transposed() * (*hinv);
            for (std::size_t a = 0; a <= k; ++a) kernel.at(a, b) += left * f.s1().block(k, a);
        }
    }
    return kernel;
}

// <K_n(x,z), Q(y)>_u contracted through the Gram entries; the result is a
// polynomial in z with blockwise coefficients sum_k C_{k,b} G_{k,l} q_l^T.
template <typename F>
MatPoly<F> kernel_pair_right(const MomentSource<F>& src, const MatKernel<F>& kernel,
                             const MatPoly<F>& q) {
    const std::size_t p = src.block_size();
    std::vector<Block<F>> cs(kernel.y_terms(), Block<F>(p, p));
    for (std::size_t b = 0; b < kernel.y_terms(); ++b)
        for (std::size_t k = 0; k < kernel.x_terms(); ++k) {
            const Block<F> ckb = kernel.coeff(k, b);
            if (ckb.is_zero()) continue;
            for (std::size_t l = 0; l < q.coeff_count(); ++l) {
                const Block<F> ql = q.coeff(l);
                if (ql.is_zero()) continue;
                cs[b] += ckb * src.moment(k, l) * ql.transposed();
            }
        }
    return MatPoly<F>::from_coeffs(p, std::move(cs));
}

// Verifies <K_n(x,z), I_p y^l>_u = I_p z^l for l <= n, and the projection
// identity on random block-coefficient combinations sum_j C_j P2_j with
// degrees running past n (the kernel must truncate them to degree n).
template <typename F>
CheckReport verify_reproducing(const Factorization<F>& f, std::size_t n, std::size_t combos = 10,
                               unsigned seed = 7, const F& tol = F(0)) {
    CheckReport report;
    const auto& src = *f.source();
    const std::size_t p = f.block_size();
    const MatKernel<F> kernel = cd_kernel(f, n);

    for (std::size_t l = 0; l <= n; ++l) {
        const MatPoly<F> got =
            kernel_pair_right(src, kernel, MatPoly<F>::identity_monomial(p, l));
        const MatPoly<F> want = MatPoly<F>::identity_monomial(p, l);
        report.add("<K_" + std::to_string(n) + "(x,z), y^" + std::to_string(l) + "> = z^l",
                   polys_close(got, want, tol));
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coef(-3, 3);
    for (std::size_t trial = 0; trial < combos; ++trial) {
        const std::size_t top = f.n_max();
        std::vector<Block<F>> c(top + 1, Block<F>(p, p));
        for (auto& blk : c)
            for (std::size_t r = 0; r < p; ++r)
                for (std::size_t s = 0; s < p; ++s) blk(r, s) = F(coef(rng));

        MatPoly<F> combo = MatPoly<F>::zero(p);
        MatPoly<F> truncated = MatPoly<F>::zero(p);
        for (std::size_t j = 0; j <= top; ++j) {
            combo = combo + f.polynomial2(j).left_mul(c[j]);
            if (j <= n) truncated = truncated + f.polynomial2(j).left_mul(c[j]);
        }
        const MatPoly<F> got = kernel_pair_right(src, kernel, combo);
        const MatPoly<F> want = truncated.transposed();
        report.add("projection of random combo #" + std::to_string(trial),
                   polys_close(got, want, tol));
    }
    return report;
}

}  // namespace mbop

#endif  // MBOP_CDKERNEL_HPP
