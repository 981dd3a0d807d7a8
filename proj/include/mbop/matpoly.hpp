#ifndef MBOP_MATPOLY_HPP
#define MBOP_MATPOLY_HPP

// Matrix polynomials, bivariate matrix kernels, perturbation supports, and
// the spectral-jet constructions built from them. Jet entries carry the 1/m!
// normalization and are ordered point-major, derivative-minor; both choices
// are part of the public contract.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mbop/field.hpp"
#include "mbop/matrix.hpp"

namespace mbop {

template <typename F>
class MatPoly {
public:
    explicit MatPoly(std::size_t p) : p_(p) {}

    static MatPoly zero(std::size_t p) { return MatPoly(p); }

    static MatPoly from_coeffs(std::size_t p, std::vector<Block<F>> coeffs) {
        MatPoly poly(p);
        poly.coeffs_ = std::move(coeffs);
        for (const auto& c : poly.coeffs_)
            if (c.rows() != p || c.cols() != p)
                throw std::invalid_argument("MatPoly coefficient has wrong block size");
        poly.trim();
        return poly;
    }

    static MatPoly constant(const Block<F>& b) {
        return from_coeffs(b.rows(), {b});
    }

    // b * x^k
    static MatPoly monomial(const Block<F>& b, std::size_t k) {
        std::vector<Block<F>> cs(k + 1, Block<F>(b.rows(), b.cols()));
        cs[k] = b;
        return from_coeffs(b.rows(), std::move(cs));
    }

    static MatPoly identity_monomial(std::size_t p, std::size_t k) {
        return monomial(identity_block<F>(p), k);
    }

    std::size_t block_size() const { return p_; }

    // Degree of the zero polynomial is a distinct sentinel, not -1.
    std::optional<std::size_t> degree() const {
        if (coeffs_.empty()) return std::nullopt;
        return coeffs_.size() - 1;
    }

    bool is_zero() const { return coeffs_.empty(); }

    // Coefficient of x^k; zero block beyond the stored range.
    Block<F> coeff(std::size_t k) const {
        if (k < coeffs_.size()) return coeffs_[k];
        return Block<F>(p_, p_);
    }

    std::size_t coeff_count() const { return coeffs_.size(); }

    bool is_monic() const {
        return !coeffs_.empty() && coeffs_.back() == identity_block<F>(p_);
    }

    MatPoly operator+(const MatPoly& o) const {
        require_same_p(o);
        std::vector<Block<F>> cs(std::max(coeffs_.size(), o.coeffs_.size()), Block<F>(p_, p_));
        for (std::size_t k = 0; k < cs.size(); ++k) cs[k] = coeff(k) + o.coeff(k);
        return from_coeffs(p_, std::move(cs));
    }

    MatPoly operator-(const MatPoly& o) const {
        require_same_p(o);
        std::vector<Block<F>> cs(std::max(coeffs_.size(), o.coeffs_.size()), Block<F>(p_, p_));
        for (std::size_t k = 0; k < cs.size(); ++k) cs[k] = coeff(k) - o.coeff(k);
        return from_coeffs(p_, std::move(cs));
    }

    MatPoly operator-() const {
        std::vector<Block<F>> cs;
        cs.reserve(coeffs_.size());
        for (const auto& c : coeffs_) cs.push_back(-c);
        return from_coeffs(p_, std::move(cs));
    }

    MatPoly scaled(const F& s) const {
        std::vector<Block<F>> cs;
        cs.reserve(coeffs_.size());
        for (const auto& c : coeffs_) cs.push_back(c.scaled(s));
        return from_coeffs(p_, std::move(cs));
    }

    // A * P(x): constant block acting on the left of every coefficient.
    MatPoly left_mul(const Block<F>& a) const {
        std::vector<Block<F>> cs;
        cs.reserve(coeffs_.size());
        for (const auto& c : coeffs_) cs.push_back(a * c);
        return from_coeffs(p_, std::move(cs));
    }

    // P(x) * A
    MatPoly right_mul(const Block<F>& a) const {
        std::vector<Block<F>> cs;
        cs.reserve(coeffs_.size());
        for (const auto& c : coeffs_) cs.push_back(c * a);
        return from_coeffs(p_, std::move(cs));
    }

    // Transposes every coefficient: P(x) -> (P(x))^T.
    MatPoly transposed() const {
        std::vector<Block<F>> cs;
        cs.reserve(coeffs_.size());
        for (const auto& c : coeffs_) cs.push_back(c.transposed());
        return from_coeffs(p_, std::move(cs));
    }

    Block<F> eval(const F& x0) const {
        Block<F> acc(p_, p_);
        for (std::size_t k = coeffs_.size(); k-- > 0;) {
            acc = acc.scaled(x0) + coeffs_[k];
        }
        return acc;
    }

    // m-th derivative; coefficient k of the result is (k+m)!/k! * p_{k+m}.
    MatPoly derivative(std::size_t m) const {
        if (m == 0) return *this;
        if (coeffs_.size() <= m) return zero(p_);
        std::vector<Block<F>> cs(coeffs_.size() - m, Block<F>(p_, p_));
        for (std::size_t k = 0; k < cs.size(); ++k)
            cs[k] = coeffs_[k + m].scaled(falling_factorial_ratio<F>(k, m));
        return from_coeffs(p_, std::move(cs));
    }

    // f^{(m)}(x0) / m! = sum_k C(k, m) p_k x0^{k-m}
    Block<F> jet_entry(const F& x0, std::size_t m) const {
        Block<F> acc(p_, p_);
        for (std::size_t k = m; k < coeffs_.size(); ++k)
            acc += coeffs_[k].scaled(field_binomial<F>(k, m) * field_pow(x0, k - m));
        return acc;
    }

    bool operator==(const MatPoly& o) const { return p_ == o.p_ && coeffs_ == o.coeffs_; }
    bool operator!=(const MatPoly& o) const { return !(*this == o); }

private:
    void require_same_p(const MatPoly& o) const {
        if (p_ != o.p_) throw std::invalid_argument("MatPoly block size mismatch");
    }

    void trim() {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    std::size_t p_;
    std::vector<Block<F>> coeffs_;
};

template <typename F>
bool polys_close(const MatPoly<F>& a, const MatPoly<F>& b, const F& tol = F(0)) {
    if (a.block_size() != b.block_size()) return false;
    const std::size_t n = std::max(a.coeff_count(), b.coeff_count());
    for (std::size_t k = 0; k < n; ++k)
        if (!blocks_close(a.coeff(k), b.coeff(k), tol)) return false;
    return true;
}

// Perturbation support: pairwise distinct points x_1..x_q with multiplicities
// kappa^(1)..kappa^(q); N = sum of multiplicities.
template <typename F>
struct Support {
    std::vector<F> points;
    std::vector<std::size_t> mults;

    Support() = default;

    Support(std::vector<F> pts, std::vector<std::size_t> ms)
        : points(std::move(pts)), mults(std::move(ms)) {
        if (points.size() != mults.size())
            throw std::invalid_argument("Support: points/mults length mismatch");
        for (std::size_t j = 0; j < points.size(); ++j) {
            if (mults[j] < 1) throw std::invalid_argument("Support: multiplicity must be >= 1");
            for (std::size_t i = 0; i < j; ++i)
                if (points[i] == points[j])
                    throw std::invalid_argument("Support: points must be pairwise distinct");
        }
    }

    std::size_t count() const { return points.size(); }

    std::size_t total() const {
        std::size_t n = 0;
        for (std::size_t m : mults) n += m;
        return n;
    }
};

// Bivariate matrix polynomial K(x,y); coefficient (k,l) multiplies x^k y^l.
template <typename F>
class MatKernel {
public:
    MatKernel(std::size_t p, std::size_t x_terms, std::size_t y_terms)
        : p_(p), xn_(x_terms), yn_(y_terms), coeffs_(xn_ * yn_, Block<F>(p, p)) {}

    static MatKernel zero(std::size_t p) { return MatKernel(p, 0, 0); }

    std::size_t block_size() const { return p_; }
    std::size_t x_terms() const { return xn_; }
    std::size_t y_terms() const { return yn_; }

    Block<F> coeff(std::size_t k, std::size_t l) const {
        if (k < xn_ && l < yn_) return coeffs_[k * yn_ + l];
        return Block<F>(p_, p_);
    }

    Block<F>& at(std::size_t k, std::size_t l) {
        if (k >= xn_ || l >= yn_) throw std::out_of_range("MatKernel coefficient index");
        return coeffs_[k * yn_ + l];
    }

    Block<F> eval(const F& x0, const F& y0) const {
        Block<F> acc(p_, p_);
        for (std::size_t k = 0; k < xn_; ++k)
            for (std::size_t l = 0; l < yn_; ++l)
                acc += coeffs_[k * yn_ + l].scaled(field_pow(x0, k) * field_pow(y0, l));
        return acc;
    }

    // (d/dy)^m K (x, y0) / m! as a polynomial in x.
    MatPoly<F> y_jet_poly(const F& y0, std::size_t m) const {
        std::vector<Block<F>> cs(xn_ == 0 ? 0 : xn_, Block<F>(p_, p_));
        for (std::size_t k = 0; k < xn_; ++k)
            for (std::size_t l = m; l < yn_; ++l)
                cs[k] += coeffs_[k * yn_ + l].scaled(field_binomial<F>(l, m) * field_pow(y0, l - m));
        return MatPoly<F>::from_coeffs(p_, std::move(cs));
    }

    // (d/dx)^m K (x0, y) / m! as a polynomial in y.
    MatPoly<F> x_jet_poly(const F& x0, std::size_t m) const {
        std::vector<Block<F>> cs(yn_ == 0 ? 0 : yn_, Block<F>(p_, p_));
        for (std::size_t l = 0; l < yn_; ++l)
            for (std::size_t k = m; k < xn_; ++k)
                cs[l] += coeffs_[k * yn_ + l].scaled(field_binomial<F>(k, m) * field_pow(x0, k - m));
        return MatPoly<F>::from_coeffs(p_, std::move(cs));
    }

    // K(x,y) -> (K(y,x))^T, used by the symmetry checks.
    MatKernel transposed_swapped() const {
        MatKernel t(p_, yn_, xn_);
        for (std::size_t k = 0; k < xn_; ++k)
            for (std::size_t l = 0; l < yn_; ++l) t.at(l, k) = coeffs_[k * yn_ + l].transposed();
        return t;
    }

    bool operator==(const MatKernel& o) const {
        if (p_ != o.p_) return false;
        const std::size_t xs = std::max(xn_, o.xn_);
        const std::size_t ys = std::max(yn_, o.yn_);
        for (std::size_t k = 0; k < xs; ++k)
            for (std::size_t l = 0; l < ys; ++l)
                if (!(coeff(k, l) == o.coeff(k, l))) return false;
        return true;
    }
    bool operator!=(const MatKernel& o) const { return !(*this == o); }

private:
    std::size_t p_;
    std::size_t xn_;
    std::size_t yn_;
    std::vector<Block<F>> coeffs_;
};

// Spectral jet of a polynomial: 1 x N row, block (j,m) = f^{(m)}(x_j)/m!.
template <typename F>
BlockGrid<F> jet_row(const MatPoly<F>& f, const Support<F>& s) {
    BlockGrid<F> row(1, s.total(), f.block_size());
    std::size_t idx = 0;
    for (std::size_t j = 0; j < s.count(); ++j)
        for (std::size_t m = 0; m < s.mults[j]; ++m) row.block(0, idx++) = f.jet_entry(s.points[j], m);
    return row;
}

// Kernel jet in the second variable: N polynomials in x,
// entry (j,m) = (d/dy)^m K (x, x_j) / m!.
template <typename F>
std::vector<MatPoly<F>> kernel_jet_col(const MatKernel<F>& k, const Support<F>& s) {
    std::vector<MatPoly<F>> col;
    col.reserve(s.total());
    for (std::size_t j = 0; j < s.count(); ++j)
        for (std::size_t m = 0; m < s.mults[j]; ++m) col.push_back(k.y_jet_poly(s.points[j], m));
    return col;
}

// Kernel jet in the first variable: N polynomials in y,
// entry (j,m) = (d/dx)^m K (x_j, y) / m!.
template <typename F>
std::vector<MatPoly<F>> kernel_jet_row(const MatKernel<F>& k, const Support<F>& s) {
    std::vector<MatPoly<F>> row;
    row.reserve(s.total());
    for (std::size_t j = 0; j < s.count(); ++j)
        for (std::size_t m = 0; m < s.mults[j]; ++m) row.push_back(k.x_jet_poly(s.points[j], m));
    return row;
}

// Mixed double jet: N x Ntilde grid, rows follow sy (second variable), columns
// follow sx (first variable); entry ((j,my),(b,mx)) is
// (d/dx)^mx (d/dy)^my K (sx_b, sy_j) / (mx! my!).
template <typename F>
BlockGrid<F> kernel_mixed_jet(const MatKernel<F>& k, const Support<F>& sx, const Support<F>& sy) {
    BlockGrid<F> grid(sy.total(), sx.total(), k.block_size());
    std::size_t r = 0;
    for (std::size_t j = 0; j < sy.count(); ++j)
        for (std::size_t my = 0; my < sy.mults[j]; ++my, ++r) {
            // One y-jet evaluation shared across this entire block row.
            const MatPoly<F> slice = k.y_jet_poly(sy.points[j], my);
            std::size_t c = 0;
            for (std::size_t b = 0; b < sx.count(); ++b)
                for (std::size_t mx = 0; mx < sx.mults[b]; ++mx, ++c)
                    grid.block(r, c) = slice.jet_entry(sx.points[b], mx);
        }
    return grid;
}

// Double spectral jet: coincident-support case of the mixed jet.
template <typename F>
BlockGrid<F> kernel_double_jet(const MatKernel<F>& k, const Support<F>& s) {
    return kernel_mixed_jet(k, s, s);
}

}  // namespace mbop

#endif  // MBOP_MATPOLY_HPP
