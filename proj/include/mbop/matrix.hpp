#ifndef MBOP_MATRIX_HPP
#define MBOP_MATRIX_HPP

// Dense matrices over an exact or floating scalar field, plus block-structured
// grids. A Block is a p x p matrix, the atom every other structure is built
// from; BlockGrid is an s x t arrangement of Blocks sharing one p.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mbop/field.hpp"

namespace mbop {

template <typename F>
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, F(0)) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = F(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    F& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const F& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    bool is_zero() const {
        for (const F& x : data_)
            if (!(x == F(0))) return false;
        return true;
    }

    bool is_square() const { return rows_ == cols_; }

    F max_abs() const {
        F m(0);
        for (const F& x : data_) {
            F a = field_abs(x);
            if (a > m) m = a;
        }
        return m;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
        return r;
    }

    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
        return r;
    }

    Matrix operator-() const {
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = -data_[i];
        return r;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
        Matrix r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const F& a = (*this)(i, k);
                if (a == F(0)) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += a * o(k, j);
            }
        return r;
    }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    Matrix scaled(const F& s) const {
        Matrix r(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = s * data_[i];
        return r;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }
    bool operator!=(const Matrix& o) const { return !(*this == o); }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<F> data_;
};

template <typename F>
Matrix<F> operator*(const F& s, const Matrix<F>& m) {
    return m.scaled(s);
}

// The p x p atom of all computations.
template <typename F>
using Block = Matrix<F>;

template <typename F>
Block<F> identity_block(std::size_t p) {
    return Matrix<F>::identity(p);
}

namespace detail {

// Gaussian elimination workspace on the augmented system [A | B].
// Pivot rule: exact fields accept any nonzero pivot; floating fields require
// |pivot| > tol * scale, with scale the largest |entry| of the original A.
template <typename F>
struct Elimination {
    Matrix<F> a;
    Matrix<F> b;
    F tol;
    F scale;
    int sign = 1;
    bool singular = false;

    Elimination(const Matrix<F>& A, const Matrix<F>& B, const F& tolerance)
        : a(A), b(B), tol(tolerance), scale(A.max_abs()) {
        const std::size_t n = a.rows();
        for (std::size_t k = 0; k < n && !singular; ++k) {
            const std::size_t piv = choose_pivot(k);
            if (piv == n) {
                singular = true;
                break;
            }
            if (piv != k) {
                swap_rows(k, piv);
                sign = -sign;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                if (a(i, k) == F(0)) continue;
                F factor = a(i, k) / a(k, k);
                for (std::size_t j = k; j < n; ++j) a(i, j) -= factor * a(k, j);
                for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= factor * b(k, j);
            }
        }
    }

    bool pivot_ok(const F& v) const {
        if constexpr (is_exact_field_v<F>) {
            return !(v == F(0));
        } else {
            return field_abs(v) > tol * scale;
        }
    }

    std::size_t choose_pivot(std::size_t k) {
        const std::size_t n = a.rows();
        if constexpr (is_exact_field_v<F>) {
            for (std::size_t i = k; i < n; ++i)
                if (!(a(i, k) == F(0))) return i;
            return n;
        } else {
            std::size_t best = n;
            F best_abs(0);
            for (std::size_t i = k; i < n; ++i) {
                F v = field_abs(a(i, k));
                if (v > best_abs) {
                    best_abs = v;
                    best = i;
                }
            }
            if (best == n || !pivot_ok(a(best, k))) return n;
            return best;
        }
    }

    void swap_rows(std::size_t r, std::size_t s) {
        for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(r, j), a(s, j));
        for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(r, j), b(s, j));
    }

    Matrix<F> back_substitute() const {
        const std::size_t n = a.rows();
        Matrix<F> x(n, b.cols());
        for (std::size_t col = 0; col < b.cols(); ++col) {
            for (std::size_t ii = n; ii-- > 0;) {
                F sum = b(ii, col);
                for (std::size_t j = ii + 1; j < n; ++j) sum -= a(ii, j) * x(j, col);
                x(ii, col) = sum / a(ii, ii);
            }
        }
        return x;
    }
};

}  // namespace detail

// Solves A X = B. Returns nullopt when A is singular under the field's rule.
template <typename F>
std::optional<Matrix<F>> solve(const Matrix<F>& A, const Matrix<F>& B, const F& tol = F(0)) {
    if (!A.is_square() || A.rows() != B.rows())
        throw std::invalid_argument("solve: shape mismatch");
    if (A.rows() == 0) return Matrix<F>(0, B.cols());
    detail::Elimination<F> e(A, B, tol);
    if (e.singular) return std::nullopt;
    return e.back_substitute();
}

template <typename F>
F determinant(const Matrix<F>& A, const F& tol = F(0)) {
    if (!A.is_square()) throw std::invalid_argument("determinant: not square");
    if (A.rows() == 0) return F(1);
    detail::Elimination<F> e(A, Matrix<F>(A.rows(), 0), tol);
    if (e.singular) return F(0);
    F det = e.sign > 0 ? F(1) : F(-1);
    for (std::size_t i = 0; i < A.rows(); ++i) det = det * e.a(i, i);
    return det;
}

template <typename F>
std::optional<Matrix<F>> inverse(const Matrix<F>& A, const F& tol = F(0)) {
    return solve(A, Matrix<F>::identity(A.rows()), tol);
}

// Singularity test for a single block, following the factorization rule:
// exact mode demands det != 0, float mode compares |det| against
// tol * largest entry magnitude.
template <typename F>
bool block_is_singular(const Block<F>& b, const F& tol = F(0)) {
    if constexpr (is_exact_field_v<F>) {
        return determinant(b) == F(0);
    } else {
        F d = field_abs(determinant(b, tol));
        return d <= tol * b.max_abs();
    }
}

// Blockwise comparison: exact when tol == 0, otherwise entrywise
// |a-b| <= tol * max(1, max|a|, max|b|).
template <typename F>
bool blocks_close(const Matrix<F>& a, const Matrix<F>& b, const F& tol = F(0)) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    if (tol == F(0)) return a == b;
    F scale(1);
    if (a.max_abs() > scale) scale = a.max_abs();
    if (b.max_abs() > scale) scale = b.max_abs();
    return (a - b).max_abs() <= tol * scale;
}

// An s x t grid of p x p blocks. BlockRow and BlockCol are grids with a single
// block row or block column.
template <typename F>
class BlockGrid {
public:
    BlockGrid() = default;

    BlockGrid(std::size_t brows, std::size_t bcols, std::size_t p)
        : brows_(brows), bcols_(bcols), p_(p), blocks_(brows * bcols, Block<F>(p, p)) {}

    static BlockGrid identity(std::size_t s, std::size_t p) {
        BlockGrid g(s, s, p);
        for (std::size_t i = 0; i < s; ++i) g.block(i, i) = identity_block<F>(p);
        return g;
    }

    std::size_t block_rows() const { return brows_; }
    std::size_t block_cols() const { return bcols_; }
    std::size_t block_size() const { return p_; }

    Block<F>& block(std::size_t i, std::size_t j) { return blocks_[i * bcols_ + j]; }
    const Block<F>& block(std::size_t i, std::size_t j) const { return blocks_[i * bcols_ + j]; }

    Matrix<F> flatten() const {
        Matrix<F> m(brows_ * p_, bcols_ * p_);
        for (std::size_t i = 0; i < brows_; ++i)
            for (std::size_t j = 0; j < bcols_; ++j)
                for (std::size_t r = 0; r < p_; ++r)
                    for (std::size_t c = 0; c < p_; ++c)
                        m(i * p_ + r, j * p_ + c) = block(i, j)(r, c);
        return m;
    }

    static BlockGrid from_flat(const Matrix<F>& m, std::size_t p) {
        if (p == 0 || m.rows() % p != 0 || m.cols() % p != 0)
            throw std::invalid_argument("from_flat: dimensions not a multiple of p");
        BlockGrid g(m.rows() / p, m.cols() / p, p);
        for (std::size_t i = 0; i < g.brows_; ++i)
            for (std::size_t j = 0; j < g.bcols_; ++j)
                for (std::size_t r = 0; r < p; ++r)
                    for (std::size_t c = 0; c < p; ++c)
                        g.block(i, j)(r, c) = m(i * p + r, j * p + c);
        return g;
    }

    // Full transpose: block layout and each block.
    BlockGrid transposed() const {
        BlockGrid g(bcols_, brows_, p_);
        for (std::size_t i = 0; i < brows_; ++i)
            for (std::size_t j = 0; j < bcols_; ++j) g.block(j, i) = block(i, j).transposed();
        return g;
    }

    BlockGrid operator+(const BlockGrid& o) const {
        require_same_shape(o);
        BlockGrid g(brows_, bcols_, p_);
        for (std::size_t i = 0; i < blocks_.size(); ++i) g.blocks_[i] = blocks_[i] + o.blocks_[i];
        return g;
    }

    BlockGrid operator-(const BlockGrid& o) const {
        require_same_shape(o);
        BlockGrid g(brows_, bcols_, p_);
        for (std::size_t i = 0; i < blocks_.size(); ++i) g.blocks_[i] = blocks_[i] - o.blocks_[i];
        return g;
    }

    BlockGrid operator*(const BlockGrid& o) const {
        if (bcols_ != o.brows_ || p_ != o.p_)
            throw std::invalid_argument("block grid product shape mismatch");
        BlockGrid g(brows_, o.bcols_, p_);
        for (std::size_t i = 0; i < brows_; ++i)
            for (std::size_t k = 0; k < bcols_; ++k)
                for (std::size_t j = 0; j < o.bcols_; ++j)
                    g.block(i, j) += block(i, k) * o.block(k, j);
        return g;
    }

    bool operator==(const BlockGrid& o) const {
        return brows_ == o.brows_ && bcols_ == o.bcols_ && p_ == o.p_ && blocks_ == o.blocks_;
    }
    bool operator!=(const BlockGrid& o) const { return !(*this == o); }

private:
    void require_same_shape(const BlockGrid& o) const {
        if (brows_ != o.brows_ || bcols_ != o.bcols_ || p_ != o.p_)
            throw std::invalid_argument("block grid shape mismatch");
    }

    std::size_t brows_ = 0;
    std::size_t bcols_ = 0;
    std::size_t p_ = 0;
    std::vector<Block<F>> blocks_;
};

template <typename F>
bool grids_close(const BlockGrid<F>& a, const BlockGrid<F>& b, const F& tol = F(0)) {
    if (a.block_rows() != b.block_rows() || a.block_cols() != b.block_cols()) return false;
    for (std::size_t i = 0; i < a.block_rows(); ++i)
        for (std::size_t j = 0; j < a.block_cols(); ++j)
            if (!blocks_close(a.block(i, j), b.block(i, j), tol)) return false;
    return true;
}

}  // namespace mbop

#endif  // MBOP_MATRIX_HPP
