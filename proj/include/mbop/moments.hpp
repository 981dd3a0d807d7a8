#ifndef MBOP_MOMENTS_HPP
#define MBOP_MOMENTS_HPP

// Moment sources for the generalized kernel u_{x,y}, matrix functionals given
// by truncated moment tables, Uvarov perturbation specifications, and the
// additively perturbed Gram entries.
//
// Convention: the pairing of a polynomial against a functional contracts the
// polynomial's coefficients on the LEFT of the table entries, <P, beta> =
// sum_r p_r M_r, which is the unique choice reproducing the discrete-support
// perturbed sesquilinear form. Transpose (not conjugate) throughout.

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mbop/field.hpp"
#include "mbop/matpoly.hpp"
#include "mbop/matrix.hpp"

namespace mbop {

class TableTooShort : public std::out_of_range {
public:
    explicit TableTooShort(const std::string& what) : std::out_of_range(what) {}
};

// Provider of Gram entries G_{k,l} = <I_p x^k, I_p y^l>. Implementations must
// be deterministic and safe for concurrent reads.
template <typename F>
class MomentSource {
public:
    virtual ~MomentSource() = default;
    virtual Block<F> moment(std::size_t k, std::size_t l) const = 0;
    virtual std::size_t block_size() const = 0;
};

template <typename F>
using MomentSourcePtr = std::shared_ptr<const MomentSource<F>>;

namespace detail {

template <typename F>
class HankelSource final : public MomentSource<F> {
public:
    explicit HankelSource(std::vector<Block<F>> ms) : ms_(std::move(ms)) {
        if (ms_.empty()) throw std::invalid_argument("hankel_source: empty moment list");
        p_ = ms_.front().rows();
        for (const auto& m : ms_)
            if (m.rows() != p_ || m.cols() != p_)
                throw std::invalid_argument("hankel_source: inconsistent block sizes");
    }

    Block<F> moment(std::size_t k, std::size_t l) const override {
        if (k + l >= ms_.size())
            throw TableTooShort("hankel_source: moment " + std::to_string(k + l) +
                                " beyond supplied table of length " + std::to_string(ms_.size()));
        return ms_[k + l];
    }

    std::size_t block_size() const override { return p_; }

private:
    std::vector<Block<F>> ms_;
    std::size_t p_;
};

template <typename F>
class DiscreteMeasureSource final : public MomentSource<F> {
public:
    DiscreteMeasureSource(std::vector<F> points, std::vector<Block<F>> weights)
        : points_(std::move(points)), weights_(std::move(weights)) {
        if (points_.size() != weights_.size())
            throw std::invalid_argument("discrete_measure_source: length mismatch");
        if (weights_.empty())
            throw std::invalid_argument("discrete_measure_source: empty measure");
        p_ = weights_.front().rows();
        for (const auto& w : weights_)
            if (w.rows() != p_ || w.cols() != p_)
                throw std::invalid_argument("discrete_measure_source: inconsistent block sizes");
    }

    Block<F> moment(std::size_t k, std::size_t l) const override {
        Block<F> acc(p_, p_);
        for (std::size_t i = 0; i < points_.size(); ++i)
            acc += weights_[i].scaled(field_pow(points_[i], k + l));
        return acc;
    }

    std::size_t block_size() const override { return p_; }

private:
    std::vector<F> points_;
    std::vector<Block<F>> weights_;
    std::size_t p_;
};

}  // namespace detail

// Hankel-type source: G_{k,l} = ms[k+l].
template <typename F>
MomentSourcePtr<F> hankel_source(std::vector<Block<F>> ms) {
    return std::make_shared<detail::HankelSource<F>>(std::move(ms));
}

// Moments of W dx on [a,b]: entry r = W (b^{r+1} - a^{r+1})/(r+1).
template <typename F>
std::vector<Block<F>> lebesgue_moments(const F& a, const F& b, const Block<F>& w,
                                       std::size_t count) {
    std::vector<Block<F>> ms;
    ms.reserve(count);
    for (std::size_t r = 0; r < count; ++r) {
        F num = field_pow(b, r + 1) - field_pow(a, r + 1);
        ms.push_back(w.scaled(num / F(static_cast<long>(r + 1))));
    }
    return ms;
}

// Discrete matrix measure sum_i W_i delta(t_i): G_{k,l} = sum_i t_i^{k+l} W_i.
template <typename F>
MomentSourcePtr<F> discrete_measure_source(std::vector<F> points, std::vector<Block<F>> weights) {
    return std::make_shared<detail::DiscreteMeasureSource<F>>(std::move(points),
                                                              std::move(weights));
}

// A matrix functional represented by its truncated moment table:
// M_r is the action on I_p x^r. A table of length n_max+1 is lossless for
// pairings against polynomials of degree <= n_max.
template <typename F>
class Functional {
public:
    Functional(std::size_t p, std::vector<Block<F>> table)
        : p_(p), table_(std::move(table)) {
        for (const auto& m : table_)
            if (m.rows() != p_ || m.cols() != p_)
                throw std::invalid_argument("Functional: inconsistent block sizes");
    }

    static Functional zero(std::size_t p, std::size_t degree_bound) {
        return Functional(p, std::vector<Block<F>>(degree_bound + 1, Block<F>(p, p)));
    }

    std::size_t block_size() const { return p_; }
    std::size_t table_length() const { return table_.size(); }

    const Block<F>& moment(std::size_t r) const {
        if (r >= table_.size())
            throw TableTooShort("functional moment table too short: need degree " +
                                std::to_string(r) + ", have length " +
                                std::to_string(table_.size()));
        return table_[r];
    }

private:
    std::size_t p_;
    std::vector<Block<F>> table_;
};

// One term B * (-1)^l / l! * delta^{(l)}(x - point); its moment action is
// M_r = C(r,l) point^{r-l} B for r >= l and zero otherwise.
template <typename F>
struct PointMassTerm {
    F point;
    std::size_t order;
    Block<F> weight;
};

template <typename F>
Functional<F> functional_from_point_masses(const std::vector<PointMassTerm<F>>& terms,
                                           std::size_t degree_bound, std::size_t p) {
    std::vector<Block<F>> table(degree_bound + 1, Block<F>(p, p));
    for (const auto& t : terms) {
        if (t.weight.rows() != p || t.weight.cols() != p)
            throw std::invalid_argument("functional_from_point_masses: block size mismatch");
        for (std::size_t r = t.order; r <= degree_bound; ++r) {
            F factor = field_binomial<F>(r, t.order) * field_pow(t.point, r - t.order);
            table[r] += factor * t.weight;
        }
    }
    return Functional<F>(p, std::move(table));
}

// <P, beta> = sum_r p_r M_r, P's coefficients contracted on the left.
template <typename F>
Block<F> functional_pair(const MatPoly<F>& poly, const Functional<F>& beta) {
    Block<F> acc(poly.block_size(), poly.block_size());
    for (std::size_t r = 0; r < poly.coeff_count(); ++r) {
        const Block<F> c = poly.coeff(r);
        if (c.is_zero()) continue;
        acc += c * beta.moment(r);
    }
    return acc;
}

enum class SpecKind { General, DiagonalHankel, DiscreteX };

// Uvarov perturbation v_{x,y}: y-support points x_j with multiplicities
// kappa^(j) and one functional beta^(j)_m per (j, m), stored point-major,
// derivative-minor. Structured variants keep their raw data alongside the
// expanded general form.
template <typename F>
struct UvarovSpec {
    Support<F> y_support;
    std::vector<Functional<F>> betas;  // flat, size N = y_support.total()
    SpecKind kind = SpecKind::General;

    // DiagonalHankel payload: raw beta^(j)_m blocks, one vector per point.
    std::vector<std::vector<Block<F>>> diagonal_betas;

    // DiscreteX payload: x-support and the Ntilde x N coupling grid.
    Support<F> x_support;
    BlockGrid<F> couplings;

    std::size_t degree_total() const { return y_support.total(); }

    std::size_t block_size() const {
        if (betas.empty()) throw std::logic_error("UvarovSpec: empty betas");
        return betas.front().block_size();
    }

    // Flat index of functional (j, m).
    std::size_t beta_index(std::size_t j, std::size_t m) const {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < j; ++i) idx += y_support.mults[i];
        return idx + m;
    }

    const Functional<F>& beta(std::size_t j, std::size_t m) const {
        return betas[beta_index(j, m)];
    }
};

template <typename F>
UvarovSpec<F> make_general_spec(Support<F> y_support, std::vector<Functional<F>> betas) {
    if (y_support.count() == 0)
        throw std::invalid_argument("make_general_spec: empty y-support");
    if (betas.size() != y_support.total())
        throw std::invalid_argument("make_general_spec: need one functional per (point, order)");
    UvarovSpec<F> spec;
    spec.y_support = std::move(y_support);
    spec.betas = std::move(betas);
    spec.kind = SpecKind::General;
    return spec;
}

// Expands diagonal (total-derivative) masses into the general form:
// (beta^(j)_k)_x = sum_{n=0}^{kappa-1-k} (-1)^n beta^(j)_{k+n} / n! *
// delta^{(n)}(x - x_j).
template <typename F>
UvarovSpec<F> diagonal_spec_expand(const std::vector<F>& points,
                                   const std::vector<std::size_t>& mults,
                                   const std::vector<std::vector<Block<F>>>& raw_betas,
                                   std::size_t degree_bound) {
    Support<F> support(points, mults);
    if (raw_betas.size() != support.count())
        throw std::invalid_argument("diagonal_spec_expand: one beta list per point required");
    std::vector<Functional<F>> betas;
    betas.reserve(support.total());
    std::size_t p = 0;
    for (std::size_t j = 0; j < support.count(); ++j) {
        if (raw_betas[j].size() != support.mults[j])
            throw std::invalid_argument("diagonal_spec_expand: beta grid does not match mults");
        if (p == 0 && !raw_betas[j].empty()) p = raw_betas[j].front().rows();
        for (std::size_t k = 0; k < support.mults[j]; ++k) {
            std::vector<PointMassTerm<F>> terms;
            for (std::size_t n = 0; k + n < support.mults[j]; ++n)
                terms.push_back({support.points[j], n, raw_betas[j][k + n]});
            betas.push_back(functional_from_point_masses(terms, degree_bound, p));
        }
    }
    return make_general_spec(std::move(support), std::move(betas));
}

// Same expansion, but tagged DiagonalHankel with the raw blocks retained so
// the specialized transform can be driven from the spec.
template <typename F>
UvarovSpec<F> make_diagonal_spec(const std::vector<F>& points,
                                 const std::vector<std::size_t>& mults,
                                 const std::vector<std::vector<Block<F>>>& raw_betas,
                                 std::size_t degree_bound) {
    UvarovSpec<F> spec = diagonal_spec_expand(points, mults, raw_betas, degree_bound);
    spec.kind = SpecKind::DiagonalHankel;
    spec.diagonal_betas = raw_betas;
    return spec;
}

// Discrete x-support: (beta^(j)_m)_x = sum_b sum_l beta^{(b,j)}_{l,m}
// (-1)^l / l! delta^{(l)}(x - xt_b). couplings is the Ntilde x N block grid
// with rows indexed by (b, l) and columns by (j, m).
template <typename F>
UvarovSpec<F> make_discrete_spec(Support<F> x_support, Support<F> y_support,
                                 const BlockGrid<F>& couplings, std::size_t degree_bound) {
    if (x_support.count() == 0)
        throw std::invalid_argument("make_discrete_spec: empty x-support");
    if (couplings.block_rows() != x_support.total() || couplings.block_cols() != y_support.total())
        throw std::invalid_argument("make_discrete_spec: coupling grid shape mismatch");
    const std::size_t p = couplings.block_size();
    std::vector<Functional<F>> betas;
    betas.reserve(y_support.total());
    for (std::size_t col = 0; col < y_support.total(); ++col) {
        std::vector<PointMassTerm<F>> terms;
        std::size_t row = 0;
        for (std::size_t b = 0; b < x_support.count(); ++b)
            for (std::size_t l = 0; l < x_support.mults[b]; ++l, ++row)
                terms.push_back({x_support.points[b], l, couplings.block(row, col)});
        betas.push_back(functional_from_point_masses(terms, degree_bound, p));
    }
    UvarovSpec<F> spec = make_general_spec(std::move(y_support), std::move(betas));
    spec.kind = SpecKind::DiscreteX;
    spec.x_support = std::move(x_support);
    spec.couplings = couplings;
    return spec;
}

// <P, Q>_v = sum_j sum_m (1/m!) <P, beta^(j)_m> ((Q^T))^{(m)}(x_j).
template <typename F>
Block<F> v_pairing(const MatPoly<F>& pl, const MatPoly<F>& q, const UvarovSpec<F>& spec) {
    const std::size_t p = pl.block_size();
    Block<F> acc(p, p);
    const MatPoly<F> qt = q.transposed();
    std::size_t idx = 0;
    for (std::size_t j = 0; j < spec.y_support.count(); ++j)
        for (std::size_t m = 0; m < spec.y_support.mults[j]; ++m, ++idx) {
            // jet_entry carries the 1/m! factor.
            acc += functional_pair(pl, spec.betas[idx]) * qt.jet_entry(spec.y_support.points[j], m);
        }
    return acc;
}

namespace detail {

// G-hat_{k,l} = G_{k,l} + V_{k,l}, V_{k,l} = sum_j sum_{m<=l} C(l,m)
// x_j^{l-m} M^{(j,m)}_k. Kept as an explicit formula, independent of
// v_pairing, so the two stay cross-checkable.
template <typename F>
class PerturbedSource final : public MomentSource<F> {
public:
    PerturbedSource(MomentSourcePtr<F> base, UvarovSpec<F> spec)
        : base_(std::move(base)), spec_(std::move(spec)) {
        if (base_->block_size() != spec_.block_size())
            throw std::invalid_argument("perturb_source: block size mismatch");
    }

    Block<F> moment(std::size_t k, std::size_t l) const override {
        Block<F> acc = base_->moment(k, l);
        std::size_t idx = 0;
        for (std::size_t j = 0; j < spec_.y_support.count(); ++j) {
            const F& xj = spec_.y_support.points[j];
            for (std::size_t m = 0; m < spec_.y_support.mults[j]; ++m, ++idx) {
                if (m > l) continue;
                F factor = field_binomial<F>(l, m) * field_pow(xj, l - m);
                acc += factor * spec_.betas[idx].moment(k);
            }
        }
        return acc;
    }

    std::size_t block_size() const override { return base_->block_size(); }

private:
    MomentSourcePtr<F> base_;
    UvarovSpec<F> spec_;
};

}  // namespace detail

template <typename F>
MomentSourcePtr<F> perturb_source(MomentSourcePtr<F> src, UvarovSpec<F> spec) {
    return std::make_shared<detail::PerturbedSource<F>>(std::move(src), std::move(spec));
}

}  // namespace mbop

#endif  // MBOP_MOMENTS_HPP
