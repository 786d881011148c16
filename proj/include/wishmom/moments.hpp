#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wishmom/covariance.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/index_set.hpp"
#include "wishmom/linalg.hpp"
#include "wishmom/matrix.hpp"

namespace wishmom {

// A minor is det(S_{I x J}) for row set I and column set J of equal size m.
// The derived sets drive the variance formula: C = I ∩ J (the overlap),
// Ibar = I \ C, Jbar = J \ C (disjoint by construction), and their union.
class MinorSpec {
public:
    MinorSpec(IndexSet rows, IndexSet cols)
        : rows_(std::move(rows)),
          cols_(std::move(cols)),
          overlap_(rows_.intersect(cols_)),
          bar_rows_(rows_.minus(overlap_)),
          bar_cols_(cols_.minus(overlap_)),
          bar_union_(bar_rows_.unite(bar_cols_)) {
        if (rows_.size() != cols_.size()) {
            throw InvalidInputError("MinorSpec: row and column sets must have equal size");
        }
        if (rows_.empty()) {
            throw InvalidInputError("MinorSpec: minor must have order at least 1");
        }
    }

    const IndexSet& rows() const noexcept { return rows_; }
    const IndexSet& cols() const noexcept { return cols_; }
    const IndexSet& overlap() const noexcept { return overlap_; }
    const IndexSet& bar_rows() const noexcept { return bar_rows_; }
    const IndexSet& bar_cols() const noexcept { return bar_cols_; }
    const IndexSet& bar_union() const noexcept { return bar_union_; }

    std::size_t order() const noexcept { return rows_.size(); }         // m
    std::size_t overlap_size() const noexcept { return overlap_.size(); }  // c
    std::size_t ambient_dim() const noexcept { return rows_.ambient_dim(); }

private:
    IndexSet rows_;
    IndexSet cols_;
    IndexSet overlap_;
    IndexSet bar_rows_;
    IndexSet bar_cols_;
    IndexSet bar_union_;
};

// S ~ W_r(n, Sigma) with integer degrees of freedom n >= 1.
class WishartModel {
public:
    WishartModel(std::int64_t dof, CovarianceMatrix scale) : dof_(dof), scale_(std::move(scale)) {
        if (dof_ < 1) {
            throw InvalidInputError("WishartModel: degrees of freedom must be a positive integer");
        }
    }

    std::int64_t dof() const noexcept { return dof_; }
    const CovarianceMatrix& scale() const noexcept { return scale_; }
    std::size_t dim() const noexcept { return scale_.dim(); }

private:
    std::int64_t dof_;
    CovarianceMatrix scale_;
};

// The variance formula splits into a determinant-squared part (term1) and a
// conditional part carrying an alternating sum of compound-matrix traces
// (term2). trace_terms holds term2's per-k contributions, prefactor included,
// so they sum to term2 exactly.
struct MomentReport {
    double mean = 0.0;
    double variance = 0.0;
    double second_moment = 0.0;
    double term1 = 0.0;
    double term2 = 0.0;
    std::vector<std::pair<unsigned, double>> trace_terms;
};

// The trace term's index notation admits three dimensionally legal readings:
// which block of the inverted conditional covariance enters the product.
// Throughout, the inverse is taken of T = Sbar restricted to the union
// U = Ibar ∪ Jbar: the minor only involves those coordinates, so its variance
// cannot depend on the rest (and the exact oracle confirms the restricted
// reading whenever U is a proper subset). inverse_block_ji is the parsing the
// oracle singles out (see calibrate_trace_convention) and is the default
// everywhere.
enum class TraceConvention {
    inverse_block_ij,  // T_{Ibar x Jbar} * (T^-1)_{Ibar x Jbar}
    inverse_block_ji,  // T_{Ibar x Jbar} * (T^-1)_{Jbar x Ibar}
    union_square,      // T * T^-1
};

inline constexpr TraceConvention kDefaultTraceConvention = TraceConvention::inverse_block_ji;

inline constexpr TraceConvention kAllTraceConventions[] = {
    TraceConvention::inverse_block_ij,
    TraceConvention::inverse_block_ji,
    TraceConvention::union_square,
};

inline const char* to_string(TraceConvention c) {
    switch (c) {
        case TraceConvention::inverse_block_ij: return "inverse-block-ij";
        case TraceConvention::inverse_block_ji: return "inverse-block-ji";
        case TraceConvention::union_square: return "union-square";
    }
    return "?";
}

namespace detail {

inline void require_compatible(const WishartModel& model, const MinorSpec& spec) {
    if (model.dim() != spec.ambient_dim()) {
        throw InvalidInputError("model dimension " + std::to_string(model.dim()) +
                                " does not match minor ambient dimension " +
                                std::to_string(spec.ambient_dim()));
    }
}

// t is the conditional covariance restricted to U = Ibar ∪ Jbar, t_inv its
// inverse; bi/bj are the positions of Ibar/Jbar within U.
inline Matrix trace_argument(const Matrix& t, const Matrix& t_inv, const IndexSet& bi,
                             const IndexSet& bj, TraceConvention conv) {
    switch (conv) {
        case TraceConvention::inverse_block_ij:
            return submatrix(t, bi, bj) * submatrix(t_inv, bi, bj);
        case TraceConvention::inverse_block_ji:
            return submatrix(t, bi, bj) * submatrix(t_inv, bj, bi);
        case TraceConvention::union_square:
            return t * t_inv;
    }
    throw InvalidInputError("trace_argument: unknown convention");
}

}  // namespace detail

// E[det(S_{I x J})] = det(Sigma_{I x J}) * n (n-1) ... (n-m+1).
// Exactly 0 when n < m (the falling factorial hits an integer zero).
inline double minor_mean(const WishartModel& model, const MinorSpec& spec) {
    detail::require_compatible(model, spec);
    const double d = determinant(submatrix(model.scale().matrix(), spec.rows(), spec.cols()));
    return d * falling_factorial(static_cast<double>(model.dof()), static_cast<unsigned>(spec.order()));
}

// Var[det(S_{I x J})] =
//     det(Sigma_IJ)^2 ff(n,m) [ff(n+2,m) - ff(n,m)]
//   + det(Sigma_CC)^2 det(T) ff(n+2,c) ff(n,m)
//       * sum_{k=0}^{m-c-1} (m-c-k)! ff(n+2-c,k) (-1)^k trace{ B^(k) }
// where T is the Schur complement of Sigma on C restricted to the union
// U = Ibar ∪ Jbar, and B is the convention-dependent block product built from
// T and T^-1. For c = m the sum is empty and term2 = 0.
inline MomentReport minor_variance(const WishartModel& model, const MinorSpec& spec,
                                   TraceConvention conv = kDefaultTraceConvention) {
    detail::require_compatible(model, spec);
    const auto n = static_cast<double>(model.dof());
    const auto m = static_cast<unsigned>(spec.order());
    const auto c = static_cast<unsigned>(spec.overlap_size());
    const Matrix& sigma = model.scale().matrix();

    MomentReport report;
    const double d_ij = determinant(submatrix(sigma, spec.rows(), spec.cols()));
    const double ff_nm = falling_factorial(n, m);
    report.mean = d_ij * ff_nm;
    report.term1 = d_ij * d_ij * ff_nm * (falling_factorial(n + 2.0, m) - ff_nm);

    if (c < m) {
        const SchurComplement sc = schur_complement(model.scale(), spec.overlap());
        const IndexSet bi = sc.reindex(spec.bar_rows());
        const IndexSet bj = sc.reindex(spec.bar_cols());
        const IndexSet bu = sc.reindex(spec.bar_union());

        const CovarianceMatrix restricted(submatrix(sc.matrix.matrix(), bu, bu));
        const double d_c = determinant(submatrix(sigma, spec.overlap(), spec.overlap()));
        const double d_u = determinant(restricted.matrix());
        const Matrix restricted_inv = inverse_spd(restricted);
        const Matrix b = detail::trace_argument(restricted.matrix(), restricted_inv,
                                                bi.positions_within(bu), bj.positions_within(bu),
                                                conv);

        const double prefactor = d_c * d_c * d_u * falling_factorial(n + 2.0, c) * ff_nm;
        report.trace_terms.reserve(m - c);
        for (unsigned k = 0; k < m - c; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double summand =
                factorial(m - c - k) * falling_factorial(n + 2.0 - c, k) * sign * compound_trace(b, k);
            const double contribution = prefactor * summand;
            report.trace_terms.emplace_back(k, contribution);
            report.term2 += contribution;
        }
    }

    report.variance = report.term1 + report.term2;
    report.second_moment = report.variance + report.mean * report.mean;
    return report;
}

// mean^2 + variance; the quantity the exact pairing oracle computes directly.
inline double minor_second_moment(const WishartModel& model, const MinorSpec& spec,
                                  TraceConvention conv = kDefaultTraceConvention) {
    return minor_variance(model, spec, conv).second_moment;
}

// Evaluates the same variance through the factorization
// det(S_IJ) = det(S_CC) det(Sbar_{Ibar x Jbar}), whose factors are independent
// with S_CC ~ W(n, Sigma_CC) and Sbar ~ W(n - c, SchurComplement(Sigma, C)):
//
//   Var = (Var[cc] + E[cc]^2) Var[bar] + Var[cc] E[bar]^2.
//
// Exists as an internal consistency check: it exercises the formula at the
// c = m and c = 0 corners and must agree with minor_variance to ~1e-10.
inline double variance_via_decomposition(const WishartModel& model, const MinorSpec& spec,
                                         TraceConvention conv = kDefaultTraceConvention) {
    detail::require_compatible(model, spec);
    const std::size_t c = spec.overlap_size();
    if (model.dof() <= static_cast<std::int64_t>(c)) {
        throw InvalidInputError("variance_via_decomposition: degrees of freedom must exceed |I ∩ J|");
    }
    if (c == 0 || c == spec.order()) {
        // One factor is the empty minor (mean 1, variance 0); the identity
        // collapses onto the plain evaluation.
        return minor_variance(model, spec, conv).variance;
    }

    const MinorSpec cc_spec(spec.overlap(), spec.overlap());
    const double mean_cc = minor_mean(model, cc_spec);
    const double var_cc = minor_variance(model, cc_spec, conv).variance;

    const SchurComplement sc = schur_complement(model.scale(), spec.overlap());
    const WishartModel reduced(model.dof() - static_cast<std::int64_t>(c), sc.matrix);
    const MinorSpec bar_spec(sc.reindex(spec.bar_rows()), sc.reindex(spec.bar_cols()));
    const double mean_bar = minor_mean(reduced, bar_spec);
    const double var_bar = minor_variance(reduced, bar_spec, conv).variance;

    return (var_cc + mean_cc * mean_cc) * var_bar + var_cc * mean_bar * mean_bar;
}

}  // namespace wishmom
