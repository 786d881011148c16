#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wishmom/errors.hpp"
#include "wishmom/index_set.hpp"
#include "wishmom/linalg.hpp"
#include "wishmom/matrix.hpp"

namespace wishmom {

// Symmetric positive definite scale matrix. Construction symmetrizes the
// input (after checking the asymmetry is within tolerance relative to the
// largest entry) and factorizes it, so an instance always carries a valid
// lower Cholesky factor.
class CovarianceMatrix {
public:
    explicit CovarianceMatrix(Matrix m, double symmetry_tol = 1e-10) : mat_(std::move(m)) {
        if (!mat_.is_square() || mat_.rows() == 0) {
            throw InvalidInputError("CovarianceMatrix: matrix must be square with positive dimension");
        }
        if (!mat_.all_finite()) {
            throw InvalidInputError("CovarianceMatrix: entries must be finite");
        }
        const double asym = mat_.max_abs_diff(mat_.transpose());
        if (asym > symmetry_tol * mat_.max_abs()) {
            throw InvalidInputError("CovarianceMatrix: matrix is asymmetric (max asymmetry " +
                                    std::to_string(asym) + ")");
        }
        mat_.symmetrize();
        chol_ = cholesky_lower(mat_);
    }

    static CovarianceMatrix identity(std::size_t r) { return CovarianceMatrix(Matrix::identity(r)); }

    std::size_t dim() const noexcept { return mat_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return mat_(i, j); }
    const Matrix& matrix() const noexcept { return mat_; }
    const Matrix& cholesky() const noexcept { return chol_; }

private:
    Matrix mat_;
    Matrix chol_;
};

namespace detail {

// Solves L L^T X = B given the lower factor L.
inline Matrix cholesky_solve(const Matrix& l, const Matrix& b) {
    const std::size_t n = l.rows();
    const std::size_t m = b.cols();
    Matrix x = b;
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) {  // forward: L y = b
            double s = x(i, c);
            for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
            x(i, c) = s / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {  // backward: L^T x = y
            double s = x(ii, c);
            for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x(k, c);
            x(ii, c) = s / l(ii, ii);
        }
    }
    return x;
}

}  // namespace detail

// Inverse of an SPD matrix through its Cholesky factor; output symmetrized.
inline Matrix inverse_spd(const CovarianceMatrix& m) {
    Matrix inv = detail::cholesky_solve(m.cholesky(), Matrix::identity(m.dim()));
    inv.symmetrize();
    return inv;
}

// Result of conditioning a covariance on a subset C of its coordinates:
// the Schur complement on D = [r] \ C together with the index remapping
// needed to address D-indexed sets inside the reduced matrix.
struct SchurComplement {
    CovarianceMatrix matrix;                 // the reduced (r-|C|)-dimensional covariance
    std::vector<std::size_t> kept;           // new position -> old index, ascending
    std::vector<std::ptrdiff_t> old_to_new;  // old index -> new position, -1 if conditioned out

    // Maps a set of old indices (all of which must avoid C) into the reduced
    // coordinates.
    IndexSet reindex(const IndexSet& s) const {
        std::vector<std::size_t> out;
        out.reserve(s.size());
        for (std::size_t i : s) {
            if (i >= old_to_new.size() || old_to_new[i] < 0) {
                throw InvalidInputError("SchurComplement::reindex: index " + std::to_string(i) +
                                        " was conditioned out");
            }
            out.push_back(static_cast<std::size_t>(old_to_new[i]));
        }
        return IndexSet(std::move(out), kept.size());
    }
};

// Sigma_{DxD} - Sigma_{DxC} Sigma_{CxC}^{-1} Sigma_{CxD} with D = [r] \ C.
// C may be empty (the matrix is returned unchanged); |C| = r is rejected.
inline SchurComplement schur_complement(const CovarianceMatrix& sigma, const IndexSet& conditioned) {
    const std::size_t r = sigma.dim();
    if (conditioned.ambient_dim() != r) {
        throw InvalidInputError("schur_complement: index set does not match matrix dimension");
    }
    if (conditioned.size() == r) {
        throw InvalidInputError("schur_complement: cannot condition on all coordinates");
    }

    const IndexSet kept_set = conditioned.complement();
    std::vector<std::size_t> kept(kept_set.begin(), kept_set.end());
    std::vector<std::ptrdiff_t> old_to_new(r, -1);
    for (std::size_t p = 0; p < kept.size(); ++p) old_to_new[kept[p]] = static_cast<std::ptrdiff_t>(p);

    if (conditioned.empty()) {
        return SchurComplement{sigma, std::move(kept), std::move(old_to_new)};
    }

    const Matrix& full = sigma.matrix();
    const Matrix s_cc = submatrix(full, conditioned, conditioned);
    const Matrix s_cd = submatrix(full, conditioned, kept_set);
    const Matrix s_dc = submatrix(full, kept_set, conditioned);
    Matrix reduced = submatrix(full, kept_set, kept_set) -
                     s_dc * detail::cholesky_solve(cholesky_lower(s_cc), s_cd);
    reduced.symmetrize();
    return SchurComplement{CovarianceMatrix(std::move(reduced)), std::move(kept), std::move(old_to_new)};
}

}  // namespace wishmom
