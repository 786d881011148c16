#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wishmom/errors.hpp"
#include "wishmom/index_set.hpp"
#include "wishmom/matrix.hpp"

namespace wishmom {

// x (x-1) ... (x-k+1), computed as the explicit product. Never goes through
// factorials, so integer x < k yields an exact 0 and large x does not overflow.
inline double falling_factorial(double x, unsigned k) {
    double p = 1.0;
    for (unsigned i = 0; i < k; ++i) p *= x - static_cast<double>(i);
    return p;
}

inline double factorial(unsigned k) { return falling_factorial(static_cast<double>(k), k); }

// The |rows| x |cols| block M[i, j], i in rows, j in cols, both ascending.
inline Matrix submatrix(const Matrix& m, const IndexSet& rows, const IndexSet& cols) {
    if (rows.ambient_dim() != m.rows() || cols.ambient_dim() != m.cols()) {
        throw InvalidInputError("submatrix: index sets do not match matrix dimensions");
    }
    Matrix out(rows.size(), cols.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < cols.size(); ++b) {
            out(a, b) = m(rows[a], cols[b]);
        }
    }
    return out;
}

// Determinant by elimination with partial pivoting. det of the 0x0 matrix is 1;
// singular input returns 0 (exact when a pivot column is exactly zero).
inline double determinant(const Matrix& m) {
    if (!m.is_square()) throw InvalidInputError("determinant: matrix must be square");
    const std::size_t n = m.rows();
    if (n == 0) return 1.0;
    Matrix a = m;
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                pivot = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != k) {
            a.swap_rows(pivot, k);
            det = -det;
        }
        const double d = a(k, k);
        det *= d;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / d;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            a(i, k) = 0.0;
        }
    }
    return det;
}

// Lower Cholesky factor of a symmetric positive definite matrix.
// Throws NotPositiveDefiniteError naming the first nonpositive pivot.
inline Matrix cholesky_lower(const Matrix& m) {
    if (!m.is_square()) throw InvalidInputError("cholesky_lower: matrix must be square");
    const std::size_t n = m.rows();
    Matrix l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = m(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(sum > 0.0)) {
                    throw NotPositiveDefiniteError(
                        "matrix is not positive definite: pivot " + std::to_string(i) + " is " +
                            std::to_string(sum),
                        i);
                }
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

namespace detail {

// Sum of all k x k principal minors, enumerated directly.
inline double compound_trace_minor_sum(const Matrix& b, unsigned k) {
    const std::size_t n = b.rows();
    std::vector<std::size_t> sel(k);
    for (unsigned i = 0; i < k; ++i) sel[i] = i;
    double total = 0.0;
    for (;;) {
        Matrix blk(k, k);
        for (unsigned a = 0; a < k; ++a)
            for (unsigned c = 0; c < k; ++c) blk(a, c) = b(sel[a], sel[c]);
        total += determinant(blk);
        // next k-combination of [0, n)
        std::size_t i = k;
        while (i > 0 && sel[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++sel[i - 1];
        for (std::size_t j = i; j < k; ++j) sel[j] = sel[j - 1] + 1;
    }
    return total;
}

// k-th elementary symmetric polynomial of the eigenvalues via the
// Faddeev-LeVerrier characteristic-polynomial recursion.
inline double compound_trace_charpoly(const Matrix& b, unsigned k) {
    const std::size_t n = b.rows();
    Matrix m(n, n);  // M_0 = 0
    double a_prev = 1.0;
    double e_k = 1.0;
    for (unsigned j = 1; j <= k; ++j) {
        for (std::size_t i = 0; i < n; ++i) m(i, i) += a_prev;
        m = b * m;
        const double a_j = -m.trace() / static_cast<double>(j);
        e_k = (j % 2 == 0) ? a_j : -a_j;
        a_prev = a_j;
    }
    return e_k;
}

}  // namespace detail

// Trace of the k-th compound matrix of b: the sum of all k x k principal
// minors, equal to the k-th elementary symmetric polynomial of b's
// eigenvalues. k = 0 gives exactly 1. Minor enumeration up to dim 8, the
// characteristic-polynomial recursion beyond.
inline double compound_trace(const Matrix& b, unsigned k) {
    if (!b.is_square()) throw InvalidInputError("compound_trace: matrix must be square");
    if (k > b.rows()) {
        throw InvalidInputError("compound_trace: k = " + std::to_string(k) +
                                " exceeds matrix dimension " + std::to_string(b.rows()));
    }
    if (k == 0) return 1.0;
    if (b.rows() <= 8) return detail::compound_trace_minor_sum(b, k);
    return detail::compound_trace_charpoly(b, k);
}

}  // namespace wishmom
