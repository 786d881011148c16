#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

#include "wishmom/covariance.hpp"
#include "wishmom/errors.hpp"
#include "wishmom/linalg.hpp"
#include "wishmom/matrix.hpp"
#include "wishmom/moments.hpp"
#include "wishmom/rng.hpp"

namespace wishmom {

// A Monte Carlo point estimate with its standard error and provenance.
struct OracleEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// One Bartlett draw: S = (L A)(L A)^T where Sigma = L L^T and A is lower
// trapezoidal r x min(r, n) with chi(n - i) diagonal entries and standard
// normal entries below. For n >= r this is the classical square Bartlett
// factor; for n < r the trapezoidal shape produces the rank-n law.
inline Matrix bartlett_draw(const WishartModel& model, RandomStream& rng) {
    const std::size_t r = model.dim();
    const auto n = static_cast<std::size_t>(model.dof());
    const std::size_t q = std::min(r, n);
    const Matrix& l = model.scale().cholesky();

    Matrix a(r, q);
    for (std::size_t i = 0; i < r; ++i) {
        const std::size_t row_cols = std::min(i + 1, q);
        for (std::size_t j = 0; j < row_cols; ++j) {
            if (j == i) {
                a(i, j) = std::sqrt(rng.next_chi_square(static_cast<double>(n - i)));
            } else {
                a(i, j) = rng.next_normal();
            }
        }
    }

    const Matrix la = l * a;
    Matrix s(r, r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i; j < r; ++j) {
            double v = 0.0;
            for (std::size_t k = 0; k < q; ++k) v += la(i, k) * la(j, k);
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

}  // namespace detail

// One Wishart draw, fully determined by (model, seed).
inline Matrix sample_wishart(const WishartModel& model, std::uint64_t seed) {
    RandomStream rng(seed, 0);
    return detail::bartlett_draw(model, rng);
}

struct McOptions {
    std::size_t chunk_size = 4096;
    unsigned workers = 0;  // 0: hardware concurrency
};

struct McMoments {
    OracleEstimate mean;
    OracleEstimate variance;
};

namespace detail {

struct ChunkStat {
    std::size_t count = 0;
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;  // power sums of the statistic
};

inline double sample_variance(std::size_t n, double s1, double s2) {
    if (n < 2) return 0.0;
    const double mean = s1 / static_cast<double>(n);
    const double ss = s2 - static_cast<double>(n) * mean * mean;
    return std::max(0.0, ss) / static_cast<double>(n - 1);
}

}  // namespace detail

// Draws `reps` Wishart samples, evaluates det(S_{I x J}) on each, and returns
// the sample mean and sample variance with standard errors. Work is split
// into fixed-size chunks; chunk g draws from substream (seed, 1 + g), so the
// result is bit-identical whatever the worker count. The variance's standard
// error comes from a delete-one-chunk jackknife (falling back to the
// fourth-moment formula when there are too few chunks).
inline McMoments mc_moment_estimate(const WishartModel& model, const MinorSpec& spec,
                                    std::size_t reps, std::uint64_t seed,
                                    const McOptions& options = {}) {
    detail::require_compatible(model, spec);
    if (reps < 2) throw InvalidInputError("mc_moment_estimate: reps must be at least 2");
    if (options.chunk_size == 0) throw InvalidInputError("mc_moment_estimate: chunk_size must be positive");

    const std::size_t chunk = options.chunk_size;
    const std::size_t n_chunks = (reps + chunk - 1) / chunk;
    std::vector<detail::ChunkStat> stats(n_chunks);

    auto run_chunk = [&](std::size_t g) {
        RandomStream rng(seed, 1 + static_cast<std::uint64_t>(g));
        detail::ChunkStat& st = stats[g];
        st.count = std::min(chunk, reps - g * chunk);
        for (std::size_t t = 0; t < st.count; ++t) {
            const Matrix s = detail::bartlett_draw(model, rng);
            const double d = determinant(submatrix(s, spec.rows(), spec.cols()));
            const double d2 = d * d;
            st.s1 += d;
            st.s2 += d2;
            st.s3 += d2 * d;
            st.s4 += d2 * d2;
        }
    };

    unsigned workers = options.workers != 0 ? options.workers : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
    if (workers == 1) {
        for (std::size_t g = 0; g < n_chunks; ++g) run_chunk(g);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t g = next.fetch_add(1); g < n_chunks; g = next.fetch_add(1)) {
                    run_chunk(g);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    // Reduce in chunk order so the result does not depend on scheduling.
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (const auto& st : stats) {
        s1 += st.s1;
        s2 += st.s2;
        s3 += st.s3;
        s4 += st.s4;
    }
    const auto n = static_cast<double>(reps);
    const double mean = s1 / n;
    const double var = detail::sample_variance(reps, s1, s2);

    double var_se;
    if (n_chunks >= 4) {
        // Delete-one-chunk jackknife.
        std::vector<double> loo(n_chunks);
        for (std::size_t g = 0; g < n_chunks; ++g) {
            loo[g] = detail::sample_variance(reps - stats[g].count, s1 - stats[g].s1, s2 - stats[g].s2);
        }
        double loo_mean = 0.0;
        for (double v : loo) loo_mean += v;
        loo_mean /= static_cast<double>(n_chunks);
        double ss = 0.0;
        for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
        const auto g = static_cast<double>(n_chunks);
        var_se = std::sqrt((g - 1.0) / g * ss);
    } else {
        // Asymptotic Var(sample variance) = (mu4 - sigma^4 (n-3)/(n-1)) / n
        // from the central fourth moment.
        const double mu4 =
            s4 / n - 4.0 * mean * s3 / n + 6.0 * mean * mean * s2 / n - 3.0 * mean * mean * mean * mean;
        const double v = (mu4 - var * var * (n - 3.0) / (n - 1.0)) / n;
        var_se = std::sqrt(std::max(0.0, v));
    }

    McMoments out;
    out.mean = OracleEstimate{mean, std::sqrt(var / n), reps, seed};
    out.variance = OracleEstimate{var, var_se, reps, seed};
    return out;
}

}  // namespace wishmom
