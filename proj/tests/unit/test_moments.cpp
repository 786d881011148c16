#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "test_util.hpp"
#include "wishmom/moments.hpp"

using namespace wishmom;
using testutil::rel_err;

namespace {

MinorSpec spec_of(std::vector<std::size_t> rows, std::vector<std::size_t> cols, std::size_t r) {
    return MinorSpec(IndexSet(std::move(rows), r), IndexSet(std::move(cols), r));
}

}  // namespace

TEST(MinorMean, SpecExamples) {
    // det(I3) * 5*4*3
    EXPECT_DOUBLE_EQ(minor_mean(WishartModel(5, CovarianceMatrix::identity(3)),
                                spec_of({0, 1, 2}, {0, 1, 2}, 3)),
                     60.0);

    // E[s_ij] = n * sigma_ij
    const CovarianceMatrix sigma(Matrix{{1.0, 0.5}, {0.5, 1.0}});
    EXPECT_DOUBLE_EQ(minor_mean(WishartModel(10, sigma), spec_of({0}, {1}, 2)), 5.0);

    // Off-diagonal block of the identity has determinant 0.
    EXPECT_DOUBLE_EQ(minor_mean(WishartModel(5, CovarianceMatrix::identity(4)),
                                spec_of({0, 1}, {2, 3}, 4)),
                     0.0);

    EXPECT_THROW(minor_mean(WishartModel(5, CovarianceMatrix::identity(3)),
                            spec_of({0}, {1}, 4)),
                 InvalidInputError);
}

TEST(MinorVariance, SpecExamples) {
    // m = c = 1: Var(s_ii) = 2 n sigma_ii^2.
    const CovarianceMatrix s2(Matrix::diagonal({2.0, 1.0}));
    EXPECT_DOUBLE_EQ(minor_variance(WishartModel(4, s2), spec_of({0}, {0}, 2)).variance, 32.0);

    // m = 1, c = 0: Var(s_ij) = n (sigma_ii sigma_jj + sigma_ij^2).
    const CovarianceMatrix mixed(Matrix{{2.0, 0.5}, {0.5, 1.0}});
    EXPECT_LE(rel_err(minor_variance(WishartModel(3, mixed), spec_of({0}, {1}, 2)).variance, 6.75),
              1e-14);

    // Identity tetrad: 2 n (n-1).
    const MomentReport tetrad = minor_variance(WishartModel(5, CovarianceMatrix::identity(4)),
                                               spec_of({0, 1}, {2, 3}, 4));
    EXPECT_LE(rel_err(tetrad.variance, 40.0), 1e-14);
    EXPECT_DOUBLE_EQ(tetrad.mean, 0.0);

    // Principal minor of [[2,1],[1,2]]: 9 * 12 * (30 - 12).
    const CovarianceMatrix corr(Matrix{{2.0, 1.0}, {1.0, 2.0}});
    const MomentReport principal = minor_variance(WishartModel(4, corr), spec_of({0, 1}, {0, 1}, 2));
    EXPECT_LE(rel_err(principal.variance, 1944.0), 1e-12);
    EXPECT_TRUE(principal.trace_terms.empty());  // c = m: empty sum
    EXPECT_DOUBLE_EQ(principal.term2, 0.0);
}

TEST(MinorSecondMoment, SpecExamples) {
    EXPECT_LE(rel_err(minor_second_moment(WishartModel(5, CovarianceMatrix::identity(4)),
                                          spec_of({0, 1}, {2, 3}, 4)),
                      40.0),
              1e-14);
    EXPECT_LE(rel_err(minor_second_moment(WishartModel(3, CovarianceMatrix::identity(2)),
                                          spec_of({0}, {1}, 2)),
                      3.0),
              1e-14);
    // m = c = 1, sigma_ii = 1, n = 2: mean^2 + variance = 4 + 4.
    EXPECT_LE(rel_err(minor_second_moment(WishartModel(2, CovarianceMatrix::identity(1)),
                                          spec_of({0}, {0}, 1)),
                      8.0),
              1e-14);
}

TEST(MomentReport, StructuralInvariants) {
    RandomStream rng(31, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t r = 2 + rng.next_u64() % 4;
        const WishartModel model(2 + static_cast<std::int64_t>(rng.next_u64() % 8),
                                 testutil::random_spd(r, rng));
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, r); ++m) {
            const auto rows = testutil::subsets(r, m);
            const auto& pick_i = rows[rng.next_u64() % rows.size()];
            const auto& pick_j = rows[rng.next_u64() % rows.size()];
            const MomentReport rep_ = minor_variance(model, spec_of(pick_i, pick_j, r));

            EXPECT_DOUBLE_EQ(rep_.variance, rep_.term1 + rep_.term2);
            EXPECT_DOUBLE_EQ(rep_.second_moment, rep_.variance + rep_.mean * rep_.mean);
            EXPECT_GE(rep_.variance, -1e-8 * std::max(1.0, rep_.mean * rep_.mean));

            double sum = 0.0;
            for (const auto& [k, v] : rep_.trace_terms) sum += v;
            EXPECT_DOUBLE_EQ(sum, rep_.term2);

            // One term per k = 0 .. m-c-1, in order; empty when c = m.
            const std::size_t spec_c = spec_of(pick_i, pick_j, r).overlap_size();
            EXPECT_EQ(rep_.trace_terms.size(), m - spec_c);
            for (std::size_t k = 0; k < rep_.trace_terms.size(); ++k) {
                EXPECT_EQ(rep_.trace_terms[k].first, k);
            }
        }
    }
}

TEST(MinorVariance, ClassicalEntryIdentities) {
    RandomStream rng(32, 0);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t r = 3;
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        for (std::int64_t n = 1; n <= 12; ++n) {
            const WishartModel model(n, sigma);
            for (std::size_t i = 0; i < r; ++i) {
                const double expected = 2.0 * n * sigma(i, i) * sigma(i, i);
                EXPECT_LE(rel_err(minor_variance(model, spec_of({i}, {i}, r)).variance, expected),
                          1e-12);
                for (std::size_t j = i + 1; j < r; ++j) {
                    const double off = n * (sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j));
                    EXPECT_LE(rel_err(minor_variance(model, spec_of({i}, {j}, r)).variance, off),
                              1e-12);
                }
            }
        }
    }
}

TEST(MinorVariance, SwapSymmetry) {
    RandomStream rng(33, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t r = 4 + rng.next_u64() % 3;  // 4..6
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        for (std::int64_t n = 1; n <= 10; n += 3) {
            const WishartModel model(n, sigma);
            for (std::size_t m = 1; m <= 3; ++m) {
                const auto ss = testutil::subsets(r, m);
                const auto& gi = ss[rng.next_u64() % ss.size()];
                const auto& gj = ss[rng.next_u64() % ss.size()];
                const double a = minor_variance(model, spec_of(gi, gj, r)).variance;
                const double b = minor_variance(model, spec_of(gj, gi, r)).variance;
                EXPECT_LE(rel_err(a, b), 1e-12);
            }
        }
    }
}

TEST(MinorVariance, ScalingLaw) {
    RandomStream rng(34, 0);
    for (double lambda : {0.5, 2.0, 3.75}) {
        const std::size_t r = 4;
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        const CovarianceMatrix scaled(sigma.matrix() * lambda);
        for (std::int64_t n : {2, 5, 9}) {
            for (std::size_t m = 1; m <= 3; ++m) {
                const auto ss = testutil::subsets(r, m);
                const auto& gi = ss[rng.next_u64() % ss.size()];
                const auto& gj = ss[rng.next_u64() % ss.size()];
                const MinorSpec spec = spec_of(gi, gj, r);
                const double lam_m = std::pow(lambda, static_cast<double>(m));
                EXPECT_LE(rel_err(minor_mean(WishartModel(n, scaled), spec),
                                  lam_m * minor_mean(WishartModel(n, sigma), spec)),
                          1e-10);
                EXPECT_LE(rel_err(minor_variance(WishartModel(n, scaled), spec).variance,
                                  lam_m * lam_m *
                                      minor_variance(WishartModel(n, sigma), spec).variance),
                          1e-10);
            }
        }
    }
}

TEST(MinorVariance, PermutationEquivariance) {
    RandomStream rng(35, 0);
    for (int rep = 0; rep < 15; ++rep) {
        const std::size_t r = 5;
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        std::vector<std::size_t> perm{0, 1, 2, 3, 4};
        for (std::size_t i = r; i-- > 1;) std::swap(perm[i], perm[rng.next_u64() % (i + 1)]);

        Matrix permuted(r, r);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) permuted(perm[i], perm[j]) = sigma(i, j);
        const CovarianceMatrix sigma_p(std::move(permuted));

        const WishartModel model(6, sigma);
        const WishartModel model_p(6, sigma_p);
        for (std::size_t m = 1; m <= 3; ++m) {
            const auto ss = testutil::subsets(r, m);
            const auto& gi = ss[rng.next_u64() % ss.size()];
            const auto& gj = ss[rng.next_u64() % ss.size()];
            std::vector<std::size_t> pi, pj;
            for (auto v : gi) pi.push_back(perm[v]);
            for (auto v : gj) pj.push_back(perm[v]);
            EXPECT_LE(rel_err(minor_variance(model_p, spec_of(pi, pj, r)).variance,
                              minor_variance(model, spec_of(gi, gj, r)).variance),
                      1e-10);
        }
    }
}

// Rank deficiency: with integer n < m every falling-factorial prefactor hits
// an exact zero, matching the almost-sure singularity of rank-n minors.
TEST(MinorVariance, ExactZeroBelowOrder) {
    RandomStream rng(36, 0);
    const std::size_t r = 5;
    const CovarianceMatrix sigma = testutil::random_spd(r, rng);
    for (std::size_t m = 2; m <= 4; ++m) {
        for (std::int64_t n = 1; n < static_cast<std::int64_t>(m); ++n) {
            const auto ss = testutil::subsets(r, m);
            const auto& gi = ss.front();
            const auto& gj = ss.back();
            const WishartModel model(n, sigma);
            EXPECT_EQ(minor_mean(model, spec_of(gi, gj, r)), 0.0);
            EXPECT_EQ(minor_variance(model, spec_of(gi, gj, r)).variance, 0.0);
        }
    }
}

TEST(VarianceViaDecomposition, DegenerateOverlapsCollapse) {
    RandomStream rng(37, 0);
    const CovarianceMatrix sigma = testutil::random_spd(4, rng);
    const WishartModel model(6, sigma);

    // c = 0 and c = m reduce to the direct evaluation (empty-minor conventions).
    const MinorSpec disjoint = spec_of({0, 1}, {2, 3}, 4);
    EXPECT_DOUBLE_EQ(variance_via_decomposition(model, disjoint),
                     minor_variance(model, disjoint).variance);
    const MinorSpec principal = spec_of({1, 2}, {1, 2}, 4);
    EXPECT_DOUBLE_EQ(variance_via_decomposition(model, principal),
                     minor_variance(model, principal).variance);
}

TEST(VarianceViaDecomposition, AgreesOnMixedOverlaps) {
    RandomStream rng(38, 0);
    // The spec's example corner: 4x4, n = 6, I = {0,1}, J = {1,2} (c = 1).
    const CovarianceMatrix sigma = testutil::random_spd(4, rng);
    const WishartModel model(6, sigma);
    const MinorSpec spec = spec_of({0, 1}, {1, 2}, 4);
    EXPECT_LE(rel_err(variance_via_decomposition(model, spec),
                      minor_variance(model, spec).variance),
              1e-10);

    // A battery of random models and overlaps.
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t r = 3 + rng.next_u64() % 4;  // 3..6
        const CovarianceMatrix s = testutil::random_spd(r, rng);
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, r); ++m) {
            const auto ss = testutil::subsets(r, m);
            const auto& gi = ss[rng.next_u64() % ss.size()];
            const auto& gj = ss[rng.next_u64() % ss.size()];
            const MinorSpec sp = spec_of(gi, gj, r);
            for (std::int64_t n = static_cast<std::int64_t>(sp.overlap_size()) + 1; n <= 9; n += 2) {
                const WishartModel mdl(n, s);
                EXPECT_LE(rel_err(variance_via_decomposition(mdl, sp),
                                  minor_variance(mdl, sp).variance),
                          1e-10)
                    << "r=" << r << " m=" << m << " n=" << n;
            }
        }
    }
}

TEST(VarianceViaDecomposition, RequiresEnoughDegreesOfFreedom) {
    const CovarianceMatrix sigma = CovarianceMatrix::identity(4);
    const MinorSpec spec = spec_of({0, 1}, {1, 2}, 4);  // c = 1
    EXPECT_THROW(variance_via_decomposition(WishartModel(1, sigma), spec), InvalidInputError);
    EXPECT_NO_THROW(variance_via_decomposition(WishartModel(2, sigma), spec));
}

TEST(MinorVariance, NonnegativeAcrossRandomBattery) {
    RandomStream rng(39, 0);
    for (int rep = 0; rep < 25; ++rep) {
        const std::size_t r = 2 + rng.next_u64() % 5;  // 2..6
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, r); ++m) {
            const auto ss = testutil::subsets(r, m);
            const auto& gi = ss[rng.next_u64() % ss.size()];
            const auto& gj = ss[rng.next_u64() % ss.size()];
            for (std::int64_t n = static_cast<std::int64_t>(m); n <= 12; ++n) {
                const MomentReport report = minor_variance(WishartModel(n, sigma),
                                                           spec_of(gi, gj, r));
                EXPECT_GE(report.variance, -1e-8 * std::max(1.0, report.mean * report.mean));
            }
        }
    }
}
