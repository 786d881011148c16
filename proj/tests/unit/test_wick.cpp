#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wishmom/wick.hpp"

using namespace wishmom;
using testutil::rel_err;

namespace {

MinorSpec spec_of(std::vector<std::size_t> rows, std::vector<std::size_t> cols, std::size_t r) {
    return MinorSpec(IndexSet(std::move(rows), r), IndexSet(std::move(cols), r));
}

}  // namespace

TEST(WickSecondMoment, SpecExamples) {
    // E[s_01^2] = n sigma_00 sigma_11 = 3.
    EXPECT_LE(rel_err(wick_second_moment(WishartModel(3, CovarianceMatrix::identity(2)),
                                         spec_of({0}, {1}, 2)),
                      3.0),
              1e-14);
    // Identity tetrad: 2n^2 - 2n = 40.
    EXPECT_LE(rel_err(wick_second_moment(WishartModel(5, CovarianceMatrix::identity(4)),
                                         spec_of({0, 1}, {2, 3}, 4)),
                      40.0),
              1e-14);
    // Chi-square second moment: n^2 + 2n = 8 at n = 2.
    EXPECT_LE(rel_err(wick_second_moment(WishartModel(2, CovarianceMatrix::identity(1)),
                                         spec_of({0}, {0}, 1)),
                      8.0),
              1e-14);
}

// m = 1, i = j is a chi-square: E[s_ii^2] = sigma_ii^2 n (n + 2) exactly.
TEST(WickSecondMoment, ChiSquareSelfCheck) {
    for (double s : {0.5, 1.0, 2.0}) {
        const CovarianceMatrix sigma(Matrix{{s}});
        for (std::int64_t n = 1; n <= 6; ++n) {
            const double got = wick_second_moment(WishartModel(n, sigma), spec_of({0}, {0}, 1));
            EXPECT_DOUBLE_EQ(got, s * s * n * (n + 2.0));
        }
    }
}

TEST(WickMean, MatchesClosedFormExactly) {
    RandomStream rng(21, 0);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t r = 2 + rng.next_u64() % 4;  // 2..5
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        for (std::size_t m = 1; m <= std::min<std::size_t>(3, r); ++m) {
            const auto ss = testutil::subsets(r, m);
            const auto& gi = ss[rng.next_u64() % ss.size()];
            const auto& gj = ss[rng.next_u64() % ss.size()];
            for (std::int64_t n = 1; n <= std::min<std::int64_t>(6, 18 / static_cast<std::int64_t>(m));
                 ++n) {
                const WishartModel model(n, sigma);
                const MinorSpec spec = spec_of(gi, gj, r);
                EXPECT_LE(rel_err(wick_mean(model, spec), minor_mean(model, spec)), 1e-12);
            }
        }
    }
}

TEST(WickSecondMoment, AgreesWithClosedFormOnSmallBattery) {
    RandomStream rng(22, 0);
    int cases = 0;
    for (std::size_t r = 2; r <= 4; ++r) {
        const CovarianceMatrix sigma = testutil::random_spd(r, rng);
        for (std::size_t m = 1; m <= 2 && m <= r; ++m) {
            const auto ss = testutil::subsets(r, m);
            for (const auto& gi : ss) {
                for (const auto& gj : ss) {
                    for (std::int64_t n : {static_cast<std::int64_t>(m), std::int64_t{5}}) {
                        const WishartModel model(n, sigma);
                        const MinorSpec spec = spec_of(gi, gj, r);
                        EXPECT_LE(rel_err(minor_second_moment(model, spec),
                                          wick_second_moment(model, spec)),
                                  1e-8);
                        ++cases;
                    }
                }
            }
        }
    }
    EXPECT_GT(cases, 50);
}

// r - c > 2(m - c): the trace argument must be built from the conditional
// covariance restricted to Ibar ∪ Jbar; the unrestricted inverse disagrees
// with the oracle here.
TEST(WickSecondMoment, UnionProperSubsetRegression) {
    RandomStream rng(23, 0);
    const CovarianceMatrix s5 = testutil::random_spd(5, rng);
    for (std::int64_t n : {2, 5, 8}) {
        const WishartModel model(n, s5);
        const MinorSpec spec = spec_of({0, 1}, {2, 3}, 5);
        EXPECT_LE(rel_err(minor_second_moment(model, spec), wick_second_moment(model, spec)),
                  1e-10);
    }
    const CovarianceMatrix s6 = testutil::random_spd(6, rng);
    for (std::int64_t n : {3, 6}) {
        const WishartModel model(n, s6);
        const MinorSpec spec = spec_of({0, 1, 2}, {2, 3, 4}, 6);
        EXPECT_LE(rel_err(minor_second_moment(model, spec), wick_second_moment(model, spec)),
                  1e-10);
    }
}

TEST(WickSecondMoment, TractabilityGuardNamesTheBound) {
    const WishartModel model(5, CovarianceMatrix::identity(8));
    try {
        wick_second_moment(model, spec_of({0, 1, 2, 3}, {4, 5, 6, 7}, 8));
        FAIL() << "expected TractabilityError";
    } catch (const TractabilityError& e) {
        EXPECT_NE(std::string(e.what()).find("max_order"), std::string::npos);
    }

    const WishartModel big_n(7, CovarianceMatrix::identity(6));
    try {
        wick_second_moment(big_n, spec_of({0, 1, 2}, {3, 4, 5}, 6));  // n*m = 21
        FAIL() << "expected TractabilityError";
    } catch (const TractabilityError& e) {
        EXPECT_NE(std::string(e.what()).find("max_dof_times_order"), std::string::npos);
    }

    // The bound is configurable; a raised budget admits the same case.
    WickOptions relaxed;
    relaxed.max_dof_times_order = 24;
    EXPECT_NO_THROW(wick_second_moment(big_n, spec_of({0, 1, 2}, {3, 4, 5}, 6), relaxed));
}
