#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "wishmom/errors.hpp"
#include "wishmom/linalg.hpp"
#include "wishmom/moments.hpp"

namespace wishmom {

// Budget for the exact pairing enumeration. The defaults keep the oracle in
// interactive territory; callers that accept longer runtimes can raise them.
struct WickOptions {
    unsigned max_order = 3;               // largest admissible m
    std::int64_t max_dof_times_order = 18;  // largest admissible n * m
};

namespace detail {

inline void check_wick_budget(const WishartModel& model, const MinorSpec& spec,
                              const WickOptions& options, const char* who) {
    const auto m = static_cast<unsigned>(spec.order());
    if (m > options.max_order) {
        throw TractabilityError(std::string(who) + ": minor order m = " + std::to_string(m) +
                                " exceeds the enumeration bound max_order = " +
                                std::to_string(options.max_order));
    }
    const std::int64_t nm = model.dof() * static_cast<std::int64_t>(m);
    if (nm > options.max_dof_times_order) {
        throw TractabilityError(std::string(who) + ": n * m = " + std::to_string(nm) +
                                " exceeds the enumeration bound max_dof_times_order = " +
                                std::to_string(options.max_dof_times_order));
    }
}

inline int permutation_sign(const std::vector<std::size_t>& p) {
    std::vector<bool> seen(p.size(), false);
    int sign = 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (seen[i]) continue;
        std::size_t len = 0;
        for (std::size_t j = i; !seen[j]; j = p[j]) {
            seen[j] = true;
            ++len;
        }
        if (len % 2 == 0) sign = -sign;
    }
    return sign;
}

// All set partitions of {0, ..., n-1}, each as a list of blocks. Deeper
// recursion levels append to `blocks`, so the loop indexes instead of
// iterating to stay clear of reallocation.
inline std::vector<std::vector<std::vector<std::size_t>>> set_partitions(std::size_t n) {
    std::vector<std::vector<std::vector<std::size_t>>> out;
    std::vector<std::vector<std::size_t>> blocks;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            out.push_back(blocks);
            return;
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            blocks[b].push_back(i);
            self(self, i + 1);
            blocks[b].pop_back();
        }
        blocks.push_back({i});
        self(self, i + 1);
        blocks.pop_back();
    };
    rec(rec, 0);
    return out;
}

using MomentMemo = std::map<std::vector<std::uint16_t>, double>;

// E[prod_w X[w]] for one centered Gaussian vector X with covariance sigma,
// by pairing enumeration. `coords` must be sorted; pairs with exactly zero
// covariance are pruned, which is what makes diagonal scale matrices cheap.
inline double gaussian_moment(const std::vector<std::uint16_t>& coords, const Matrix& sigma,
                              MomentMemo& memo) {
    if (coords.size() % 2 != 0) return 0.0;
    if (coords.empty()) return 1.0;
    auto it = memo.find(coords);
    if (it != memo.end()) return it->second;

    const std::uint16_t u = coords.front();
    double total = 0.0;
    std::vector<std::uint16_t> rest;
    rest.reserve(coords.size() - 2);
    for (std::size_t p = 1; p < coords.size(); ++p) {
        const double cov = sigma(u, coords[p]);
        if (cov == 0.0) continue;
        rest.clear();
        rest.insert(rest.end(), coords.begin() + 1, coords.begin() + static_cast<std::ptrdiff_t>(p));
        rest.insert(rest.end(), coords.begin() + static_cast<std::ptrdiff_t>(p) + 1, coords.end());
        total += cov * gaussian_moment(rest, sigma, memo);
    }
    memo.emplace(coords, total);
    return total;
}

// Sums ff(n, |P|) * prod_B E[prod_{q in B} X[u_q] X[v_q]] over all set
// partitions P of the slots. Grouping slots by equal sample index and
// counting the index assignments with a falling factorial replaces the sum
// over all n^|slots| assignments, so the cost is independent of n.
inline double assignment_sum(const std::vector<std::pair<std::uint16_t, std::uint16_t>>& slots,
                             double dof, const Matrix& sigma,
                             const std::vector<std::vector<std::vector<std::size_t>>>& partitions,
                             MomentMemo& memo) {
    double total = 0.0;
    std::vector<std::uint16_t> coords;
    for (const auto& partition : partitions) {
        double value = falling_factorial(dof, static_cast<unsigned>(partition.size()));
        if (value == 0.0) continue;
        for (const auto& block : partition) {
            coords.clear();
            for (std::size_t q : block) {
                coords.push_back(slots[q].first);
                coords.push_back(slots[q].second);
            }
            std::sort(coords.begin(), coords.end());
            value *= gaussian_moment(coords, sigma, memo);
            if (value == 0.0) break;
        }
        total += value;
    }
    return total;
}

template <typename Body>
inline void for_each_permutation(std::size_t m, Body&& body) {
    std::vector<std::size_t> perm(m);
    for (std::size_t i = 0; i < m; ++i) perm[i] = i;
    do {
        body(perm, permutation_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace detail

// E[det(S_{I x J})^2], exact up to double rounding. Expands the squared
// determinant over permutation pairs, writes S as a sum of Gaussian outer
// products, and evaluates every resulting Gaussian product moment by pairing
// enumeration. No randomness is involved.
inline double wick_second_moment(const WishartModel& model, const MinorSpec& spec,
                                 const WickOptions& options = {}) {
    detail::require_compatible(model, spec);
    detail::check_wick_budget(model, spec, options, "wick_second_moment");

    const std::size_t m = spec.order();
    const auto& rows = spec.rows();
    const auto& cols = spec.cols();
    const Matrix& sigma = model.scale().matrix();
    const auto dof = static_cast<double>(model.dof());

    const auto partitions = detail::set_partitions(2 * m);
    detail::MomentMemo memo;
    std::vector<std::pair<std::uint16_t, std::uint16_t>> slots(2 * m);

    double total = 0.0;
    detail::for_each_permutation(m, [&](const std::vector<std::size_t>& sigma_perm, int sign_sigma) {
        for (std::size_t a = 0; a < m; ++a) {
            slots[a] = {static_cast<std::uint16_t>(rows[a]),
                        static_cast<std::uint16_t>(cols[sigma_perm[a]])};
        }
        detail::for_each_permutation(m, [&](const std::vector<std::size_t>& tau_perm, int sign_tau) {
            for (std::size_t b = 0; b < m; ++b) {
                slots[m + b] = {static_cast<std::uint16_t>(rows[b]),
                                static_cast<std::uint16_t>(cols[tau_perm[b]])};
            }
            total += sign_sigma * sign_tau *
                     detail::assignment_sum(slots, dof, sigma, partitions, memo);
        });
    });
    return total;
}

// E[det(S_{I x J})] by the same enumeration, at order one in the determinant.
// Cheap companion oracle used to validate the closed-form mean exactly.
inline double wick_mean(const WishartModel& model, const MinorSpec& spec,
                        const WickOptions& options = {}) {
    detail::require_compatible(model, spec);
    detail::check_wick_budget(model, spec, options, "wick_mean");

    const std::size_t m = spec.order();
    const auto& rows = spec.rows();
    const auto& cols = spec.cols();
    const Matrix& sigma = model.scale().matrix();
    const auto dof = static_cast<double>(model.dof());

    const auto partitions = detail::set_partitions(m);
    detail::MomentMemo memo;
    std::vector<std::pair<std::uint16_t, std::uint16_t>> slots(m);

    double total = 0.0;
    detail::for_each_permutation(m, [&](const std::vector<std::size_t>& perm, int sign) {
        for (std::size_t a = 0; a < m; ++a) {
            slots[a] = {static_cast<std::uint16_t>(rows[a]), static_cast<std::uint16_t>(cols[perm[a]])};
        }
        total += sign * detail::assignment_sum(slots, dof, sigma, partitions, memo);
    });
    return total;
}

}  // namespace wishmom
