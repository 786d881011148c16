#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "wishmom/errors.hpp"

namespace wishmom {

// A strictly increasing set of 0-based indices inside a fixed ambient
// dimension. The empty set is legal.
class IndexSet {
public:
    IndexSet(std::vector<std::size_t> indices, std::size_t ambient_dim)
        : indices_(std::move(indices)), ambient_dim_(ambient_dim) {
        if (ambient_dim_ == 0) {
            throw InvalidInputError("IndexSet: ambient dimension must be positive");
        }
        std::sort(indices_.begin(), indices_.end());
        for (std::size_t k = 0; k < indices_.size(); ++k) {
            if (indices_[k] >= ambient_dim_) {
                throw InvalidInputError("IndexSet: index " + std::to_string(indices_[k]) +
                                        " out of range [0, " + std::to_string(ambient_dim_) + ")");
            }
            if (k > 0 && indices_[k] == indices_[k - 1]) {
                throw InvalidInputError("IndexSet: duplicate index " + std::to_string(indices_[k]));
            }
        }
    }

    static IndexSet all(std::size_t r) {
        std::vector<std::size_t> idx(r);
        for (std::size_t i = 0; i < r; ++i) idx[i] = i;
        return IndexSet(std::move(idx), r);
    }

    static IndexSet none(std::size_t r) { return IndexSet({}, r); }

    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    std::size_t ambient_dim() const noexcept { return ambient_dim_; }
    std::size_t operator[](std::size_t k) const { return indices_[k]; }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }

    bool contains(std::size_t i) const {
        return std::binary_search(indices_.begin(), indices_.end(), i);
    }

    IndexSet intersect(const IndexSet& rhs) const {
        require_same_ambient(rhs, "intersect");
        std::vector<std::size_t> out;
        std::set_intersection(begin(), end(), rhs.begin(), rhs.end(), std::back_inserter(out));
        return IndexSet(std::move(out), ambient_dim_);
    }

    IndexSet minus(const IndexSet& rhs) const {
        require_same_ambient(rhs, "minus");
        std::vector<std::size_t> out;
        std::set_difference(begin(), end(), rhs.begin(), rhs.end(), std::back_inserter(out));
        return IndexSet(std::move(out), ambient_dim_);
    }

    IndexSet unite(const IndexSet& rhs) const {
        require_same_ambient(rhs, "unite");
        std::vector<std::size_t> out;
        std::set_union(begin(), end(), rhs.begin(), rhs.end(), std::back_inserter(out));
        return IndexSet(std::move(out), ambient_dim_);
    }

    // Complement within the ambient range, in ascending order.
    IndexSet complement() const { return IndexSet::all(ambient_dim_).minus(*this); }

    // Positions of this set's members inside a superset, as an IndexSet over
    // ambient |superset|. Every member must belong to the superset.
    IndexSet positions_within(const IndexSet& superset) const {
        require_same_ambient(superset, "positions_within");
        std::vector<std::size_t> out;
        out.reserve(size());
        for (std::size_t i : indices_) {
            const auto it = std::lower_bound(superset.begin(), superset.end(), i);
            if (it == superset.end() || *it != i) {
                throw InvalidInputError("IndexSet::positions_within: index " + std::to_string(i) +
                                        " is not in the superset");
            }
            out.push_back(static_cast<std::size_t>(it - superset.begin()));
        }
        return IndexSet(std::move(out), superset.size());
    }

private:
    void require_same_ambient(const IndexSet& rhs, const char* op) const {
        if (ambient_dim_ != rhs.ambient_dim_) {
            throw InvalidInputError(std::string("IndexSet::") + op + ": ambient dimensions differ");
        }
    }

    std::vector<std::size_t> indices_;
    std::size_t ambient_dim_;
};

}  // namespace wishmom
