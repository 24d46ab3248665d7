#pragma once

#include <compare>
#include <initializer_list>
#include <vector>

namespace covsteer {

// Canonical multiset of parameter indices identifying a product p_{j1}...p_{jl}.
// Indices are kept sorted; the empty index stands for the constant 1.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> indices);
    explicit MultiIndex(std::vector<int> indices);

    int order() const { return static_cast<int>(indices_.size()); }
    bool empty() const { return indices_.empty(); }

    // Multiset union with one extra factor p_j.
    MultiIndex plus(int j) const;
    // Multiset union with another index.
    MultiIndex merged(const MultiIndex& other) const;

    int multiplicity(int j) const;
    const std::vector<int>& indices() const { return indices_; }

    bool operator==(const MultiIndex& other) const = default;
    // Ordered by (order, lexicographic) so iteration over maps is
    // deterministic and grouped by order.
    std::strong_ordering operator<=>(const MultiIndex& other) const;

private:
    std::vector<int> indices_;
};

// All multi-indices over parameters {0..n_p-1} of the exact order given,
// in canonical (sorted) order.
std::vector<MultiIndex> multi_indices_of_order(int n_p, int order);

// All multi-indices of order 0..max_order, ascending.
std::vector<MultiIndex> multi_indices_up_to(int n_p, int max_order);

}  // namespace covsteer
