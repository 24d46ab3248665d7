#include "covsteer/multi_index.hpp"

#include <algorithm>
#include <stdexcept>

namespace covsteer {

MultiIndex::MultiIndex(std::initializer_list<int> indices)
    : MultiIndex(std::vector<int>(indices)) {}

MultiIndex::MultiIndex(std::vector<int> indices) : indices_(std::move(indices)) {
    for (int j : indices_) {
        if (j < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
    }
    std::sort(indices_.begin(), indices_.end());
}

MultiIndex MultiIndex::plus(int j) const {
    std::vector<int> out = indices_;
    out.insert(std::upper_bound(out.begin(), out.end(), j), j);
    MultiIndex mi;
    mi.indices_ = std::move(out);
    return mi;
}

MultiIndex MultiIndex::merged(const MultiIndex& other) const {
    std::vector<int> out;
    out.reserve(indices_.size() + other.indices_.size());
    std::merge(indices_.begin(), indices_.end(), other.indices_.begin(),
               other.indices_.end(), std::back_inserter(out));
    MultiIndex mi;
    mi.indices_ = std::move(out);
    return mi;
}

int MultiIndex::multiplicity(int j) const {
    auto [lo, hi] = std::equal_range(indices_.begin(), indices_.end(), j);
    return static_cast<int>(hi - lo);
}

std::strong_ordering MultiIndex::operator<=>(const MultiIndex& other) const {
    if (auto c = indices_.size() <=> other.indices_.size(); c != 0) return c;
    return indices_ <=> other.indices_;
}

namespace {

void enumerate_rec(int n_p, int order, int start, std::vector<int>& current,
                   std::vector<MultiIndex>& out) {
    if (order == 0) {
        out.emplace_back(current);
        return;
    }
    for (int j = start; j < n_p; ++j) {
        current.push_back(j);
        enumerate_rec(n_p, order - 1, j, current, out);
        current.pop_back();
    }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_order(int n_p, int order) {
    std::vector<MultiIndex> out;
    std::vector<int> current;
    if (order == 0) {
        out.emplace_back();
        return out;
    }
    enumerate_rec(n_p, order, 0, current, out);
    return out;
}

std::vector<MultiIndex> multi_indices_up_to(int n_p, int max_order) {
    std::vector<MultiIndex> out;
    for (int l = 0; l <= max_order; ++l) {
        auto of_order = multi_indices_of_order(n_p, l);
        out.insert(out.end(), of_order.begin(), of_order.end());
    }
    return out;
}

}  // namespace covsteer
