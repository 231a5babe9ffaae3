#include "ghype/sampling_tree.hpp"

#include <algorithm>
#include <bit>

#include "ghype/error.hpp"

namespace ghype {

SamplingTree::SamplingTree(std::span<const double> weights)
    : size_(weights.size()), leaves_(std::bit_ceil(std::max<std::size_t>(weights.size(), 1))),
      nodes_(2 * leaves_, 0.0) {
    for (std::size_t k = 0; k < size_; ++k) {
        if (!(weights[k] >= 0.0)) throw InputError("sampling weights must be non-negative");
        nodes_[leaves_ + k] = weights[k];
    }
    for (std::size_t node = leaves_ - 1; node >= 1; --node)
        nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

void SamplingTree::set(std::size_t index, double weight) {
    if (index >= size_) throw InputError("sampling tree index out of range");
    if (!(weight >= 0.0)) throw InputError("sampling weights must be non-negative");
    std::size_t node = leaves_ + index;
    nodes_[node] = weight;
    for (node /= 2; node >= 1; node /= 2) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

std::size_t SamplingTree::find(double target) const {
    std::size_t node = 1;
    while (node < leaves_) {
        const double left = nodes_[2 * node];
        if (target < left) {
            node = 2 * node;
        } else {
            target -= left;
            node = 2 * node + 1;
        }
    }
    std::size_t index = node - leaves_;
    if (index < size_ && nodes_[node] > 0.0) return index;
    // Rounding carried the descent onto an empty leaf; take the nearest non-empty one.
    for (std::size_t k = std::min(index, size_); k-- > 0;)
        if (nodes_[leaves_ + k] > 0.0) return k;
    for (std::size_t k = index + 1; k < size_; ++k)
        if (nodes_[leaves_ + k] > 0.0) return k;
    throw InputError("sampling from an empty tree");
}

} // namespace ghype
