#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ghype/random.hpp"

namespace ghype {

/// Complete binary tree of partial weight sums over a fixed set of items.
/// Inner nodes are recomputed from their children on every update, so the
/// sums never drift however many updates are applied.
class SamplingTree {
public:
    explicit SamplingTree(std::span<const double> weights);

    std::size_t size() const noexcept { return size_; }
    double total() const noexcept { return nodes_[1]; }
    double weight(std::size_t index) const noexcept { return nodes_[leaves_ + index]; }

    void set(std::size_t index, double weight);

    /// Index whose cumulative weight interval contains target, 0 <= target < total().
    /// Never returns a zero-weight item.
    std::size_t find(double target) const;

    template <typename Engine>
    std::size_t sample(Engine& gen) const {
        return find(uniform01(gen) * total());
    }

private:
    std::size_t size_;
    std::size_t leaves_;
    std::vector<double> nodes_;  // heap order, root at 1
};

} // namespace ghype
