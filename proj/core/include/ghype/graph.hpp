#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ghype/matrix.hpp"

namespace ghype {

using count_t = std::int64_t;

struct Edge {
    std::size_t source;
    std::size_t target;
    count_t multiplicity = 1;
};

/// An ordered pair of vertices. For undirected models only i <= j is used.
struct Dyad {
    std::size_t i;
    std::size_t j;
    friend bool operator==(const Dyad&, const Dyad&) = default;
};

/// The urn colours of a model: every (i, j) when directed, the upper triangle
/// including the diagonal when undirected. Row-major order.
std::vector<Dyad> dyad_cells(std::size_t n, bool directed);

/// Directed or undirected multigraph with self-loops, stored as a dense
/// adjacency matrix. Undirected self-loops are stored doubled (A_ii = 2w).
class MultiGraph {
public:
    /// Empty graph on n vertices.
    MultiGraph(std::size_t n, bool directed);

    /// Validates non-negativity and, when undirected, symmetry and an even diagonal.
    static MultiGraph from_adjacency(Matrix<count_t> adjacency, bool directed);

    /// Inverse of reading multiplicity() over dyad_cells(): one draw count per cell.
    static MultiGraph from_cell_counts(std::size_t n, bool directed,
                                       std::span<const count_t> counts);

    std::size_t vertex_count() const noexcept { return adjacency_.size(); }
    bool directed() const noexcept { return directed_; }
    count_t edge_count() const noexcept { return edge_count_; }

    const Matrix<count_t>& adjacency() const noexcept { return adjacency_; }
    count_t adjacency(std::size_t i, std::size_t j) const noexcept { return adjacency_(i, j); }

    /// Number of multi-edges on the dyad; an undirected self-loop reports A_ii / 2.
    count_t multiplicity(std::size_t i, std::size_t j) const noexcept {
        return (!directed_ && i == j) ? adjacency_(i, i) / 2 : adjacency_(i, j);
    }

    friend bool operator==(const MultiGraph&, const MultiGraph&) = default;

private:
    MultiGraph(Matrix<count_t> adjacency, bool directed, count_t edge_count)
        : adjacency_(std::move(adjacency)), directed_(directed), edge_count_(edge_count) {}

    Matrix<count_t> adjacency_;
    bool directed_ = true;
    count_t edge_count_ = 0;
};

/// Accumulates an edge list. Undirected input lists each edge once; a
/// self-loop (v, v, w) stores A_vv = 2w.
MultiGraph build_graph(std::span<const Edge> edges, std::size_t n, bool directed);

/// The directed graph with adjacency A + A^T, interpreted as undirected.
MultiGraph undirected_projection(const MultiGraph& g);

class DegreeSequence {
public:
    /// Requires sum(k_out) == sum(k_in); that sum is the edge count.
    static DegreeSequence directed(std::vector<count_t> k_out, std::vector<count_t> k_in);
    /// Requires an even degree sum; the edge count is half of it.
    static DegreeSequence undirected(std::vector<count_t> k);

    bool directed() const noexcept { return directed_; }
    std::size_t size() const noexcept { return k_out_.size(); }
    count_t edge_count() const noexcept { return edge_count_; }

    std::span<const count_t> out_degrees() const noexcept { return k_out_; }
    std::span<const count_t> in_degrees() const noexcept { return directed_ ? k_in_ : k_out_; }
    /// Undirected degree vector (same as the out-degrees).
    std::span<const count_t> degrees() const noexcept { return k_out_; }

private:
    DegreeSequence() = default;

    bool directed_ = true;
    std::vector<count_t> k_out_;
    std::vector<count_t> k_in_;
    count_t edge_count_ = 0;
};

DegreeSequence degree_sequences(const MultiGraph& g);

/// Stub-combination counts Xi and their total M.
///
/// Undirected matrices keep Xi_ij = k_i k_j; the number of balls of an
/// off-diagonal colour is 2 Xi_ij and of a diagonal one Xi_ii, so that
/// M = sum_ij Xi_ij in both cases.
class CombinatorialMatrix {
public:
    /// Any non-negative integer matrix (symmetric when undirected).
    CombinatorialMatrix(Matrix<count_t> xi, bool directed);

    static CombinatorialMatrix from_degrees(const DegreeSequence& d);
    /// Directed outer product k_out k_in^T; the two sums need not agree.
    static CombinatorialMatrix from_stub_counts(std::span<const count_t> k_out,
                                                std::span<const count_t> k_in);
    /// Undirected outer product k k^T.
    static CombinatorialMatrix from_stub_counts(std::span<const count_t> k);

    std::size_t size() const noexcept { return xi_.size(); }
    bool directed() const noexcept { return directed_; }
    const Matrix<count_t>& xi() const noexcept { return xi_; }
    count_t xi(std::size_t i, std::size_t j) const noexcept { return xi_(i, j); }
    count_t total() const noexcept { return total_; }

    /// Balls of the colour (i, j): Xi_ij, or 2 Xi_ij for an undirected off-diagonal dyad.
    count_t ball_count(std::size_t i, std::size_t j) const noexcept {
        return (!directed_ && i != j) ? 2 * xi_(i, j) : xi_(i, j);
    }

    const std::vector<Dyad>& cells() const noexcept { return cells_; }

private:
    Matrix<count_t> xi_;
    bool directed_;
    count_t total_ = 0;
    std::vector<Dyad> cells_;
};

CombinatorialMatrix combinatorial_matrix(const DegreeSequence& d);

} // namespace ghype
