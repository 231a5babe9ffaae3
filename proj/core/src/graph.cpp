#include "ghype/graph.hpp"

#include <numeric>
#include <string>

#include "ghype/error.hpp"

namespace ghype {
namespace {

count_t checked_add(count_t a, count_t b) {
    count_t out;
    if (__builtin_add_overflow(a, b, &out)) throw InputError("integer overflow in edge count");
    return out;
}

count_t checked_mul(count_t a, count_t b) {
    count_t out;
    if (__builtin_mul_overflow(a, b, &out))
        throw InputError("integer overflow in stub-combination count");
    return out;
}

void require_non_negative(std::span<const count_t> values, const char* what) {
    for (count_t v : values)
        if (v < 0) throw InputError(std::string(what) + " must be non-negative");
}

} // namespace

std::vector<Dyad> dyad_cells(std::size_t n, bool directed) {
    std::vector<Dyad> cells;
    cells.reserve(directed ? n * n : n * (n + 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = directed ? 0 : i; j < n; ++j) cells.push_back({i, j});
    return cells;
}

MultiGraph::MultiGraph(std::size_t n, bool directed) : adjacency_(n), directed_(directed) {}

MultiGraph MultiGraph::from_adjacency(Matrix<count_t> adjacency, bool directed) {
    require_non_negative(adjacency.data(), "adjacency entries");
    const std::size_t n = adjacency.size();
    count_t m = 0;
    if (directed) {
        for (count_t a : adjacency.data()) m = checked_add(m, a);
    } else {
        if (!adjacency.is_symmetric()) throw InputError("undirected adjacency must be symmetric");
        for (std::size_t i = 0; i < n; ++i) {
            if (adjacency(i, i) % 2 != 0)
                throw InputError("undirected adjacency diagonal must be even (doubled self-loops)");
            m = checked_add(m, adjacency(i, i) / 2);
            for (std::size_t j = i + 1; j < n; ++j) m = checked_add(m, adjacency(i, j));
        }
    }
    return MultiGraph(std::move(adjacency), directed, m);
}

MultiGraph MultiGraph::from_cell_counts(std::size_t n, bool directed,
                                        std::span<const count_t> counts) {
    const auto cells = dyad_cells(n, directed);
    if (counts.size() != cells.size()) throw InputError("cell count vector has the wrong length");
    Matrix<count_t> adj(n);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto [i, j] = cells[c];
        if (directed) {
            adj(i, j) = counts[c];
        } else if (i == j) {
            adj(i, i) = 2 * counts[c];
        } else {
            adj(i, j) = adj(j, i) = counts[c];
        }
    }
    return from_adjacency(std::move(adj), directed);
}

MultiGraph build_graph(std::span<const Edge> edges, std::size_t n, bool directed) {
    Matrix<count_t> adj(n);
    for (const Edge& e : edges) {
        if (e.source >= n || e.target >= n)
            throw InputError("vertex index out of range: (" + std::to_string(e.source) + ", " +
                             std::to_string(e.target) + ") with n = " + std::to_string(n));
        if (e.multiplicity <= 0) throw InputError("edge multiplicity must be a positive integer");
        if (directed) {
            adj(e.source, e.target) = checked_add(adj(e.source, e.target), e.multiplicity);
        } else if (e.source == e.target) {
            adj(e.source, e.source) =
                checked_add(adj(e.source, e.source), checked_mul(2, e.multiplicity));
        } else {
            adj(e.source, e.target) = checked_add(adj(e.source, e.target), e.multiplicity);
            adj(e.target, e.source) = adj(e.source, e.target);
        }
    }
    return MultiGraph::from_adjacency(std::move(adj), directed);
}

MultiGraph undirected_projection(const MultiGraph& g) {
    if (!g.directed()) throw InputError("undirected_projection expects a directed graph");
    const std::size_t n = g.vertex_count();
    Matrix<count_t> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) adj(i, j) = g.adjacency(i, j) + g.adjacency(j, i);
    return MultiGraph::from_adjacency(std::move(adj), false);
}

DegreeSequence DegreeSequence::directed(std::vector<count_t> k_out, std::vector<count_t> k_in) {
    if (k_out.size() != k_in.size()) throw InputError("in/out degree vectors differ in length");
    require_non_negative(k_out, "degrees");
    require_non_negative(k_in, "degrees");
    const count_t out_sum = std::accumulate(k_out.begin(), k_out.end(), count_t{0});
    const count_t in_sum = std::accumulate(k_in.begin(), k_in.end(), count_t{0});
    if (out_sum != in_sum) throw InputError("in- and out-degree sums differ");
    DegreeSequence d;
    d.directed_ = true;
    d.k_out_ = std::move(k_out);
    d.k_in_ = std::move(k_in);
    d.edge_count_ = out_sum;
    return d;
}

DegreeSequence DegreeSequence::undirected(std::vector<count_t> k) {
    require_non_negative(k, "degrees");
    const count_t sum = std::accumulate(k.begin(), k.end(), count_t{0});
    if (sum % 2 != 0) throw InputError("undirected degree sum must be even");
    DegreeSequence d;
    d.directed_ = false;
    d.k_out_ = std::move(k);
    d.edge_count_ = sum / 2;
    return d;
}

DegreeSequence degree_sequences(const MultiGraph& g) {
    const std::size_t n = g.vertex_count();
    std::vector<count_t> k_out(n, 0), k_in(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            k_out[i] += g.adjacency(i, j);
            k_in[j] += g.adjacency(i, j);
        }
    if (g.directed()) return DegreeSequence::directed(std::move(k_out), std::move(k_in));
    return DegreeSequence::undirected(std::move(k_out));
}

CombinatorialMatrix::CombinatorialMatrix(Matrix<count_t> xi, bool directed)
    : xi_(std::move(xi)), directed_(directed), cells_(dyad_cells(xi_.size(), directed)) {
    require_non_negative(xi_.data(), "combinatorial matrix entries");
    if (!directed_ && !xi_.is_symmetric())
        throw InputError("undirected combinatorial matrix must be symmetric");
    for (count_t v : xi_.data()) total_ = checked_add(total_, v);
    // Ball counts of undirected off-diagonal colours are doubled.
    if (!directed_)
        for (const auto [i, j] : cells_) (void)checked_mul(2, xi_(i, j));
}

CombinatorialMatrix CombinatorialMatrix::from_stub_counts(std::span<const count_t> k_out,
                                                          std::span<const count_t> k_in) {
    if (k_out.size() != k_in.size()) throw InputError("stub vectors differ in length");
    const std::size_t n = k_out.size();
    Matrix<count_t> xi(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) xi(i, j) = checked_mul(k_out[i], k_in[j]);
    return CombinatorialMatrix(std::move(xi), true);
}

CombinatorialMatrix CombinatorialMatrix::from_stub_counts(std::span<const count_t> k) {
    const std::size_t n = k.size();
    Matrix<count_t> xi(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) xi(i, j) = checked_mul(k[i], k[j]);
    return CombinatorialMatrix(std::move(xi), false);
}

CombinatorialMatrix CombinatorialMatrix::from_degrees(const DegreeSequence& d) {
    if (d.directed()) return from_stub_counts(d.out_degrees(), d.in_degrees());
    return from_stub_counts(d.degrees());
}

CombinatorialMatrix combinatorial_matrix(const DegreeSequence& d) {
    return CombinatorialMatrix::from_degrees(d);
}

} // namespace ghype
