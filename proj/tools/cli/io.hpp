#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ghype/graph.hpp"
#include "ghype/matrix.hpp"

namespace ghype::cli {

/// Vertex labels in first-appearance order plus the edges between them.
struct EdgeList {
    std::vector<std::string> labels;
    std::vector<Edge> edges;
};

/// Reads `src<TAB>dst[<TAB>multiplicity]` lines. Blank lines and lines
/// starting with '#' are skipped. Every data line must have the same number of
/// columns. Errors are InputError prefixed with "source:line:".
EdgeList parse_edge_list(std::istream& in, const std::string& source);
EdgeList read_edge_list(const std::string& path);

/// Assigns indices to labels: existing ones keep theirs, new ones are appended
/// unless the set is fixed, in which case an unknown label is an InputError.
class LabelIndex {
public:
    LabelIndex() = default;
    explicit LabelIndex(std::vector<std::string> labels);

    std::size_t index(const std::string& label, bool may_add);
    const std::vector<std::string>& labels() const noexcept { return labels_; }

private:
    std::vector<std::string> labels_;
    std::vector<std::pair<std::string, std::size_t>> sorted_;
};

/// Maps an edge list onto a fixed label set (e.g. the labels of a Xi file).
MultiGraph graph_on_labels(const EdgeList& list, const std::vector<std::string>& labels, bool directed);

/// Writes one line per non-zero dyad; undirected graphs list each pair once
/// and self-loops with their multiplicity (A_ii / 2).
void write_edge_list(std::ostream& out, const MultiGraph& g, const std::vector<std::string>& labels);

/// JSON {"n", "directed", "labels", "data"}; data is row-major with n^2 entries.
struct MatrixFile {
    std::size_t n = 0;
    bool directed = true;
    std::vector<std::string> labels;
    std::vector<double> data;
    /// Optional number of edges, written by `fit` next to Xi.
    std::optional<count_t> edges;

    static MatrixFile from_json(const nlohmann::json& j, const std::string& source);
    nlohmann::json to_json() const;

    Matrix<double> matrix() const { return Matrix<double>(n, data); }
    /// Requires every entry to be a non-negative integer.
    Matrix<count_t> integer_matrix(const std::string& what) const;
};

MatrixFile read_matrix_file(const std::string& path);

/// Labels "0", "1", ... for files that carry none.
std::vector<std::string> index_labels(std::size_t n);

/// A finite double, or the string "-inf" / "inf" / "nan".
nlohmann::json json_number(double x);

} // namespace ghype::cli
