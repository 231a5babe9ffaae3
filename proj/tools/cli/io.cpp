#include "io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "ghype/error.hpp"

namespace ghype::cli {
namespace {

// Tab-separated fields with surrounding spaces trimmed, so labels may contain spaces.
std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        std::string field = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
        const auto first = field.find_first_not_of(' ');
        const auto last = field.find_last_not_of(' ');
        fields.push_back(first == std::string::npos ? std::string() : field.substr(first, last - first + 1));
        if (tab == std::string::npos) break;
        start = tab + 1;
    }
    return fields;
}

[[noreturn]] void fail_at(const std::string& source, std::size_t line, const std::string& what) {
    throw InputError(source + ":" + std::to_string(line) + ": " + what);
}

} // namespace

EdgeList parse_edge_list(std::istream& in, const std::string& source) {
    EdgeList out;
    LabelIndex index;
    std::string line;
    std::size_t lineno = 0, columns = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        const auto fields = split_fields(line);
        if (fields.size() < 2 || fields.size() > 3)
            fail_at(source, lineno, "expected 2 or 3 columns, found " + std::to_string(fields.size()));
        if (columns == 0) columns = fields.size();
        if (fields.size() != columns)
            fail_at(source, lineno, "expected " + std::to_string(columns) + " columns like the first edge, found " +
                                        std::to_string(fields.size()));

        count_t multiplicity = 1;
        if (fields.size() == 3) {
            const auto& text = fields[2];
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), multiplicity);
            if (ec != std::errc() || ptr != text.data() + text.size())
                fail_at(source, lineno, "multiplicity '" + text + "' is not an integer");
            if (multiplicity <= 0) fail_at(source, lineno, "multiplicity must be positive, got " + text);
        }
        if (fields[0].empty() || fields[1].empty()) fail_at(source, lineno, "empty vertex label");
        const std::size_t src = index.index(fields[0], true);
        const std::size_t dst = index.index(fields[1], true);
        out.edges.push_back({src, dst, multiplicity});
    }
    if (in.bad()) throw InputError(source + ": read error");
    out.labels = index.labels();
    return out;
}

EdgeList read_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return parse_edge_list(in, path);
}

LabelIndex::LabelIndex(std::vector<std::string> labels) {
    for (auto& label : labels) index(label, true);
}

std::size_t LabelIndex::index(const std::string& label, bool may_add) {
    const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), label,
                                     [](const auto& entry, const std::string& key) { return entry.first < key; });
    if (it != sorted_.end() && it->first == label) return it->second;
    if (!may_add) throw InputError("unknown vertex label '" + label + "'");
    const std::size_t id = labels_.size();
    labels_.push_back(label);
    sorted_.insert(it, {label, id});
    return id;
}

MultiGraph graph_on_labels(const EdgeList& list, const std::vector<std::string>& labels, bool directed) {
    LabelIndex index(labels);
    if (index.labels().size() != labels.size()) throw InputError("duplicate vertex labels");
    std::vector<Edge> edges;
    edges.reserve(list.edges.size());
    for (const auto& e : list.edges)
        edges.push_back({index.index(list.labels[e.source], false), index.index(list.labels[e.target], false),
                         e.multiplicity});
    return build_graph(edges, labels.size(), directed);
}

void write_edge_list(std::ostream& out, const MultiGraph& g, const std::vector<std::string>& labels) {
    for (const auto [i, j] : dyad_cells(g.vertex_count(), g.directed())) {
        const count_t w = g.multiplicity(i, j);
        if (w > 0) out << labels[i] << '\t' << labels[j] << '\t' << w << '\n';
    }
}

MatrixFile MatrixFile::from_json(const nlohmann::json& j, const std::string& source) {
    auto fail = [&](const std::string& what) -> void { throw InputError(source + ": " + what); };
    if (!j.is_object()) fail("expected a JSON object");
    for (const char* key : {"n", "directed", "data"})
        if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    MatrixFile out;
    if (!j["n"].is_number_unsigned()) fail("'n' must be a non-negative integer");
    out.n = j["n"].get<std::size_t>();
    if (!j["directed"].is_boolean()) fail("'directed' must be a boolean");
    out.directed = j["directed"].get<bool>();
    if (j.contains("labels")) {
        if (!j["labels"].is_array()) fail("'labels' must be an array of strings");
        for (const auto& label : j["labels"]) {
            if (!label.is_string()) fail("'labels' must be an array of strings");
            out.labels.push_back(label.get<std::string>());
        }
        if (out.labels.size() != out.n) fail("'labels' must have n entries");
    } else {
        out.labels = index_labels(out.n);
    }
    if (!j["data"].is_array()) fail("'data' must be an array of numbers");
    if (j["data"].size() != out.n * out.n) fail("'data' must have n^2 entries");
    for (const auto& x : j["data"]) {
        if (!x.is_number()) fail("'data' must be an array of numbers");
        out.data.push_back(x.get<double>());
    }
    if (j.contains("m")) {
        if (!j["m"].is_number_unsigned()) fail("'m' must be a non-negative integer");
        out.edges = j["m"].get<count_t>();
    }
    return out;
}

nlohmann::json MatrixFile::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["directed"] = directed;
    j["labels"] = labels;
    auto& arr = j["data"] = nlohmann::json::array();
    for (double x : data) arr.push_back(json_number(x));
    if (edges) j["m"] = *edges;
    return j;
}

Matrix<count_t> MatrixFile::integer_matrix(const std::string& what) const {
    Matrix<count_t> out(n);
    for (std::size_t k = 0; k < data.size(); ++k) {
        const double x = data[k];
        if (!(x >= 0.0) || x != std::floor(x) || x > 9.0e15)
            throw InputError(what + " entries must be non-negative integers");
        out.data()[k] = static_cast<count_t>(x);
    }
    return out;
}

MatrixFile read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return MatrixFile::from_json(j, path);
}

std::vector<std::string> index_labels(std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(std::to_string(i));
    return out;
}

nlohmann::json json_number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x < 0 ? "-inf" : "inf";
}

} // namespace ghype::cli
