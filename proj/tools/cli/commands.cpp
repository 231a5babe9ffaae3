#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <utility>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ghype/error.hpp"
#include "ghype/soft_config.hpp"
#include "ghype/wallenius.hpp"
#include "io.hpp"
#include "verify.hpp"

namespace ghype::cli {
namespace {

using nlohmann::json;

struct Options {
    std::string input;
    bool undirected = false;
    std::string null_model = "softconfig";
    std::string xi_path;
    std::string omega = "uniform";
    std::optional<count_t> m;
    std::uint64_t count = 1;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::string output;
    bool exact = false;
    VerifyOptions verify;
};

QuadratureConfig quadrature(const Options& opt) {
    QuadratureConfig cfg;
    cfg.rel_tol = opt.tol;
    cfg.validate();
    return cfg;
}

struct LabelledGraph {
    std::vector<std::string> labels;
    MultiGraph graph;
};

LabelledGraph load_graph(const Options& opt) {
    const EdgeList list = read_edge_list(opt.input);
    return {list.labels, build_graph(list.edges, list.labels.size(), !opt.undirected)};
}

/// Xi from file; m from --m or the file's "m" field.
struct LoadedModel {
    std::vector<std::string> labels;
    CombinatorialMatrix xi;
    count_t m;
    std::optional<PropensityMatrix> omega;  // empty for "uniform"
};

LoadedModel load_model(const Options& opt) {
    if (opt.xi_path.empty()) throw InputError("--xi is required");
    const MatrixFile xi_file = read_matrix_file(opt.xi_path);
    CombinatorialMatrix xi(xi_file.integer_matrix("Xi"), xi_file.directed);
    count_t m = 0;
    if (opt.m) m = *opt.m;
    else if (xi_file.edges) m = *xi_file.edges;
    else throw InputError("--m is required when the Xi file has no 'm' field");
    if (m < 0) throw InputError("--m must be non-negative");

    std::optional<PropensityMatrix> omega;
    if (opt.omega != "uniform") {
        const MatrixFile omega_file = read_matrix_file(opt.omega);
        if (omega_file.n != xi_file.n || omega_file.directed != xi_file.directed)
            throw InputError(opt.omega + ": size or directedness differs from the Xi file");
        if (omega_file.labels != xi_file.labels)
            throw InputError(opt.omega + ": labels differ from the Xi file");
        omega.emplace(omega_file.matrix(), omega_file.directed);
    }
    return {xi_file.labels, std::move(xi), m, std::move(omega)};
}

MatrixFile to_matrix_file(const Matrix<double>& values, bool directed, const std::vector<std::string>& labels) {
    MatrixFile f;
    f.n = values.size();
    f.directed = directed;
    f.labels = labels;
    f.data.assign(values.data().begin(), values.data().end());
    return f;
}

MatrixFile to_matrix_file(const Matrix<count_t>& values, bool directed, const std::vector<std::string>& labels) {
    Matrix<double> converted(values.size());
    for (std::size_t k = 0; k < values.data().size(); ++k)
        converted.data()[k] = static_cast<double>(values.data()[k]);
    return to_matrix_file(converted, directed, labels);
}

/// Writes to --output if given, else to out.
template <typename Writer>
void emit(const Options& opt, std::ostream& out, Writer&& write) {
    if (opt.output.empty()) {
        write(out);
        return;
    }
    std::ofstream file(opt.output);
    if (!file) throw InputError("cannot write " + opt.output);
    write(file);
}

void write_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

int cmd_degrees(const Options& opt, std::ostream& out) {
    const auto [labels, g] = load_graph(opt);
    const auto d = degree_sequences(g);
    json j;
    j["n"] = g.vertex_count();
    j["m"] = g.edge_count();
    j["directed"] = g.directed();
    j["labels"] = labels;
    if (g.directed()) {
        j["k_out"] = std::vector<count_t>(d.out_degrees().begin(), d.out_degrees().end());
        j["k_in"] = std::vector<count_t>(d.in_degrees().begin(), d.in_degrees().end());
    } else {
        j["k"] = std::vector<count_t>(d.degrees().begin(), d.degrees().end());
    }
    emit(opt, out, [&](std::ostream& o) { write_json(o, j); });
    return kExitOk;
}

int cmd_fit(const Options& opt, std::ostream& out) {
    const auto [labels, g] = load_graph(opt);
    const auto xi = combinatorial_matrix(degree_sequences(g));
    std::optional<PropensityMatrix> omega;
    try {
        omega.emplace(fit_propensity(g, xi));
    } catch (const SaturatedDyadError& e) {
        throw InfeasibleModelError("saturated dyad (" + labels[e.source()] + ", " + labels[e.target()] +
                                   "): its multiplicity equals its number of stub combinations, so the "
                                   "fitted propensity would be infinite");
    }
    MatrixFile xi_file = to_matrix_file(xi.xi(), g.directed(), labels);
    xi_file.edges = g.edge_count();
    const MatrixFile omega_file = to_matrix_file(omega->values(), g.directed(), labels);

    if (opt.output.empty()) {
        json j;
        j["m"] = g.edge_count();
        j["omega"] = omega_file.to_json();
        j["xi"] = xi_file.to_json();
        write_json(out, j);
        return kExitOk;
    }
    for (const auto& [suffix, file] : {std::pair{".omega.json", &omega_file}, std::pair{".xi.json", &std::as_const(xi_file)}}) {
        const std::string path = opt.output + suffix;
        std::ofstream f(path);
        if (!f) throw InputError("cannot write " + path);
        write_json(f, file->to_json());
    }
    return kExitOk;
}

int cmd_expect(const Options& opt, std::ostream& out) {
    const auto cfg = quadrature(opt);
    const auto model = load_model(opt);
    Matrix<double> mean;
    if (!model.omega) {
        mean = expected_adjacency(SoftConfigModel(model.xi, model.m));
    } else {
        const GHypEModel ghype(model.xi, *model.omega, model.m);
        mean = opt.exact ? exact_mean_wallenius(ghype, cfg) : mean_wallenius(ghype);
    }
    emit(opt, out, [&](std::ostream& o) { write_json(o, to_matrix_file(mean, model.xi.directed(), model.labels).to_json()); });
    return kExitOk;
}

int cmd_sample(const Options& opt, std::ostream& out) {
    const auto model = load_model(opt);
    std::optional<SoftConfigModel> central;
    std::optional<GHypEModel> biased;
    if (model.omega) biased.emplace(model.xi, *model.omega, model.m);
    else central.emplace(model.xi, model.m);
    emit(opt, out, [&](std::ostream& o) {
        for (std::uint64_t k = 0; k < opt.count; ++k) {
            const std::uint64_t seed = derive_seed(opt.seed, k);
            const MultiGraph g = central ? sample(*central, seed) : sample_ghype(*biased, seed);
            o << "# sample " << k << '\n';
            write_edge_list(o, g, model.labels);
        }
    });
    return kExitOk;
}

std::string support_violation(const LoadedModel& model, const MultiGraph& g) {
    if (g.edge_count() != model.m)
        return "graph has " + std::to_string(g.edge_count()) + " edges but the model draws " + std::to_string(model.m);
    for (const auto [i, j] : model.xi.cells()) {
        const count_t a = g.multiplicity(i, j);
        if (a > model.xi.ball_count(i, j))
            return "dyad (" + model.labels[i] + ", " + model.labels[j] + ") exceeds its stub combinations";
        if (a > 0 && model.omega && (*model.omega)(i, j) == 0.0)
            return "dyad (" + model.labels[i] + ", " + model.labels[j] + ") has zero propensity";
    }
    return {};
}

int cmd_pmf(const Options& opt, std::ostream& out) {
    const auto cfg = quadrature(opt);
    const auto model = load_model(opt);
    if (opt.input.empty()) throw InputError("--input is required");
    const MultiGraph g = graph_on_labels(read_edge_list(opt.input), model.labels, model.xi.directed());
    double lp = 0.0;
    if (model.omega) lp = log_pmf_wallenius(GHypEModel(model.xi, *model.omega, model.m), g, cfg);
    else lp = log_pmf(SoftConfigModel(model.xi, model.m), g);
    json j;
    j["log_pmf"] = json_number(lp);
    j["log10_pmf"] = json_number(lp / std::log(10.0));
    j["in_support"] = lp != kNegInf;
    if (lp == kNegInf) j["note"] = support_violation(model, g);
    emit(opt, out, [&](std::ostream& o) { write_json(o, j); });
    return kExitOk;
}

int cmd_test(const Options& opt, std::ostream& out) {
    if (opt.null_model != "softconfig") throw InputError("unknown null model '" + opt.null_model + "'");
    const auto [labels, g] = load_graph(opt);
    const SoftConfigModel model = SoftConfigModel::induced_by(g);
    const auto& xi = model.xi();
    const std::size_t n = g.vertex_count();
    Matrix<double> p(n, 1.0);
    json impossible = json::array();
    for (const auto [i, j] : xi.cells()) {
        const count_t a = g.multiplicity(i, j);
        const double value = hypergeometric_p_value(xi.total(), xi.ball_count(i, j), model.draws(), a);
        p(i, j) = value;
        if (!g.directed()) p(j, i) = value;
        if (a > xi.ball_count(i, j)) impossible.push_back({labels[i], labels[j]});
    }
    json j;
    j["null"] = opt.null_model;
    j["m"] = g.edge_count();
    j["log_likelihood"] = json_number(log_pmf(model, g));
    j["p_values"] = to_matrix_file(p, g.directed(), labels).to_json();
    j["impossible"] = impossible;
    emit(opt, out, [&](std::ostream& o) { write_json(o, j); });
    return kExitOk;
}

int cmd_verify(const Options& opt, std::ostream& out) {
    VerifyOptions v = opt.verify;
    v.quadrature = quadrature(opt);
    const auto results = run_verify(v);
    bool ok = true;
    emit(opt, out, [&](std::ostream& o) {
        for (const auto& r : results) {
            o << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
            ok = ok && r.passed;
        }
        o << (ok ? "all checks passed" : "some checks failed") << '\n';
    });
    return ok ? kExitOk : kExitFailure;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double hypergeometric_p_value(count_t N, count_t K, count_t n, count_t x, double tie_tolerance) {
    const count_t lo = std::max<count_t>(0, n - (N - K));
    const count_t hi = std::min(K, n);
    if (x < lo || x > hi) return 0.0;
    auto lp = [&](count_t a) { return hypergeometric_log_pmf(N, K, n, a); };
    const double threshold = lp(x) + std::log1p(tie_tolerance);

    const long double mode_real = (static_cast<long double>(n) + 1) * (static_cast<long double>(K) + 1) /
                                  (static_cast<long double>(N) + 2);
    const count_t mode = std::clamp(static_cast<count_t>(std::floor(mode_real)), lo, hi);
    if (lp(mode) <= threshold) return 1.0;

    // The pmf is log-concave: values above the threshold form an interval
    // (left, right) around the mode, found by bisection on each side.
    count_t a = lo, b = mode;  // lp(a) <= threshold < lp(b) once a is confirmed
    if (lp(lo) > threshold) a = lo - 1;
    while (b - a > 1) {
        const count_t mid = a + (b - a) / 2;
        (lp(mid) <= threshold ? a : b) = mid;
    }
    const count_t left = a;
    a = mode;
    b = hi;
    if (lp(hi) > threshold) b = hi + 1;
    while (b - a > 1) {
        const count_t mid = a + (b - a) / 2;
        (lp(mid) <= threshold ? b : a) = mid;
    }
    const count_t right = b;

    // Each tail decays away from the mode with shrinking term ratio, so the
    // remainder after a term t with ratio r is at most t r / (1 - r).
    auto tail = [&](count_t start, count_t stop, count_t step) {
        CompensatedSum sum;
        double previous = 0.0;
        for (count_t k = start; step > 0 ? k <= stop : k >= stop; k += step) {
            const double term = std::exp(lp(k));
            sum.add(term);
            if (previous > 0.0) {
                const double r = term / previous;
                if (r < 1.0 && term * r / (1.0 - r) <= 1e-17 * sum.value()) break;
            }
            if (term == 0.0) break;
            previous = term;
        }
        return sum.value();
    };
    double p = 0.0;
    if (left >= lo) p += tail(left, lo, -1);
    if (right <= hi) p += tail(right, hi, +1);
    return std::min(1.0, p);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Soft configuration model and generalised hypergeometric ensembles of multigraphs", "ghype"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "ghype 0.1.0");

    auto add_graph_input = [&](CLI::App* cmd) {
        cmd->add_option("--input,input", opt.input, "Edge list: src<TAB>dst[<TAB>multiplicity]")->required();
        auto* directed = cmd->add_flag("--directed", "Treat edges as directed (default)");
        cmd->add_flag("--undirected", opt.undirected, "Treat edges as undirected")->excludes(directed);
    };
    auto add_model_input = [&](CLI::App* cmd) {
        cmd->add_option("--xi", opt.xi_path, "Combinatorial matrix file")->required();
        cmd->add_option("--omega", opt.omega, "Propensity matrix file, or 'uniform'");
        cmd->add_option("--m", opt.m, "Number of edges (default: the Xi file's 'm')");
    };
    auto add_output = [&](CLI::App* cmd) { cmd->add_option("--output", opt.output, "Write to this path"); };
    auto add_tol = [&](CLI::App* cmd) {
        cmd->add_option("--tol", opt.tol, "Quadrature relative tolerance")->capture_default_str();
    };

    auto* degrees = app.add_subcommand("degrees", "Degree sequences of an edge list");
    add_graph_input(degrees);
    add_output(degrees);

    auto* fit = app.add_subcommand("fit", "Fit propensities so that the ensemble mean is the graph");
    add_graph_input(fit);
    fit->add_option("--output", opt.output, "Write PREFIX.omega.json and PREFIX.xi.json");

    auto* expect = app.add_subcommand("expect", "Expected adjacency matrix of a model");
    add_model_input(expect);
    expect->add_flag("--exact", opt.exact, "Exact marginal means instead of the common-C approximation");
    add_tol(expect);
    add_output(expect);

    auto* sample_cmd = app.add_subcommand("sample", "Draw graphs from a model");
    add_model_input(sample_cmd);
    sample_cmd->add_option("--count", opt.count, "Number of graphs")->capture_default_str();
    sample_cmd->add_option("--seed", opt.seed, "Random seed")->capture_default_str();
    add_output(sample_cmd);

    auto* pmf = app.add_subcommand("pmf", "Log-probability of a graph under a model");
    add_model_input(pmf);
    pmf->add_option("--input,input", opt.input, "Edge list of the graph")->required();
    add_tol(pmf);
    add_output(pmf);

    auto* test = app.add_subcommand("test", "Per-dyad two-sided p-values under a null model");
    add_graph_input(test);
    test->add_option("--null", opt.null_model, "Null model")->check(CLI::IsMember({"softconfig"}))->capture_default_str();
    add_output(test);

    auto* verify = app.add_subcommand("verify", "Check the implementation against the oracles");
    verify->add_option("--max-n", opt.verify.max_n, "Largest vertex count")->capture_default_str()->check(CLI::Range(2, 4));
    verify->add_option("--max-m", opt.verify.max_m, "Largest edge count")->capture_default_str()->check(CLI::Range(1, 6));
    verify->add_option("--instances", opt.verify.instances, "Random instances")->capture_default_str()->check(CLI::Range(2, 1000));
    verify->add_option("--samples", opt.verify.samples, "Sampler draws per check")->capture_default_str()->check(CLI::Range(1000, 10000000));
    verify->add_option("--seed", opt.verify.seed, "Random seed")->capture_default_str();
    add_tol(verify);
    add_output(verify);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInputError;
    }
    try {
        if (degrees->parsed()) return cmd_degrees(opt, out);
        if (fit->parsed()) return cmd_fit(opt, out);
        if (expect->parsed()) return cmd_expect(opt, out);
        if (sample_cmd->parsed()) return cmd_sample(opt, out);
        if (pmf->parsed()) return cmd_pmf(opt, out);
        if (test->parsed()) return cmd_test(opt, out);
        if (verify->parsed()) return cmd_verify(opt, out);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInputError;
    } catch (const InfeasibleModelError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitInputError;
}

} // namespace ghype::cli
