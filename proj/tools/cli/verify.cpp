#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ghype/oracle.hpp"
#include "ghype/soft_config.hpp"

namespace ghype::cli {
namespace {

struct Instance {
    MultiGraph graph;
    CombinatorialMatrix xi;
    PropensityMatrix omega;
    count_t m;
};

PropensityMatrix random_omega(std::mt19937_64& gen, std::size_t n, bool directed) {
    std::uniform_real_distribution<double> draw(0.2, 4.0);
    Matrix<double> omega(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = directed ? 0 : i; j < n; ++j) {
            omega(i, j) = draw(gen);
            if (!directed) omega(j, i) = omega(i, j);
        }
    return PropensityMatrix(std::move(omega), directed);
}

std::vector<Instance> make_instances(const VerifyOptions& opt) {
    std::mt19937_64 gen(opt.seed);
    std::vector<Instance> out;
    const std::size_t max_n = std::max<std::size_t>(2, opt.max_n);
    const count_t max_m = std::max<count_t>(1, opt.max_m);
    std::uniform_int_distribution<std::size_t> pick_n(2, max_n);
    std::uniform_int_distribution<count_t> pick_m(1, max_m);
    for (int t = 0; t < opt.instances; ++t) {
        const bool directed = t % 2 == 0;
        const std::size_t n = pick_n(gen);
        count_t m = pick_m(gen);
        while (true) {
            MultiGraph g = oracle::random_graph(gen, n, m, directed);
            CombinatorialMatrix xi = combinatorial_matrix(degree_sequences(g));
            if (oracle::support_size(xi, m, opt.max_support) <= opt.max_support) {
                out.push_back({std::move(g), std::move(xi), random_omega(gen, n, directed), m});
                break;
            }
            if (m > 1) --m;
        }
    }
    return out;
}

class Check {
public:
    explicit Check(std::string name) : result_{std::move(name), true, {}} {}

    void record(double error, double tolerance) {
        ++cases_;
        worst_ = std::max(worst_, error);
        if (!(error <= tolerance)) result_.passed = false;
        tolerance_ = tolerance;
    }
    void fail(const std::string& why) {
        result_.passed = false;
        notes_.push_back(why);
    }
    void note(const std::string& text) { notes_.push_back(text); }

    CheckResult finish() {
        std::ostringstream detail;
        detail << cases_ << " cases, worst error " << worst_ << " (tolerance " << tolerance_ << ")";
        for (const auto& n : notes_) detail << "; " << n;
        result_.detail = detail.str();
        return result_;
    }

private:
    CheckResult result_;
    std::size_t cases_ = 0;
    double worst_ = 0.0;
    double tolerance_ = 0.0;
    std::vector<std::string> notes_;
};

double relative_error(double value, double reference) {
    if (value == reference) return 0.0;
    return std::abs(value - reference) / std::max(std::abs(value), std::abs(reference));
}

double to_double(const oracle::Rational& r) { return r.convert_to<double>(); }

} // namespace

std::vector<CheckResult> run_verify(const VerifyOptions& opt, const VerifyHooks& hooks) {
    const auto instances = make_instances(opt);
    const auto& cfg = opt.quadrature;

    Check central_norm("central-normalization"), wallenius_norm("wallenius-normalization"),
        urn_agreement("wallenius-vs-urn-recursion"), reduction("constant-omega-reduction"),
        central_marginal("central-marginals"), wallenius_marginal("wallenius-marginals"),
        projection("projection-equivalence"), degrees("expected-degrees"), round_trip("fit-round-trip"),
        samplers("sampler-chi-square");

    for (const auto& inst : instances) {
        const auto& xi = inst.xi;
        const SoftConfigModel central(xi, inst.m);
        const GHypEModel biased(xi, inst.omega, inst.m);
        const GHypEModel flat(xi, PropensityMatrix::uniform(xi.size(), xi.directed(), 1.7), inst.m);

        const auto exact = oracle::central_support_distribution(xi, inst.m, opt.max_support);
        const auto urn = oracle::urn_support_distribution(xi, inst.omega, inst.m, opt.max_support);

        if (exact.total != 1) central_norm.fail("rational total differs from 1");
        CompensatedSum central_total, biased_total;
        std::vector<double> biased_probability;
        for (std::size_t k = 0; k < exact.entries.size(); ++k) {
            const auto& g = exact.entries[k].graph;
            const double lp = log_pmf(central, g);
            central_total.add(std::exp(lp));
            const double lw = hooks.wallenius_log_pmf(biased, g, cfg);
            biased_probability.push_back(std::exp(lw));
            biased_total.add(std::exp(lw));
            urn_agreement.record(relative_error(std::exp(lw), static_cast<double>(urn.entries[k].probability)), 1e-6);
            // Relative error of the probabilities, |p / q - 1|.
            reduction.record(std::abs(std::expm1(hooks.wallenius_log_pmf(flat, g, cfg) - lp)), 1e-8);
        }
        central_norm.record(std::abs(central_total.value() - 1.0), 1e-9);
        wallenius_norm.record(std::abs(biased_total.value() - 1.0), 1e-6);

        for (const auto [i, j] : xi.cells()) {
            const count_t top = std::min(xi.ball_count(i, j), inst.m);
            const count_t unit = (!xi.directed() && i == j) ? 2 : 1;
            for (count_t x = 0; x <= top; ++x) {
                double central_sum = 0.0, biased_sum = 0.0;
                for (std::size_t k = 0; k < exact.entries.size(); ++k) {
                    if (exact.entries[k].graph.multiplicity(i, j) != x) continue;
                    central_sum += to_double(exact.entries[k].probability);
                    biased_sum += static_cast<double>(urn.entries[k].probability);
                }
                central_marginal.record(std::abs(marginal_pmf(central, i, j, unit * x) - central_sum), 1e-9);
                wallenius_marginal.record(
                    std::abs(marginal_pmf_wallenius(biased, i, j, unit * x, cfg) - biased_sum), 1e-6);
            }
        }

        // Row sums of E[X] against the inducing degrees, exactly and in floating point.
        const auto d = degree_sequences(inst.graph);
        const auto exact_mean = oracle::exact_expected_adjacency(xi, inst.m);
        const auto float_mean = expected_adjacency(central);
        for (std::size_t i = 0; i < xi.size(); ++i) {
            oracle::Rational row = 0, col = 0;
            double row_f = 0.0, col_f = 0.0;
            for (std::size_t j = 0; j < xi.size(); ++j) {
                row += exact_mean(i, j);
                col += exact_mean(j, i);
                row_f += float_mean(i, j);
                col_f += float_mean(j, i);
            }
            if (row != d.out_degrees()[i] || col != d.in_degrees()[i])
                degrees.fail("rational row/column sum differs from the degree");
            degrees.record(relative_error(row_f, static_cast<double>(d.out_degrees()[i])), 1e-12);
            degrees.record(relative_error(col_f, static_cast<double>(d.in_degrees()[i])), 1e-12);
        }

        if (!xi.directed()) {
            // Directed model on the same stub counts; preimage sums must be exact.
            const CombinatorialMatrix directed_xi(xi.xi(), true);
            for (const auto& entry : exact.entries) {
                oracle::Rational sum = 0;
                for (const auto& pre : oracle::directed_preimages(entry.graph))
                    sum += oracle::exact_central_probability(directed_xi, inst.m, pre);
                if (sum != entry.probability) projection.fail("preimage sum differs from the undirected PMF");
                projection.record(relative_error(to_double(sum), to_double(entry.probability)), 1e-10);
            }
        }

        bool saturated = false;
        for (const auto [i, j] : xi.cells())
            if (inst.graph.multiplicity(i, j) > 0 && inst.graph.multiplicity(i, j) == xi.ball_count(i, j))
                saturated = true;
        if (!saturated) {
            const GHypEModel fitted(xi, fit_propensity(inst.graph, xi), inst.m);
            const auto mean = mean_wallenius(fitted);
            for (std::size_t i = 0; i < xi.size(); ++i)
                for (std::size_t j = 0; j < xi.size(); ++j)
                    round_trip.record(std::abs(mean(i, j) - static_cast<double>(inst.graph.adjacency(i, j))), 1e-6);
        }
    }

    // Samplers on the first directed and the first undirected instance.
    for (std::size_t t = 0; t < std::min<std::size_t>(2, instances.size()); ++t) {
        const auto& inst = instances[t];
        const SoftConfigModel central(inst.xi, inst.m);
        const GHypEModel biased(inst.xi, inst.omega, inst.m);
        const auto exact = oracle::central_support_distribution(inst.xi, inst.m, opt.max_support);
        const auto urn = oracle::urn_support_distribution(inst.xi, inst.omega, inst.m, opt.max_support);

        oracle::UrnHistogram central_hist{inst.xi.size(), inst.xi.directed(), 0, {}};
        oracle::UrnHistogram biased_hist = central_hist;
        for (std::uint64_t s = 0; s < opt.samples; ++s) {
            ++central_hist.counts[oracle::cell_counts(sample(central, opt.seed * 7919 + s))];
            ++biased_hist.counts[oracle::cell_counts(sample_ghype(biased, opt.seed * 104729 + s))];
        }
        const auto naive = oracle::simulate_urn(inst.xi, inst.omega, inst.m, opt.samples, opt.seed + t);

        std::vector<double> p_central, p_biased;
        for (const auto& e : exact.entries) p_central.push_back(to_double(e.probability));
        for (const auto& e : urn.entries) p_biased.push_back(static_cast<double>(e.probability));

        const double p1 =
            oracle::chi_square_goodness_of_fit(oracle::histogram_counts(central_hist, exact), p_central).p_value;
        const double p2 =
            oracle::chi_square_goodness_of_fit(oracle::histogram_counts(biased_hist, urn), p_biased).p_value;
        const double p3 = oracle::chi_square_goodness_of_fit(oracle::histogram_counts(naive, urn), p_biased).p_value;
        for (double p : {p1, p2, p3}) samplers.record(p < 0.001 ? 1.0 : 0.0, 0.0);
        std::ostringstream note;
        note << "p-values " << p1 << ", " << p2 << ", " << p3;
        samplers.note(note.str());
    }

    std::vector<CheckResult> out;
    for (Check* c : {&central_norm, &wallenius_norm, &urn_agreement, &reduction, &central_marginal,
                     &wallenius_marginal, &projection, &degrees, &round_trip, &samplers})
        out.push_back(c->finish());
    return out;
}

} // namespace ghype::cli
