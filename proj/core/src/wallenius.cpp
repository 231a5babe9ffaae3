#include "ghype/wallenius.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/bernoulli.hpp>

#include "ghype/error.hpp"
#include "ghype/sampling_tree.hpp"

namespace ghype {
namespace {

struct DrawnColour {
    double weight;
    count_t draws;
};

struct Colour {
    count_t balls;
    double weight;
};

// ln((1 - e^{-x}) / x) for x > 0.
double log_relative_gap(double x) {
    if (x <= 0.0) return 0.0;
    if (x < 1.0) return std::log(-std::expm1(-x) / x);
    return std::log1p(-std::exp(-x)) - std::log(x);
}

// Stationary point in t = -ln z of e^{-t} prod (1 - e^{-w t})^a, where
// sum a w / (e^{w t} - 1) = 1. The left side decreases in t.
double wallenius_peak(const std::vector<DrawnColour>& terms, double total_draws) {
    auto balance = [&](double t, double* slope) {
        double value = -1.0, derivative = 0.0;
        for (const auto& [w, a] : terms) {
            // w / (e^{wt} - 1) = w e / (1 - e) with e = e^{-wt}
            const double e = std::exp(-w * t);
            const double gap = -std::expm1(-w * t);
            value += static_cast<double>(a) * w * e / gap;
            derivative -= static_cast<double>(a) * w * w * e / (gap * gap);
        }
        if (slope) *slope = derivative;
        return value;
    };
    double lo = total_draws, hi = total_draws;
    if (balance(lo, nullptr) > 0.0) {
        while (balance(hi, nullptr) > 0.0 && hi < 1e300) hi *= 2.0;
        lo = hi / 2.0;
    } else {
        while (balance(lo, nullptr) < 0.0 && lo > 1e-300) lo /= 2.0;
        hi = lo * 2.0;
    }
    double t = std::sqrt(lo * hi);
    for (int iter = 0; iter < 60; ++iter) {
        double slope = 0.0;
        const double value = balance(t, &slope);
        if (value > 0.0) lo = t; else hi = t;
        double next = t - value / slope;
        if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
        if (std::abs(next - t) <= 1e-6 * t) return next;
        t = next;
    }
    return t;
}

// ln((1 - e^{-x}) / x) summed with multiplicities over colours sorted by
// weight, as a function of tau for x = y tau with scaled weights y. Colours
// with x below kSeriesCut use
//   ln((1 - e^{-x}) / x) = -x / 2 + sum_k B_2k x^2k / (2k (2k)!)
// through prefix power sums, so an evaluation costs one binary search plus
// the colours above the cut.
class GapSum {
public:
    explicit GapSum(std::vector<DrawnColour> scaled) : terms_(std::move(scaled)), prefix_(terms_.size() + 1) {
        for (int k = 1; k <= kSeriesTerms; ++k)
            coefficients_[k] = boost::math::bernoulli_b2n<double>(k) / (2.0 * k * std::tgamma(2.0 * k + 1.0));
        for (std::size_t c = 0; c < terms_.size(); ++c) {
            const double y = terms_[c].weight, a = static_cast<double>(terms_[c].draws);
            const double y2 = y * y;
            prefix_[c + 1] = prefix_[c];
            prefix_[c + 1][0] += a * y;
            double power = y2;
            for (int k = 1; k <= kSeriesTerms; ++k, power *= y2) prefix_[c + 1][k] += a * power;
        }
    }

    double operator()(double tau) const {
        const auto cut = std::upper_bound(terms_.begin(), terms_.end(), kSeriesCut / tau,
                                          [](double v, const DrawnColour& c) { return v < c.weight; });
        const auto& moments = prefix_[static_cast<std::size_t>(cut - terms_.begin())];
        const double tau2 = tau * tau;
        double series = 0.0, power = std::pow(tau2, kSeriesTerms);
        for (int k = kSeriesTerms; k >= 1; --k, power /= tau2) series += coefficients_[k] * power * moments[k];
        double sum = series - 0.5 * tau * moments[0];
        for (auto it = cut; it != terms_.end(); ++it)
            sum += static_cast<double>(it->draws) * log_relative_gap(it->weight * tau);
        return sum;
    }

private:
    static constexpr int kSeriesTerms = 8;
    static constexpr double kSeriesCut = 0.5;

    std::vector<DrawnColour> terms_;
    std::vector<std::array<double, kSeriesTerms + 1>> prefix_;
    std::array<double, kSeriesTerms + 1> coefficients_{};
};

// ln int_0^1 prod (1 - z^{w/S})^a dz for S > 0 and every drawn weight > 0.
double integrate_drawn(std::vector<DrawnColour> drawn, double total_weight,
                              const QuadratureConfig& cfg) {
    std::sort(drawn.begin(), drawn.end(),
              [](const DrawnColour& x, const DrawnColour& y) { return x.weight < y.weight; });
    // Merge equal weights; uniform propensities collapse to a single factor.
    std::vector<DrawnColour> terms;
    count_t m = 0;
    for (const auto& c : drawn) {
        m += c.draws;
        const double w = c.weight / total_weight;
        if (!terms.empty() && terms.back().weight == w)
            terms.back().draws += c.draws;
        else
            terms.push_back({w, c.draws});
    }
    const auto md = static_cast<double>(m);
    const double t_peak = wallenius_peak(terms, md);
    // prod (1 - e^{-w t})^a = (w t_peak)^a tau^m prod ((1 - e^{-w t}) / (w t))^a
    // with tau = t / t_peak; the constant leaves the integral so the
    // integrand stays of order one near its peak.
    CompensatedSum log_constant;
    log_constant.add(md * std::log(t_peak));
    for (auto& [w, a] : terms) {
        log_constant.add(static_cast<double>(a) * std::log(w));
        w *= t_peak;
    }
    const GapSum gaps(std::move(terms));
    const LogIntegrand integrand = [&gaps, md, t_peak](double log_z) {
        const double tau = -log_z / t_peak;
        if (!(tau > 0.0)) return kNegInf;
        return md * std::log(tau) + gaps(tau);
    };
    return log_constant.value() + integrate_unit_interval(integrand, -t_peak, cfg);
}

void check_matching(const GHypEModel& model, const MultiGraph& g) {
    if (g.vertex_count() != model.size() || g.directed() != model.directed())
        throw InputError("graph does not match the model's vertex count or directedness");
}

struct CellQuery {
    std::size_t i;
    std::size_t j;
    count_t draws;
    bool possible;
};

CellQuery normalise_query(const GHypEModel& model, std::size_t i, std::size_t j, count_t a) {
    if (i >= model.size() || j >= model.size())
        throw InputError("vertex index out of range: (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
    if (!model.directed() && i > j) std::swap(i, j);
    if (a < 0) return {i, j, 0, false};
    if (!model.directed() && i == j) {
        if (a % 2 != 0) return {i, j, 0, false};
        return {i, j, a / 2, true};
    }
    return {i, j, a, true};
}

// Exact Pr(draws of `target` = a) via the competing-clock representation.
double exact_marginal(const Colour& target, const std::vector<Colour>& rest, count_t m, count_t a,
                      const QuadratureConfig& cfg) {
    const count_t K = target.balls;
    const double omega = target.weight;
    if (K == 0 || omega == 0.0) return a == 0 ? 1.0 : 0.0;
    count_t rest_balls = 0;
    for (const auto& c : rest) rest_balls += c.balls;
    if (m == 0) return a == 0 ? 1.0 : 0.0;
    if (m == K + rest_balls) return a == K ? 1.0 : 0.0;
    if (a > std::min(K, m) || m - a > rest_balls) return 0.0;

    const count_t cap = m - a;
    std::vector<double> dist(cap + 1), rate(cap + 1), next_dist(cap + 1), next_rate(cap + 1);
    std::vector<double> pmf;

    // Density (in tau) of the m-th ring happening with exactly a target draws.
    auto density = [&](double tau) {
        std::fill(dist.begin(), dist.end(), 0.0);
        std::fill(rate.begin(), rate.end(), 0.0);
        dist[0] = 1.0;
        for (const auto& c : rest) {
            const double log_p = log1mexp(-c.weight * tau);
            const double log_q = -c.weight * tau;
            const count_t top = std::min(c.balls, cap);
            pmf.resize(top + 1);
            for (count_t x = 0; x <= top; ++x)
                pmf[x] = std::exp(log_binomial(c.balls, x) + static_cast<double>(x) * log_p +
                                  static_cast<double>(c.balls - x) * log_q);
            std::fill(next_dist.begin(), next_dist.end(), 0.0);
            std::fill(next_rate.begin(), next_rate.end(), 0.0);
            for (count_t s = 0; s <= cap; ++s) {
                if (dist[s] == 0.0 && rate[s] == 0.0) continue;
                for (count_t x = 0; x <= top && s + x <= cap; ++x) {
                    next_dist[s + x] += dist[s] * pmf[x];
                    next_rate[s + x] += rate[s] * pmf[x] +
                                        dist[s] * c.weight * static_cast<double>(c.balls - x) * pmf[x];
                }
            }
            dist.swap(next_dist);
            rate.swap(next_rate);
        }
        const double log_p = log1mexp(-omega * tau);
        const double log_q = -omega * tau;
        auto target_pmf = [&](count_t x) {
            return std::exp(log_binomial(K, x) + static_cast<double>(x) * log_p +
                            static_cast<double>(K - x) * log_q);
        };
        double value = 0.0;
        if (a >= 1) value += target_pmf(a - 1) * omega * static_cast<double>(K - a + 1) * dist[m - a];
        if (a <= m - 1) value += target_pmf(a) * rate[m - 1 - a];
        return value;
    };

    // Time at which the expected number of rings reaches m, as a peak hint.
    auto expected_rings = [&](double tau) {
        double total = static_cast<double>(K) * -std::expm1(-omega * tau);
        for (const auto& c : rest) total += static_cast<double>(c.balls) * -std::expm1(-c.weight * tau);
        return total;
    };
    double lo = 0.0, hi = 1.0 / omega;
    while (expected_rings(hi) < static_cast<double>(m) && hi < 1e300) hi *= 2.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (expected_rings(mid) < static_cast<double>(m) ? lo : hi) = mid;
    }

    // z = e^{-omega tau}, d tau = dz / (omega z).
    const double log_omega = std::log(omega);
    const LogIntegrand integrand = [&](double log_z) {
        const double value = density(-log_z / omega);
        if (!(value > 0.0)) return kNegInf;
        return std::log(value) - log_omega - log_z;
    };
    const double log_prob = integrate_unit_interval(integrand, -omega * hi, cfg);
    return std::min(1.0, std::exp(log_prob));
}

std::vector<Colour> other_colours(const GHypEModel& model, std::size_t i, std::size_t j) {
    std::vector<Colour> rest;
    for (const auto [r, s] : model.xi().cells()) {
        if (r == i && s == j) continue;
        const count_t balls = model.xi().ball_count(r, s);
        const double w = model.omega()(r, s);
        if (balls > 0 && w > 0.0) rest.push_back({balls, w});
    }
    return rest;
}

} // namespace

double log_wallenius_integral(std::span<const double> weights, std::span<const count_t> draws,
                              double remaining_weight, const QuadratureConfig& cfg) {
    if (weights.size() != draws.size()) throw InputError("weights and draw counts differ in length");
    if (!(remaining_weight > 0.0) || !std::isfinite(remaining_weight))
        throw InputError("remaining weight must be positive and finite");
    std::vector<DrawnColour> drawn;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (draws[c] < 0) throw InputError("draw counts must be non-negative");
        if (draws[c] == 0) continue;
        if (!(weights[c] > 0.0)) return kNegInf;
        drawn.push_back({weights[c], draws[c]});
    }
    if (drawn.empty()) return 0.0;
    return integrate_drawn(std::move(drawn), remaining_weight, cfg);
}

PropensityMatrix::PropensityMatrix(Matrix<double> omega, bool directed)
    : omega_(std::move(omega)), directed_(directed) {
    for (double w : omega_.data())
        if (!(w >= 0.0) || !std::isfinite(w))
            throw InputError("propensities must be finite and non-negative");
    if (!directed_ && !omega_.is_symmetric())
        throw InputError("undirected propensity matrix must be symmetric");
}

PropensityMatrix PropensityMatrix::uniform(std::size_t n, bool directed, double value) {
    return PropensityMatrix(Matrix<double>(n, value), directed);
}

PropensityMatrix PropensityMatrix::scaled(double c) const {
    if (!(c > 0.0)) throw InputError("propensity scale must be positive");
    Matrix<double> out = omega_;
    for (double& w : out.data()) w *= c;
    return PropensityMatrix(std::move(out), directed_);
}

GHypEModel::GHypEModel(CombinatorialMatrix xi, PropensityMatrix omega, count_t m)
    : xi_(std::move(xi)), omega_(std::move(omega)), m_(m) {
    if (omega_.size() != xi_.size() || omega_.directed() != xi_.directed())
        throw InputError("propensity and combinatorial matrices disagree in size or directedness");
    if (m_ < 0) throw InputError("number of draws must be non-negative");
    for (const auto [i, j] : xi_.cells())
        if (omega_(i, j) > 0.0) drawable_ += xi_.ball_count(i, j);
    if (m_ > drawable_)
        throw InfeasibleModelError("cannot draw " + std::to_string(m_) + " edges: only " +
                                   std::to_string(drawable_) +
                                   " stub combinations carry positive propensity");
}

double log_pmf_wallenius(const GHypEModel& model, const MultiGraph& g, const QuadratureConfig& cfg) {
    check_matching(model, g);
    if (g.edge_count() != model.draws()) return kNegInf;
    const auto& xi = model.xi();
    CompensatedSum log_binomials, remaining_weight;
    std::vector<DrawnColour> drawn;
    for (const auto [i, j] : xi.cells()) {
        const count_t balls = xi.ball_count(i, j);
        const count_t a = g.multiplicity(i, j);
        const double w = model.omega()(i, j);
        if (a > balls) return kNegInf;
        if (a > 0) {
            if (w == 0.0) return kNegInf;
            log_binomials.add(log_binomial(balls, a));
            drawn.push_back({w, a});
        }
        if (w > 0.0 && balls > a) remaining_weight.add(w * static_cast<double>(balls - a));
    }
    if (drawn.empty() || remaining_weight.value() == 0.0) return log_binomials.value();
    return log_binomials.value() +
           integrate_drawn(std::move(drawn), remaining_weight.value(), cfg);
}

double marginal_pmf_wallenius(const GHypEModel& model, std::size_t i, std::size_t j, count_t a,
                              const QuadratureConfig& cfg) {
    const CellQuery q = normalise_query(model, i, j, a);
    if (!q.possible) return 0.0;
    const Colour target{model.xi().ball_count(q.i, q.j), model.omega()(q.i, q.j)};
    return exact_marginal(target, other_colours(model, q.i, q.j), model.draws(), q.draws, cfg);
}

double approximate_marginal_pmf_wallenius(const GHypEModel& model, std::size_t i, std::size_t j,
                                          count_t a, const QuadratureConfig& cfg) {
    const CellQuery q = normalise_query(model, i, j, a);
    if (!q.possible) return 0.0;
    const auto& xi = model.xi();
    const count_t balls = xi.ball_count(q.i, q.j);
    const count_t other_balls = xi.total() - balls;
    const count_t m = model.draws();
    const count_t x = q.draws;
    if (x > balls || m - x < 0 || m - x > other_balls) return 0.0;

    CompensatedSum pooled;
    for (const auto [r, s] : xi.cells())
        if (!(r == q.i && s == q.j))
            pooled.add(static_cast<double>(xi.ball_count(r, s)) * model.omega()(r, s));
    const double w = model.omega()(q.i, q.j);
    const double w_bar = other_balls > 0 ? pooled.value() / static_cast<double>(other_balls) : 0.0;

    if ((x > 0 && w == 0.0) || (m - x > 0 && w_bar == 0.0)) return 0.0;
    const double log_binomials = log_binomial(balls, x) + log_binomial(other_balls, m - x);
    const double remaining = w * static_cast<double>(balls - x) +
                             w_bar * static_cast<double>(other_balls - (m - x));
    std::vector<DrawnColour> drawn;
    if (x > 0) drawn.push_back({w, x});
    if (m - x > 0) drawn.push_back({w_bar, m - x});
    if (drawn.empty() || remaining == 0.0) return std::exp(log_binomials);
    return std::exp(log_binomials + integrate_drawn(std::move(drawn), remaining, cfg));
}

Matrix<double> mean_wallenius(const GHypEModel& model) {
    const auto& xi = model.xi();
    const std::size_t n = model.size();
    const auto m = static_cast<double>(model.draws());

    // E_c = balls_c (1 - C^{Omega_c}) with C = e^{-s}; sum E_c increases in s.
    std::vector<Colour> colours;
    std::vector<Dyad> where;
    for (const auto [i, j] : xi.cells()) {
        const count_t balls = xi.ball_count(i, j);
        const double w = model.omega()(i, j);
        if (balls > 0 && w > 0.0) {
            colours.push_back({balls, w});
            where.push_back({i, j});
        }
    }
    auto total = [&](double s, double* slope) {
        CompensatedSum value, derivative;
        for (const auto& c : colours) {
            const auto b = static_cast<double>(c.balls);
            value.add(-b * std::expm1(-c.weight * s));
            derivative.add(b * c.weight * std::exp(-c.weight * s));
        }
        if (slope) *slope = derivative.value();
        return value.value();
    };

    std::vector<double> expected(colours.size(), 0.0);
    if (model.draws() == model.drawable_balls()) {
        for (std::size_t c = 0; c < colours.size(); ++c) expected[c] = static_cast<double>(colours[c].balls);
    } else if (model.draws() > 0) {
        double linear = 0.0;
        for (const auto& c : colours) linear += static_cast<double>(c.balls) * c.weight;
        // total(s) <= s * linear by concavity, so s = m / linear is a lower bracket.
        double lo = m / linear, hi = lo;
        while (total(hi, nullptr) < m) hi *= 2.0;
        double s = lo;
        for (int iter = 0; iter < 200; ++iter) {
            double slope = 0.0;
            const double value = total(s, &slope);
            if (std::abs(value - m) <= 1e-12 * m) break;
            (value < m ? lo : hi) = s;
            double next = s - (value - m) / slope;
            if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
            if (next == s) break;
            s = next;
        }
        for (std::size_t c = 0; c < colours.size(); ++c)
            expected[c] = -static_cast<double>(colours[c].balls) * std::expm1(-colours[c].weight * s);
    }

    Matrix<double> out(n, 0.0);
    for (std::size_t c = 0; c < colours.size(); ++c) {
        const auto [i, j] = where[c];
        if (model.directed()) {
            out(i, j) = expected[c];
        } else if (i == j) {
            out(i, i) = 2.0 * expected[c];
        } else {
            out(i, j) = out(j, i) = expected[c];
        }
    }
    return out;
}

Matrix<double> exact_mean_wallenius(const GHypEModel& model, const QuadratureConfig& cfg) {
    const std::size_t n = model.size();
    Matrix<double> out(n, 0.0);
    for (const auto [i, j] : model.xi().cells()) {
        const Colour target{model.xi().ball_count(i, j), model.omega()(i, j)};
        const auto rest = other_colours(model, i, j);
        CompensatedSum mean;
        const count_t top = std::min(target.balls, model.draws());
        for (count_t x = 1; x <= top; ++x)
            mean.add(static_cast<double>(x) * exact_marginal(target, rest, model.draws(), x, cfg));
        if (model.directed()) {
            out(i, j) = mean.value();
        } else if (i == j) {
            out(i, i) = 2.0 * mean.value();
        } else {
            out(i, j) = out(j, i) = mean.value();
        }
    }
    return out;
}

PropensityMatrix fit_propensity(const MultiGraph& g, const CombinatorialMatrix& xi) {
    if (g.vertex_count() != xi.size() || g.directed() != xi.directed())
        throw InputError("graph does not match the combinatorial matrix");
    const std::size_t n = g.vertex_count();
    Matrix<double> omega(n, 0.0);
    for (const auto [i, j] : xi.cells()) {
        const count_t a = g.multiplicity(i, j);
        const count_t balls = xi.ball_count(i, j);
        if (a == 0) continue;
        if (a > balls)
            throw InputError("dyad (" + std::to_string(i) + ", " + std::to_string(j) +
                             ") has more edges than stub combinations");
        if (a == balls) throw SaturatedDyadError(i, j);
        const double w = -std::log1p(-static_cast<double>(a) / static_cast<double>(balls));
        omega(i, j) = w;
        if (!g.directed()) omega(j, i) = w;
    }
    return PropensityMatrix(std::move(omega), g.directed());
}

MultiGraph sample_ghype(const GHypEModel& model, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    const auto& xi = model.xi();
    const auto& cells = xi.cells();
    std::vector<count_t> remaining(cells.size());
    std::vector<double> weights(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        remaining[c] = xi.ball_count(cells[c].i, cells[c].j);
        weights[c] = model.omega()(cells[c].i, cells[c].j) * static_cast<double>(remaining[c]);
    }
    SamplingTree tree(weights);
    std::vector<count_t> counts(cells.size(), 0);
    for (count_t draw = 0; draw < model.draws(); ++draw) {
        const std::size_t c = tree.sample(gen);
        ++counts[c];
        --remaining[c];
        tree.set(c, model.omega()(cells[c].i, cells[c].j) * static_cast<double>(remaining[c]));
    }
    return MultiGraph::from_cell_counts(model.size(), model.directed(), counts);
}

} // namespace ghype
