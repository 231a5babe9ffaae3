#include "ghype/numeric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "ghype/error.hpp"

namespace ghype {
namespace {

constexpr int kExactBinomialMax = 60;

struct ExactBinomialTable {
    std::array<std::array<double, kExactBinomialMax + 1>, kExactBinomialMax + 1> log_value{};

    ExactBinomialTable() {
        std::array<std::uint64_t, kExactBinomialMax + 1> row{};
        row[0] = 1;
        for (int n = 0; n <= kExactBinomialMax; ++n) {
            if (n > 0)
                for (int k = n; k > 0; --k) row[k] += row[k - 1];
            for (int k = 0; k <= n; ++k) log_value[n][k] = std::log(static_cast<double>(row[k]));
        }
    }
};

const ExactBinomialTable& exact_table() {
    static const ExactBinomialTable table;
    return table;
}

// ln x! - [(x + 1/2) ln x - x + ln sqrt(2 pi)]
double stirling_error(double x) {
    if (x < 16.0) {
        return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x -
               0.5 * std::log(2.0 * std::numbers::pi);
    }
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    return inv * (1.0 / 12 - inv2 * (1.0 / 360 - inv2 * (1.0 / 1260 - inv2 * (1.0 / 1680 - inv2 / 1188))));
}

// 15-point Kronrod rule with its embedded 7-point Gauss rule.
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
};

struct PanelOrder {
    bool operator()(const Panel& a, const Panel& b) const noexcept { return a.error < b.error; }
};

// Log-integrand after z = u^p, including the Jacobian p u^{p-1}.
class MappedIntegrand {
public:
    MappedIntegrand(const LogIntegrand& f, double p) : f_(f), p_(p), log_p_(std::log(p)) {}

    double operator()(double u) const {
        if (!(u > 0.0 && u < 1.0)) return kNegInf;
        // u - 1 is exact on [1/2, 1].
        const double log_u = u > 0.5 ? std::log1p(u - 1.0) : std::log(u);
        const double value = f_(p_ * log_u);
        if (value == kNegInf) return kNegInf;
        return value + log_p_ + (p_ - 1.0) * log_u;
    }

private:
    const LogIntegrand& f_;
    double p_;
    double log_p_;
};

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

struct Peak {
    double location;
    double log_value;
    double logit;
};

// Maximum of a unimodal F on (0, 1), searched in logit coordinates.
Peak locate_peak(const MappedIntegrand& F, double start_logit) {
    constexpr double kLimit = 40.0;
    auto G = [&](double v) { return F(logistic(v)); };

    double v0 = start_logit;
    double f0 = G(v0);
    if (f0 == kNegInf) {
        double best = kNegInf;
        for (int k = -80; k <= 80; ++k) {
            const double v = 0.5 * k;
            const double fv = G(v);
            if (fv > best) {
                best = fv;
                v0 = v;
            }
        }
        if (best == kNegInf) return {0.5, kNegInf, 0.0};
        f0 = best;
    }

    const double h = 0.05;
    const double fl = G(v0 - h);
    const double fr = G(v0 + h);
    double lo = v0 - h, hi = v0 + h;
    if (fl > f0 || fr > f0) {
        const double dir = fr >= fl ? 1.0 : -1.0;
        double a = v0, b = v0 + dir * h, fb = dir > 0 ? fr : fl;
        double step = h;
        while (true) {
            step *= 2.0;
            double c = b + dir * step;
            if (std::abs(c) >= kLimit) c = dir * kLimit;
            const double fc = G(c);
            if (fc < fb || c == dir * kLimit) {
                lo = std::min(a, c);
                hi = std::max(a, c);
                break;
            }
            a = b;
            b = c;
            fb = fc;
        }
    }

    std::uintmax_t iterations = 200;
    const auto [v_star, neg_f] = boost::math::tools::brent_find_minima(
        [&](double v) { return -G(v); }, lo, hi, 40, iterations);
    double best_v = v_star, best_f = -neg_f;
    if (f0 > best_f) {
        best_v = v0;
        best_f = f0;
    }
    return {logistic(best_v), best_f, best_v};
}

// Width of the peak in u; falls back to a broad guess for flat integrands.
double peak_width(const MappedIntegrand& F, const Peak& peak) {
    const double room = std::min(peak.location, 1.0 - peak.location);
    double delta = 1e-4 * room;
    double sigma = -1.0;
    for (int iter = 0; iter < 6; ++iter) {
        const double fl = F(peak.location - delta);
        const double fr = F(peak.location + delta);
        const double curvature = (fl - 2.0 * peak.log_value + fr) / (delta * delta);
        if (!(curvature < 0.0) || !std::isfinite(curvature)) break;
        sigma = 1.0 / std::sqrt(-curvature);
        if (delta <= 0.2 * sigma) break;
        delta = 0.1 * sigma;
    }
    if (!(sigma > 0.0)) sigma = 0.1 * std::max(room, 0.05);
    return std::min(sigma, 0.25);
}

Panel kronrod15(const MappedIntegrand& F, double log_scale, double lo, double hi) {
    auto f = [&](double u) {
        const double v = F(u);
        return v == kNegInf ? 0.0 : std::exp(v - log_scale);
    };
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);

    std::array<double, 7> left{}, right{};
    const double fc = f(center);
    double gauss = fc * kGaussWeights[3];
    double kronrod = fc * kKronrodWeights[7];
    double abs_sum = std::abs(kronrod);
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        left[j] = f(center - dx);
        right[j] = f(center + dx);
        const double pair = left[j] + right[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(left[j]) + std::abs(right[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += kKronrodWeights[j] * (std::abs(left[j] - mean) + std::abs(right[j] - mean));

    const double width = std::abs(half);
    const double value = kronrod * half;
    abs_sum *= width;
    asc *= width;
    double error = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
        error = std::max(50.0 * eps * abs_sum, error);
    return {lo, hi, value, error};
}

std::vector<double> breakpoints(const MappedIntegrand& F, const Peak& peak, double sigma,
                                double rel_tol) {
    // Beyond b a unimodal integrand carries at most exp(F(b)) of mass on (0, 1).
    const double cutoff = peak.log_value + std::log(rel_tol) + std::log(sigma) - 10.0;
    std::vector<double> right, left;
    for (double offset = sigma;; offset *= 2.0) {
        const double b = peak.location + offset;
        if (b >= 1.0) {
            right.push_back(1.0);
            break;
        }
        right.push_back(b);
        if (F(b) < cutoff) break;
    }
    for (double offset = sigma;; offset *= 2.0) {
        const double b = peak.location - offset;
        if (b <= 0.0) {
            left.push_back(0.0);
            break;
        }
        left.push_back(b);
        if (F(b) < cutoff) break;
    }
    std::vector<double> points(left.rbegin(), left.rend());
    points.push_back(peak.location);
    points.insert(points.end(), right.begin(), right.end());
    return points;
}

} // namespace

double log_binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return kNegInf;
    if (k == 0 || k == n) return 0.0;
    if (n <= kExactBinomialMax) return exact_table().log_value[n][k];
    const auto kk = static_cast<double>(std::min(k, n - k));
    const auto nn = static_cast<double>(n);
    const double rest = nn - kk;
    return stirling_error(nn) - stirling_error(kk) - stirling_error(rest) +
           0.5 * std::log(nn / (2.0 * std::numbers::pi * kk * rest)) + kk * std::log(nn / kk) -
           rest * std::log1p(-kk / nn);
}

double log1mexp(double x) {
    if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
    return std::log1p(-std::exp(x));
}

double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        correction_ += (sum_ - t) + x;
    else
        correction_ += (x - t) + sum_;
    sum_ = t;
}

void QuadratureConfig::validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2))
        throw InputError("quadrature rel_tol must lie in (0, 1e-2]");
    if (max_subdivisions < 16) throw InputError("quadrature max_subdivisions must be >= 16");
}

double integrate_unit_interval(const LogIntegrand& log_integrand, double log_peak_hint,
                               const QuadratureConfig& cfg) {
    cfg.validate();
    auto exponent_for = [](double log_z) {
        if (!std::isfinite(log_z) || log_z >= 0.0) return 1.0;
        return std::max(1.0, log_z / -std::numbers::ln2);
    };
    double p = exponent_for(log_peak_hint);
    Peak peak = locate_peak(MappedIntegrand(log_integrand, p), 0.0);
    // A peak pinned against the small-u end of the search lies beyond it;
    // re-centre the substitution on what was found and search again.
    for (int round = 0; round < 16 && peak.log_value != kNegInf && peak.logit < -30.0; ++round) {
        const double next = exponent_for(p * std::log(peak.location));
        if (!(next > p)) break;
        p = next;
        peak = locate_peak(MappedIntegrand(log_integrand, p), 0.0);
    }
    if (peak.log_value == kNegInf) return kNegInf;
    const MappedIntegrand F(log_integrand, p);
    const double sigma = peak_width(F, peak);
    const auto points = breakpoints(F, peak, sigma, cfg.rel_tol);

    std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
    std::vector<Panel> done;
    for (std::size_t k = 0; k + 1 < points.size(); ++k)
        if (points[k + 1] > points[k])
            queue.push(kronrod15(F, peak.log_value, points[k], points[k + 1]));

    while (true) {
        CompensatedSum total, error;
        for (const Panel& pnl : done) {
            total.add(pnl.value);
            error.add(pnl.error);
        }
        auto pending = queue;
        while (!pending.empty()) {
            total.add(pending.top().value);
            error.add(pending.top().error);
            pending.pop();
        }
        if (error.value() <= cfg.rel_tol * std::abs(total.value())) {
            if (!(total.value() > 0.0)) return kNegInf;
            return peak.log_value + std::log(total.value());
        }
        if (queue.empty())
            throw ConvergenceError("quadrature error estimate stalled at double-precision resolution");
        if (static_cast<int>(queue.size() + done.size()) >= cfg.max_subdivisions)
            throw ConvergenceError("quadrature did not reach rel_tol " + std::to_string(cfg.rel_tol) +
                                   " within " + std::to_string(cfg.max_subdivisions) + " panels");
        const Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Cannot split further in double precision.
            done.push_back(worst);
            continue;
        }
        queue.push(kronrod15(F, peak.log_value, worst.lo, mid));
        queue.push(kronrod15(F, peak.log_value, mid, worst.hi));
    }
}

} // namespace ghype
