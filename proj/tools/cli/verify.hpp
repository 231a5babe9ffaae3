#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ghype/wallenius.hpp"

namespace ghype::cli {

struct VerifyOptions {
    std::size_t max_n = 3;
    count_t max_m = 4;
    std::uint64_t seed = 1;
    int instances = 12;
    std::uint64_t samples = 20000;
    std::size_t max_support = 500;
    QuadratureConfig quadrature{};
};

/// Implementations under test; replaceable so that a deliberately broken
/// PMF can be shown to fail the suite.
struct VerifyHooks {
    std::function<double(const GHypEModel&, const MultiGraph&, const QuadratureConfig&)> wallenius_log_pmf =
        [](const GHypEModel& model, const MultiGraph& g, const QuadratureConfig& cfg) {
            return log_pmf_wallenius(model, g, cfg);
        };
};

struct CheckResult {
    std::string name;
    bool passed = true;
    std::string detail;
};

/// Oracle checks on random small instances; deterministic given the options.
std::vector<CheckResult> run_verify(const VerifyOptions& options, const VerifyHooks& hooks = {});

} // namespace ghype::cli
