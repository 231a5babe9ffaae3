#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ghype/graph.hpp"

namespace ghype::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInfeasible = 3;

/// Parses args (without the program name) and runs one subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Two-sided exact p-value of x draws under Hypergeometric(N, K, n): the mass
/// of every outcome whose probability is at most Pr(x) (1 + tie_tolerance).
/// Zero outside the support.
double hypergeometric_p_value(count_t N, count_t K, count_t n, count_t x, double tie_tolerance = 1e-7);

/// Seed of the k-th sample of a seeded run.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k);

} // namespace ghype::cli
