#pragma once

#include <span>
#include <vector>

namespace dsketch {

struct Correlation {
  double rho = 0.0;
  double p = 1.0;
};

/// Ranks starting at 1, ties share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Spearman rank correlation. p is two-sided from Student's t with n - 2
/// degrees of freedom on rho * sqrt((n - 2) / (1 - rho^2)); |rho| = 1 gives
/// p = 0. Throws kInvalidArgument for mismatched sizes or n < 5 and
/// kDegenerate when either series is constant.
Correlation spearman(std::span<const double> x, std::span<const double> y);

struct UTest {
  double u = 0.0;  // pairs (a_i, b_j) with a_i > b_j, ties counted 1/2
  double z = 0.0;
  double p = 1.0;
};

/// Mann-Whitney U, two-sided normal approximation with tie correction and no
/// continuity correction. Throws kInvalidArgument when a sample has fewer
/// than 3 values and kDegenerate when every value is equal.
UTest mann_whitney_u(std::span<const double> a, std::span<const double> b);

double mean(std::span<const double> v);
/// Sample standard deviation, 0 for fewer than two values.
double stddev(std::span<const double> v);

}  // namespace dsketch
