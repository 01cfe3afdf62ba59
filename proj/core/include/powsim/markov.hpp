#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "powsim/error.hpp"

namespace powsim {

/// Finite discrete-time chain with labeled states and a row-stochastic
/// transition matrix.
struct MarkovModel {
  std::vector<std::string> states;
  std::vector<std::vector<double>> transitions;

  std::size_t size() const { return states.size(); }

  /// Throws NotStochastic when the matrix shape or row sums are off.
  void validate() const;
};

/// Stationary distribution pi with pi P = pi and sum(pi) = 1, computed by
/// damped power iteration. Throws NotStochastic for malformed input and
/// NoConvergence when the chain has several closed classes (the stationary
/// distribution is not unique) or the iteration stalls.
std::vector<double> stationary(const MarkovModel& model,
                               double tolerance = 1e-12,
                               std::size_t max_iterations = 1'000'000);

/// Largest absolute componentwise difference between pi P and pi.
double stationary_residual(const MarkovModel& model, const std::vector<double>& pi);

double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace powsim
