#include "powsim/markov.hpp"

#include <cmath>

namespace powsim {

namespace {

constexpr double kEdgeEps = 1e-15;

// Closed communicating classes of the support graph. Iterative reachability
// is plenty for the handful of states these chains have.
int count_closed_classes(const std::vector<std::vector<double>>& p) {
  std::size_t n = p.size();
  // reach[i][j]: j reachable from i in >= 0 steps.
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (p[i][j] > kEdgeEps) reach[i][j] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[k][j]) reach[i][j] = true;
      }
    }
  }
  std::vector<bool> seen(n, false);
  int closed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i]) continue;
    bool is_closed = true;
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j] && reach[j][i]) members.push_back(j);
    }
    for (std::size_t m : members) {
      for (std::size_t j = 0; j < n; ++j) {
        if (reach[m][j] && !reach[j][m]) is_closed = false;
      }
    }
    bool counted_before = false;
    for (std::size_t m : members) {
      if (seen[m]) counted_before = true;
      seen[m] = true;
    }
    if (is_closed && !counted_before) ++closed;
  }
  return closed;
}

}  // namespace

void MarkovModel::validate() const {
  if (states.empty()) {
    throw SimError(Err::NotStochastic, "model has no states");
  }
  if (transitions.size() != states.size()) {
    throw SimError(Err::NotStochastic, "transition matrix rows must match state count");
  }
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& row = transitions[i];
    if (row.size() != states.size()) {
      throw SimError(Err::NotStochastic, "transition matrix must be square");
    }
    double sum = 0.0;
    for (double v : row) {
      if (v < -1e-12) {
        throw SimError(Err::NotStochastic, "negative probability in row " + std::to_string(i));
      }
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw SimError(Err::NotStochastic,
                     "row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
  }
}

std::vector<double> stationary(const MarkovModel& model, double tolerance, std::size_t max_iterations) {
  model.validate();
  const auto& p = model.transitions;
  std::size_t n = model.size();

  if (count_closed_classes(p) != 1) {
    throw SimError(Err::NoConvergence, "stationary distribution is not unique (multiple closed classes)");
  }

  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    for (std::size_t j = 0; j < n; ++j) next[j] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double w = pi[i];
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += w * p[i][j];
    }
    // Lazy step kills periodicity without moving the fixed point.
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = 0.5 * (next[j] + pi[j]);
      norm += next[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= norm;
      diff = std::max(diff, std::fabs(next[j] - pi[j]));
    }
    pi.swap(next);
    if (diff < tolerance) {
      // States the chain cannot reach should read exactly zero, not iteration
      // residue.
      double norm = 0.0;
      for (double& v : pi) {
        if (v < tolerance * 10.0) v = 0.0;
        norm += v;
      }
      for (double& v : pi) v /= norm;
      return pi;
    }
  }
  throw SimError(Err::NoConvergence, "power iteration did not converge");
}

double stationary_residual(const MarkovModel& model, const std::vector<double>& pi) {
  const auto& p = model.transitions;
  std::size_t n = model.size();
  double residual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) v += pi[i] * p[i][j];
    residual = std::max(residual, std::fabs(v - pi[j]));
  }
  return residual;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) d += std::fabs(a[i] - b[i]);
  for (std::size_t i = std::min(a.size(), b.size()); i < a.size(); ++i) d += std::fabs(a[i]);
  for (std::size_t i = std::min(a.size(), b.size()); i < b.size(); ++i) d += std::fabs(b[i]);
  return d;
}

}  // namespace powsim
