#include "ccap/transfer_entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ccap/errors.hpp"

namespace ccap {

namespace {

double entropy_of(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h < 0.0 ? 0.0 : h;
}

void check_indices(const TabularMDP& mdp, int s, int a) {
  if (s < 0 || s >= mdp.n_states || a < 0 || a >= mdp.n_actions)
    throw IndexOutOfRange("state " + std::to_string(s) + ", action " + std::to_string(a) +
                          " out of range for " + std::to_string(mdp.n_states) + "x" +
                          std::to_string(mdp.n_actions) + " MDP");
}

}  // namespace

std::vector<double> uniform_marginal(const TabularMDP& mdp, int s) {
  check_indices(mdp, s, 0);
  std::vector<double> m(static_cast<size_t>(mdp.n_states), 0.0);
  const double w = 1.0 / mdp.n_actions;
  for (int a = 0; a < mdp.n_actions; ++a) {
    const auto row = mdp.row(s, a);
    for (int s2 = 0; s2 < mdp.n_states; ++s2) m[static_cast<size_t>(s2)] += w * row[static_cast<size_t>(s2)];
  }
  return m;
}

double next_state_entropy(const TabularMDP& mdp, int s) {
  return entropy_of(uniform_marginal(mdp, s));
}

double action_entropy(const TabularMDP& mdp, int s, int a) {
  check_indices(mdp, s, a);
  return entropy_of(mdp.row(s, a));
}

double exact_transfer_entropy(const TabularMDP& mdp, int s, int a) {
  return next_state_entropy(mdp, s) - action_entropy(mdp, s, a);
}

std::vector<double> mc_marginal(const TabularMDP& mdp, int s, long n, Rng& rng) {
  check_indices(mdp, s, 0);
  std::vector<long> counts(static_cast<size_t>(mdp.n_states), 0);
  for (long i = 0; i < n; ++i) {
    const int a = rng.next_int(mdp.n_actions);
    ++counts[static_cast<size_t>(sample_next(mdp, s, a, rng))];
  }
  std::vector<double> p(static_cast<size_t>(mdp.n_states), 0.0);
  if (n > 0)
    for (int s2 = 0; s2 < mdp.n_states; ++s2)
      p[static_cast<size_t>(s2)] = static_cast<double>(counts[static_cast<size_t>(s2)]) / static_cast<double>(n);
  return p;
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double tv = 0.0;
  const size_t n = std::max(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    const double pa = i < a.size() ? a[i] : 0.0;
    const double pb = i < b.size() ? b[i] : 0.0;
    tv += std::abs(pa - pb);
  }
  return 0.5 * tv;
}

BoundReport check_propositions(const TabularMDP& mdp, const PropCheckOptions& opts) {
  BoundReport rep;
  rep.worst_upper_slack = std::numeric_limits<double>::infinity();
  rep.worst_lower_slack = std::numeric_limits<double>::infinity();
  rep.worst_max_upper_slack = std::numeric_limits<double>::infinity();
  rep.worst_max_lower_slack = std::numeric_limits<double>::infinity();

  Rng rng(opts.seed);
  const double lower_factor = 1.0 - static_cast<double>(mdp.n_actions);

  for (int s = 0; s < mdp.n_states; ++s) {
    const double h = next_state_entropy(mdp, s);
    double max_te = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.n_actions; ++a) {
      const double te = h - action_entropy(mdp, s, a);
      max_te = std::max(max_te, te);
      ++rep.checks;

      const double upper_slack = h - te;
      const double lower_slack = te - lower_factor * h;
      rep.worst_upper_slack = std::min(rep.worst_upper_slack, upper_slack);
      rep.worst_lower_slack = std::min(rep.worst_lower_slack, lower_slack);
      if (upper_slack < -opts.tol)
        rep.violations.push_back("upper bound violated at s=" + std::to_string(s) +
                                 ", a=" + std::to_string(a));
      if (lower_slack < -opts.tol)
        rep.violations.push_back("lower bound violated at s=" + std::to_string(s) +
                                 ", a=" + std::to_string(a));
    }
    const double max_upper_slack = h - max_te;
    const double max_lower_slack = max_te;
    rep.worst_max_upper_slack = std::min(rep.worst_max_upper_slack, max_upper_slack);
    rep.worst_max_lower_slack = std::min(rep.worst_max_lower_slack, max_lower_slack);
    if (max_upper_slack < -opts.tol)
      rep.violations.push_back("max-TE upper bound violated at s=" + std::to_string(s));
    if (max_lower_slack < -opts.tol)
      rep.violations.push_back("max-TE lower bound violated at s=" + std::to_string(s));

    if (opts.mc_samples_per_state > 0) {
      const auto analytic = uniform_marginal(mdp, s);
      const auto sampled = mc_marginal(mdp, s, opts.mc_samples_per_state, rng);
      const double tv = total_variation(analytic, sampled);
      rep.worst_marginal_tv = std::max(rep.worst_marginal_tv, tv);
      if (tv > opts.mc_tv_tol)
        rep.violations.push_back("sampled marginal off by TV " + std::to_string(tv) +
                                 " at s=" + std::to_string(s));
    }
  }
  return rep;
}

}  // namespace ccap
