#pragma once

#include <span>
#include <string>
#include <vector>

#include "ccap/rng.hpp"
#include "ccap/tabular.hpp"

namespace ccap {

/// Uniform-action marginal p(s'|s) = (1/|A|) sum_a p(s'|s,a): the
/// non-interventional transition distribution of a random policy.
std::vector<double> uniform_marginal(const TabularMDP& mdp, int s);

/// H(S'|S=s) in nats, from the uniform-action marginal.
double next_state_entropy(const TabularMDP& mdp, int s);

/// H(S'|S=s, do(A=a)) in nats.
double action_entropy(const TabularMDP& mdp, int s, int a);

/// Transfer entropy of fixing action a at state s:
///   H(S'|S=s) - H(S'|S=s, do(A=a)).
/// May be negative for an action that increases next-state uncertainty.
double exact_transfer_entropy(const TabularMDP& mdp, int s, int a);

/// Empirical next-state distribution at s from n uniform-action draws.
std::vector<double> mc_marginal(const TabularMDP& mdp, int s, long n, Rng& rng);

double total_variation(std::span<const double> a, std::span<const double> b);

/// Bound sweep over every (s,a) of a tabular MDP:
///   upper:      T <= H(S'|s)
///   lower:      T >= (1 - |A|) * H(S'|s)      (uniform action weights)
///   max upper:  max_a T <= H(S'|s)
///   max lower:  max_a T >= 0
/// Slacks are the worst margins observed (negative = violated beyond tol).
/// With mc_samples_per_state > 0 the sampled marginal is also compared to
/// the analytic one per state (total variation <= mc_tv_tol).
struct PropCheckOptions {
  double tol = 1e-9;
  long mc_samples_per_state = 0;
  double mc_tv_tol = 0.02;
  uint64_t seed = 0;
};

struct BoundReport {
  long checks = 0;
  double worst_upper_slack = 0.0;
  double worst_lower_slack = 0.0;
  double worst_max_upper_slack = 0.0;
  double worst_max_lower_slack = 0.0;
  double worst_marginal_tv = 0.0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

BoundReport check_propositions(const TabularMDP& mdp, const PropCheckOptions& opts = {});

}  // namespace ccap
