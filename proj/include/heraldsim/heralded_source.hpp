#ifndef HERALDSIM_HERALDED_SOURCE_HPP
#define HERALDSIM_HERALDED_SOURCE_HPP

#include <string>
#include <vector>

#include "heraldsim/fock_core.hpp"

namespace heraldsim::source {

// Inputs of the photon-counting statistics.  cutoff.n_max == 0 selects the
// default cap for the given r (64 for r <= 1, 160 above).
struct SourceParams {
  double alpha = 0.0;
  double r = 0.0;
  double eta = 1.0;
  fock::FockCutoff cutoff{0, 1e-8};
  int k_max = 200;
};

void validate(const SourceParams& params);
int default_n_max(double r);
fock::FockCutoff resolved_cutoff(const SourceParams& params);

// Photon-count probabilities p[n] plus whatever probability is not in the
// table (other measurement outcomes and truncation both land there).
struct CountDistribution {
  std::vector<double> p;
  double leakage = 0.0;  // 1 - sum(p)
  double sum() const;
};

// First two moments of a count distribution, kept both ways: raw sums
// sum n^l p[n] over the unnormalized conditional column, and the same
// divided by the conditioning probability.  g2 built from the raw pair
// equals the conditional one divided by herald_prob.
struct HeraldMoments {
  double herald_prob = 0.0;
  double m1_raw = 0.0, m2_raw = 0.0;
  double m1_cond = 0.0, m2_cond = 0.0;
};

HeraldMoments moments(const CountDistribution& dist);

// P(n_a, n_b) = |mu(n_a, n_b)|^2 of the circuit output state.
double joint_probability(int n_a, int n_b, const SourceParams& params);

// p[n] = P(n, 1): photon counts in mode a conditioned on a perfect
// single-photon herald in mode b.
CountDistribution herald_distribution(const SourceParams& params);

// p[n] = P_click(n) = eta sum_k (1-eta)^{k-1} P(n, k): the click/no-click
// detector with efficiency eta.  Reduces exactly to herald_distribution
// at eta = 1.
CountDistribution click_distribution(const SourceParams& params);

// g2(0) = (<n^2> - <n>) / <n>^2 with raw moments of the herald (click)
// column.  At exactly r = 0 the conditional state is coherent and the
// analytic value 1 is returned instead of the singular closed-form sum.
double g2_perfect(const SourceParams& params);
double g2_click(const SourceParams& params);

// ---------------------------------------------------------------------
// Grid sweeps (drives the figure reproductions)
// ---------------------------------------------------------------------

enum class SweepQuantity { p11, g2_perfect, pclick_n, g2_click };

struct GridAxis {
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;
};

std::vector<double> axis_values(const GridAxis& axis);

struct SweepCell {
  double r = 0.0;
  double second = 0.0;  // alpha for perfect-detector sweeps, eta for click sweeps
  double value = 0.0;
  double leakage = 0.0;
  std::string error;  // empty on success
};

// Deterministic row order: outer r, inner second axis.  Cell failures are
// recorded in the error column, never thrown.  click_n selects which
// photon count Pclick_n reports.  threads = 0 means hardware concurrency.
std::vector<SweepCell> sweep_grid(SweepQuantity quantity, const GridAxis& r_axis,
                                  const GridAxis& second_axis, const SourceParams& base,
                                  int click_n = 1, int threads = 0);

}  // namespace heraldsim::source

#endif
