#pragma once

#include <cstddef>
#include <vector>

#include "qmms/space.hpp"

namespace qmms {

/// Result of the chain (shortest-path) regularization at exponent beta.
/// sigma is the shortest-path metric built on edge weights d_sym^beta; it is a
/// genuine metric with sigma <= d_sym^beta, and rho = sigma^{1/beta} satisfies
/// a quasi-triangle constant of at most 2^{1/beta}.  distortion is the largest
/// ratio d_sym(x,y)^beta / sigma(x,y) over pairs (>= 1); rho is bi-Lipschitz
/// equivalent to d_sym with constant distortion^{1/beta}.
struct ChainMetricResult {
  double beta = 1.0;
  std::vector<double> sigma;  // n*n row-major, symmetric metric
  std::vector<double> rho;    // sigma^{1/beta}
  double distortion = 1.0;

  double sigma_at(std::size_t i, std::size_t j, std::size_t n) const { return sigma[i * n + j]; }
  double rho_at(std::size_t i, std::size_t j, std::size_t n) const { return rho[i * n + j]; }
};

/// Shortest-path regularization.  The space is symmetrized (max of the two
/// orientations) before chaining, so the result is well-defined for any input.
ChainMetricResult chain_metric(const FiniteQMMSpace& space, double beta);

/// Distortion of chain_metric sampled over a beta grid, with feasibility
/// against a threshold.  feasible_sup is the largest feasible beta in the grid
/// (0 if none), a certified lower bound for the regularization index up to the
/// bi-Lipschitz budget given by the threshold.
struct IndexProfile {
  std::vector<double> betas;
  std::vector<double> distortions;
  std::vector<char> feasible;
  double threshold = 16.0;
  double feasible_sup = 0.0;
};

IndexProfile index_profile(const FiniteQMMSpace& space, const std::vector<double>& betas,
                           double threshold);

/// Default beta grid: 0.1 * 2^{k/8} for k = 0..64.
std::vector<double> default_beta_grid();

}  // namespace qmms
