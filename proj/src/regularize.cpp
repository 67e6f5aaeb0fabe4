#include "qmms/regularize.hpp"

#include <algorithm>
#include <cmath>

namespace qmms {

ChainMetricResult chain_metric(const FiniteQMMSpace& space, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ValidationError::Kind::InvalidParams, "chain_metric: beta must be positive and finite");
  const FiniteQMMSpace sym = symmetrize(space);
  const std::size_t n = sym.size();

  ChainMetricResult result;
  result.beta = beta;
  result.sigma.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) result.sigma[i * n + j] = std::pow(sym.dist(i, j), beta);

  // Floyd-Warshall on the complete graph with edge weights d_sym^beta.
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = result.sigma[i * n + k];
      for (std::size_t j = 0; j < n; ++j) {
        const double via = dik + result.sigma[k * n + j];
        if (via < result.sigma[i * n + j]) result.sigma[i * n + j] = via;
      }
    }

  result.rho.assign(n * n, 0.0);
  double distortion = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        const double s = result.sigma[i * n + j];
        result.rho[i * n + j] = std::pow(s, 1.0 / beta);
        distortion = std::max(distortion, std::pow(sym.dist(i, j), beta) / s);
      }
  result.distortion = distortion;
  return result;
}

IndexProfile index_profile(const FiniteQMMSpace& space, const std::vector<double>& betas,
                           double threshold) {
  if (!(threshold >= 1.0))
    fail(ValidationError::Kind::InvalidParams, "index_profile: threshold must be >= 1");
  IndexProfile profile;
  profile.threshold = threshold;
  profile.betas = betas;
  std::sort(profile.betas.begin(), profile.betas.end());
  for (double beta : profile.betas) {
    const ChainMetricResult r = chain_metric(space, beta);
    profile.distortions.push_back(r.distortion);
    const bool ok = r.distortion <= threshold;
    profile.feasible.push_back(ok ? 1 : 0);
    if (ok) profile.feasible_sup = std::max(profile.feasible_sup, beta);
  }
  return profile;
}

std::vector<double> default_beta_grid() {
  std::vector<double> grid;
  grid.reserve(65);
  for (int k = 0; k <= 64; ++k) grid.push_back(0.1 * std::pow(2.0, k / 8.0));
  return grid;
}

}  // namespace qmms
