#include "qmms/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qmms {

namespace {

constexpr double kMaxLogMass = 700.0;   // beyond this exp() overflows
constexpr double kMinLogArg = -650.0;    // below this the density is treated as out of range

double get_param(const std::map<std::string, double>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end())
    fail(ValidationError::Kind::InvalidParams, "missing generator parameter '" + key + "'");
  return it->second;
}

double get_param_or(const std::map<std::string, double>& params, const std::string& key,
                    double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

int get_int_param(const std::map<std::string, double>& params, const std::string& key) {
  const double v = get_param(params, key);
  const int n = static_cast<int>(std::llround(v));
  if (std::abs(v - n) > 1e-9)
    fail(ValidationError::Kind::InvalidParams, "parameter '" + key + "' must be an integer");
  return n;
}

}  // namespace

double Density1D::log_density(double x) const {
  switch (family) {
    case Family::exp_growth: return std::pow(x, beta);
    case Family::gauss_decay: return -std::pow(x, beta);
    case Family::inv_exp: return -std::pow(x, -beta);
  }
  return 0.0;
}

double Density1D::support_start() const {
  if (family == Family::inv_exp) {
    // Start where the exponent -1/x^beta is representable: 1/x^beta <= 650.
    return std::pow(1.0 / 650.0, 1.0 / beta);
  }
  return 0.0;
}

Density1D Density1D::exp_growth_density(double beta) {
  if (!(beta > 0.0)) fail(ValidationError::Kind::InvalidParams, "density beta must be positive");
  return {Family::exp_growth, beta};
}
Density1D Density1D::gauss_decay_density(double beta) {
  if (!(beta > 0.0)) fail(ValidationError::Kind::InvalidParams, "density beta must be positive");
  return {Family::gauss_decay, beta};
}
Density1D Density1D::inv_exp_density(double beta) {
  if (!(beta > 0.0)) fail(ValidationError::Kind::InvalidParams, "density beta must be positive");
  return {Family::inv_exp, beta};
}

LineSpace make_line_space(std::vector<double> xs, std::vector<double> masses) {
  if (xs.size() != masses.size() || xs.empty())
    fail(ValidationError::Kind::BadShape, "line space: coordinate/mass size mismatch");
  if (!std::is_sorted(xs.begin(), xs.end()))
    fail(ValidationError::Kind::BadShape, "line space: coordinates must be sorted");
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m))
      fail(ValidationError::Kind::NonpositiveWeight, "line space: masses must be positive and finite");
  LineSpace line;
  line.xs = std::move(xs);
  line.masses = std::move(masses);
  line.prefix.assign(line.xs.size() + 1, 0.0);
  for (std::size_t i = 0; i < line.masses.size(); ++i)
    line.prefix[i + 1] = line.prefix[i] + line.masses[i];
  line.suffix.assign(line.xs.size() + 1, 0.0);
  for (std::size_t i = line.masses.size(); i-- > 0;)
    line.suffix[i] = line.suffix[i + 1] + line.masses[i];
  return line;
}

double LineSpace::mass_in(double lo, double hi) const {
  const auto first = std::upper_bound(xs.begin(), xs.end(), lo);   // first > lo
  const auto last = std::lower_bound(xs.begin(), xs.end(), hi);    // first >= hi
  if (last <= first) return 0.0;
  const std::size_t a = static_cast<std::size_t>(first - xs.begin());
  const std::size_t b = static_cast<std::size_t>(last - xs.begin());
  // Anchor the difference at the smaller running sum: far out in a decaying
  // tail the prefix values agree to the last bit and their difference cancels,
  // while the suffix values are tiny and keep full relative precision (and
  // symmetrically for a growing density).
  const double m = prefix[b] <= suffix[a] ? prefix[b] - prefix[a] : suffix[a] - suffix[b];
  if (m > 0.0) return m;
  double direct = 0.0;
  for (std::size_t i = a; i < b; ++i) direct += masses[i];
  return direct;
}

LineSpace discretize_density(const Density1D& density, double t_end, double res) {
  if (!(res > 0.0)) fail(ValidationError::Kind::InvalidParams, "discretize_density: res must be positive");
  const double start = density.support_start();
  if (!(t_end > start))
    fail(ValidationError::Kind::InvalidParams, "discretize_density: t_end must exceed the support start");
  const double h = 1.0 / res;
  const std::size_t n = static_cast<std::size_t>(std::floor((t_end - start) * res));
  if (n == 0) fail(ValidationError::Kind::InvalidParams, "discretize_density: empty grid");
  std::vector<double> xs, masses;
  xs.reserve(n);
  masses.reserve(n);
  const double log_h = std::log(h);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = start + (static_cast<double>(i) + 0.5) * h;
    const double lm = density.log_density(x) + log_h;
    if (lm > kMaxLogMass)
      fail(ValidationError::Kind::InvalidParams, "discretize_density: density overflows double range");
    const double m = std::exp(lm);
    if (m > 0.0) {
      xs.push_back(x);
      masses.push_back(m);
    }
  }
  if (xs.empty())
    fail(ValidationError::Kind::InvalidParams, "discretize_density: all atom masses underflow");
  return make_line_space(std::move(xs), std::move(masses));
}

double line_doubling_constant(const LineSpace& line, double c, double delta) {
  if (!(c >= 1.0) || !(delta > 0.0))
    fail(ValidationError::Kind::InvalidParams, "line_doubling_constant: need c >= 1 and delta > 0");
  double best = 1.0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const double small = line.ball_mass_at(line.xs[i], delta);
    const double big = line.ball_mass_at(line.xs[i], c * delta);
    best = std::max(best, big / small);
  }
  return best;
}

double line_h_value(const LineSpace& line, double r) {
  if (!(r > 0.0)) fail(ValidationError::Kind::InvalidParams, "line_h_value: r must be positive");
  double h = kInf;
  for (std::size_t i = 0; i < line.size(); ++i)
    h = std::min(h, line.ball_mass_at(line.xs[i], r));
  return h;
}

FiniteQMMSpace line_to_space(const LineSpace& line) {
  const std::size_t n = line.size();
  if (n > 3000)
    fail(ValidationError::Kind::InvalidParams, "line_to_space: too many atoms for a dense matrix");
  std::vector<double> d(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d[i * n + j] = std::abs(line.xs[i] - line.xs[j]);
  return make_space(std::move(d), line.masses);
}

double density_doubling_bound(Density1D::Family family, double beta, double c, double delta) {
  switch (family) {
    case Density1D::Family::exp_growth:
      return 2.0 * c * std::exp(std::pow(c * delta, beta));
    case Density1D::Family::gauss_decay:
      return 2.0 * c * std::exp(std::pow((c + 1.0) * delta, beta));
    case Density1D::Family::inv_exp:
      return 4.0 * c * std::exp(std::pow(2.0 / delta, beta));
  }
  return kInf;
}

ReferenceBound density_doubling_reference(Density1D::Family family) {
  switch (family) {
    case Density1D::Family::exp_growth:
      return {"doubling_upper", "2*c*exp((c*delta)^beta)",
              "upper bound for the doubling constant at factor c and scale delta"};
    case Density1D::Family::gauss_decay:
      return {"doubling_upper", "2*c*exp(((c+1)*delta)^beta)",
              "upper bound for the doubling constant at factor c and scale delta"};
    case Density1D::Family::inv_exp:
      return {"doubling_upper", "4*c*exp((2/delta)^beta)",
              "upper bound for the doubling constant at factor c and scale delta"};
  }
  return {};
}

DensityCurve density_integrability_curve(const Density1D& density, double r, double res,
                                         double tol, double t0, int max_doublings) {
  if (!(r > 0.0) || !(res > 0.0) || !(tol > 0.0) || !(t0 > 0.0) || max_doublings < 1)
    fail(ValidationError::Kind::InvalidParams, "density_integrability_curve: bad parameters");
  DensityCurve curve;
  curve.r = r;
  curve.tol = tol;
  curve.verdict = "inconclusive";
  double prev_value = 0.0;
  double prev_increment = -1.0;
  for (int k = 0; k <= max_doublings; ++k) {
    const double t_k = t0 * std::pow(2.0, k);
    // Overflow guard for growing densities: stop before atoms become unrepresentable.
    if (density.log_density(t_k + r) + std::log(1.0 / res) > kMaxLogMass) {
      curve.range_exhausted = true;
      break;
    }
    const LineSpace line = discretize_density(density, t_k + r, res);
    double value = 0.0;
    for (std::size_t i = 0; i < line.size() && line.xs[i] <= t_k; ++i)
      value += line.masses[i] / line.ball_mass_at(line.xs[i], r);
    curve.truncations.push_back(t_k);
    curve.values.push_back(value);
    const double increment = value - prev_value;
    curve.increments.push_back(increment);
    if (k >= 1) {
      if (increment < tol) {
        curve.verdict = "integrable";
        break;
      }
      if (k >= 2 && increment > 10.0 * tol && increment >= 0.9 * prev_increment) {
        curve.verdict = "divergent";
        break;
      }
    }
    prev_value = value;
    prev_increment = increment;
  }
  return curve;
}

CombDescription build_comb(int depth, int branching) {
  if (depth < 1 || branching < 1)
    fail(ValidationError::Kind::InvalidParams, "build_comb: depth and branching must be >= 1");
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  if (branching > 10)
    fail(ValidationError::Kind::InvalidParams, "build_comb: branching larger than supported");
  long long count = 0, pow_b = 1;
  for (int l = 1; l <= depth; ++l) {
    pow_b *= branching;
    count += pow_b;
    if (count > 5000)
      fail(ValidationError::Kind::InvalidParams, "build_comb: too many teeth");
  }
  CombDescription comb;
  comb.depth = depth;
  comb.branching = branching;
  for (int j = 1; j <= branching; ++j)
    comb.tooth_values.push_back(static_cast<double>(j) / (4.0 * (branching + 1)));

  // Enumerate all tuples of length 1..depth, then sort by prime code so that a
  // tooth's ancestors (prefix tuples, strictly smaller codes) come first.
  std::vector<CombTooth> teeth;
  std::vector<int> tuple;
  auto emit = [&](auto&& self) -> void {
    if (!tuple.empty()) {
      CombTooth tooth;
      tooth.level = static_cast<int>(tuple.size());
      tooth.tuple = tuple;
      tooth.code = 1;
      for (int j : tuple) tooth.code *= primes[j - 1];
      tooth.length = std::ldexp(1.0, -tooth.level - 2);
      for (std::size_t i = 0; i < tuple.size(); ++i)
        tooth.coords.push_back(comb.tooth_values[tuple[i] - 1] * std::ldexp(1.0, -static_cast<int>(i)));
      teeth.push_back(std::move(tooth));
    }
    if (static_cast<int>(tuple.size()) == depth) return;
    for (int j = 1; j <= branching; ++j) {
      tuple.push_back(j);
      self(self);
      tuple.pop_back();
    }
  };
  emit(emit);
  std::sort(teeth.begin(), teeth.end(), [](const CombTooth& a, const CombTooth& b) {
    if (a.code != b.code) return a.code < b.code;
    return a.tuple < b.tuple;
  });
  for (std::size_t i = 0; i < teeth.size(); ++i) teeth[i].k_index = static_cast<int>(i) + 1;
  comb.teeth = std::move(teeth);
  return comb;
}

double comb_distance(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::max(a.size(), b.size());
  auto at = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? v[i] : 0.0;
  };
  std::size_t kappa = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (at(a, i) != at(b, i)) {
      kappa = i;
      break;
    }
  }
  if (kappa == n) return 0.0;
  double d = std::abs(at(a, kappa) - at(b, kappa));
  for (std::size_t i = kappa + 1; i < n; ++i) d += at(a, i) + at(b, i);
  return d;
}

namespace {

struct CombAtom {
  std::vector<double> coords;
  double log_mass;
  int group;  // 0 for the spine, k for tooth k
};

std::vector<CombAtom> comb_atoms(const CombDescription& comb, int resolution) {
  std::vector<CombAtom> atoms;
  const int n_spine = std::max(2, static_cast<int>(std::lround(resolution * 0.25)));
  const double h0 = 0.25 / n_spine;
  for (int i = 0; i < n_spine; ++i) {
    const double t = (i + 0.5) * h0;
    atoms.push_back({{t}, -t * t + std::log(h0), 0});
  }
  for (const CombTooth& tooth : comb.teeth) {
    const int n_t = std::max(2, static_cast<int>(std::lround(resolution * tooth.length)));
    const double h = tooth.length / n_t;
    for (int i = 0; i < n_t; ++i) {
      const double t = (i + 0.5) * h;
      std::vector<double> coords = tooth.coords;
      coords.push_back(t);
      const double y = t + tooth.k_index;
      atoms.push_back({std::move(coords), -y * y + std::log(h), tooth.k_index});
    }
  }
  return atoms;
}

}  // namespace

CombExperiment comb_integrability_experiment(int depth, int branching, int resolution, double r) {
  if (!(r > 0.0 && r < 0.25))
    fail(ValidationError::Kind::InvalidParams, "comb experiment: r must lie in (0, 1/4)");
  if (resolution < 8)
    fail(ValidationError::Kind::InvalidParams, "comb experiment: resolution must be at least 8");
  const CombDescription comb = build_comb(depth, branching);
  const std::vector<CombAtom> atoms = comb_atoms(comb, resolution);
  const std::size_t n = atoms.size();

  CombExperiment exp;
  exp.depth = depth;
  exp.branching = branching;
  exp.resolution = resolution;
  exp.r = r;
  exp.j0_bound = std::exp(1.0 / 16.0) / r;
  exp.tooth_terms.assign(comb.teeth.size(), 0.0);
  exp.tooth_bounds.resize(comb.teeth.size());
  for (const CombTooth& tooth : comb.teeth) {
    const double k = tooth.k_index;
    exp.tooth_bounds[tooth.k_index - 1] =
        (8.0 / (r * r)) * std::exp(r * r / 16.0) *
        (std::exp(-r * k / 2.0) - std::exp(-r * (k + tooth.length) / 2.0));
  }

  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    scratch.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (comb_distance(atoms[i].coords, atoms[j].coords) < r)
        scratch.push_back(atoms[j].log_mass);
    const double log_ball = log_sum_exp(scratch);
    const double term = std::exp(atoms[i].log_mass - log_ball);
    if (atoms[i].group == 0)
      exp.j0_term += term;
    else
      exp.tooth_terms[atoms[i].group - 1] += term;
  }

  exp.j0_within = exp.j0_term <= 1.05 * exp.j0_bound;
  double running = exp.j0_term;
  for (double t : exp.tooth_terms) {
    running += t;
    exp.partial_sums.push_back(running);
  }
  exp.total = running;
  const std::size_t m = exp.tooth_terms.size();
  if (m >= 1) {
    const std::size_t tail_len = std::min<std::size_t>(5, m);
    double worst_tail = 0.0;
    for (std::size_t i = m - tail_len; i < m; ++i)
      worst_tail = std::max(worst_tail, exp.tooth_terms[i]);
    exp.cauchy = worst_tail <= 0.05 * exp.total;
  }
  return exp;
}

LineSpace make_dyadic_tail_line(int bands, double res) {
  if (bands < 1 || bands > 5)
    fail(ValidationError::Kind::InvalidParams,
         "dyadic tail: bands must lie in 1..5 (deeper bands underflow)");
  if (!(res > 0.0)) fail(ValidationError::Kind::InvalidParams, "dyadic tail: res must be positive");
  std::vector<double> xs, masses;
  // Unit-density block on [0, 1).
  const int n0 = std::max(2, static_cast<int>(std::lround(res)));
  const double h0 = 1.0 / n0;
  for (int i = 0; i < n0; ++i) {
    xs.push_back((i + 0.5) * h0);
    masses.push_back(h0);
  }
  // Exponential bands [2^k, 2^{k+1}) with density a_k * exp(2^k x - 2*4^k),
  // normalized so each band carries mass exactly 2^{-k}.
  for (int k = 0; k < bands; ++k) {
    const double pk = std::ldexp(1.0, k);    // 2^k
    const double qk = pk * pk;               // 4^k
    const double log_ak = -std::log1p(-std::exp(-qk));
    const int nk = std::max(2, static_cast<int>(std::lround(res * pk)));
    const double hk = pk / nk;
    for (int i = 0; i < nk; ++i) {
      const double x = pk + (i + 0.5) * hk;
      const double lm = log_ak + (pk * x - 2.0 * qk) + std::log(hk);
      xs.push_back(x);
      masses.push_back(std::exp(lm));
    }
  }
  return make_line_space(std::move(xs), std::move(masses));
}

FiniteQMMSpace make_dyadic_tail_space(int bands, double res) {
  return line_to_space(make_dyadic_tail_line(bands, res));
}

namespace {

GeneratedSpace make_grid(const std::map<std::string, double>& params, double s) {
  const int n = get_int_param(params, "n");
  const double spacing = get_param_or(params, "spacing", 1.0);
  if (n < 2 || !(spacing > 0.0))
    fail(ValidationError::Kind::InvalidParams, "grid: need n >= 2 and spacing > 0");
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) d[static_cast<std::size_t>(i) * n + j] = std::pow(spacing * std::abs(i - j), s);
  GeneratedSpace out;
  out.space = make_space(std::move(d), std::vector<double>(n, spacing));
  out.card.generator = s == 1.0 ? "euclidean_grid" : "snowflake_grid";
  out.card.params = params;
  out.card.bounds.push_back({"quasi_triangle_constant", s == 1.0 ? "2" : "2^s",
                             "exact quasi-triangle constant for three or more collinear points"});
  return out;
}

GeneratedSpace make_density_space(const std::string& name, Density1D::Family family,
                                  const std::map<std::string, double>& params) {
  const double beta = get_param(params, "beta");
  const double t_end = get_param_or(params, "T", 5.0);
  const double res = get_param_or(params, "res", 200.0);
  Density1D density{family, beta};
  if (!(beta > 0.0)) fail(ValidationError::Kind::InvalidParams, "density beta must be positive");
  GeneratedSpace out;
  out.space = line_to_space(discretize_density(density, t_end, res));
  out.card.generator = name;
  out.card.params = params;
  out.card.bounds.push_back(density_doubling_reference(family));
  if (family != Density1D::Family::inv_exp)
    out.card.bounds.push_back({"integrability_dichotomy", "finite iff beta > 1",
                               "integrability functional verdict as a function of beta"});
  return out;
}

}  // namespace

GeneratedSpace generate(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "euclidean_grid") return make_grid(params, 1.0);
  if (name == "snowflake_grid") {
    const double s = get_param(params, "s");
    if (!(s > 0.0)) fail(ValidationError::Kind::InvalidParams, "snowflake_grid: s must be positive");
    return make_grid(params, s);
  }
  if (name == "discrete_N") {
    const int n = get_int_param(params, "n");
    if (n < 2 || n > 1000) fail(ValidationError::Kind::InvalidParams, "discrete_N: need 2 <= n <= 1000");
    std::vector<double> d(static_cast<std::size_t>(n) * n, 1.0);
    for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i) * n + i] = 0.0;
    std::vector<double> mu(n);
    for (int i = 0; i < n; ++i) mu[i] = std::ldexp(1.0, -(i + 1));  // point i+1 carries 2^{-(i+1)}
    GeneratedSpace out;
    out.space = make_space(std::move(d), std::move(mu));
    out.card.generator = name;
    out.card.params = params;
    out.card.bounds.push_back({"doubling_small_scales", "1",
                               "doubling constant at factor c equals 1 for delta <= 1/c"});
    out.card.bounds.push_back({"h_at_half", "2^-n", "h(0.5) equals the smallest atom weight"});
    return out;
  }
  if (name == "exp_density")
    return make_density_space(name, Density1D::Family::exp_growth, params);
  if (name == "gauss_density")
    return make_density_space(name, Density1D::Family::gauss_decay, params);
  if (name == "inv_exp_density")
    return make_density_space(name, Density1D::Family::inv_exp, params);
  if (name == "infinite_comb") {
    const int depth = get_int_param(params, "depth");
    const int branching = get_int_param(params, "branching");
    const int res = static_cast<int>(get_param_or(params, "res", 64.0));
    const CombDescription comb = build_comb(depth, branching);
    if (!comb.teeth.empty() && comb.teeth.back().k_index > 23)
      fail(ValidationError::Kind::InvalidParams,
           "infinite_comb: too many teeth for dense weights; use the integrability experiment");
    const std::vector<CombAtom> atoms = comb_atoms(comb, res);
    const std::size_t n = atoms.size();
    if (n > 3000) fail(ValidationError::Kind::InvalidParams, "infinite_comb: too many atoms");
    std::vector<double> d(n * n, 0.0);
    std::vector<double> mu(n);
    for (std::size_t i = 0; i < n; ++i) {
      mu[i] = std::exp(atoms[i].log_mass);
      for (std::size_t j = 0; j < n; ++j)
        d[i * n + j] = comb_distance(atoms[i].coords, atoms[j].coords);
    }
    GeneratedSpace out;
    out.space = make_space(std::move(d), std::move(mu));
    out.card.generator = name;
    out.card.params = params;
    out.card.bounds.push_back({"symmetry_constant", "1", "the comb distance is symmetric"});
    out.card.bounds.push_back({"quasi_triangle_constant", "<= 2", "the comb distance is a metric"});
    return out;
  }
  if (name == "ultrametric_cantor") {
    const int depth = get_int_param(params, "depth");
    const double ratio = get_param_or(params, "ratio", 0.5);
    if (depth < 1 || depth > 11 || !(ratio > 0.0 && ratio < 1.0))
      fail(ValidationError::Kind::InvalidParams, "ultrametric_cantor: need 1 <= depth <= 11 and ratio in (0,1)");
    const std::size_t n = static_cast<std::size_t>(1) << depth;
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          // Distance ratio^(length of the common binary prefix of depth-bit words).
          int common = 0;
          for (int b = depth - 1; b >= 0; --b) {
            if (((i >> b) & 1u) == ((j >> b) & 1u)) ++common;
            else break;
          }
          d[i * n + j] = std::pow(ratio, common);
        }
    GeneratedSpace out;
    out.space = make_space(std::move(d), std::vector<double>(n, 1.0 / static_cast<double>(n)));
    out.card.generator = name;
    out.card.params = params;
    out.card.bounds.push_back({"quasi_triangle_constant", "1", "ultrametric: strong triangle inequality"});
    return out;
  }
  fail(ValidationError::Kind::InvalidParams, "unknown generator '" + name + "'");
}

std::vector<std::string> generator_names() {
  return {"euclidean_grid", "snowflake_grid", "discrete_N",     "exp_density",
          "gauss_density",  "inv_exp_density", "infinite_comb", "ultrametric_cantor"};
}

}  // namespace qmms
