#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmms/compactness.hpp"
#include "qmms/examples.hpp"
#include "qmms/geometry.hpp"
#include "qmms/io.hpp"
#include "qmms/norms.hpp"
#include "qmms/oracle.hpp"
#include "qmms/regularize.hpp"
#include "qmms/space.hpp"

namespace {

using qmms::io::json;

struct Ctx {
  unsigned long long seed = 0;
  int jobs = 1;
  std::string out_dir = ".";
  double tol = 1e-8;
  std::map<std::string, double> timings_ms;
};

std::string out_path(const Ctx& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out_dir);
  return (std::filesystem::path(ctx.out_dir) / name).string();
}

class Timer {
 public:
  Timer(Ctx& ctx, std::string key) : ctx_(ctx), key_(std::move(key)) {
    start_ = std::chrono::steady_clock::now();
  }
  ~Timer() {
    const auto end = std::chrono::steady_clock::now();
    ctx_.timings_ms[key_] =
        std::chrono::duration<double, std::milli>(end - start_).count();
  }

 private:
  Ctx& ctx_;
  std::string key_;
  std::chrono::steady_clock::time_point start_;
};

void finish(Ctx& ctx, const std::string& command, const json& params) {
  qmms::io::write_manifest(out_path(ctx, "manifest.json"), command, ctx.seed, params,
                           ctx.timings_ms);
}

qmms::FiniteQMMSpace load_space(const std::string& path) {
  return qmms::io::space_from_json(qmms::io::read_json(path));
}

std::map<std::string, double> parse_params(const std::vector<std::string>& kvs) {
  std::map<std::string, double> params;
  for (const std::string& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--param", "expected key=value, got '" + kv + "'");
    params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return params;
}

qmms::SolveOptions solve_options(const Ctx& ctx) {
  qmms::SolveOptions opts;
  opts.tolerance = ctx.tol;
  opts.seed = ctx.seed;
  return opts;
}

json norm_result_json(const qmms::NormResult& r) {
  json j;
  j["seminorm"] = r.seminorm;
  j["lp"] = r.lp;
  j["full_norm"] = r.full_norm;
  j["solver"] = {{"status", r.solver.status},
                 {"iterations", r.solver.iterations},
                 {"primal_residual", r.solver.primal_residual},
                 {"certified", r.solver.certified},
                 {"certified_gap", r.solver.certified_gap}};
  j["gradient"] = {{"levels", r.gradient.levels}, {"values", r.gradient.values}};
  return j;
}

int run_space_gen(Ctx& ctx, const std::string& name, const std::vector<std::string>& kvs,
                  const std::string& file_name) {
  const auto params = parse_params(kvs);
  qmms::GeneratedSpace gen;
  {
    Timer t(ctx, "generate");
    gen = qmms::generate(name, params);
  }
  qmms::io::write_json(out_path(ctx, file_name), qmms::io::space_to_json(gen.space, &gen.card));
  json jp;
  jp["name"] = name;
  jp["params"] = params;
  finish(ctx, "space gen", jp);
  return 0;
}

int run_space_validate(Ctx& ctx, const std::string& in) {
  const qmms::FiniteQMMSpace space = load_space(in);
  json j;
  j["n"] = space.size();
  j["total_mass"] = space.total_mass();
  j["diameter"] = space.diameter();
  j["quasi_triangle_constant"] = space.quasi_triangle_constant();
  j["symmetry_constant"] = space.symmetry_constant();
  qmms::io::write_json(out_path(ctx, "validate.json"), j);
  finish(ctx, "space validate", {{"in", in}});
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerics laboratory for quasi-metric measure spaces"};
  app.require_subcommand(1);

  Ctx ctx;
  if (const char* env = std::getenv("QMMS_SEED")) ctx.seed = std::strtoull(env, nullptr, 10);
  app.add_option("--seed", ctx.seed, "seed for every randomized routine");
  app.add_option("--jobs", ctx.jobs, "worker count hint");
  app.add_option("--out", ctx.out_dir, "output directory");
  app.add_option("--tol", ctx.tol, "solver tolerance");

  // ---- space ----
  auto* space_cmd = app.add_subcommand("space", "generate and validate spaces");
  space_cmd->require_subcommand(1);
  auto* gen_cmd = space_cmd->add_subcommand("gen", "generate a named space");
  std::string gen_name, gen_file = "space.json";
  std::vector<std::string> gen_params;
  gen_cmd->add_option("--name", gen_name, "generator name")->required();
  gen_cmd->add_option("--param", gen_params, "key=value generator parameter");
  gen_cmd->add_option("--file", gen_file, "output file name");
  auto* validate_cmd = space_cmd->add_subcommand("validate", "validate a space file");
  std::string validate_in;
  validate_cmd->add_option("--in", validate_in, "space JSON")->required();

  // ---- diag ----
  auto* diag_cmd = app.add_subcommand("diag", "geometric and measure diagnostics");
  diag_cmd->require_subcommand(1);
  std::string diag_in;
  diag_cmd->add_option("--in", diag_in, "space JSON")->required();

  auto* net_cmd = diag_cmd->add_subcommand("net", "separated sets and covering profile");
  std::vector<double> net_eps;
  net_cmd->add_option("--eps", net_eps, "scales")->required();

  auto* doubling_cmd = diag_cmd->add_subcommand("doubling", "doubling constants");
  double doubling_c = 2.0;
  std::vector<double> doubling_delta;
  bool doubling_sup_flag = false;
  doubling_cmd->add_option("--c", doubling_c, "dilation factor");
  doubling_cmd->add_option("--delta", doubling_delta, "scales");
  doubling_cmd->add_flag("--sup", doubling_sup_flag, "supremum over all scales");

  auto* h_cmd = diag_cmd->add_subcommand("h", "smallest ball mass profile");
  std::vector<double> h_r;
  h_cmd->add_option("--r", h_r, "radii")->required();

  auto* integ_cmd = diag_cmd->add_subcommand("integrability", "ball-mass integral");
  double integ_r = 1.0;
  integ_cmd->add_option("--r", integ_r, "radius")->required();

  auto* ahlfors_cmd =
      diag_cmd->add_subcommand("ahlfors", "lower Ahlfors fit and doubling dimension");
  double ahlfors_s = 1.0;
  std::vector<double> ahlfors_radii;
  ahlfors_cmd->add_option("--s", ahlfors_s, "candidate dimension");
  ahlfors_cmd->add_option("--radii", ahlfors_radii, "radii grid (defaults to dyadic scales)");

  auto* inf_cmd = diag_cmd->add_subcommand("infinity", "doubling at infinity");
  std::size_t inf_x0 = 0;
  std::vector<double> inf_radii;
  inf_cmd->add_option("--x0", inf_x0, "base point index");
  inf_cmd->add_option("--radii", inf_radii, "radii grid")->required();

  auto* index_cmd = diag_cmd->add_subcommand("index", "chain-metric distortion profile");
  double index_threshold = 4.0;
  index_cmd->add_option("--threshold", index_threshold, "distortion threshold");

  // ---- norm ----
  auto* norm_cmd = app.add_subcommand("norm", "minimal-gradient norms");
  std::string norm_in, norm_fn, norm_kind = "sobolev";
  double norm_alpha = 1.0, norm_p = 2.0, norm_q = -1.0;
  norm_cmd->add_option("--in", norm_in, "space JSON")->required();
  norm_cmd->add_option("--fn", norm_fn, "function JSON")->required();
  norm_cmd->add_option("--kind", norm_kind, "sobolev | besov | tl");
  norm_cmd->add_option("--alpha", norm_alpha, "smoothness exponent")->required();
  norm_cmd->add_option("--p", norm_p, "integrability exponent")->required();
  norm_cmd->add_option("--q", norm_q, "fine exponent (omit or negative for inf)");

  // ---- bump ----
  auto* bump_cmd = app.add_subcommand("bump", "Holder bump between two sets");
  std::string bump_in;
  std::vector<std::size_t> bump_e0, bump_e1;
  double bump_alpha = 1.0, bump_beta = 1.0, bump_p = 2.0, bump_q = -1.0;
  bump_cmd->add_option("--in", bump_in, "space JSON")->required();
  bump_cmd->add_option("--e0", bump_e0, "indices of the zero set")->required();
  bump_cmd->add_option("--e1", bump_e1, "indices of the one set")->required();
  bump_cmd->add_option("--alpha", bump_alpha, "target exponent");
  bump_cmd->add_option("--beta", bump_beta, "Holder exponent");
  bump_cmd->add_option("--p", bump_p, "integrability exponent");
  bump_cmd->add_option("--q", bump_q, "fine exponent (negative for inf)");

  // ---- certify ----
  auto* certify_cmd = app.add_subcommand("certify", "total boundedness certificate");
  std::string certify_in, certify_family;
  double certify_alpha = 1.0, certify_p = 2.0, certify_eps = 0.1;
  std::size_t certify_budget = 4096;
  certify_cmd->add_option("--in", certify_in, "space JSON")->required();
  certify_cmd->add_option("--family", certify_family, "family JSON")->required();
  certify_cmd->add_option("--alpha", certify_alpha, "smoothness exponent");
  certify_cmd->add_option("--p", certify_p, "integrability exponent");
  certify_cmd->add_option("--eps", certify_eps, "target net scale")->required();
  certify_cmd->add_option("--budget", certify_budget, "cell budget");

  // ---- experiment ----
  auto* exp_cmd = app.add_subcommand("experiment", "named reproducible experiments");
  std::string exp_name;
  exp_cmd->add_option("--name", exp_name,
                      "discrete-doubling | density-doubling | density-integrability | "
                      "comb-integrability | separated-witness | tail-witness | interpolation")
      ->required();
  std::string exp_in;
  exp_cmd->add_option("--in", exp_in, "space JSON (witness experiments)");
  std::vector<double> exp_betas{0.25, 0.5, 1.0}, exp_cs{2.0, 4.0}, exp_deltas{0.1, 0.5, 1.0};
  exp_cmd->add_option("--beta", exp_betas, "density exponents");
  exp_cmd->add_option("--c", exp_cs, "dilation factors");
  exp_cmd->add_option("--delta", exp_deltas, "scales");
  double exp_res = 10000.0, exp_r = 0.1, exp_alpha = 0.5, exp_p = 2.0, exp_wdelta = 0.4;
  int exp_depth = 4, exp_branching = 2, exp_n = 20, exp_count = 1000;
  exp_cmd->add_option("--res", exp_res, "discretization resolution");
  exp_cmd->add_option("--r", exp_r, "radius");
  exp_cmd->add_option("--alpha", exp_alpha, "smoothness exponent");
  exp_cmd->add_option("--p", exp_p, "integrability exponent");
  exp_cmd->add_option("--wdelta", exp_wdelta, "witness scale");
  exp_cmd->add_option("--depth", exp_depth, "comb depth");
  exp_cmd->add_option("--branching", exp_branching, "comb branching");
  exp_cmd->add_option("--n", exp_n, "point count");
  exp_cmd->add_option("--count", exp_count, "trial count");
  std::vector<double> exp_radii{1.0, 2.0, 4.0};
  exp_cmd->add_option("--radii", exp_radii, "tail radii");
  bool exp_solve = false;
  exp_cmd->add_flag("--solve", exp_solve, "also solve witness norms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    // ---- space ----
    if (gen_cmd->parsed()) return run_space_gen(ctx, gen_name, gen_params, gen_file);
    if (validate_cmd->parsed()) return run_space_validate(ctx, validate_in);

    if (diag_cmd->parsed()) {
      const qmms::FiniteQMMSpace space = load_space(diag_in);
      if (net_cmd->parsed()) {
        Timer t(ctx, "net");
        const qmms::CoveringProfile profile = qmms::covering_profile(space, net_eps);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < profile.epsilons.size(); ++i) {
          const qmms::NetResult net = qmms::greedy_separated(space, profile.epsilons[i]);
          rows.push_back({profile.epsilons[i], static_cast<double>(net.centers.size()),
                          static_cast<double>(profile.sizes[i])});
        }
        qmms::io::write_csv(out_path(ctx, "net.csv"),
                            {"eps", "greedy_separated", "covering"}, rows);
      } else if (doubling_cmd->parsed()) {
        Timer t(ctx, "doubling");
        std::vector<std::vector<double>> rows;
        if (doubling_sup_flag || doubling_delta.empty()) {
          rows.push_back({0.0, qmms::doubling_sup(space, doubling_c)});
        } else {
          for (double d : doubling_delta)
            rows.push_back({d, qmms::doubling_constant(space, doubling_c, d)});
        }
        qmms::io::write_csv(out_path(ctx, "doubling.csv"), {"delta", "ratio"}, rows);
      } else if (h_cmd->parsed()) {
        Timer t(ctx, "h");
        std::vector<std::vector<double>> rows;
        for (double r : h_r) rows.push_back({r, qmms::h_value(space, r)});
        qmms::io::write_csv(out_path(ctx, "h.csv"), {"r", "h"}, rows);
      } else if (integ_cmd->parsed()) {
        Timer t(ctx, "integrability");
        const qmms::IntegrabilityReport rep = qmms::integrability_functional(space, integ_r);
        qmms::io::write_json(out_path(ctx, "integrability.json"),
                             {{"r", rep.r},
                              {"value", rep.value},
                              {"upper_bound", rep.upper_bound},
                              {"within_bound", rep.within_bound}});
      } else if (inf_cmd->parsed()) {
        Timer t(ctx, "infinity");
        const qmms::AtInfinityResult res = qmms::doubling_at_infinity(space, inf_x0, inf_radii);
        qmms::io::write_json(out_path(ctx, "infinity.json"),
                             {{"x0", res.x0},
                              {"radii", res.radii},
                              {"ratios", res.ratios},
                              {"liminf_estimate", res.liminf_estimate},
                              {"monotone_growth", res.monotone_growth}});
      } else if (index_cmd->parsed()) {
        Timer t(ctx, "index");
        const qmms::IndexProfile profile =
            qmms::index_profile(space, qmms::default_beta_grid(), index_threshold);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < profile.betas.size(); ++i)
          rows.push_back({profile.betas[i], profile.distortions[i],
                          profile.feasible[i] ? 1.0 : 0.0});
        qmms::io::write_csv(out_path(ctx, "index.csv"), {"beta", "distortion", "feasible"},
                            rows);
        qmms::io::write_json(out_path(ctx, "index.json"),
                             {{"threshold", profile.threshold},
                              {"feasible_sup", profile.feasible_sup}});
      } else {  // ahlfors
        Timer t(ctx, "ahlfors");
        if (ahlfors_radii.empty()) {
          double r = space.diameter();
          for (int k = 0; k < 8 && r > space.min_positive_dist() / 2.0; ++k, r /= 2.0)
            ahlfors_radii.push_back(r);
        }
        const qmms::AhlforsFit fit = qmms::ahlfors_lower_fit(space, ahlfors_s, ahlfors_radii);
        qmms::io::write_json(out_path(ctx, "ahlfors.json"),
                             {{"s", fit.s},
                              {"b", fit.b},
                              {"c_mu", fit.c_mu},
                              {"s_doubling", fit.s_doubling}});
      }
      finish(ctx, "diag", {{"in", diag_in}});
      return 0;
    }

    if (norm_cmd->parsed()) {
      const qmms::FiniteQMMSpace space = load_space(norm_in);
      const std::vector<double> u =
          qmms::io::function_from_json(qmms::io::read_json(norm_fn));
      qmms::NormProblem problem;
      problem.alpha = norm_alpha;
      problem.p = norm_p;
      problem.q = norm_q < 0.0 ? qmms::kInf : norm_q;
      if (norm_kind == "sobolev")
        problem.kind = qmms::NormKind::sobolev;
      else if (norm_kind == "besov")
        problem.kind = qmms::NormKind::besov;
      else if (norm_kind == "tl")
        problem.kind = qmms::NormKind::triebel_lizorkin;
      else
        throw CLI::ValidationError("--kind", "expected sobolev, besov, or tl");
      qmms::NormResult result;
      {
        Timer t(ctx, "norm");
        result = qmms::minimal_norm(space, u, problem, solve_options(ctx));
      }
      qmms::io::write_json(out_path(ctx, "norm.json"), norm_result_json(result));
      finish(ctx, "norm",
             {{"in", norm_in}, {"kind", norm_kind}, {"alpha", norm_alpha}, {"p", norm_p}});
      return 0;
    }

    if (bump_cmd->parsed()) {
      const qmms::FiniteQMMSpace space = load_space(bump_in);
      qmms::BumpResult result;
      {
        Timer t(ctx, "bump");
        result = qmms::bump(space, bump_e0, bump_e1, bump_beta, bump_alpha, bump_p,
                            bump_q < 0.0 ? qmms::kInf : bump_q, solve_options(ctx));
      }
      json j;
      j["phi"] = result.phi;
      j["dist_sigma"] = result.dist_sigma;
      j["holder_bound"] = result.holder_bound;
      j["holder_measured"] = result.holder_measured;
      j["dist_d"] = result.dist_d;
      j["mass_off_e0"] = result.mass_off_e0;
      j["shape"] = result.shape;
      j["ratio_tl"] = result.ratio_tl;
      j["ratio_besov"] = result.ratio_besov;
      j["norm_tl"] = norm_result_json(result.norm_tl);
      j["norm_besov"] = norm_result_json(result.norm_besov);
      qmms::io::write_json(out_path(ctx, "bump.json"), j);
      finish(ctx, "bump", {{"in", bump_in}});
      return 0;
    }

    if (certify_cmd->parsed()) {
      const qmms::FiniteQMMSpace space = load_space(certify_in);
      const json fam = qmms::io::read_json(certify_family);
      if (!fam.contains("members"))
        qmms::fail(qmms::ValidationError::Kind::BadShape, "family JSON needs 'members'");
      std::vector<std::vector<double>> members, gradients;
      for (const json& m : fam.at("members"))
        members.push_back(qmms::io::function_from_json(m));
      bool solved_gradients = false;
      if (fam.contains("gradients")) {
        for (const json& g : fam.at("gradients"))
          gradients.push_back(qmms::io::function_from_json(g));
      } else {
        Timer t(ctx, "solve_gradients");
        for (const std::vector<double>& m : members)
          gradients.push_back(
              qmms::min_gradient_sobolev(space, m, certify_alpha, certify_p, solve_options(ctx))
                  .gradient.values.front());
        solved_gradients = true;
      }
      qmms::FrechetOptions fopts;
      fopts.cell_budget = certify_budget;
      qmms::FrechetResult result;
      {
        Timer t(ctx, "certify");
        result = qmms::frechet_certify(space, members, gradients, certify_alpha, certify_p,
                                       certify_eps, fopts);
      }
      json j;
      j["certified"] = result.certified;
      j["obstruction"] = result.obstruction;
      j["obstruction_value"] = result.obstruction_value;
      j["eps"] = result.eps;
      j["delta_f"] = result.delta_f;
      j["lambda"] = result.lambda;
      j["delta"] = result.delta;
      j["cells"] = result.cells.size();
      j["quantization_levels"] = result.quantization_levels;
      j["net_size_log10"] = result.net_size_log10;
      j["member_errors"] = result.member_errors;
      j["worst_cell_oscillation"] = result.worst_cell_oscillation;
      j["solved_gradients"] = solved_gradients;
      qmms::io::write_json(out_path(ctx, "certificate.json"), j);
      finish(ctx, "certify", {{"in", certify_in}, {"eps", certify_eps}});
      return result.certified ? 0 : 1;
    }

    if (exp_cmd->parsed()) {
      int exit_code = 0;
      if (exp_name == "discrete-doubling") {
        Timer t(ctx, "experiment");
        const qmms::GeneratedSpace gen =
            qmms::generate("discrete_N", {{"n", static_cast<double>(exp_n)}});
        std::vector<std::vector<double>> rows;
        bool all_pass = true;
        for (double c : exp_cs)
          for (double d : exp_deltas) {
            const double measured = qmms::doubling_constant(gen.space, c, d);
            const bool expected_flat = d <= 1.0 / c + 1e-12;
            const bool pass = !expected_flat || measured == 1.0;
            all_pass = all_pass && pass;
            rows.push_back({c, d, measured, expected_flat ? 1.0 : 0.0, pass ? 1.0 : 0.0});
          }
        qmms::io::write_csv(out_path(ctx, "discrete-doubling.csv"),
                            {"c", "delta", "measured", "expected_flat", "pass"}, rows);
        qmms::io::write_json(out_path(ctx, "discrete-doubling.json"),
                             {{"h_at_half", qmms::h_value(gen.space, 0.5)},
                              {"covering_at_half",
                               qmms::covering_profile(gen.space, {0.5}).sizes.front()},
                              {"all_pass", all_pass}});
        if (!all_pass) exit_code = 1;
      } else if (exp_name == "density-doubling") {
        Timer t(ctx, "experiment");
        bool all_pass = true;
        for (const std::string fam : {"exp_growth", "gauss_decay", "inv_exp"}) {
          std::vector<std::vector<double>> rows;
          for (double beta : exp_betas) {
            const qmms::Density1D density = [&] {
              if (fam == "exp_growth") return qmms::Density1D::exp_growth_density(beta);
              if (fam == "gauss_decay") return qmms::Density1D::gauss_decay_density(beta);
              return qmms::Density1D::inv_exp_density(beta);
            }();
            const qmms::LineSpace line = qmms::discretize_density(density, 5.0, exp_res);
            for (double c : exp_cs)
              for (double d : exp_deltas) {
                const double measured = qmms::line_doubling_constant(line, c, d);
                const double bound =
                    qmms::density_doubling_bound(density.family, beta, c, d);
                const bool pass = measured <= bound * 1.05;
                all_pass = all_pass && pass;
                rows.push_back({c, d, beta, measured, bound, pass ? 1.0 : 0.0});
              }
          }
          qmms::io::write_csv(out_path(ctx, "density-doubling-" + fam + ".csv"),
                              {"c", "delta", "beta", "measured", "bound", "pass"}, rows);
        }
        if (!all_pass) exit_code = 1;
      } else if (exp_name == "density-integrability") {
        Timer t(ctx, "experiment");
        const qmms::Density1D gauss = qmms::Density1D::gauss_decay_density(2.0);
        const qmms::Density1D slow = qmms::Density1D::gauss_decay_density(1.0);
        const qmms::DensityCurve fast_curve =
            qmms::density_integrability_curve(gauss, 1.0, exp_res, 1e-3, 4.0, 12);
        const qmms::DensityCurve slow_curve =
            qmms::density_integrability_curve(slow, 1.0, exp_res, 1e-3, 4.0, 12);
        auto curve_json = [](const qmms::DensityCurve& c) {
          return json{{"r", c.r},
                      {"truncations", c.truncations},
                      {"values", c.values},
                      {"increments", c.increments},
                      {"verdict", c.verdict}};
        };
        qmms::io::write_json(out_path(ctx, "density-integrability.json"),
                             {{"fast_decay", curve_json(fast_curve)},
                              {"slow_decay", curve_json(slow_curve)}});
        if (fast_curve.verdict != "integrable" || slow_curve.verdict != "divergent")
          exit_code = 1;
      } else if (exp_name == "comb-integrability") {
        Timer t(ctx, "experiment");
        const qmms::CombExperiment result = qmms::comb_integrability_experiment(
            exp_depth, exp_branching, static_cast<int>(exp_res), exp_r);
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < result.tooth_terms.size(); ++k)
          rows.push_back({static_cast<double>(k), result.tooth_terms[k],
                          result.tooth_bounds[k], result.partial_sums[k]});
        qmms::io::write_csv(out_path(ctx, "comb-integrability.csv"),
                            {"tooth", "term", "bound", "partial_sum"}, rows);
        qmms::io::write_json(out_path(ctx, "comb-integrability.json"),
                             {{"j0_term", result.j0_term},
                              {"j0_bound", result.j0_bound},
                              {"j0_within", result.j0_within},
                              {"total", result.total},
                              {"cauchy", result.cauchy}});
        if (!result.j0_within || !result.cauchy) exit_code = 1;
      } else if (exp_name == "separated-witness") {
        Timer t(ctx, "experiment");
        const qmms::FiniteQMMSpace space =
            exp_in.empty()
                ? qmms::generate("discrete_N", {{"n", static_cast<double>(exp_n)}}).space
                : load_space(exp_in);
        const qmms::BumpWitnessResult result = qmms::separated_bump_witness(
            space, exp_wdelta, exp_alpha, exp_p, 1.0, solve_options(ctx), exp_solve);
        qmms::io::write_json(out_path(ctx, "separated-witness.json"),
                             {{"delta", result.delta},
                              {"separation", result.separation},
                              {"centers", result.centers},
                              {"balls_disjoint", result.balls_disjoint},
                              {"min_gap_p", result.min_gap_p},
                              {"gap_at_least_two", result.gap_at_least_two},
                              {"doubling_delta", result.doubling_delta},
                              {"norm_bounds", result.norm_bounds},
                              {"solved_norms", result.solved_norms}});
        if (!result.gap_at_least_two || !result.balls_disjoint) exit_code = 1;
      } else if (exp_name == "tail-witness") {
        Timer t(ctx, "experiment");
        const qmms::FiniteQMMSpace space =
            exp_in.empty() ? qmms::make_dyadic_tail_space(4, 8) : load_space(exp_in);
        const qmms::TailWitnessResult result = qmms::tail_bump_witness(
            space, 0, exp_radii, exp_alpha, exp_p, 1.0, solve_options(ctx), exp_solve);
        qmms::io::write_json(out_path(ctx, "tail-witness.json"),
                             {{"radii", result.radii},
                              {"tail_small", result.tail_small},
                              {"tail_big", result.tail_big},
                              {"ratios", result.ratios},
                              {"unit_masses", result.unit_masses},
                              {"norm_bounds", result.norm_bounds},
                              {"solved_norms", result.solved_norms},
                              {"equi_delta", result.equi_delta},
                              {"modulus_at_delta", result.modulus_at_delta},
                              {"not_equi_integrable", result.not_equi_integrable}});
        if (!result.not_equi_integrable) exit_code = 1;
      } else if (exp_name == "interpolation") {
        Timer t(ctx, "experiment");
        const qmms::FiniteQMMSpace space =
            exp_in.empty()
                ? qmms::generate("euclidean_grid", {{"n", 16.0}}).space
                : load_space(exp_in);
        qmms::Rng rng(ctx.seed);
        std::uniform_real_distribution<double> val(-2.0, 2.0), expo(0.5, 4.0);
        bool all_pass = true;
        std::vector<std::vector<double>> rows;
        for (int trial = 0; trial < exp_count; ++trial) {
          std::vector<double> f(space.size());
          for (double& v : f) v = val(rng);
          double a = expo(rng), b = expo(rng), c = expo(rng);
          std::vector<double> ps{a, b, c};
          std::sort(ps.begin(), ps.end());
          if (ps[0] == ps[1] || ps[1] == ps[2]) continue;
          const qmms::InterpolationResult res =
              qmms::interpolation_check(space, f, ps[0], ps[1], ps[2]);
          all_pass = all_pass && res.holds;
          rows.push_back(
              {ps[0], ps[1], ps[2], res.lhs, res.rhs, res.holds ? 1.0 : 0.0});
        }
        qmms::io::write_csv(out_path(ctx, "interpolation.csv"),
                            {"p", "p_tilde", "p_star", "lhs", "rhs", "pass"}, rows);
        if (!all_pass) exit_code = 1;
      } else {
        std::cerr << "unknown experiment: " << exp_name << '\n';
        return 2;
      }
      finish(ctx, "experiment " + exp_name, {{"name", exp_name}});
      return exit_code;
    }
  } catch (const qmms::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
