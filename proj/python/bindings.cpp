#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qmms/compactness.hpp"
#include "qmms/examples.hpp"
#include "qmms/geometry.hpp"
#include "qmms/norms.hpp"
#include "qmms/oracle.hpp"
#include "qmms/regularize.hpp"
#include "qmms/space.hpp"

namespace py = pybind11;
using namespace qmms;

namespace {

NormKind parse_kind(const std::string& kind) {
  if (kind == "sobolev") return NormKind::sobolev;
  if (kind == "besov") return NormKind::besov;
  if (kind == "tl") return NormKind::triebel_lizorkin;
  throw py::value_error("kind must be 'sobolev', 'besov', or 'tl'");
}

py::dict norm_result_dict(const NormResult& r) {
  py::dict d;
  d["seminorm"] = r.seminorm;
  d["lp"] = r.lp;
  d["full_norm"] = r.full_norm;
  d["gradient_levels"] = r.gradient.levels;
  d["gradient_values"] = r.gradient.values;
  py::dict s;
  s["status"] = r.solver.status;
  s["iterations"] = r.solver.iterations;
  s["certified"] = r.solver.certified;
  s["certified_gap"] = r.solver.certified_gap;
  d["solver"] = s;
  return d;
}

SolveOptions make_options(double tol, double gap_tol, int max_iterations,
                          unsigned long long seed) {
  SolveOptions opts;
  opts.tolerance = tol;
  opts.gap_tolerance = gap_tol;
  opts.max_iterations = max_iterations;
  opts.seed = seed;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_qmms, m) {
  m.doc() = "numerics laboratory for quasi-metric measure spaces";

  py::register_exception<ValidationError>(m, "ValidationError");

  py::class_<FiniteQMMSpace>(m, "Space")
      .def(py::init([](const std::vector<std::vector<double>>& dist,
                       const std::vector<double>& mu) {
             const std::size_t n = dist.size();
             std::vector<double> flat;
             flat.reserve(n * n);
             for (const auto& row : dist) {
               if (row.size() != n)
                 fail(ValidationError::Kind::BadShape, "distance matrix must be square");
               flat.insert(flat.end(), row.begin(), row.end());
             }
             return make_space(flat, mu);
           }),
           py::arg("dist"), py::arg("mu"))
      .def_property_readonly("n", &FiniteQMMSpace::size)
      .def_property_readonly("total_mass", &FiniteQMMSpace::total_mass)
      .def_property_readonly("diameter", &FiniteQMMSpace::diameter)
      .def_property_readonly("quasi_triangle_constant",
                             &FiniteQMMSpace::quasi_triangle_constant)
      .def_property_readonly("symmetry_constant", &FiniteQMMSpace::symmetry_constant)
      .def("dist", &FiniteQMMSpace::dist)
      .def("mu", &FiniteQMMSpace::mu)
      .def("weights", &FiniteQMMSpace::weights);

  m.def(
      "generate",
      [](const std::string& name, const std::map<std::string, double>& params) {
        GeneratedSpace gen = generate(name, params);
        py::dict card;
        card["generator"] = gen.card.generator;
        card["params"] = gen.card.params;
        py::list bounds;
        for (const ReferenceBound& b : gen.card.bounds) {
          py::dict bd;
          bd["key"] = b.key;
          bd["formula"] = b.formula;
          bd["description"] = b.description;
          bounds.append(bd);
        }
        card["reference_bounds"] = bounds;
        return py::make_tuple(gen.space, card);
      },
      py::arg("name"), py::arg("params") = std::map<std::string, double>{});

  m.def("generator_names", &generator_names);
  m.def("snowflake", &snowflake, py::arg("space"), py::arg("s"));
  m.def("doubling_constant", &doubling_constant, py::arg("space"), py::arg("c"),
        py::arg("delta"));
  m.def("doubling_sup", &doubling_sup, py::arg("space"), py::arg("c"));
  m.def("h_value", &h_value, py::arg("space"), py::arg("r"));
  m.def(
      "covering_profile",
      [](const FiniteQMMSpace& space, const std::vector<double>& eps) {
        const CoveringProfile profile = covering_profile(space, eps);
        py::dict d;
        d["epsilons"] = profile.epsilons;
        d["sizes"] = profile.sizes;
        return d;
      },
      py::arg("space"), py::arg("epsilons"));
  m.def(
      "greedy_separated",
      [](const FiniteQMMSpace& space, double eps) {
        return greedy_separated(space, eps).centers;
      },
      py::arg("space"), py::arg("eps"));
  m.def(
      "integrability",
      [](const FiniteQMMSpace& space, double r) {
        const IntegrabilityReport rep = integrability_functional(space, r);
        py::dict d;
        d["r"] = rep.r;
        d["value"] = rep.value;
        d["upper_bound"] = rep.upper_bound;
        d["within_bound"] = rep.within_bound;
        return d;
      },
      py::arg("space"), py::arg("r"));
  m.def(
      "chain_metric",
      [](const FiniteQMMSpace& space, double beta) {
        const ChainMetricResult res = chain_metric(space, beta);
        py::dict d;
        d["beta"] = res.beta;
        d["distortion"] = res.distortion;
        d["sigma"] = res.sigma;
        return d;
      },
      py::arg("space"), py::arg("beta"));

  m.def(
      "minimal_norm",
      [](const FiniteQMMSpace& space, const std::vector<double>& u, const std::string& kind,
         double alpha, double p, double q, double tol, double gap_tol, int max_iterations,
         unsigned long long seed) {
        NormProblem problem;
        problem.kind = parse_kind(kind);
        problem.alpha = alpha;
        problem.p = p;
        problem.q = q;
        return norm_result_dict(
            minimal_norm(space, u, problem, make_options(tol, gap_tol, max_iterations, seed)));
      },
      py::arg("space"), py::arg("u"), py::arg("kind"), py::arg("alpha"), py::arg("p"),
      py::arg("q") = kInf, py::arg("tol") = 1e-8, py::arg("gap_tol") = 1e-6,
      py::arg("max_iterations") = 100000, py::arg("seed") = 0);

  m.def(
      "oracle_sobolev",
      [](const FiniteQMMSpace& space, const std::vector<double>& u, double alpha, double p) {
        const OracleResult res = oracle_sobolev(space, u, alpha, p);
        py::dict d;
        d["seminorm"] = res.seminorm;
        d["gradient"] = res.gradient;
        return d;
      },
      py::arg("space"), py::arg("u"), py::arg("alpha"), py::arg("p"));

  m.def("l0_distance", &l0_distance, py::arg("space"), py::arg("f"), py::arg("g"));

  m.def(
      "frechet_certify",
      [](const FiniteQMMSpace& space, const std::vector<std::vector<double>>& members,
         const std::vector<std::vector<double>>& gradients, double alpha, double p, double eps,
         std::size_t cell_budget) {
        FrechetOptions options;
        options.cell_budget = cell_budget;
        const FrechetResult res =
            frechet_certify(space, members, gradients, alpha, p, eps, options);
        py::dict d;
        d["certified"] = res.certified;
        d["obstruction"] = res.obstruction;
        d["obstruction_value"] = res.obstruction_value;
        d["delta_f"] = res.delta_f;
        d["cells"] = res.cells.size();
        d["quantization_levels"] = res.quantization_levels;
        d["net_size_log10"] = res.net_size_log10;
        d["member_errors"] = res.member_errors;
        return d;
      },
      py::arg("space"), py::arg("members"), py::arg("gradients"), py::arg("alpha"),
      py::arg("p"), py::arg("eps"), py::arg("cell_budget") = 4096);

  m.def(
      "separated_bump_witness",
      [](const FiniteQMMSpace& space, double delta, double alpha, double p, double beta,
         bool solve_norms) {
        const BumpWitnessResult res =
            separated_bump_witness(space, delta, alpha, p, beta, SolveOptions{}, solve_norms);
        py::dict d;
        d["centers"] = res.centers;
        d["balls_disjoint"] = res.balls_disjoint;
        d["min_gap_p"] = res.min_gap_p;
        d["gap_at_least_two"] = res.gap_at_least_two;
        d["norm_bounds"] = res.norm_bounds;
        d["solved_norms"] = res.solved_norms;
        return d;
      },
      py::arg("space"), py::arg("delta"), py::arg("alpha"), py::arg("p"), py::arg("beta"),
      py::arg("solve_norms") = false);

  m.def(
      "tail_bump_witness",
      [](const FiniteQMMSpace& space, std::size_t x0, const std::vector<double>& radii,
         double alpha, double p, double beta, bool solve_norms) {
        const TailWitnessResult res =
            tail_bump_witness(space, x0, radii, alpha, p, beta, SolveOptions{}, solve_norms);
        py::dict d;
        d["radii"] = res.radii;
        d["ratios"] = res.ratios;
        d["unit_masses"] = res.unit_masses;
        d["norm_bounds"] = res.norm_bounds;
        d["not_equi_integrable"] = res.not_equi_integrable;
        return d;
      },
      py::arg("space"), py::arg("x0"), py::arg("radii"), py::arg("alpha"), py::arg("p"),
      py::arg("beta"), py::arg("solve_norms") = false);

  m.def(
      "interpolation_check",
      [](const FiniteQMMSpace& space, const std::vector<double>& f, double p, double p_tilde,
         double p_star) {
        const InterpolationResult res = interpolation_check(space, f, p, p_tilde, p_star);
        py::dict d;
        d["theta"] = res.theta;
        d["lhs"] = res.lhs;
        d["rhs"] = res.rhs;
        d["holds"] = res.holds;
        return d;
      },
      py::arg("space"), py::arg("f"), py::arg("p"), py::arg("p_tilde"), py::arg("p_star"));
}
