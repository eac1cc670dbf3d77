#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcd/asymptotics.hpp"
#include "mcd/distributions.hpp"
#include "mcd/estimator.hpp"
#include "mcd/functional.hpp"
#include "mcd/serialize.hpp"

namespace py = pybind11;
using namespace mcd;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return py::none();
    case Json::value_t::boolean: return py::bool_(j.get<bool>());
    case Json::value_t::number_integer: return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned: return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float: return py::float_(j.get<double>());
    case Json::value_t::string: return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (auto it = j.begin(); it != j.end(); ++it)
        out[py::str(it.key())] = json_to_py(it.value());
      return out;
    }
    default: return py::none();
  }
}

PopulationSpec make_spec(const std::string& family, int dim, double nu,
                         std::optional<Vector> location, std::optional<Matrix> scatter) {
  const Vector loc = location.value_or(Vector::Zero(dim));
  const Matrix sc = scatter.value_or(Matrix::Identity(dim, dim));
  const auto fam = PopulationSpec::family_from_string(family);
  if (fam == PopulationSpec::Family::Gaussian) return PopulationSpec::gaussian(loc, sc);
  if (fam == PopulationSpec::Family::StudentT) return PopulationSpec::student_t(nu, loc, sc);
  if (fam == PopulationSpec::Family::UniformBall) return PopulationSpec::uniform_ball(loc, sc);
  throw Error("python bindings support gaussian, student_t and uniform_ball specs");
}

WeightedMeasure make_measure(const Matrix& points, std::optional<Vector> weights) {
  WeightedMeasure p;
  p.points = points;
  p.weights = weights.value_or(Vector::Constant(points.rows(), 1.0 / points.rows()));
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_mcd, m) {
  m.doc() = "Minimum covariance determinant estimators, functionals and asymptotics";

  py::register_exception<DegenerateError>(m, "DegenerateError", PyExc_RuntimeError);

  m.def(
      "exact_mcd",
      [](const Matrix& points, double gamma, int guard) {
        Dataset d{points};
        ExactOptions opts;
        opts.guard = guard;
        return json_to_py(to_json(exact_mcd(d, gamma, opts)));
      },
      py::arg("points"), py::arg("gamma") = 0.5, py::arg("guard") = 20,
      "Exhaustive MCD fit over all size-ceil(n*gamma) subsamples (small n).");

  m.def(
      "cstep_mcd",
      [](const Matrix& points, double gamma, int starts, std::uint64_t seed, int threads) {
        Dataset d{points};
        CstepOptions opts;
        opts.starts = starts;
        opts.seed = seed;
        opts.threads = threads;
        return json_to_py(to_json(cstep_mcd(d, gamma, opts)));
      },
      py::arg("points"), py::arg("gamma") = 0.5, py::arg("starts") = 500, py::arg("seed") = 0,
      py::arg("threads") = 1, "Multi-start concentration MCD fit.");

  m.def(
      "functional_mcd",
      [](const Matrix& points, std::optional<Vector> weights, double gamma, int starts,
         std::uint64_t seed) {
        FunctionalOptions opts;
        opts.starts = starts;
        opts.seed = seed;
        return json_to_py(to_json(functional_mcd(make_measure(points, std::move(weights)), gamma, opts)));
      },
      py::arg("points"), py::arg("weights") = py::none(), py::arg("gamma") = 0.5,
      py::arg("starts") = 50, py::arg("seed") = 0,
      "MCD functional of a weighted discrete measure.");

  m.def(
      "exact_functional_mcd",
      [](const Matrix& points, std::optional<Vector> weights, double gamma, int guard) {
        return json_to_py(to_json(exact_functional_mcd(make_measure(points, std::move(weights)), gamma, guard)));
      },
      py::arg("points"), py::arg("weights") = py::none(), py::arg("gamma") = 0.5,
      py::arg("guard") = 14, "Exhaustive functional oracle (small atom counts).");

  m.def(
      "sample",
      [](const std::string& family, int dim, int n, std::uint64_t seed, double nu,
         std::optional<Vector> location, std::optional<Matrix> scatter) {
        return sample(make_spec(family, dim, nu, std::move(location), std::move(scatter)), n, seed)
            .points;
      },
      py::arg("family"), py::arg("dim"), py::arg("n"), py::arg("seed") = 0, py::arg("nu") = 3.0,
      py::arg("location") = py::none(), py::arg("scatter") = py::none(),
      "Deterministic i.i.d. sample from a population spec.");

  m.def(
      "theta0",
      [](const std::string& family, int dim, double gamma, double nu) {
        const auto spec = make_spec(family, dim, nu, std::nullopt, std::nullopt);
        const auto grid = discretize(spec, GridResolution{}, gamma);
        return json_to_py(to_json(solve_theta0(grid, gamma)));
      },
      py::arg("family"), py::arg("dim"), py::arg("gamma") = 0.5, py::arg("nu") = 3.0,
      "Population functional theta0 as the root of the score map.");

  m.def(
      "clt",
      [](const std::string& family, int dim, double gamma, double nu) {
        const auto spec = make_spec(family, dim, nu, std::nullopt, std::nullopt);
        const auto grid = discretize(spec, GridResolution{}, gamma);
        return json_to_py(to_json(clt_covariance(grid, gamma)));
      },
      py::arg("family"), py::arg("dim"), py::arg("gamma") = 0.5, py::arg("nu") = 3.0,
      "Asymptotic covariance report (Jacobian, score covariance, sandwich).");

  m.def(
      "influence",
      [](const Vector& x, const std::string& family, double gamma, double nu) {
        const int dim = static_cast<int>(x.size());
        const auto spec = make_spec(family, dim, nu, std::nullopt, std::nullopt);
        const auto grid = discretize(spec, GridResolution{}, gamma);
        return influence(x, grid, gamma);
      },
      py::arg("x"), py::arg("family") = std::string("gaussian"), py::arg("gamma") = 0.5,
      py::arg("nu") = 3.0, "Influence function of the functional at x.");

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
