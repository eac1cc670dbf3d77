#include "mcd/serialize.hpp"

namespace mcd {

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

Matrix matrix_from_json(const Json& j, int rows, int cols) {
  if (static_cast<int>(j.size()) != rows * cols) throw Error("matrix_from_json: size mismatch");
  Matrix m(rows, cols);
  int idx = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = j[idx++].get<double>();
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Json to_json(const CertificateReport& rep) {
  return Json{{"subsample_size_ok", rep.subsample_size_ok},
              {"separating_ellipsoid_ok", rep.separating_ellipsoid_ok},
              {"mass_ok", rep.mass_ok},
              {"boundary_atoms", rep.boundary_atoms},
              {"max_violation", rep.max_violation},
              {"fractional_atoms", rep.fractional_atoms},
              {"boundary_case", rep.boundary_case},
              {"degenerate", rep.degenerate},
              {"passed", rep.passed()}};
}

Json to_json(const McdFit& fit) {
  Json j{{"method", fit.method},
         {"gamma", fit.gamma},
         {"seed", fit.seed},
         {"T", vector_to_json(fit.T)},
         {"C", matrix_to_json(fit.C)},
         {"radius", fit.radius},
         {"det", fit.det},
         {"certificate", to_json(fit.certificate)},
         {"degenerate", fit.degenerate},
         {"k", fit.T.size()}};
  if (fit.weights)
    j["weights"] = vector_to_json(fit.weights->values);
  else
    j["subsample"] = fit.subsample;
  return j;
}

McdFit fit_from_json(const Json& j) {
  McdFit fit;
  fit.method = j.at("method").get<std::string>();
  fit.gamma = j.at("gamma").get<double>();
  fit.seed = j.at("seed").get<std::uint64_t>();
  fit.T = vector_from_json(j.at("T"));
  const int k = static_cast<int>(fit.T.size());
  fit.C = matrix_from_json(j.at("C"), k, k);
  fit.radius = j.at("radius").get<double>();
  fit.det = j.at("det").get<double>();
  fit.degenerate = j.value("degenerate", false);
  if (j.contains("weights")) fit.weights = TrimmingWeights{vector_from_json(j.at("weights"))};
  if (j.contains("subsample")) fit.subsample = j.at("subsample").get<std::vector<int>>();
  return fit;
}

Json to_json(const Theta& theta) {
  return Json{{"m", vector_to_json(theta.m)},
              {"G", matrix_to_json(theta.G.mat())},
              {"r", theta.r},
              {"k", theta.k()},
              {"p", theta.p()},
              {"vech_convention", "lower-triangle-column-major"},
              {"vector", vector_to_json(theta.vectorize())}};
}

Json to_json(const CltReport& rep) {
  return Json{{"theta0", to_json(rep.theta0)},
              {"gamma", rep.gamma},
              {"p", rep.theta0.p()},
              {"vech_convention", "lower-triangle-column-major"},
              {"jacobian", matrix_to_json(rep.jac)},
              {"M", matrix_to_json(rep.M)},
              {"asy_cov", matrix_to_json(rep.asy_cov)},
              {"cond_jacobian", rep.cond_jac},
              {"lambda_residual", rep.lambda_residual},
              {"sigma0", matrix_to_json(rep.theta0.G.mat() * rep.theta0.G.mat())},
              {"diagnostics",
               Json{{"fd_steps", vector_to_json(rep.diagnostics.fd_steps)},
                    {"onesided_mismatch", vector_to_json(rep.diagnostics.onesided_mismatch)},
                    {"boundary_instability", rep.diagnostics.boundary_instability}}}};
}

Json to_json(const PopulationSpec& spec) {
  Json j{{"family", PopulationSpec::family_to_string(spec.family)}, {"dim", spec.dim}};
  switch (spec.family) {
    case PopulationSpec::Family::Gaussian:
    case PopulationSpec::Family::UniformBall:
      j["location"] = vector_to_json(spec.location);
      j["scatter"] = matrix_to_json(spec.scatter);
      break;
    case PopulationSpec::Family::StudentT:
      j["location"] = vector_to_json(spec.location);
      j["scatter"] = matrix_to_json(spec.scatter);
      j["nu"] = spec.nu;
      break;
    case PopulationSpec::Family::Mixture: {
      Json parts = Json::array();
      for (const auto& [w, part] : spec.parts)
        parts.push_back(Json{{"weight", w}, {"spec", to_json(part)}});
      j["parts"] = parts;
      break;
    }
    case PopulationSpec::Family::CustomAtoms:
      j["atoms"] = matrix_to_json(spec.atoms);
      j["n_atoms"] = spec.atoms.rows();
      j["atom_weights"] = vector_to_json(spec.atom_weights);
      break;
  }
  return j;
}

PopulationSpec spec_from_json(const Json& j) {
  PopulationSpec spec;
  spec.family = PopulationSpec::family_from_string(j.at("family").get<std::string>());
  spec.dim = j.at("dim").get<int>();
  switch (spec.family) {
    case PopulationSpec::Family::Gaussian:
    case PopulationSpec::Family::UniformBall:
    case PopulationSpec::Family::StudentT:
      spec.location = vector_from_json(j.at("location"));
      spec.scatter = matrix_from_json(j.at("scatter"), spec.dim, spec.dim);
      if (spec.family == PopulationSpec::Family::StudentT) spec.nu = j.at("nu").get<double>();
      break;
    case PopulationSpec::Family::Mixture:
      for (const auto& part : j.at("parts"))
        spec.parts.emplace_back(part.at("weight").get<double>(),
                                spec_from_json(part.at("spec")));
      break;
    case PopulationSpec::Family::CustomAtoms: {
      const int n = j.at("n_atoms").get<int>();
      spec.atoms = matrix_from_json(j.at("atoms"), n, spec.dim);
      spec.atom_weights = vector_from_json(j.at("atom_weights"));
      break;
    }
  }
  spec.validate();
  return spec;
}

}  // namespace mcd
