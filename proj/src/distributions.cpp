#include "mcd/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "mcd/rng.hpp"

namespace mcd {

namespace {

constexpr double kTailMass = 1e-8;

double surface_area(int k) {  // of the unit sphere S^{k-1}
  return 2.0 * std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k);
}

// Radial density of ||Z|| for a standardized elliptical family.
struct RadialProfile {
  std::function<double(double)> density;  // integrates to 1 on [0, support)
  double support = std::numeric_limits<double>::infinity();
};

RadialProfile radial_profile(const PopulationSpec& spec) {
  const int k = spec.dim;
  const double sk = surface_area(k);
  switch (spec.family) {
    case PopulationSpec::Family::Gaussian: {
      const double c = sk * std::pow(2.0 * M_PI, -0.5 * k);
      return {[c, k](double rho) { return c * std::pow(rho, k - 1) * std::exp(-0.5 * rho * rho); },
              std::numeric_limits<double>::infinity()};
    }
    case PopulationSpec::Family::StudentT: {
      const double nu = spec.nu;
      const double c = sk * std::exp(std::lgamma(0.5 * (nu + k)) - std::lgamma(0.5 * nu)) *
                       std::pow(nu * M_PI, -0.5 * k);
      return {[c, k, nu](double rho) {
                return c * std::pow(rho, k - 1) * std::pow(1.0 + rho * rho / nu, -0.5 * (nu + k));
              },
              std::numeric_limits<double>::infinity()};
    }
    case PopulationSpec::Family::UniformBall: {
      return {[k](double rho) { return rho <= 1.0 ? k * std::pow(rho, k - 1) : 0.0; }, 1.0};
    }
    default:
      throw Error("radial_profile: not an elliptical family");
  }
}

// --- Gauss rules via Golub-Welsch on the Legendre Jacobi matrix ---

struct Rule {
  Vector nodes;    // ascending, on [-1, 1]
  Vector weights;  // sum to 2
};

Matrix legendre_jacobi(int n) {
  Matrix j = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    j(i, i - 1) = b;
    j(i - 1, i) = b;
  }
  return j;
}

Rule rule_from_jacobi(const Matrix& j) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(j);
  Rule r;
  r.nodes = eig.eigenvalues();
  r.weights.resize(j.rows());
  for (Eigen::Index i = 0; i < j.rows(); ++i) {
    const double v0 = eig.eigenvectors()(0, i);
    r.weights(i) = 2.0 * v0 * v0;
  }
  return r;
}

Rule gauss_legendre(int n) { return rule_from_jacobi(legendre_jacobi(n)); }

// Right Gauss-Radau: n nodes with the last pinned at +1 (Golub's modified
// eigenvalue construction).
Rule gauss_radau_right(int n) {
  if (n < 2) throw Error("gauss_radau_right: need n >= 2");
  Matrix j = legendre_jacobi(n);
  const Matrix jm = legendre_jacobi(n - 1);
  const double bn = (n - 1) / std::sqrt(4.0 * (n - 1.0) * (n - 1.0) - 1.0);
  Vector e = Vector::Zero(n - 1);
  e(n - 2) = bn * bn;
  const Vector delta = (jm - Matrix::Identity(n - 1, n - 1)).fullPivLu().solve(e);
  j(n - 1, n - 1) = 1.0 + delta(n - 2);
  Rule r = rule_from_jacobi(j);
  r.nodes(n - 1) = 1.0;  // pin the endpoint exactly
  return r;
}

// Cumulative radial mass via composite Gauss quadrature on a cached
// subdivision; machine accurate for the smooth profiles used here.
class RadialCdf {
 public:
  explicit RadialCdf(const RadialProfile& profile)
      : g_(profile.density), bounded_(std::isfinite(profile.support)) {
    const Rule rule = gauss_legendre(32);
    glx_ = rule.nodes;
    glw_ = rule.weights;
    brk_.push_back(0.0);
    cum_.push_back(0.0);
    if (bounded_) {
      const int m = 64;
      for (int i = 1; i <= m; ++i) push_segment(profile.support * i / m);
      total_ = cum_.back();
      return;
    }
    double lo = 0.0, hi = 0.5;
    for (int iter = 0; iter < 400; ++iter) {
      const int sub = (hi - lo) < 1.0 ? 4 : 8;
      for (int i = 1; i <= sub; ++i) push_segment(lo + (hi - lo) * i / sub);
      const double inc = cum_.back() - cum_[cum_.size() - 1 - static_cast<std::size_t>(sub)];
      if (hi > 2.0 && 1.0 - cum_.back() < 0.1 * kTailMass && inc < 0.1 * kTailMass) break;
      lo = hi;
      hi *= 2.0;
    }
    total_ = cum_.back();
  }

  double total() const { return total_; }
  double reach() const { return brk_.back(); }
  bool bounded() const { return bounded_; }
  double density(double rho) const { return g_(rho); }

  double eval(double rho) const {
    if (rho <= 0.0) return 0.0;
    if (rho >= brk_.back()) return total_;
    const auto it = std::upper_bound(brk_.begin(), brk_.end(), rho);
    const std::size_t j = static_cast<std::size_t>(it - brk_.begin()) - 1;
    return cum_[j] + integrate(brk_[j], rho);
  }

  // smallest rho with eval(rho) >= target
  double quantile(double target) const {
    if (target <= 0.0) return 0.0;
    if (target >= total_) return brk_.back();
    double lo = 0.0, hi = brk_.back();
    for (int i = 0; i < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++i) {
      const double mid = 0.5 * (lo + hi);
      (eval(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  double integrate(double a, double b) const {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (Eigen::Index i = 0; i < glx_.size(); ++i) s += glw_(i) * g_(c + h * glx_(i));
    return s * h;
  }

  void push_segment(double b) {
    cum_.push_back(cum_.back() + integrate(brk_.back(), b));
    brk_.push_back(b);
  }

  std::function<double(double)> g_;
  bool bounded_ = false;
  Vector glx_, glw_;
  std::vector<double> brk_;
  std::vector<double> cum_;
  double total_ = 1.0;
};

struct RadialNode {
  double rho;
  double mass;  // marginal radial mass of the node
  double lo, hi;
};

struct RadialLayout {
  std::vector<RadialNode> nodes;
  double coverage = 0.0;
  double max_gap = 0.0;
};

// Equal-mass radial cells over [0, R_max], truncated to analytic mass
// 1 - 1e-8 and renormalized. One cell edge is pinned at the standardized
// gamma-quantile radius and the cell ending there uses a right-Radau rule,
// so that radius itself carries an atom and the cumulative node mass up to
// (and including) it equals gamma exactly.
RadialLayout build_radial_layout(const RadialCdf& cdf, double gamma, int cells,
                                 int nodes_per_cell) {
  RadialLayout out;
  const double total = cdf.bounded() ? cdf.total() : std::min(cdf.total(), 1.0 - kTailMass);
  const double rmax = cdf.bounded() ? cdf.reach() : cdf.quantile(total);
  out.coverage = rmax;
  const double target_inner = gamma * total;
  const double q = cdf.quantile(target_inner);

  int n_inner = static_cast<int>(std::lround(cells * gamma));
  n_inner = std::clamp(n_inner, 2, cells - 2);
  const int n_outer = cells - n_inner;

  std::vector<double> edges;
  edges.reserve(static_cast<std::size_t>(cells) + 1);
  for (int i = 0; i <= n_inner; ++i) edges.push_back(cdf.quantile(target_inner * i / n_inner));
  for (int j = 1; j <= n_outer; ++j)
    edges.push_back(cdf.quantile(target_inner + (total - target_inner) * j / n_outer));
  edges.front() = 0.0;
  edges[static_cast<std::size_t>(n_inner)] = q;
  edges.back() = rmax;

  const Rule gl = gauss_legendre(nodes_per_cell);
  const Rule radau = gauss_radau_right(nodes_per_cell);

  double prev_rho = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double a = edges[static_cast<std::size_t>(c)];
    const double b = edges[static_cast<std::size_t>(c) + 1];
    if (!(b > a)) continue;
    const double cellmass = cdf.eval(b) - cdf.eval(a);
    if (cellmass <= 0.0) continue;
    const Rule& rule = (c == n_inner - 1) ? radau : gl;
    const int m = static_cast<int>(rule.nodes.size());
    std::vector<RadialNode> cellnodes(static_cast<std::size_t>(m));
    double raw_sum = 0.0;
    for (int i = 0; i < m; ++i) {
      auto& nd = cellnodes[static_cast<std::size_t>(i)];
      nd.rho = a + (b - a) * 0.5 * (rule.nodes(i) + 1.0);
      nd.mass = rule.weights(i) * 0.5 * (b - a) * cdf.density(nd.rho);
      raw_sum += nd.mass;
    }
    if (raw_sum <= 0.0) {  // density underflowed across the cell
      for (auto& nd : cellnodes) nd.mass = cellmass / m;
    } else {
      const double scale = cellmass / raw_sum;
      for (auto& nd : cellnodes) nd.mass *= scale;
    }
    // each node owns the midpoint-split subinterval around it
    for (int i = 0; i < m; ++i) {
      auto& nd = cellnodes[static_cast<std::size_t>(i)];
      nd.lo = i == 0 ? a : 0.5 * (cellnodes[static_cast<std::size_t>(i) - 1].rho + nd.rho);
      nd.hi = i == m - 1 ? b : 0.5 * (nd.rho + cellnodes[static_cast<std::size_t>(i) + 1].rho);
      out.max_gap = std::max(out.max_gap, nd.rho - prev_rho);
      prev_rho = nd.rho;
      out.nodes.push_back(nd);
    }
  }
  return out;
}

// Angular node set: unit directions with weights summing to 1.
struct AngularLayout {
  Matrix dirs;  // m x k
  Vector weights;
};

AngularLayout build_angular_layout(int k, const GridResolution& res) {
  AngularLayout out;
  if (k == 1) {
    out.dirs.resize(2, 1);
    out.dirs << 1.0, -1.0;
    out.weights = Vector::Constant(2, 0.5);
    return out;
  }
  if (k == 2) {
    const int m = res.angular > 0 ? res.angular : 128;
    out.dirs.resize(m, 2);
    out.weights = Vector::Constant(m, 1.0 / m);
    for (int i = 0; i < m; ++i) {
      const double th = 2.0 * M_PI * (i + 0.5) / m;
      out.dirs(i, 0) = std::cos(th);
      out.dirs(i, 1) = std::sin(th);
    }
    return out;
  }
  if (k == 3) {
    const int npol = res.polar > 0 ? res.polar : 32;
    const int nazi = res.angular > 0 ? res.angular : 64;
    const Rule gl = gauss_legendre(npol);
    out.dirs.resize(npol * nazi, 3);
    out.weights.resize(npol * nazi);
    int idx = 0;
    for (int i = 0; i < npol; ++i) {
      const double mu = gl.nodes(i);  // cos(polar)
      const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      for (int j = 0; j < nazi; ++j) {
        const double ph = 2.0 * M_PI * (j + 0.5) / nazi;
        out.dirs(idx, 0) = s * std::cos(ph);
        out.dirs(idx, 1) = s * std::sin(ph);
        out.dirs(idx, 2) = mu;
        out.weights(idx) = gl.weights(i) * 0.5 / nazi;
        ++idx;
      }
    }
    return out;
  }
  throw Error("quadrature grids support k <= 3 only");
}

Matrix scatter_root(const PopulationSpec& spec) {
  return pds_sqrt(PdsMatrix(spec.scatter)).mat();
}

// Discretize one elliptical component into grid rows, scaled by `mass`.
void append_elliptical(const PopulationSpec& spec, const GridResolution& res, double gamma,
                       double mass, std::vector<Vector>& pts, std::vector<double>& wts,
                       std::vector<Vector>& origins, std::vector<Vector>& rays,
                       std::vector<double>& ts, std::vector<double>& los,
                       std::vector<double>& his, QuadratureGrid& grid) {
  const int k = spec.dim;
  const RadialCdf cdf(radial_profile(spec));
  GridResolution r = res;
  const GridResolution def = GridResolution::defaults_for(k);
  if (r.radial_cells <= 0) r.radial_cells = def.radial_cells;
  if (r.nodes_per_cell <= 0) r.nodes_per_cell = def.nodes_per_cell;
  const RadialLayout radial = build_radial_layout(cdf, gamma, r.radial_cells, r.nodes_per_cell);
  const AngularLayout angular = build_angular_layout(k, r);
  const Matrix root = scatter_root(spec);
  grid.radial_gap = std::max(grid.radial_gap, radial.max_gap);
  grid.coverage_radius = std::max(grid.coverage_radius, radial.coverage);

  for (Eigen::Index a = 0; a < angular.dirs.rows(); ++a) {
    const Vector ray = root * angular.dirs.row(a).transpose();
    for (const auto& nd : radial.nodes) {
      pts.push_back(spec.location + nd.rho * ray);
      wts.push_back(mass * nd.mass * angular.weights(a));
      origins.push_back(spec.location);
      rays.push_back(ray);
      ts.push_back(nd.rho);
      los.push_back(nd.lo);
      his.push_back(nd.hi);
    }
  }
}

void append_component(const PopulationSpec& spec, const GridResolution& res, double gamma,
                      double mass, std::vector<Vector>& pts, std::vector<double>& wts,
                      std::vector<Vector>& origins, std::vector<Vector>& rays,
                      std::vector<double>& ts, std::vector<double>& los, std::vector<double>& his,
                      QuadratureGrid& grid) {
  switch (spec.family) {
    case PopulationSpec::Family::Mixture:
      for (const auto& [w, part] : spec.parts)
        append_component(part, res, gamma, mass * w, pts, wts, origins, rays, ts, los, his, grid);
      return;
    case PopulationSpec::Family::CustomAtoms:
      for (Eigen::Index i = 0; i < spec.atoms.rows(); ++i) {
        pts.push_back(spec.atoms.row(i).transpose());
        wts.push_back(mass * spec.atom_weights(i));
        origins.push_back(spec.atoms.row(i).transpose());
        rays.push_back(Vector::Zero(spec.dim));
        ts.push_back(0.0);
        los.push_back(0.0);
        his.push_back(0.0);  // zero-width cell: hard indicator
      }
      return;
    default:
      append_elliptical(spec, res, gamma, mass, pts, wts, origins, rays, ts, los, his, grid);
  }
}

Vector draw_one(const PopulationSpec& spec, Rng& rng);

Vector draw_elliptical(const PopulationSpec& spec, Rng& rng) {
  const int k = spec.dim;
  Vector z(k);
  switch (spec.family) {
    case PopulationSpec::Family::Gaussian:
      for (int i = 0; i < k; ++i) z(i) = rng.normal();
      break;
    case PopulationSpec::Family::StudentT: {
      for (int i = 0; i < k; ++i) z(i) = rng.normal();
      const double v = rng.chi_square(spec.nu);
      z *= std::sqrt(spec.nu / v);
      break;
    }
    case PopulationSpec::Family::UniformBall: {
      for (int i = 0; i < k; ++i) z(i) = rng.normal();
      const double norm = z.norm();
      if (norm > 0.0) z /= norm;
      z *= std::pow(rng.uniform01(), 1.0 / k);
      break;
    }
    default:
      throw Error("draw_elliptical: not an elliptical family");
  }
  return spec.location + scatter_root(spec) * z;
}

Vector draw_one(const PopulationSpec& spec, Rng& rng) {
  switch (spec.family) {
    case PopulationSpec::Family::Mixture: {
      const double u = rng.uniform01();
      double cum = 0.0;
      for (const auto& [w, part] : spec.parts) {
        cum += w;
        if (u < cum) return draw_one(part, rng);
      }
      return draw_one(spec.parts.back().second, rng);
    }
    case PopulationSpec::Family::CustomAtoms: {
      const double u = rng.uniform01();
      double cum = 0.0;
      for (Eigen::Index i = 0; i < spec.atom_weights.size(); ++i) {
        cum += spec.atom_weights(i);
        if (u < cum) return spec.atoms.row(i).transpose();
      }
      return spec.atoms.row(spec.atoms.rows() - 1).transpose();
    }
    default:
      return draw_elliptical(spec, rng);
  }
}

}  // namespace

void PopulationSpec::validate() const {
  if (dim < 1) throw Error("PopulationSpec: dim must be >= 1");
  switch (family) {
    case Family::Gaussian:
    case Family::StudentT:
    case Family::UniformBall: {
      if (location.size() != dim || scatter.rows() != dim || scatter.cols() != dim)
        throw Error("PopulationSpec: location/scatter dimension mismatch");
      PdsMatrix check(scatter);
      if (family == Family::StudentT && nu <= 0.0)
        throw Error("PopulationSpec: student_t needs nu > 0");
      break;
    }
    case Family::Mixture: {
      if (parts.empty()) throw Error("PopulationSpec: mixture needs parts");
      double totw = 0.0;
      for (const auto& [w, part] : parts) {
        if (w <= 0.0) throw Error("PopulationSpec: mixture weights must be positive");
        if (part.dim != dim) throw Error("PopulationSpec: mixture part dimension mismatch");
        part.validate();
        totw += w;
      }
      if (std::abs(totw - 1.0) > 1e-12)
        throw Error("PopulationSpec: mixture weights must sum to 1");
      break;
    }
    case Family::CustomAtoms: {
      if (atoms.rows() < 1 || atoms.cols() != dim || atom_weights.size() != atoms.rows())
        throw Error("PopulationSpec: bad custom atoms");
      if ((atom_weights.array() <= 0.0).any())
        throw Error("PopulationSpec: atom weights must be positive");
      if (std::abs(atom_weights.sum() - 1.0) > 1e-12)
        throw Error("PopulationSpec: atom weights must sum to 1");
      break;
    }
  }
}

PopulationSpec PopulationSpec::standard_gaussian(int k) {
  return gaussian(Vector::Zero(k), Matrix::Identity(k, k));
}

PopulationSpec PopulationSpec::gaussian(const Vector& loc, const Matrix& scatter) {
  PopulationSpec s;
  s.family = Family::Gaussian;
  s.dim = static_cast<int>(loc.size());
  s.location = loc;
  s.scatter = scatter;
  s.validate();
  return s;
}

PopulationSpec PopulationSpec::student_t(double nu, const Vector& loc, const Matrix& scatter) {
  PopulationSpec s;
  s.family = Family::StudentT;
  s.dim = static_cast<int>(loc.size());
  s.location = loc;
  s.scatter = scatter;
  s.nu = nu;
  s.validate();
  return s;
}

PopulationSpec PopulationSpec::uniform_ball(const Vector& loc, const Matrix& scatter) {
  PopulationSpec s;
  s.family = Family::UniformBall;
  s.dim = static_cast<int>(loc.size());
  s.location = loc;
  s.scatter = scatter;
  s.validate();
  return s;
}

PopulationSpec PopulationSpec::point_mass(const Vector& x) {
  PopulationSpec s;
  s.family = Family::CustomAtoms;
  s.dim = static_cast<int>(x.size());
  s.atoms = x.transpose();
  s.atom_weights = Vector::Ones(1);
  return s;
}

PopulationSpec PopulationSpec::custom_atoms(const Matrix& points, const Vector& weights) {
  PopulationSpec s;
  s.family = Family::CustomAtoms;
  s.dim = static_cast<int>(points.cols());
  s.atoms = points;
  s.atom_weights = weights;
  s.validate();
  return s;
}

PopulationSpec PopulationSpec::mixture(std::vector<std::pair<double, PopulationSpec>> parts) {
  PopulationSpec s;
  s.family = Family::Mixture;
  if (parts.empty()) throw Error("mixture: needs parts");
  s.dim = parts.front().second.dim;
  s.parts = std::move(parts);
  s.validate();
  return s;
}

PopulationSpec::Family PopulationSpec::family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::Gaussian;
  if (name == "student_t") return Family::StudentT;
  if (name == "uniform_ball") return Family::UniformBall;
  if (name == "gaussian_mixture" || name == "mixture") return Family::Mixture;
  if (name == "custom_atoms") return Family::CustomAtoms;
  throw Error("unknown family: " + name);
}

std::string PopulationSpec::family_to_string(Family f) {
  switch (f) {
    case Family::Gaussian: return "gaussian";
    case Family::StudentT: return "student_t";
    case Family::UniformBall: return "uniform_ball";
    case Family::Mixture: return "gaussian_mixture";
    case Family::CustomAtoms: return "custom_atoms";
  }
  return "unknown";
}

Dataset sample(const PopulationSpec& spec, int n, std::uint64_t seed, std::uint64_t stream) {
  spec.validate();
  if (n < 1) throw Error("sample: n must be >= 1");
  Rng rng(seed, stream);
  Dataset d;
  d.points.resize(n, spec.dim);
  for (int i = 0; i < n; ++i) d.points.row(i) = draw_one(spec, rng).transpose();
  return d;
}

GridResolution GridResolution::defaults_for(int k) {
  GridResolution r;
  r.nodes_per_cell = 6;
  if (k <= 1) {
    r.radial_cells = 334;  // ~2000 radial nodes
  } else if (k == 2) {
    r.radial_cells = 120;
    r.angular = 128;
  } else {
    r.radial_cells = 60;
    r.polar = 32;
    r.angular = 64;
  }
  return r;
}

GridResolution GridResolution::scaled(double factor) const {
  GridResolution r = *this;
  if (r.radial_cells > 0) r.radial_cells = std::max(4, static_cast<int>(std::lround(r.radial_cells * factor)));
  if (r.angular > 0) r.angular = std::max(8, static_cast<int>(std::lround(r.angular * factor)));
  if (r.polar > 0) r.polar = std::max(4, static_cast<int>(std::lround(r.polar * factor)));
  return r;
}

QuadratureGrid discretize(const PopulationSpec& spec, const GridResolution& res, double gamma) {
  spec.validate();
  if (spec.dim > 3) throw Error("discretize: quadrature grids support k <= 3");
  if (gamma <= 0.0 || gamma > 1.0) throw Error("discretize: gamma must lie in (0,1]");
  GridResolution r = res;
  const GridResolution def = GridResolution::defaults_for(spec.dim);
  if (r.radial_cells <= 0) r.radial_cells = def.radial_cells;
  if (r.angular <= 0) r.angular = def.angular;
  if (r.polar <= 0) r.polar = def.polar;

  QuadratureGrid grid;
  grid.dim = spec.dim;
  grid.aligned_gamma = gamma;

  std::vector<Vector> pts, origins, rays;
  std::vector<double> wts, ts, los, his;
  append_component(spec, r, gamma, 1.0, pts, wts, origins, rays, ts, los, his, grid);

  const int n = static_cast<int>(pts.size());
  grid.measure.points.resize(n, spec.dim);
  grid.measure.weights.resize(n);
  grid.origins.resize(n, spec.dim);
  grid.rays.resize(n, spec.dim);
  grid.t.resize(n);
  grid.cell_lo.resize(n);
  grid.cell_hi.resize(n);
  double total = 0.0;
  for (double w : wts) total += w;
  for (int i = 0; i < n; ++i) {
    grid.measure.points.row(i) = pts[static_cast<std::size_t>(i)].transpose();
    grid.measure.weights(i) = wts[static_cast<std::size_t>(i)] / total;
    grid.origins.row(i) = origins[static_cast<std::size_t>(i)].transpose();
    grid.rays.row(i) = rays[static_cast<std::size_t>(i)].transpose();
    grid.t(i) = ts[static_cast<std::size_t>(i)];
    grid.cell_lo(i) = los[static_cast<std::size_t>(i)];
    grid.cell_hi(i) = his[static_cast<std::size_t>(i)];
  }
  grid.measure.validate();
  return grid;
}

PopulationSpec contaminate(const PopulationSpec& spec, const PopulationSpec& q, double eps,
                           const Vector& shift) {
  if (eps < 0.0 || eps >= 0.5) throw Error("contaminate: eps must lie in [0, 1/2)");
  if (shift.size() != spec.dim) throw Error("contaminate: shift dimension mismatch");
  if (eps == 0.0) return spec;
  // translate q by the shift
  PopulationSpec moved = q;
  std::function<void(PopulationSpec&)> translate = [&](PopulationSpec& s) {
    switch (s.family) {
      case PopulationSpec::Family::CustomAtoms:
        s.atoms.rowwise() += shift.transpose();
        break;
      case PopulationSpec::Family::Mixture:
        for (auto& [w, part] : s.parts) translate(part);
        break;
      default:
        s.location += shift;
    }
  };
  translate(moved);
  return PopulationSpec::mixture({{1.0 - eps, spec}, {eps, moved}});
}

}  // namespace mcd
