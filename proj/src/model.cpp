#include "mcd/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mcd {

void Dataset::validate() const {
  if (n() < 1) throw Error("Dataset: need at least one point");
  if (k() < 1) throw Error("Dataset: dimension must be positive");
}

void WeightedMeasure::validate() const {
  if (points.rows() != weights.size()) throw Error("WeightedMeasure: atom/weight count mismatch");
  if (n() < 1) throw Error("WeightedMeasure: need at least one atom");
  if ((weights.array() <= 0.0).any()) throw Error("WeightedMeasure: weights must be strictly positive");
  if (std::abs(total() - 1.0) > 1e-12)
    throw Error("WeightedMeasure: total mass must be 1 (got " + std::to_string(total()) + ")");
}

WeightedMeasure WeightedMeasure::uniform(const Dataset& d) {
  WeightedMeasure p;
  p.points = d.points;
  p.weights = Vector::Constant(d.n(), 1.0 / d.n());
  return p;
}

WeightedMeasure WeightedMeasure::perturbed(const Vector& x, double eps) const {
  if (eps < 0.0 || eps >= 1.0) throw Error("perturbed: eps must lie in [0,1)");
  if (x.size() != k()) throw Error("perturbed: dimension mismatch");
  WeightedMeasure out;
  if (eps == 0.0) return *this;
  out.points.resize(n() + 1, k());
  out.points.topRows(n()) = points;
  out.points.row(n()) = x.transpose();
  out.weights.resize(n() + 1);
  out.weights.head(n()) = (1.0 - eps) * weights;
  out.weights(n()) = eps;
  return out;
}

void TrimmingWeights::validate(const WeightedMeasure& p, double gamma) const {
  if (values.size() != p.n()) throw Error("TrimmingWeights: length mismatch");
  if ((values.array() < -1e-12).any() || (values.array() > 1.0 + 1e-12).any())
    throw Error("TrimmingWeights: entries must lie in [0,1]");
  if (mass(p) < gamma - 1e-10)
    throw Error("TrimmingWeights: mass " + std::to_string(mass(p)) + " below gamma");
}

Vector Theta::vectorize() const {
  Vector v(p());
  v.head(k()) = m;
  v.segment(k(), k() * (k() + 1) / 2) = vech(G.mat());
  v(p() - 1) = r;
  return v;
}

Theta Theta::devectorize(const Vector& v, int k) {
  if (v.size() != theta_dim(k)) throw Error("Theta::devectorize: bad length");
  const double r = v(v.size() - 1);
  if (r <= 0.0) throw Error("Theta: radius must be positive");
  return Theta{v.head(k), PdsMatrix(unvech(v.segment(k, k * (k + 1) / 2), k)), r};
}

TrimmedMoments trimmed_moments(const WeightedMeasure& p, const TrimmingWeights& phi) {
  if (phi.values.size() != p.n()) throw Error("trimmed_moments: weight length mismatch");
  const Vector w = phi.values.cwiseProduct(p.weights);
  const double mass = w.sum();
  if (mass <= 0.0) throw Error("trimmed_moments: zero trimmed mass");
  const Vector t = (p.points.transpose() * w) / mass;
  Matrix c = Matrix::Zero(p.k(), p.k());
  for (int i = 0; i < p.n(); ++i) {
    if (w(i) == 0.0) continue;
    const Vector d = p.points.row(i).transpose() - t;
    c.noalias() += w(i) * d * d.transpose();
  }
  c /= mass;
  return TrimmedMoments{mass, t, 0.5 * (c + c.transpose())};
}

double radius(const WeightedMeasure& p, const Vector& center, const PdsMatrix& shape,
              double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) throw Error("radius: gamma must lie in (0,1]");
  if (p.total() < gamma - 1e-12) throw Error("radius: total mass below gamma");
  std::vector<std::pair<double, double>> dist(p.n());  // (d^2, weight)
  for (int i = 0; i < p.n(); ++i)
    dist[i] = {mahalanobis_sq(p.points.row(i).transpose(), center, shape), p.weights(i)};
  std::sort(dist.begin(), dist.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double cum = 0.0;
  for (std::size_t i = 0; i < dist.size();) {
    // group ties in distance
    std::size_t j = i;
    double group = 0.0;
    while (j < dist.size() && dist[j].first <= dist[i].first) {
      group += dist[j].second;
      ++j;
    }
    cum += group;
    if (cum >= gamma - 1e-12) return std::sqrt(dist[i].first);
    i = j;
  }
  return std::sqrt(dist.back().first);
}

namespace {

void check_nonsingular(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("affine_map: A must be square");
  Eigen::JacobiSVD<Matrix> svd(a);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (smax <= 0.0 || smin <= 1e-12 * smax) throw Error("affine_map: matrix is singular");
}

}  // namespace

Dataset affine_map(const Dataset& d, const Matrix& a, const Vector& b) {
  check_nonsingular(a);
  if (a.cols() != d.k() || b.size() != a.rows()) throw Error("affine_map: dimension mismatch");
  Dataset out;
  out.points = (d.points * a.transpose()).rowwise() + b.transpose();
  return out;
}

WeightedMeasure affine_map(const WeightedMeasure& p, const Matrix& a, const Vector& b) {
  check_nonsingular(a);
  if (a.cols() != p.k() || b.size() != a.rows()) throw Error("affine_map: dimension mismatch");
  WeightedMeasure out;
  out.points = (p.points * a.transpose()).rowwise() + b.transpose();
  out.weights = p.weights;
  return out;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

CsvData read_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error("read_csv: cannot open " + path);
  std::string line;
  int line_no = 0;
  int weight_col = -1;
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  std::size_t ncols = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (line_no == 1 && has_header) {
      ncols = fields.size();
      for (std::size_t c = 0; c < fields.size(); ++c)
        if (fields[c] == "weight") weight_col = static_cast<int>(c);
      continue;
    }
    if (ncols == 0) ncols = fields.size();
    if (fields.size() != ncols)
      throw Error("read_csv: line " + std::to_string(line_no) + " has " +
                  std::to_string(fields.size()) + " columns, expected " + std::to_string(ncols));
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      try {
        std::size_t pos = 0;
        v = std::stod(fields[c], &pos);
        while (pos < fields[c].size() && std::isspace(static_cast<unsigned char>(fields[c][pos]))) ++pos;
        if (pos != fields[c].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw Error("read_csv: line " + std::to_string(line_no) + ", column " +
                    std::to_string(c + 1) + ": not a number: '" + fields[c] + "'");
      }
      if (static_cast<int>(c) == weight_col)
        weights.push_back(v);
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("read_csv: no data rows in " + path);
  CsvData out;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  if (weight_col >= 0) {
    Vector w(static_cast<Eigen::Index>(weights.size()));
    for (std::size_t i = 0; i < weights.size(); ++i) w(static_cast<Eigen::Index>(i)) = weights[i];
    out.weights = w;
  }
  return out;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_atomic: cannot open " + tmp);
    out << content;
    if (!out) throw Error("write_atomic: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("write_atomic: rename failed for " + path);
}

void write_csv(const std::string& path, const std::string& content) { write_atomic(path, content); }

}  // namespace mcd
