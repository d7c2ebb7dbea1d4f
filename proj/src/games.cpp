#include "metasolve/games.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "metasolve/rng.hpp"

namespace metasolve {

PayoffMatrix make_rps() {
  Matrix g(3, 3);
  g << 0, -1, 1,
       1, 0, -1,
       -1, 1, 0;
  return PayoffMatrix::make_zero_sum(g);
}

PayoffMatrix make_rpsx() {
  const double x = 2.0 / 5.0;
  Matrix g(4, 4);
  g << 0, -1, 1, -x,
       1, 0, -1, -x,
       -1, 1, 0, -x,
       x, x, x, 0;
  return PayoffMatrix::make_zero_sum(g);
}

PayoffMatrix make_random_zero_sum(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("make_random_zero_sum: n must be >= 2");
  Rng rng(seed);
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.uniform(-1.0, 1.0);
      g(i, j) = v;
      g(j, i) = -v;
    }
  }
  return PayoffMatrix::make_zero_sum(g);
}

std::vector<std::vector<int>> blotto_allocations(const BlottoSpec& spec) {
  if (spec.areas < 1 || spec.coins < 0) throw std::invalid_argument("invalid Blotto spec");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(spec.areas, 0);
  // Lexicographic enumeration of compositions of `coins` into `areas` parts.
  std::function<void(int, int)> rec = [&](int area, int left) {
    if (area == spec.areas - 1) {
      cur[area] = left;
      out.push_back(cur);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      cur[area] = c;
      rec(area + 1, left - c);
    }
  };
  rec(0, spec.coins);
  return out;
}

PayoffMatrix make_blotto(const BlottoSpec& spec) {
  const auto allocs = blotto_allocations(spec);
  const int n = static_cast<int>(allocs.size());
  Matrix g = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int won = 0;
      for (int a = 0; a < spec.areas; ++a) {
        if (allocs[i][a] > allocs[j][a]) ++won;
        else if (allocs[i][a] < allocs[j][a]) --won;
      }
      g(i, j) = (won > 0) - (won < 0);
    }
  }
  return PayoffMatrix::make_zero_sum(g);
}

MixtureModelSpec MixtureModelSpec::seven_gaussians(double radius, double variance) {
  MixtureModelSpec spec;
  spec.centers.resize(7, 2);
  for (int k = 0; k < 7; ++k) {
    const double a = 2.0 * M_PI * k / 7.0;
    spec.centers(k, 0) = radius * std::cos(a);
    spec.centers(k, 1) = radius * std::sin(a);
  }
  spec.variance = variance;
  return spec;
}

Matrix mixture_cycle_matrix() {
  Matrix c(7, 7);
  c << 0, 1, 1, 1, -1, -1, -1,
       -1, 0, 1, 1, 1, -1, -1,
       -1, -1, 0, 1, 1, 1, -1,
       -1, -1, -1, 0, 1, 1, 1,
       1, -1, -1, -1, 0, 1, 1,
       1, 1, -1, -1, -1, 0, 1,
       1, 1, 1, -1, -1, -1, 0;
  return c;
}

Vector mixture_weights(const MixtureModelSpec& spec, const Vector& theta) {
  if (theta.size() != 2) throw std::invalid_argument("mixture engine expects 2-d parameters");
  const Eigen::Index k = spec.centers.rows();
  Vector w(k);
  const double norm = 1.0 / (2.0 * M_PI * spec.variance);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double dx = theta[0] - spec.centers(i, 0);
    const double dy = theta[1] - spec.centers(i, 1);
    w[i] = norm * std::exp(-(dx * dx + dy * dy) / (2.0 * spec.variance));
  }
  if (spec.normalize_weights) {
    const double s = w.sum();
    if (s > 0) w /= s;
  }
  return w;
}

GameEngine mixture_engine(const MixtureModelSpec& spec) {
  if (spec.variance <= 0) throw std::invalid_argument("mixture variance must be positive");
  const Eigen::Index k = spec.centers.rows();
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = i + 1; j < k; ++j)
      if ((spec.centers.row(i) - spec.centers.row(j)).norm() < 1e-12)
        throw std::invalid_argument("mixture centers must be pairwise distinct");
  if (k != 7) throw std::invalid_argument("mixture engine expects 7 centers");

  const Matrix c = mixture_cycle_matrix();
  GameEngine engine;
  engine.param_dim = 2;
  engine.differentiable = true;
  engine.evaluate = [spec, c](const Vector& a, const Vector& b) {
    const Vector wa = mixture_weights(spec, a);
    const Vector wb = mixture_weights(spec, b);
    return wa.dot(c * wb) + 0.5 * (wa.sum() - wb.sum());
  };
  engine.grad1 = [spec, c](const Vector& a, const Vector& b) {
    const Vector wa = mixture_weights(spec, a);
    const Vector wb = mixture_weights(spec, b);
    // d w_i / d theta for unnormalized weights: w_i * (c_i - theta) / var.
    Eigen::Matrix<double, Eigen::Dynamic, 2> dw(spec.centers.rows(), 2);
    for (Eigen::Index i = 0; i < spec.centers.rows(); ++i) {
      dw(i, 0) = wa[i] * (spec.centers(i, 0) - a[0]) / spec.variance;
      dw(i, 1) = wa[i] * (spec.centers(i, 1) - a[1]) / spec.variance;
    }
    if (spec.normalize_weights) {
      // w = u / s with s = sum(u): dw = (du * s - u * sum(du)) / s^2; here
      // `wa` is already normalized so recompute from unnormalized parts.
      MixtureModelSpec raw = spec;
      raw.normalize_weights = false;
      const Vector u = mixture_weights(raw, a);
      const double s = u.sum();
      Eigen::Matrix<double, Eigen::Dynamic, 2> du(spec.centers.rows(), 2);
      for (Eigen::Index i = 0; i < spec.centers.rows(); ++i) {
        du(i, 0) = u[i] * (spec.centers(i, 0) - a[0]) / spec.variance;
        du(i, 1) = u[i] * (spec.centers(i, 1) - a[1]) / spec.variance;
      }
      const Eigen::RowVector2d col_sums = du.colwise().sum();
      for (Eigen::Index i = 0; i < spec.centers.rows(); ++i)
        dw.row(i) = du.row(i) / s - (u[i] / (s * s)) * col_sums;
    }
    const Vector coeff = c * wb + Vector::Constant(spec.centers.rows(), 0.5);
    return Vector(dw.transpose() * coeff);
  };
  return engine;
}

namespace {

double parse_cell(const std::string& cell, int row, int col) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  while (end && *end == ' ') ++end;
  if (end == cell.c_str() || (end && *end != '\0') || errno == ERANGE)
    throw std::runtime_error("csv parse error at row " + std::to_string(row) + ", column " +
                             std::to_string(col) + ": '" + cell + "' is not a number");
  return v;
}

bool is_numeric(const std::string& cell) {
  errno = 0;
  char* end = nullptr;
  std::strtod(cell.c_str(), &end);
  while (end && *end == ' ') ++end;
  return end != cell.c_str() && end && *end == '\0' && errno != ERANGE;
}

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) cells.push_back(cur);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

PayoffMatrix load_meta_game(const std::string& path, bool antisymmetrize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open payoff csv: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (first && !cells.empty() && !is_numeric(cells[0])) {
      first = false;  // header row
      continue;
    }
    first = false;
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      row.push_back(parse_cell(cells[c], lineno, static_cast<int>(c) + 1));
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("csv parse error at row " + std::to_string(lineno) +
                               ": expected " + std::to_string(rows.front().size()) +
                               " cells, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("payoff csv is empty: " + path);
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
  if (antisymmetrize) {
    if (m.rows() != m.cols())
      throw std::runtime_error("antisymmetrize requires a square matrix");
    m = ((m - m.transpose()) / 2.0).eval();
  }
  return PayoffMatrix::make_zero_sum(m);
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", m(i, j));
      out << buf;
      if (j + 1 < m.cols()) out << ',';
    }
    out << '\n';
  }
}

}  // namespace metasolve
