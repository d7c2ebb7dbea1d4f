#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <Eigen/Dense>

namespace metasolve {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSimplexTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kAntisymTol = 1e-9;

// Thrown when an iterative solver cannot meet its accuracy contract.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

// Thrown on invalid solver/oracle/game combinations and bad config files.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Probability vector over a strategy set.
struct MixedStrategy {
  Vector probs;

  static MixedStrategy uniform(Eigen::Index n) {
    if (n < 1) throw std::invalid_argument("MixedStrategy::uniform: empty strategy set");
    return {Vector::Constant(n, 1.0 / static_cast<double>(n))};
  }

  static MixedStrategy pure(Eigen::Index n, Eigen::Index i) {
    if (i < 0 || i >= n) throw std::invalid_argument("MixedStrategy::pure: index out of range");
    Vector v = Vector::Zero(n);
    v[i] = 1.0;
    return {std::move(v)};
  }

  static MixedStrategy from(Vector v) {
    MixedStrategy s{std::move(v)};
    s.validate();
    return s;
  }

  Eigen::Index size() const { return probs.size(); }

  void validate() const {
    if (probs.size() == 0) throw std::invalid_argument("MixedStrategy: empty vector");
    if (!probs.allFinite()) throw std::invalid_argument("MixedStrategy: non-finite entry");
    if (probs.minCoeff() < -kSimplexTol)
      throw std::invalid_argument("MixedStrategy: negative probability");
    if (std::abs(probs.sum() - 1.0) > kSimplexTol)
      throw std::invalid_argument("MixedStrategy: probabilities do not sum to 1");
  }
};

struct JointProfile {
  MixedStrategy p1;
  MixedStrategy p2;
};

// Payoff table of a two-player game. Zero-sum games store only player 1's
// matrix; player 2's payoffs are derived by negation.
class PayoffMatrix {
 public:
  static PayoffMatrix make_zero_sum(Matrix g) {
    if (!g.allFinite()) throw std::invalid_argument("PayoffMatrix: non-finite entry");
    PayoffMatrix m;
    m.p1_ = std::move(g);
    m.zero_sum_ = true;
    return m;
  }

  static PayoffMatrix make_general_sum(Matrix a, Matrix b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw std::invalid_argument("PayoffMatrix: player matrices must share a shape");
    if (!a.allFinite() || !b.allFinite())
      throw std::invalid_argument("PayoffMatrix: non-finite entry");
    PayoffMatrix m;
    m.p1_ = std::move(a);
    m.p2_ = std::move(b);
    m.zero_sum_ = false;
    return m;
  }

  Eigen::Index rows() const { return p1_.rows(); }
  Eigen::Index cols() const { return p1_.cols(); }
  bool zero_sum() const { return zero_sum_; }

  // Payoff to player 1 as stored.
  const Matrix& p1() const { return p1_; }

  // Payoff to player 2 (materialised by negation for zero-sum games).
  Matrix p2() const { return zero_sum_ ? Matrix(-p1_) : *p2_; }

  // True when square and antisymmetric within tol (symmetric zero-sum game).
  bool antisymmetric(double tol = kAntisymTol) const {
    if (!zero_sum_ || p1_.rows() != p1_.cols()) return false;
    return (p1_ + p1_.transpose()).cwiseAbs().maxCoeff() <= tol;
  }

 private:
  Matrix p1_;
  std::optional<Matrix> p2_;
  bool zero_sum_ = true;
};

inline void check_profile_shape(const PayoffMatrix& g, const JointProfile& p) {
  if (p.p1.size() != g.rows() || p.p2.size() != g.cols())
    throw std::invalid_argument("profile dimensions do not match payoff matrix");
}

}  // namespace metasolve
