#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "metasolve/types.hpp"

namespace metasolve {

// Differentiable engine for an open-ended game over parameter vectors.
// evaluate(a, b) is the payoff to the player of `a`; for symmetric zero-sum
// engines evaluate(a, b) == -evaluate(b, a).
struct GameEngine {
  std::function<double(const Vector&, const Vector&)> evaluate;
  // Gradient of evaluate with respect to the first argument; empty when the
  // engine is not differentiable.
  std::function<Vector(const Vector&, const Vector&)> grad1;
  int param_dim = 0;
  bool differentiable = false;
};

struct BlottoSpec {
  int areas = 3;
  int coins = 10;
};

struct MixtureModelSpec {
  Eigen::Matrix<double, Eigen::Dynamic, 2> centers;  // one row per hump
  double variance = 1.0;
  bool normalize_weights = false;

  // Seven centers equally spaced on a circle, first at angle zero.
  static MixtureModelSpec seven_gaussians(double radius = 5.0, double variance = 2.5);
};

// 3x3 cyclic Rock-Paper-Scissors matrix.
PayoffMatrix make_rps();

// The 4x4 RPS-X matrix: the fourth strategy scores 2/5 against each of
// R, P, S and ties itself.
PayoffMatrix make_rpsx();

// Antisymmetric matrix with i.i.d. uniform [-1, 1] upper triangle.
PayoffMatrix make_random_zero_sum(int n, std::uint64_t seed);

// All coin allocations in lexicographic order; payoff is the sign of the
// difference in areas won.
PayoffMatrix make_blotto(const BlottoSpec& spec);
std::vector<std::vector<int>> blotto_allocations(const BlottoSpec& spec);

GameEngine mixture_engine(const MixtureModelSpec& spec);

// Gaussian mixture weights of a 2-d point against the spec's centers.
Vector mixture_weights(const MixtureModelSpec& spec, const Vector& theta);

// The fixed 7x7 cyclic win-loss matrix of the mixture game.
Matrix mixture_cycle_matrix();

// Dense CSV matrix loader. Optional single header row (detected by a
// non-numeric first cell) is skipped. When `antisymmetrize` is set the
// result is (M - M^T) / 2.
PayoffMatrix load_meta_game(const std::string& path, bool antisymmetrize = false);

void write_matrix_csv(const std::string& path, const Matrix& m);

}  // namespace metasolve
