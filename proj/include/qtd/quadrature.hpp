#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <queue>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qtd/density.hpp"
#include "qtd/errors.hpp"

namespace qtd {

enum class QuadratureMethod { GaussHermite, Adaptive };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::GaussHermite;
  int order = 64;                 // Gauss-Hermite node count
  double rel_tol = 1e-12;         // relative to the integrand's L1 norm
  double abs_tol = 1e-15;
  int max_subdivisions = 1 << 12;

  void validate() const {
    if (order < 2) throw ConfigError("order", "Gauss-Hermite order must be >= 2");
    if (!(rel_tol > 0)) throw ConfigError("rel_tol", "must be > 0");
    if (!(abs_tol > 0)) throw ConfigError("abs_tol", "must be > 0");
    if (max_subdivisions < 1) throw ConfigError("max_subdivisions", "must be >= 1");
  }

  static QuadratureSpec adaptive(double rel_tol = 1e-12) {
    QuadratureSpec q;
    q.method = QuadratureMethod::Adaptive;
    q.rel_tol = rel_tol;
    return q;
  }
  static QuadratureSpec gauss_hermite(int order = 64) {
    QuadratureSpec q;
    q.order = order;
    return q;
  }
};

/// Nodes and weights for the weight function e^{-x^2} on the real line.
template <typename Scalar>
struct GaussHermiteRule {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> nodes;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
};

/// Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix of
/// the Hermite recurrence, weights sqrt(pi) times the squared first
/// eigenvector components.
template <typename Scalar>
GaussHermiteRule<Scalar> compute_gauss_hermite(int n) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (n < 1) throw ContractViolation("Gauss-Hermite order must be positive");
  Matrix jacobi = Matrix::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const Scalar b = std::sqrt(Scalar(k) / 2);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(jacobi);
  GaussHermiteRule<Scalar> rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = std::sqrt(std::numbers::pi_v<Scalar>) *
                 solver.eigenvectors().row(0).transpose().array().square().matrix();
  // Symmetrize: nodes come in +/- pairs.
  for (int i = 0, j = n - 1; i < j; ++i, --j) {
    const Scalar x = (rule.nodes(j) - rule.nodes(i)) / 2;
    const Scalar w = (rule.weights(j) + rule.weights(i)) / 2;
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = rule.weights(j) = w;
  }
  if (n % 2 == 1) rule.nodes(n / 2) = 0;
  return rule;
}

/// Cached rule; safe to call from several threads.
template <typename Scalar>
const GaussHermiteRule<Scalar>& gauss_hermite(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussHermiteRule<Scalar>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussHermiteRule<Scalar>>(compute_gauss_hermite<Scalar>(n));
  return *slot;
}

namespace detail {

template <typename Scalar>
struct KronrodPiece {
  Scalar value = 0;
  Scalar error = 0;
  Scalar l1 = 0;
};

template <typename Scalar, typename F>
KronrodPiece<Scalar> kronrod_rule(F& f, Scalar a, Scalar b) {
  using boost::math::quadrature::gauss_kronrod;
  KronrodPiece<Scalar> p;
  // With zero depth the returned error is on the reference interval [-1, 1].
  p.value = gauss_kronrod<Scalar, 31>::integrate(f, a, b, 0, Scalar(0), &p.error, &p.l1);
  p.error *= (b - a) / 2;
  return p;
}

// Global bisection: the piece with the largest error is split until the
// summed error meets the budget or the subdivision limit is reached.
template <typename Scalar, typename F>
KronrodPiece<Scalar> kronrod_piece(F& f, Scalar a, Scalar b, const QuadratureSpec& q) {
  struct Leaf {
    Scalar a, b;
    KronrodPiece<Scalar> p;
    bool operator<(const Leaf& o) const { return p.error < o.p.error; }
  };
  std::priority_queue<Leaf> heap;
  KronrodPiece<Scalar> total = kronrod_rule(f, a, b);
  heap.push({a, b, total});
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int n = 1; n < q.max_subdivisions; ++n) {
    const Scalar budget = std::max({Scalar(q.abs_tol), Scalar(q.rel_tol) * total.l1, 4 * eps * total.l1});
    if (total.error <= budget) break;
    const Leaf worst = heap.top();
    const Scalar mid = (worst.a + worst.b) / 2;
    if (!(mid > worst.a && mid < worst.b)) break;
    heap.pop();
    const auto left = kronrod_rule(f, worst.a, mid);
    const auto right = kronrod_rule(f, mid, worst.b);
    total.value += left.value + right.value - worst.p.value;
    total.error += left.error + right.error - worst.p.error;
    total.l1 += left.l1 + right.l1 - worst.p.l1;
    heap.push({worst.a, mid, left});
    heap.push({mid, worst.b, right});
  }
  total.value = 0;
  total.error = 0;
  total.l1 = 0;
  for (; !heap.empty(); heap.pop()) {
    total.value += heap.top().p.value;
    total.error += heap.top().p.error;
    total.l1 += heap.top().p.l1;
  }
  return total;
}

// The Kronrod error estimate never drops below 2 eps |K| per leaf, so the
// accepted bound carries a rounding floor on the L1 norm.
template <typename Scalar>
Scalar check_piece(const KronrodPiece<Scalar>& p, const QuadratureSpec& q) {
  if (!std::isfinite(static_cast<double>(p.value)))
    throw AccuracyError("adaptive quadrature produced a non-finite value",
                        static_cast<double>(p.value), static_cast<double>(p.error));
  const Scalar floor = 4 * std::numeric_limits<Scalar>::epsilon() * p.l1;
  if (p.error > std::max({Scalar(q.abs_tol), Scalar(q.rel_tol) * p.l1, floor}))
    throw AccuracyError("adaptive quadrature did not converge", static_cast<double>(p.value),
                        static_cast<double>(p.error));
  return p.value;
}

}  // namespace detail

/// Adaptive 31-point Gauss-Kronrod on [a, b]. Throws AccuracyError when the
/// error estimate exceeds max(abs_tol, rel_tol * L1).
template <typename Scalar, typename F>
Scalar adaptive_integrate(F&& f, Scalar a, Scalar b, const QuadratureSpec& q) {
  if (!(b > a)) return Scalar(0);
  return detail::check_piece(detail::kronrod_piece(f, a, b, q), q);
}

/// Adaptive integral over [a, b] split at the given interior points. The
/// error budget applies to the whole interval.
template <typename Scalar, typename F>
Scalar adaptive_integrate_split(F&& f, Scalar a, Scalar b, std::vector<Scalar> cuts,
                                const QuadratureSpec& q) {
  cuts.push_back(a);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  detail::KronrodPiece<Scalar> total;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const Scalar lo = std::max(a, cuts[i - 1]);
    const Scalar hi = std::min(b, cuts[i]);
    if (!(hi > lo)) continue;
    const auto p = detail::kronrod_piece(f, lo, hi, q);
    total.value += p.value;
    total.error += p.error;
    total.l1 += p.l1;
  }
  return detail::check_piece(total, q);
}

/// Integral of f(zeta) * density(zeta) d zeta.
///
/// Gauss-Hermite path: each Gaussian term of a two-packet density is mapped to
/// its own standardized variable and summed with its weight (the interference
/// term is one more Gaussian centred at the midpoint). Adaptive path: the
/// pointwise density is integrated over the support hint, split at the packet
/// centres. Point masses evaluate f directly; sampled densities are integrated
/// segment by segment.
template <typename Scalar, typename F>
Scalar integrate_density(F&& f, const BasicHeightDensity<Scalar>& density,
                         const QuadratureSpec& q) {
  q.validate();
  switch (density.kind()) {
    case DensityKind::Point:
      return f(density.point_location());
    case DensityKind::Sampled: {
      const auto grid = density.grid();
      Scalar sum = 0;
      for (std::size_t i = 1; i < grid.size(); ++i) {
        auto g = [&](Scalar z) { return f(z) * density(z); };
        sum += boost::math::quadrature::gauss_kronrod<Scalar, 15>::integrate(g, grid[i - 1],
                                                                             grid[i], 0);
      }
      return sum;
    }
    case DensityKind::Superposition:
    case DensityKind::Mixture:
      break;
  }
  const Scalar w = density.width();
  if (q.method == QuadratureMethod::GaussHermite) {
    const auto& rule = gauss_hermite<Scalar>(q.order);
    const Scalar inv_sqrt_pi = 1 / std::sqrt(std::numbers::pi_v<Scalar>);
    Scalar sum = 0;
    for (const auto& term : density.terms()) {
      if (term.weight == 0) continue;
      Scalar part = 0;
      for (Eigen::Index k = 0; k < rule.nodes.size(); ++k)
        part += rule.weights(k) * f(term.center + w * rule.nodes(k));
      sum += term.weight * inv_sqrt_pi * part;
    }
    return sum;
  }
  std::vector<Scalar> cuts;
  for (const auto& term : density.terms())
    for (int k = -4; k <= 4; k += 2) cuts.push_back(term.center + Scalar(k) * w);
  const auto [lo, hi] = density.support();
  auto g = [&](Scalar z) { return f(z) * density(z); };
  return adaptive_integrate_split(g, lo, hi, std::move(cuts), q);
}

}  // namespace qtd
