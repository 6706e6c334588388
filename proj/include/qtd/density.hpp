#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "qtd/errors.hpp"
#include "qtd/model.hpp"

namespace qtd {

enum class DensityKind { Superposition, Mixture, Point, Sampled };

/// One term of a Gaussian-sum density: weight * e^{-(zeta-center)^2/width^2} / (sqrt(pi) width).
/// Weights sum to one; the interference term of a superposition may be negative.
template <typename Scalar>
struct GaussianTerm {
  Scalar weight;
  Scalar center;
};

/// Supports within this many packet widths of a centre hold all but e^{-144} of the mass.
inline constexpr double kSupportWidths = 12.0;

/// Packets reaching below this height are rejected (horizon sits at -1).
inline constexpr double kHorizonGuard = -0.5;

/// Normalized probability density over dimensionless height zeta.
template <typename Scalar>
class BasicHeightDensity {
 public:
  static BasicHeightDensity superposition(const Superposition<Scalar>& s) {
    validate(s);
    BasicHeightDensity d(DensityKind::Superposition);
    d.sup_ = s;
    const Scalar kappa = interference_weight(s);
    const Scalar ct = std::cos(s.theta), st = std::sin(s.theta);
    d.width_ = s.delta;
    d.terms_ = {{ct * ct / (1 + kappa), s.z1},
                {st * st / (1 + kappa), s.z2},
                {kappa / (1 + kappa), (s.z1 + s.z2) / 2}};
    d.finish_gaussian();
    return d;
  }

  static BasicHeightDensity mixture(const Mixture<Scalar>& m) {
    validate(m);
    BasicHeightDensity d(DensityKind::Mixture);
    d.sup_ = {m.z1, m.z2, m.delta, m.theta, Scalar(0)};
    const Scalar ct = std::cos(m.theta), st = std::sin(m.theta);
    d.width_ = m.delta;
    d.terms_ = {{ct * ct, m.z1}, {st * st, m.z2}};
    d.finish_gaussian();
    return d;
  }

  static BasicHeightDensity point(Scalar zeta) {
    if (!(zeta > Scalar(kHorizonGuard)))
      throw DomainError("point density at or below the horizon guard");
    BasicHeightDensity d(DensityKind::Point);
    d.lo_ = d.hi_ = zeta;
    return d;
  }

  /// Piecewise-linear density on a strictly increasing grid, zero outside.
  /// With `normalize` the values are rescaled; otherwise they must already
  /// integrate to one within 1e-12.
  static BasicHeightDensity sampled(std::vector<Scalar> grid, std::vector<Scalar> values,
                                    bool normalize = false) {
    if (grid.size() < 2 || grid.size() != values.size())
      throw ContractViolation("sampled density needs >= 2 matching grid/value points");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1])) throw ContractViolation("sampled grid must increase");
    for (Scalar v : values)
      if (!(v >= 0)) throw ContractViolation("sampled density must be nonnegative");
    Scalar mass = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
      mass += (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]) / 2;
    if (normalize) {
      if (!(mass > 0)) throw ContractViolation("sampled density has zero mass");
      for (Scalar& v : values) v /= mass;
    } else if (std::abs(mass - 1) > Scalar(1e-12)) {
      throw ContractViolation("sampled density is not normalized");
    }
    if (!(grid.front() > Scalar(kHorizonGuard)))
      throw DomainError("sampled density reaches the horizon guard");
    BasicHeightDensity d(DensityKind::Sampled);
    d.lo_ = grid.front();
    d.hi_ = grid.back();
    d.grid_ = std::move(grid);
    d.values_ = std::move(values);
    return d;
  }

  DensityKind kind() const { return kind_; }
  bool is_gaussian_sum() const {
    return kind_ == DensityKind::Superposition || kind_ == DensityKind::Mixture;
  }

  Scalar operator()(Scalar zeta) const {
    switch (kind_) {
      case DensityKind::Superposition:
        return density_sup(sup_, zeta);
      case DensityKind::Mixture:
        return density_mix(matched_mixture(sup_), zeta);
      case DensityKind::Point:
        return zeta == lo_ ? std::numeric_limits<Scalar>::infinity() : Scalar(0);
      case DensityKind::Sampled: {
        if (zeta < lo_ || zeta > hi_) return 0;
        auto it = std::upper_bound(grid_.begin(), grid_.end(), zeta);
        if (it == grid_.end()) return values_.back();
        const auto i = static_cast<std::size_t>(it - grid_.begin());
        const Scalar t = (zeta - grid_[i - 1]) / (grid_[i] - grid_[i - 1]);
        return values_[i - 1] + t * (values_[i] - values_[i - 1]);
      }
    }
    return 0;
  }

  /// Interval outside which the density is below e^{-144} of its peak.
  std::pair<Scalar, Scalar> support() const { return {lo_, hi_}; }

  std::span<const GaussianTerm<Scalar>> terms() const { return terms_; }
  Scalar width() const { return width_; }
  Scalar point_location() const { return lo_; }
  std::span<const Scalar> grid() const { return grid_; }
  std::span<const Scalar> values() const { return values_; }

 private:
  explicit BasicHeightDensity(DensityKind k) : kind_(k) {}

  void finish_gaussian() {
    const Scalar a = std::min(sup_.z1, sup_.z2), b = std::max(sup_.z1, sup_.z2);
    lo_ = a - Scalar(kSupportWidths) * width_;
    hi_ = b + Scalar(kSupportWidths) * width_;
    if (!(lo_ > Scalar(kHorizonGuard)))
      throw DomainError("wave packet support reaches the horizon guard (zeta <= -0.5)");
  }

  DensityKind kind_;
  Superposition<Scalar> sup_{};
  std::vector<GaussianTerm<Scalar>> terms_;
  Scalar width_{};
  Scalar lo_{}, hi_{};
  std::vector<Scalar> grid_, values_;
};

using HeightDensity = BasicHeightDensity<double>;

}  // namespace qtd
