#pragma once

#include <vector>

#include "qcs/rng.hpp"

namespace qcs {

// Publicly known distribution p(alpha) of the acceptance ratio drawn by
// Trent at binding time. Support must lie inside (1/2, 1).
//
// Tabulated densities are piecewise linear between nodes and are
// normalized on construction.
class AlphaDistribution {
 public:
  enum class Kind { Uniform, PointMass, Tabulated };

  static AlphaDistribution uniform(double lo, double hi);
  static AlphaDistribution point_mass(double a);
  static AlphaDistribution tabulated(std::vector<double> nodes,
                                     std::vector<double> weights);

  Kind kind() const { return kind_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  // Density at alpha; zero outside the support. Meaningless for a point
  // mass (which has no density).
  double density(double alpha) const;

  double sample(Rng& rng) const;

  // Interior points where the density itself is non-smooth (tabulated
  // nodes); quadrature splits at these in addition to integrand jumps.
  std::vector<double> density_breakpoints() const;

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& node_densities() const { return densities_; }

 private:
  AlphaDistribution() = default;

  Kind kind_ = Kind::Uniform;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> nodes_;       // tabulated only
  std::vector<double> densities_;   // normalized node densities
  std::vector<double> cdf_;         // cumulative at nodes, for sampling
};

}  // namespace qcs
