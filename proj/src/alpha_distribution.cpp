#include "qcs/alpha_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qcs {

namespace {

void require_in_open_half(double a, const char* what) {
  if (!(a > 0.5 && a < 1.0)) {
    throw std::invalid_argument(std::string(what) +
                                ": acceptance ratio must lie in (1/2, 1)");
  }
}

}  // namespace

AlphaDistribution AlphaDistribution::uniform(double lo, double hi) {
  require_in_open_half(lo, "alpha_lo");
  require_in_open_half(hi, "alpha_hi");
  if (!(lo < hi)) {
    throw std::invalid_argument("alpha_lo: must be strictly below alpha_hi");
  }
  AlphaDistribution d;
  d.kind_ = Kind::Uniform;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

AlphaDistribution AlphaDistribution::point_mass(double a) {
  require_in_open_half(a, "alpha_point");
  AlphaDistribution d;
  d.kind_ = Kind::PointMass;
  d.lo_ = a;
  d.hi_ = a;
  return d;
}

AlphaDistribution AlphaDistribution::tabulated(std::vector<double> nodes,
                                               std::vector<double> weights) {
  if (nodes.size() < 2 || nodes.size() != weights.size()) {
    throw std::invalid_argument(
        "alpha_nodes: need at least two nodes with matching weights");
  }
  if (!std::is_sorted(nodes.begin(), nodes.end()) ||
      std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end()) {
    throw std::invalid_argument("alpha_nodes: must be strictly increasing");
  }
  for (double a : nodes) require_in_open_half(a, "alpha_nodes");
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (weights[i] < 0.0 || weights[i + 1] < 0.0) {
      throw std::invalid_argument("alpha_weights: must be non-negative");
    }
    mass += 0.5 * (weights[i] + weights[i + 1]) * (nodes[i + 1] - nodes[i]);
  }
  if (mass <= 0.0) {
    throw std::invalid_argument("alpha_weights: total mass must be positive");
  }

  AlphaDistribution d;
  d.kind_ = Kind::Tabulated;
  d.lo_ = nodes.front();
  d.hi_ = nodes.back();
  d.nodes_ = std::move(nodes);
  d.densities_.resize(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    d.densities_[i] = weights[i] / mass;
  }
  d.cdf_.assign(d.nodes_.size(), 0.0);
  for (std::size_t i = 0; i + 1 < d.nodes_.size(); ++i) {
    d.cdf_[i + 1] = d.cdf_[i] + 0.5 * (d.densities_[i] + d.densities_[i + 1]) *
                                    (d.nodes_[i + 1] - d.nodes_[i]);
  }
  d.cdf_.back() = 1.0;
  return d;
}

double AlphaDistribution::density(double alpha) const {
  switch (kind_) {
    case Kind::Uniform:
      return (alpha >= lo_ && alpha <= hi_) ? 1.0 / (hi_ - lo_) : 0.0;
    case Kind::PointMass:
      return 0.0;
    case Kind::Tabulated: {
      if (alpha < lo_ || alpha > hi_) return 0.0;
      const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), alpha);
      const std::size_t hi = std::min<std::size_t>(
          static_cast<std::size_t>(it - nodes_.begin()), nodes_.size() - 1);
      const std::size_t lo = hi - 1;
      const double t = (alpha - nodes_[lo]) / (nodes_[hi] - nodes_[lo]);
      return densities_[lo] + t * (densities_[hi] - densities_[lo]);
    }
  }
  return 0.0;
}

double AlphaDistribution::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::Uniform:
      return lo_ + rng.next_double() * (hi_ - lo_);
    case Kind::PointMass:
      return lo_;
    case Kind::Tabulated: {
      const double u = rng.next_double();
      const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
      const std::size_t hi = std::min<std::size_t>(
          std::max<std::size_t>(1, static_cast<std::size_t>(it - cdf_.begin())),
          cdf_.size() - 1);
      const std::size_t lo = hi - 1;
      const double seg = cdf_[hi] - cdf_[lo];
      const double t = seg > 0.0 ? (u - cdf_[lo]) / seg : 0.0;
      // Inverse of the trapezoid CDF on the segment.
      const double d0 = densities_[lo];
      const double d1 = densities_[hi];
      const double w = nodes_[hi] - nodes_[lo];
      if (std::abs(d1 - d0) < 1e-12 * (d0 + d1 + 1e-300)) {
        return nodes_[lo] + t * w;
      }
      const double slope = (d1 - d0) / w;
      const double disc = d0 * d0 + 2.0 * slope * t * seg;
      return nodes_[lo] + (std::sqrt(std::max(0.0, disc)) - d0) / slope;
    }
  }
  return lo_;
}

std::vector<double> AlphaDistribution::density_breakpoints() const {
  if (kind_ != Kind::Tabulated || nodes_.size() <= 2) return {};
  return std::vector<double>(nodes_.begin() + 1, nodes_.end() - 1);
}

}  // namespace qcs
