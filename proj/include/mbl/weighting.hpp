#pragma once

// Information-gain feature weighting.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mbl/core.hpp"

namespace mbl {

/// Per-feature gain in bits.
struct WeightVector {
  std::vector<double> gains;

  std::size_t size() const noexcept { return gains.size(); }
  double operator[](std::size_t f) const { return gains.at(f); }
  /// Copy scaled to sum 1 (unchanged when every gain is zero).
  WeightVector normalized() const;

  bool operator==(const WeightVector&) const = default;
};

struct GainProfile {
  std::vector<std::pair<std::string, double>> rows;
  double database_entropy = 0.0;
};

/// Entropy in bits of a category count vector; zero counts contribute nothing.
double entropy_from_counts(std::span<const std::size_t> counts);

/// H(D) over the category distribution.
double database_entropy(const Dataset& dataset);
/// Sum over values v of H(D[f=v]) * |D[f=v]| / |D|. Every distinct value, including
/// Missing, a distinct number or a distinct tag set, is its own cell.
double feature_average_entropy(const Dataset& dataset, std::size_t f);
/// H(D) - H(D[f]), with round-off below 1e-12 clamped to zero.
double information_gain(const Dataset& dataset, std::size_t f);
WeightVector ig_weights(const Dataset& dataset);

GainProfile gain_profile(const Dataset& dataset);
/// One line per feature: name, a bar proportional to the gain, the gain to 4 decimals.
void render_gain_profile(const GainProfile& profile, std::ostream& out, bool normalize = false,
                         std::size_t bar_width = 40);

}  // namespace mbl
