#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bkmodes/dataset.hpp"
#include "bkmodes/rng.hpp"

namespace bkmodes {

// Planted-cluster synthetic data: rows are noisy copies of k_true random
// planted modes, assigned round-robin so cluster sizes stay balanced.
struct SynthDataset {
  CategoricalDataset dataset;
  std::vector<DataPoint> planted_modes;
  std::vector<ClusterIndex> planted_assignments;
};

// Each attribute of each row is flipped with probability flip_prob to a
// uniformly chosen *different* category. Fully deterministic per seed: modes
// are drawn first (row-major), then cells row-major, one unit draw per cell
// plus one bounded draw when it flips.
inline SynthDataset synth_generate(std::size_t k_true, std::size_t n,
                                   std::size_t m, std::uint32_t cardinality,
                                   double flip_prob, std::uint64_t seed) {
  if (k_true < 1) throw std::invalid_argument("synth: k_true must be >= 1");
  if (n < 1 || m < 1) throw std::invalid_argument("synth: need n,m >= 1");
  if (cardinality < 1 || cardinality > kMaxCardinality)
    throw std::invalid_argument("synth: cardinality out of range");
  if (flip_prob < 0.0 || flip_prob >= 1.0)
    throw std::invalid_argument("synth: flip_prob must be in [0, 1)");
  if (cardinality < 2 && flip_prob > 0.0)
    throw std::invalid_argument(
        "synth: flip_prob > 0 needs at least two categories");

  Rng rng(seed);
  std::vector<DataPoint> modes(k_true, DataPoint(m));
  for (DataPoint& mode : modes)
    for (std::size_t a = 0; a < m; ++a)
      mode[a] = static_cast<Code>(draw_below(rng, cardinality));

  std::vector<Code> codes(n * m);
  std::vector<ClusterIndex> assignments(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cluster = static_cast<ClusterIndex>(i % k_true);
    assignments[i] = cluster;
    const DataPoint& mode = modes[cluster];
    for (std::size_t a = 0; a < m; ++a) {
      Code value = mode[a];
      if (flip_prob > 0.0 && draw_unit(rng) < flip_prob) {
        const std::uint64_t offset = 1 + draw_below(rng, cardinality - 1);
        value = static_cast<Code>((value + offset) % cardinality);
      }
      codes[i * m + a] = value;
    }
  }

  std::vector<std::string> names(m);
  for (std::size_t a = 0; a < m; ++a) names[a] = "a" + std::to_string(a);
  return SynthDataset{
      CategoricalDataset(n, m, std::vector<std::uint32_t>(m, cardinality),
                         std::move(codes), std::move(names)),
      std::move(modes), std::move(assignments)};
}

}  // namespace bkmodes
