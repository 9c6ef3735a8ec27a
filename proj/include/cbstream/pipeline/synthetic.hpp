#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "cbstream/core/types.hpp"

namespace cbstream::pipeline {

struct SyntheticOptions {
  std::uint64_t seed = 0;
  std::size_t n = 2000;
  /// Index of the first sample labeled by the inverted concept.
  std::optional<std::size_t> drift_at;
  double label_noise = 0.1;
};

/// Labeled posts built from filler sentences and trait phrases. A post is
/// generated for a uniformly drawn base class: `present` posts carry one or two
/// non-sarcasm trait phrases, `absent` posts none; sarcasm phrases appear in
/// either class. The label is the base class (inverted from `drift_at` on),
/// then flipped with probability `label_noise`.
std::vector<RawPost> make_synthetic_stream(const SyntheticOptions& options);

}  // namespace cbstream::pipeline
