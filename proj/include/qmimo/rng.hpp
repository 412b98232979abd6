#pragma once

#include <cstdint>
#include <random>

#include "qmimo/types.hpp"

namespace qmimo {

/// Seeded random stream that can be split into independent substreams.
///
/// A stream is identified by a 64-bit key. `substream(i)` derives a child key
/// from (key, i) with a SplitMix64 finalizer, so the state of trial `i` depends
/// only on the master seed and `i`, never on how many draws other trials made
/// or which worker ran them.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  RngStream substream(std::uint64_t index) const;

  std::uint64_t key() const { return key_; }

  double gaussian() { return normal_(engine_); }
  /// Circularly-symmetric CN(0, variance).
  cdouble complex_gaussian(double variance = 1.0);

  /// Fills `out` with i.i.d. CN(0, variance) entries, column by column.
  void fill_complex_gaussian(Eigen::Ref<CMatrix> out, double variance = 1.0);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace qmimo
