#include "qmimo/rng.hpp"

#include <cmath>

namespace qmimo {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t key) {
  std::seed_seq seq{static_cast<std::uint32_t>(key),
                    static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(splitmix64(key)),
                    static_cast<std::uint32_t>(splitmix64(key) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed)
    : key_(splitmix64(seed)), engine_(seeded_engine(key_)) {}

RngStream RngStream::substream(std::uint64_t index) const {
  RngStream child(0);
  child.key_ = splitmix64(key_ ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  child.engine_ = seeded_engine(child.key_);
  return child;
}

cdouble RngStream::complex_gaussian(double variance) {
  const double sd = std::sqrt(variance / 2.0);
  const double re = normal_(engine_);
  const double im = normal_(engine_);
  return {sd * re, sd * im};
}

void RngStream::fill_complex_gaussian(Eigen::Ref<CMatrix> out,
                                      double variance) {
  const double sd = std::sqrt(variance / 2.0);
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double re = normal_(engine_);
      const double im = normal_(engine_);
      out(i, j) = cdouble(sd * re, sd * im);
    }
  }
}

}  // namespace qmimo
