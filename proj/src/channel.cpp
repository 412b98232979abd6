#include "qmimo/channel.hpp"

#include <stdexcept>

namespace qmimo {

ChannelRealization generate_channel(const SystemConfig& cfg, RngStream& rng) {
  ChannelRealization out{CMatrix(cfg.n_users, cfg.n_antennas)};
  rng.fill_complex_gaussian(out.h, 1.0);
  return out;
}

CVector sample_symbols(Eigen::Index n_users, RngStream& rng) {
  if (n_users < 1) {
    throw std::invalid_argument("sample_symbols: need at least one user");
  }
  CVector s(n_users);
  rng.fill_complex_gaussian(s, 1.0);
  return s;
}

CVector sample_noise(Eigen::Index n_users, double noise_power,
                     RngStream& rng) {
  if (noise_power < 0.0) {
    throw std::invalid_argument("sample_noise: negative noise power");
  }
  CVector n = CVector::Zero(n_users);
  if (noise_power > 0.0) {
    rng.fill_complex_gaussian(n, noise_power);
  }
  return n;
}

CMatrix sample_symbol_batch(Eigen::Index n_users, Eigen::Index batch,
                            RngStream& rng) {
  CMatrix s(batch, n_users);
  rng.fill_complex_gaussian(s, 1.0);
  return s;
}

}  // namespace qmimo
