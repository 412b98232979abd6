#pragma once

#include "qmimo/rng.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

/// One Rayleigh draw: M×N, i.i.d. CN(0, 1). Row k is user k's channel.
struct ChannelRealization {
  CMatrix h;

  Eigen::Index n_users() const { return h.rows(); }
  Eigen::Index n_antennas() const { return h.cols(); }
};

ChannelRealization generate_channel(const SystemConfig& cfg, RngStream& rng);

/// Unit-variance CN(0, 1) data symbols, E{ssᴴ} = I.
CVector sample_symbols(Eigen::Index n_users, RngStream& rng);

/// CN(0, noise_power) entries; a zero noise power yields exact zeros.
CVector sample_noise(Eigen::Index n_users, double noise_power, RngStream& rng);

/// Symbol batch laid out time-major: `batch` rows, one column per user.
CMatrix sample_symbol_batch(Eigen::Index n_users, Eigen::Index batch,
                            RngStream& rng);

}  // namespace qmimo
