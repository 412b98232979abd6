#pragma once

#include "qmimo/channel.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

/// Condition-number bound on HHᴴ above which a draw counts as singular.
inline constexpr double kMaxGramCondition = 1e12;

/// Zero-forcing precoder P = c·Hᴴ(HHᴴ)⁻¹ with c = √(P / tr{(HHᴴ)⁻¹}).
///
/// By construction tr{PPᴴ} equals the total power and HP = c·I.
struct ZfPrecoder {
  CMatrix p;            // N×M
  double power = 0.0;   // total transmit power P
  double gain = 0.0;    // c, the per-user effective channel gain
  double inverse_gram_trace = 0.0;
};

/// Throws SingularChannel when HHᴴ is numerically singular.
ZfPrecoder zf_precoder(const ChannelRealization& channel, double power);

/// tr{(HHᴴ)⁻¹}; throws SingularChannel like zf_precoder.
double wishart_trace(const ChannelRealization& channel);

/// Diagonal of PPᴴ (length N); sums to the total power.
RVector diag_of_gram(const ZfPrecoder& precoder);

}  // namespace qmimo
