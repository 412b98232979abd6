#include "qmimo/precoding.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qmimo {
namespace {

// Cholesky factor of HHᴴ after the conditioning guard.
Eigen::LLT<CMatrix> factor_gram(const CMatrix& h) {
  if (h.rows() > h.cols()) {
    throw SingularChannel("channel has more users than antennas");
  }
  const CMatrix gram = h * h.adjoint();
  const Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram,
                                                   Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxGramCondition) {
    throw SingularChannel("HH^H is numerically singular (condition " +
                          std::to_string(lo > 0.0 ? hi / lo : INFINITY) + ")");
  }
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw SingularChannel("Cholesky factorization of HH^H failed");
  }
  return llt;
}

double trace_of_inverse(const Eigen::LLT<CMatrix>& llt, Eigen::Index m) {
  const CMatrix inv = llt.solve(CMatrix::Identity(m, m));
  return inv.trace().real();
}

}  // namespace

ZfPrecoder zf_precoder(const ChannelRealization& channel, double power) {
  const auto llt = factor_gram(channel.h);
  const double tr = trace_of_inverse(llt, channel.n_users());

  ZfPrecoder out;
  out.power = power;
  out.inverse_gram_trace = tr;
  out.gain = std::sqrt(power / tr);
  // (HHᴴ)⁻¹H is M×N; its adjoint is Hᴴ(HHᴴ)⁻¹.
  out.p = out.gain * llt.solve(channel.h).adjoint();
  return out;
}

double wishart_trace(const ChannelRealization& channel) {
  return trace_of_inverse(factor_gram(channel.h), channel.n_users());
}

RVector diag_of_gram(const ZfPrecoder& precoder) {
  return precoder.p.rowwise().squaredNorm();
}

}  // namespace qmimo
