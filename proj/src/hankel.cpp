#include "shlr/hankel.hpp"

#include <cmath>
#include <numbers>

#include "shlr/fft.hpp"

namespace shlr {

std::size_t HankelConfig::pencil_for(std::size_t len) const {
  if (pencil != 0) {
    if (pencil > len)
      throw std::invalid_argument("HankelConfig: pencil exceeds signal length");
    return pencil;
  }
  if (len >= 64) return 23;
  return len / 3 + (len % 3 ? 1 : 0) + 1;
}

std::size_t HankelConfig::pencil_for_param(std::size_t len) const {
  if (pencil_param != 0) {
    if (pencil_param > len)
      throw std::invalid_argument(
          "HankelConfig: parameter pencil exceeds signal length");
    return pencil_param;
  }
  if (len >= 64) return 23;
  return len / 3 + (len % 3 ? 1 : 0) + 1;
}

CMatrix hankel_lift(const std::vector<cplx>& v, std::size_t p) {
  const std::size_t n = v.size();
  if (p < 1 || p > n)
    throw std::invalid_argument("hankel_lift: pencil out of range");
  CMatrix out(p, n - p + 1);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j + p <= n; ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          v[i + j];
  return out;
}

std::vector<cplx> hankel_adjoint(const CMatrix& m, std::size_t n) {
  const std::size_t p = static_cast<std::size_t>(m.rows());
  const std::size_t q = static_cast<std::size_t>(m.cols());
  if (p < 1 || p + q != n + 1)
    throw std::invalid_argument("hankel_adjoint: dims inconsistent with n");
  std::vector<cplx> out(n, cplx{0, 0});
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j)
      out[i + j] += m(static_cast<Eigen::Index>(i),
                      static_cast<Eigen::Index>(j));
  return out;
}

std::vector<double> hankel_counts(std::size_t n, std::size_t p) {
  const std::size_t q = n - p + 1;
  std::vector<double> counts(n, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) counts[i + j] += 1.0;
  return counts;
}

HankelDims hankel_dims(std::size_t m, std::size_t n, std::size_t j,
                       std::size_t p, bool vc) {
  HankelDims d{};
  const std::size_t c = vc ? 2 : 1;
  d.separable_rows = p;
  d.separable_cols = c * j * (n - p + 1);
  d.block_rows = p * p * j;
  d.block_cols = (m - p + 1) * (n - p + 1);
  return d;
}

std::vector<cplx> weights_from_filter(const std::vector<cplx>& taps,
                                      std::size_t n) {
  if (taps.empty())
    throw std::invalid_argument("weights_from_filter: empty taps");
  if (taps.size() > n)
    throw std::invalid_argument("weights_from_filter: taps longer than n");
  std::vector<cplx> w(n, cplx{0, 0});
  for (std::size_t k = 0; k < n; ++k) {
    cplx s{0, 0};
    for (std::size_t t = 0; t < taps.size(); ++t) {
      double ang = -2.0 * std::numbers::pi * static_cast<double>(k) *
                   static_cast<double>(t) / static_cast<double>(n);
      s += taps[t] * cplx{std::cos(ang), std::sin(ang)};
    }
    w[k] = s;
  }
  return w;
}

std::vector<cplx> weights_centered(const std::vector<cplx>& taps,
                                   std::size_t n) {
  return fftshift(weights_from_filter(taps, n));
}

std::vector<cplx> virtual_coil_dagger(const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  if (n == 0)
    throw std::invalid_argument("virtual_coil_dagger: empty input");
  // Conjugate and flip about the DC slot floor(n/2): index i maps to
  // (2 floor(n/2) - i) mod n. For odd n this is the plain reversal n-1-i;
  // for even n the mod-n wrap keeps the centered spectrum of a real signal
  // an exact fixed point (plain reversal would shift it by one bin and the
  // filter weighting would then break the low-rank model).
  const std::size_t c2 = 2 * (n / 2);
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::conj(v[(c2 + n - i) % n]);
  return out;
}

} // namespace shlr
