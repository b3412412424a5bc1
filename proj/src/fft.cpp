#include "shlr/fft.hpp"

#include <cmath>
#include <numbers>

namespace shlr {

namespace {

bool is_pow2(std::size_t n) { return n && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey, unnormalized.
void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
    const cplx wlen{std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < n; i += len) {
      cplx w{1.0, 0.0};
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Unnormalized DFT of arbitrary length via Bluestein's chirp-z transform.
std::vector<cplx> dft_any(const std::vector<cplx>& x, bool inverse) {
  const std::size_t n = x.size();
  if (n == 1) return x;
  if (is_pow2(n)) {
    std::vector<cplx> a = x;
    fft_pow2(a, inverse);
    return a;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument bounded.
    double q = static_cast<double>((static_cast<unsigned long long>(k) * k) %
                                   (2 * n));
    double ang = sign * std::numbers::pi * q / static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  std::vector<cplx> a(m, cplx{0, 0}), b(m, cplx{0, 0});
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k)
    b[k] = b[m - k] = std::conj(chirp[k]);
  fft_pow2(a, false);
  fft_pow2(b, false);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, true);
  std::vector<cplx> out(n);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
  return out;
}

} // namespace

std::vector<cplx> fftshift(const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  const std::size_t c = dc_index(n);
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[(i + c) % n] = v[i];
  return out;
}

std::vector<cplx> ifftshift(const std::vector<cplx>& v) {
  const std::size_t n = v.size();
  const std::size_t c = dc_index(n);
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[(i + c) % n];
  return out;
}

std::vector<cplx> fft1d_natural(const std::vector<cplx>& v, bool inverse) {
  if (v.empty())
    throw std::invalid_argument("fft: empty input");
  std::vector<cplx> out = dft_any(v, inverse);
  const double s = 1.0 / std::sqrt(static_cast<double>(v.size()));
  for (auto& x : out) x *= s;
  return out;
}

std::vector<cplx> fft1d_centered(const std::vector<cplx>& v) {
  return fftshift(fft1d_natural(ifftshift(v), false));
}

std::vector<cplx> ifft1d_centered(const std::vector<cplx>& v) {
  return fftshift(fft1d_natural(ifftshift(v), true));
}

ComplexTensor fft_along_axis(const ComplexTensor& x, std::size_t axis,
                             bool inverse) {
  if (axis >= x.rank())
    throw std::invalid_argument("fft_along_axis: axis out of range");
  const auto& dims = x.dims();
  const std::size_t n = dims[axis];
  std::size_t inner = 1, outer = 1;
  for (std::size_t i = axis + 1; i < dims.size(); ++i) inner *= dims[i];
  for (std::size_t i = 0; i < axis; ++i) outer *= dims[i];

  ComplexTensor out(dims);
  std::vector<cplx> fiber(n);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * n * inner + i;
      for (std::size_t k = 0; k < n; ++k) fiber[k] = x[base + k * inner];
      auto f = inverse ? ifft1d_centered(fiber) : fft1d_centered(fiber);
      for (std::size_t k = 0; k < n; ++k) out[base + k * inner] = f[k];
    }
  return out;
}

ComplexTensor fft2d_centered(const ComplexTensor& x) {
  if (x.rank() != 3)
    throw std::invalid_argument("fft2d_centered: expected M x N x J");
  return fft_along_axis(fft_along_axis(x, 0, false), 1, false);
}

ComplexTensor ifft2d_centered(const ComplexTensor& x) {
  if (x.rank() != 3)
    throw std::invalid_argument("ifft2d_centered: expected M x N x J");
  return fft_along_axis(fft_along_axis(x, 0, true), 1, true);
}

} // namespace shlr
