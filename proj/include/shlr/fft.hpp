#pragma once

#include <vector>

#include "shlr/tensor.hpp"

namespace shlr {

// Unitary centered DFT: both input and output are indexed with DC at
// floor(N/2). Forward/inverse are exact inverses of each other.
std::vector<cplx> fft1d_centered(const std::vector<cplx>& v);
std::vector<cplx> ifft1d_centered(const std::vector<cplx>& v);

// Unitary DFT in natural (DC-first) ordering, any length.
std::vector<cplx> fft1d_natural(const std::vector<cplx>& v, bool inverse);

// Per-coil 2D centered transforms of an M x N x J tensor.
ComplexTensor fft2d_centered(const ComplexTensor& x);
ComplexTensor ifft2d_centered(const ComplexTensor& x);

// Centered transform along one axis of a tensor of any rank, applied to
// every 1D fiber along `axis`.
ComplexTensor fft_along_axis(const ComplexTensor& x, std::size_t axis,
                             bool inverse);

inline std::size_t dc_index(std::size_t n) { return n / 2; }

// fftshift / ifftshift with center floor(N/2).
std::vector<cplx> fftshift(const std::vector<cplx>& v);
std::vector<cplx> ifftshift(const std::vector<cplx>& v);

} // namespace shlr
