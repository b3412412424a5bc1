#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shlr/tensor.hpp"

namespace shlr {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Parameters of the separable Hankel lifting: pencil size, 1D sparsifying
/// filter taps, and whether virtual-coil (conjugate-flip) blocks are appended.
struct HankelConfig {
  // 0 selects the default rule: 23 for lengths >= 64, ceil(len/3)+1 below.
  std::size_t pencil = 0;
  // Pencil for the (unweighted) parameter-direction lift; 0 = default rule.
  std::size_t pencil_param = 0;
  std::vector<cplx> filter_taps = {cplx{1, 0}, cplx{-1, 0}};
  bool virtual_coil = false;

  std::size_t pencil_for(std::size_t len) const;
  std::size_t pencil_for_param(std::size_t len) const;
};

// Hankel lift of a length-N vector: out(i, j) = v[i + j], p x (N - p + 1).
CMatrix hankel_lift(const std::vector<cplx>& v, std::size_t p);

// Adjoint of the lift: anti-diagonal sums, out[n] = sum_{i+j=n} m(i, j).
std::vector<cplx> hankel_adjoint(const CMatrix& m, std::size_t n);

// Multiplicity of each entry under lift followed by adjoint:
// counts[n] = #{(i, j) : i + j = n}.
std::vector<double> hankel_counts(std::size_t n, std::size_t p);

struct HankelDims {
  std::size_t separable_rows, separable_cols;
  std::size_t block_rows, block_cols;
};

// Dimension arithmetic comparing one separable per-row lifted matrix with
// the block-Hankel matrix of the full M x N x J data at pencil p.
HankelDims hankel_dims(std::size_t m, std::size_t n, std::size_t j,
                       std::size_t p, bool vc);

// Unnormalized DFT of the zero-padded filter taps, natural (DC-first)
// frequency ordering.
std::vector<cplx> weights_from_filter(const std::vector<cplx>& taps,
                                      std::size_t n);

// Centered-order weights aligned with fft1d_centered output positions.
std::vector<cplx> weights_centered(const std::vector<cplx>& taps,
                                   std::size_t n);

// Conjugate and flip about the DC slot: out[n] = conj(v[(2 floor(N/2) - n)
// mod N]); plain reversal conj(v[N-1-n]) for odd N.
std::vector<cplx> virtual_coil_dagger(const std::vector<cplx>& v);

} // namespace shlr
