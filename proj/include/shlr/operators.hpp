#pragma once

#include <optional>
#include <vector>

#include "shlr/hankel.hpp"
#include "shlr/sampling.hpp"
#include "shlr/spirit.hpp"
#include "shlr/tensor.hpp"

namespace shlr {

// Weighted spectral lift of a group of coil vectors (all the same length):
// per vector, centered FFT, weighting by the centered filter spectrum, Hankel
// lift, horizontal concatenation across coils; with cfg.virtual_coil the
// conjugate-flipped spectra are lifted and appended.
CMatrix lift_weighted(const std::vector<std::vector<cplx>>& vecs,
                      const HankelConfig& cfg);

// Adjoint of lift_weighted under the real inner product Re<.,.> (the
// virtual-coil blocks are conjugate-linear, so the complex pairing does not
// apply when they are enabled).
std::vector<std::vector<cplx>> adjoint_lift_weighted(const CMatrix& m,
                                                     std::size_t len,
                                                     std::size_t coils,
                                                     const HankelConfig& cfg);

// Plain Hankel lift of raw coil vectors (no FFT, no weighting, no vc); used
// for the parameter-dimension term.
CMatrix lift_plain(const std::vector<std::vector<cplx>>& vecs, std::size_t p);
std::vector<std::vector<cplx>> adjoint_lift_plain(const CMatrix& m,
                                                  std::size_t len,
                                                  std::size_t coils);

// Row/column extraction helpers on an M x N x J tensor.
std::vector<std::vector<cplx>> extract_rows(const ComplexTensor& x,
                                            std::size_t m);
std::vector<std::vector<cplx>> extract_cols(const ComplexTensor& x,
                                            std::size_t n);

CMatrix lift_rows(const ComplexTensor& x, std::size_t m,
                  const HankelConfig& cfg);
CMatrix lift_cols(const ComplexTensor& x, std::size_t n,
                  const HankelConfig& cfg);
ComplexTensor adjoint_lift_rows(const CMatrix& mat,
                                const std::vector<std::size_t>& dims,
                                std::size_t m, const HankelConfig& cfg);
ComplexTensor adjoint_lift_cols(const CMatrix& mat,
                                const std::vector<std::size_t>& dims,
                                std::size_t n, const HankelConfig& cfg);

// Self-adjoint composition L^H L applied to a group of coil vectors without
// materializing the lifted matrix (Hankel lift-adjoint reduces to
// anti-diagonal multiplicity weighting).
std::vector<std::vector<cplx>> lift_weighted_normal(
    const std::vector<std::vector<cplx>>& vecs, const HankelConfig& cfg);

// Full normal operator of the parallel-imaging X-subproblem:
//   lambda F* U* U F + beta sum_m P* L* L P + beta sum_n Q* L* L Q
//   + lambda1 (G - I)* (G - I).
ComplexTensor normal_apply(const ComplexTensor& x, const SamplingMask& mask,
                           const SpiritImageOp* g, const HankelConfig& cfg,
                           double lambda, double lambda1, double beta);

// Zero out unacquired k-space locations (line masks broadcast along rows).
ComplexTensor apply_mask(const ComplexTensor& k, const SamplingMask& mask);

} // namespace shlr
