#pragma once

#include <functional>
#include <optional>
#include <ostream>

#include "shlr/hankel.hpp"
#include "shlr/operators.hpp"
#include "shlr/sampling.hpp"
#include "shlr/spirit.hpp"
#include "shlr/tensor.hpp"

namespace shlr {

/// ADMM settings for both reconstruction drivers.
struct AdmmConfig {
  double lambda = 1e4;  // data fidelity
  double lambda1 = 1e2; // self-consistency weight
  double lambda2 = 2.0; // parameter-dimension weight
  double beta = 1.0;    // penalty
  double tau = 1.0;     // multiplier step
  std::size_t max_outer = 50; // 50 for parallel imaging, 100 for parameter
  double tol = 1e-6;
  std::size_t cg_max = 15;
  double cg_tol = 1e-8;
  bool enable_spirit = false;
  bool enable_vc = false;

  void validate() const {
    if (lambda <= 0 || lambda1 < 0 || lambda2 < 0 || beta <= 0 || tau <= 0 ||
        tol <= 0 || cg_tol <= 0)
      throw std::invalid_argument("AdmmConfig: invalid parameter");
  }
};

struct SolveStats {
  std::size_t outer_iters = 0;
  double final_rel_change = 0.0;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Singular value soft-thresholding: U max(S - tau, 0) V^H.
CMatrix svt(const CMatrix& m, double tau);

struct CgResult {
  std::size_t iterations = 0;
  double relative_residual = 0.0;
};

// Conjugate gradient for a self-adjoint positive operator, warm-started from
// x0. Inner products are taken as Re<.,.>, which coincides with the complex
// pairing for Hermitian operators and remains valid for the conjugate-linear
// virtual-coil terms.
ComplexTensor cg_solve(
    const std::function<ComplexTensor(const ComplexTensor&)>& apply_a,
    const ComplexTensor& b, const ComplexTensor& x0, std::size_t max_iter,
    double tol, CgResult* result = nullptr);

// Parallel-imaging ADMM (SHLR / SHLR-S / SHLR-V / SHLR-SV depending on
// enable_spirit / enable_vc). Y is zero-filled multi-coil k-space.
ComplexTensor shlr_pi_reconstruct(const ComplexTensor& y,
                                  const SamplingMask& mask,
                                  const SpiritKernels* g,
                                  const HankelConfig& hcfg,
                                  const AdmmConfig& acfg,
                                  std::ostream* log = nullptr,
                                  SolveStats* stats = nullptr);

// Parameter-imaging ADMM on one PE-P plane (SHLR-P / SHLR-VP depending on
// enable_vc). y_m is the zero-filled N x L x J plane at one FE position.
ComplexTensor shlr_param_reconstruct_slice(const ComplexTensor& y_m,
                                           const SamplingMask& mask,
                                           const HankelConfig& hcfg,
                                           const AdmmConfig& acfg,
                                           std::ostream* log = nullptr,
                                           SolveStats* stats = nullptr);

} // namespace shlr
