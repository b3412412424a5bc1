#pragma once

#include <vector>

#include "shlr/tensor.hpp"

namespace shlr {

/// Calibrated self-consistency kernels: weights(di, dj, src, dst) predicts
/// each k-space point of coil `dst` from the k x k neighborhood of all coils,
/// with the self center tap fixed to zero.
class SpiritKernels {
public:
  SpiritKernels() = default;
  SpiritKernels(std::size_t kernel_size, std::size_t coils,
                std::vector<cplx> weights);

  std::size_t kernel_size() const { return k_; }
  std::size_t coils() const { return j_; }

  cplx weight(long di, long dj, std::size_t src, std::size_t dst) const {
    const long h = static_cast<long>(k_) / 2;
    return weights_[((static_cast<std::size_t>(di + h) * k_ +
                      static_cast<std::size_t>(dj + h)) *
                         j_ +
                     src) *
                        j_ +
                    dst];
  }

  const std::vector<cplx>& raw() const { return weights_; }

private:
  std::size_t k_ = 0, j_ = 0;
  std::vector<cplx> weights_; // k * k * J * J
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Least-squares kernel fit on a fully sampled a x b x J ACS block.
// `tikhonov` is relative: the ridge parameter is tikhonov * sigma_max of the
// calibration matrix.
SpiritKernels spirit_calibrate(const ComplexTensor& acs,
                               std::size_t kernel_size = 5,
                               double tikhonov = 1e-4);

// Image-domain application of the calibrated operator G to M x N x J images:
// pointwise multiplication by the transformed, zero-padded kernels,
// equivalent to circular convolution in k-space.
class SpiritImageOp {
public:
  SpiritImageOp(const SpiritKernels& g, std::size_t m, std::size_t n);

  ComplexTensor apply(const ComplexTensor& x) const; // G x
  // (G - I)^H (G - I) x, the normal form used by the reconstruction.
  ComplexTensor normal_minus_identity(const ComplexTensor& x) const;

  std::size_t coils() const { return j_; }

private:
  std::size_t m_ = 0, n_ = 0, j_ = 0;
  std::vector<ComplexTensor> maps_; // maps_[src * J + dst], each M x N (rank 2)
};

// Convenience one-shot application.
ComplexTensor spirit_apply(const SpiritKernels& g, const ComplexTensor& x);

} // namespace shlr
