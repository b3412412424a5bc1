#pragma once

#include <vector>

#include "shlr/solvers.hpp"
#include "shlr/tensor.hpp"

namespace shlr {

/// Multi-echo multi-coil dataset: FE x PE x P x coils plus echo times.
struct ParameterDataset {
  ComplexTensor data; // M x N x L x J
  std::vector<double> tes_ms;

  void validate() const;
  std::size_t fe() const { return data.dim(0); }
  std::size_t pe() const { return data.dim(1); }
  std::size_t echoes() const { return data.dim(2); }
  std::size_t coils() const { return data.dim(3); }
};

struct T2Map {
  RealImage t2;        // ms
  RealImage amplitude;
  std::vector<std::uint8_t> valid; // rows * cols

  bool is_valid(std::size_t r, std::size_t c) const {
    return valid[r * t2.cols() + c] != 0;
  }
};

// Per-FE-slice reconstruction: 1D inverse FFT along FE, then
// shlr_param_reconstruct_slice for every FE position with the same
// N x L mask, reassembled into image space.
ParameterDataset recon_param_dataset(const ParameterDataset& y,
                                     const SamplingMask& mask,
                                     const HankelConfig& hcfg,
                                     const AdmmConfig& acfg,
                                     std::ostream* log = nullptr,
                                     std::size_t* total_iters = nullptr);

struct T2Fit {
  double amplitude = 0.0;
  double t2_ms = 0.0;
  bool valid = false;
};

// Mono-exponential fit s(TE) = A exp(-TE / T2): log-linear initialization
// followed by Gauss-Newton refinement. valid = false when T2 leaves
// (0, t2_max] ms, A <= 0, or the signal maximum is below `floor`.
T2Fit fit_t2(const std::vector<double>& signal,
             const std::vector<double>& tes_ms, double t2_max_ms = 400.0,
             double floor = 1e-12);

// Pixelwise T2 fit on SSOS magnitude echoes; pixels below
// roi_threshold * max(first echo) are marked invalid.
T2Map t2_map(const ParameterDataset& images, double roi_threshold = 0.1,
             double t2_max_ms = 400.0);

// T2 map export: real part = T2 (ms), imaginary = 0; validity mask written
// alongside as `path + ".valid"`.
void write_t2_map(const T2Map& map, const std::string& path);

} // namespace shlr
