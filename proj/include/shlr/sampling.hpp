#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shlr {

// splitmix64; the documented recurrence keeps masks identical across
// implementations.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

/// Binary undersampling pattern over a 2D grid. Line masks have rows == 1
/// and broadcast along the readout dimension when applied.
struct SamplingMask {
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint8_t> bits; // rows * cols, row-major

  std::string generator;
  std::uint64_t seed = 0;
  double rate = 0.0;
  std::size_t acs = 0;
  double pf = 1.0;

  bool at(std::size_t r, std::size_t c) const {
    return bits[r * cols + c] != 0;
  }
  // Broadcasting lookup for applying a line mask to m x n data.
  bool sampled(std::size_t r, std::size_t c) const {
    return bits[(rows == 1 ? 0 : r) * cols + c] != 0;
  }
  std::size_t count() const;
  SamplingMask transposed() const;
};

// Half-open [start, end) of the centered contiguous block of `acs` indices:
// start = floor(N/2) - ceil(acs/2), e.g. {5, 6} for N = 12, acs = 2.
std::pair<std::size_t, std::size_t> acs_range(std::size_t n, std::size_t acs);

SamplingMask mask_uniform(std::size_t n, std::size_t r, std::size_t acs);
SamplingMask mask_gauss_cartesian(std::size_t n, double rate, std::size_t acs,
                                  std::uint64_t seed);
SamplingMask mask_random2d(std::size_t m, std::size_t n, double rate,
                           std::size_t center, std::uint64_t seed);
SamplingMask apply_partial_fourier(const SamplingMask& mask, double fraction);

// Serialization: 0/1 values in .cplx form plus a key=value sidecar
// (path + ".meta").
void write_mask(const SamplingMask& mask, const std::string& path);
SamplingMask read_mask(const std::string& path);

} // namespace shlr
