#pragma once

#include <stdexcept>
#include <string>

#include "shlr/tensor.hpp"

namespace shlr {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BadMagicError : IoError {
  using IoError::IoError;
};
struct TruncatedFileError : IoError {
  using IoError::IoError;
};
struct DimOverflowError : IoError {
  using IoError::IoError;
};

// .cplx binary format:
//   "CPLX0001" | u8 precision (0 = 32-bit, 1 = 64-bit) | u32 ndim |
//   ndim x u64 dims | interleaved (re, im) scalars, little-endian, row-major.
void write_cplx(const ComplexTensor& t, const std::string& path,
                int precision = 64);
ComplexTensor read_cplx(const std::string& path);

// SSOS coil combination of an M x N x J tensor.
RealImage ssos(const ComplexTensor& x);

// SVD coil compression of M x N x J k-space (or image) data to j_out coils.
// retained_energy, when non-null, receives the fraction of squared singular
// values kept.
ComplexTensor coil_compress(const ComplexTensor& k, std::size_t j_out,
                            double* retained_energy = nullptr);

} // namespace shlr
