#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace shlr {

using cplx = std::complex<double>;

/// N-dimensional complex array, row-major (last dimension fastest-varying).
class ComplexTensor {
public:
  ComplexTensor() = default;

  explicit ComplexTensor(std::vector<std::size_t> dims)
      : dims_(std::move(dims)) {
    if (dims_.empty())
      throw std::invalid_argument("ComplexTensor: rank must be >= 1");
    std::size_t n = 1;
    for (auto d : dims_) {
      if (d == 0)
        throw std::invalid_argument("ComplexTensor: all dims must be >= 1");
      n *= d;
    }
    data_.assign(n, cplx{0.0, 0.0});
  }

  ComplexTensor(std::vector<std::size_t> dims, std::vector<cplx> data)
      : ComplexTensor(std::move(dims)) {
    if (data.size() != data_.size())
      throw std::invalid_argument("ComplexTensor: data size does not match dims");
    data_ = std::move(data);
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t dim(std::size_t i) const { return dims_.at(i); }
  std::size_t size() const { return data_.size(); }

  cplx* data() { return data_.data(); }
  const cplx* data() const { return data_.data(); }

  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  // Row-major linear index for up to 4 subscripts.
  std::size_t index(std::size_t i0, std::size_t i1) const {
    return i0 * dims_[1] + i1;
  }
  std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2) const {
    return (i0 * dims_[1] + i1) * dims_[2] + i2;
  }
  std::size_t index(std::size_t i0, std::size_t i1, std::size_t i2,
                    std::size_t i3) const {
    return ((i0 * dims_[1] + i1) * dims_[2] + i2) * dims_[3] + i3;
  }

  cplx& at(std::size_t i0, std::size_t i1) { return data_[index(i0, i1)]; }
  const cplx& at(std::size_t i0, std::size_t i1) const {
    return data_[index(i0, i1)];
  }
  cplx& at(std::size_t i0, std::size_t i1, std::size_t i2) {
    return data_[index(i0, i1, i2)];
  }
  const cplx& at(std::size_t i0, std::size_t i1, std::size_t i2) const {
    return data_[index(i0, i1, i2)];
  }
  cplx& at(std::size_t i0, std::size_t i1, std::size_t i2, std::size_t i3) {
    return data_[index(i0, i1, i2, i3)];
  }
  const cplx& at(std::size_t i0, std::size_t i1, std::size_t i2,
                 std::size_t i3) const {
    return data_[index(i0, i1, i2, i3)];
  }

  bool same_shape(const ComplexTensor& o) const { return dims_ == o.dims_; }

  ComplexTensor& operator+=(const ComplexTensor& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexTensor& operator-=(const ComplexTensor& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexTensor& operator*=(cplx s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend ComplexTensor operator+(ComplexTensor a, const ComplexTensor& b) {
    a += b;
    return a;
  }
  friend ComplexTensor operator-(ComplexTensor a, const ComplexTensor& b) {
    a -= b;
    return a;
  }
  friend ComplexTensor operator*(cplx s, ComplexTensor a) {
    a *= s;
    return a;
  }

private:
  void check_shape(const ComplexTensor& o) const {
    if (!same_shape(o))
      throw std::invalid_argument("ComplexTensor: shape mismatch");
  }

  std::vector<std::size_t> dims_;
  std::vector<cplx> data_;
};

/// 2D nonnegative real image.
class RealImage {
public:
  RealImage() = default;
  RealImage(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("RealImage: dims must be >= 1");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline cplx dot(const ComplexTensor& a, const ComplexTensor& b) {
  if (!a.same_shape(b))
    throw std::invalid_argument("dot: shape mismatch");
  cplx s{0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

// Real part of the complex inner product; the natural pairing once
// conjugate-symmetric (virtual coil) blocks enter the operators.
inline double rdot(const ComplexTensor& a, const ComplexTensor& b) {
  return dot(a, b).real();
}

inline double norm2(const ComplexTensor& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i]);
  return std::sqrt(s);
}

} // namespace shlr
