#pragma once

#include <cstdint>
#include <vector>

#include "shlr/tensor.hpp"

namespace shlr {

struct Shape {
  enum class Kind { Rectangle, Ellipse };
  Kind kind = Kind::Rectangle;
  double center_row = 0, center_col = 0;
  double half_rows = 0, half_cols = 0; // half extents / semi-axes in pixels
  double intensity = 1.0;

  bool contains(double r, double c) const;
};

struct PhantomSpec {
  std::size_t rows = 0, cols = 0;
  std::size_t coils = 1;
  std::vector<Shape> shapes;
  double phase_smoothness = 0.0; // max phase gradient, rad/pixel
  double noise_sigma = 0.0;

  void validate() const;
};

// Smooth complex coil maps built from four fixed Gaussian lobes and
// normalized so sum_j |s_j|^2 = 1 at every pixel.
ComplexTensor gen_sensitivities(std::size_t m, std::size_t n, std::size_t j);

// Piecewise-constant magnitude image from the shape list (later shapes
// override earlier ones).
RealImage paint_shapes(std::size_t m, std::size_t n,
                       const std::vector<Shape>& shapes);

struct PiPhantom {
  ComplexTensor truth;  // M x N x J multi-coil image
  ComplexTensor kspace; // M x N x J centered k-space (+ optional noise)
};

PiPhantom gen_pi_phantom(const PhantomSpec& spec, std::uint64_t seed);

struct T2Region {
  Shape shape;
  double amplitude = 0.0;
  double t2_ms = 0.0;
};

struct T2Phantom {
  ComplexTensor truth; // M x N x L x J multi-coil echo images
  RealImage t2_truth;  // ground-truth T2 map (0 outside all regions)
  RealImage amplitude; // ground-truth amplitude map
};

T2Phantom gen_t2_phantom(std::size_t m, std::size_t n, std::size_t l,
                         std::size_t j, const std::vector<double>& tes_ms,
                         const std::vector<T2Region>& regions,
                         std::uint64_t seed);

} // namespace shlr
