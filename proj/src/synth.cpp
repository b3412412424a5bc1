#include "shlr/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shlr/fft.hpp"
#include "shlr/sampling.hpp"

namespace shlr {

bool Shape::contains(double r, double c) const {
  const double dr = r - center_row;
  const double dc = c - center_col;
  if (kind == Kind::Rectangle)
    return std::abs(dr) <= half_rows && std::abs(dc) <= half_cols;
  const double a = dr / half_rows, b = dc / half_cols;
  return a * a + b * b <= 1.0;
}

void PhantomSpec::validate() const {
  if (rows == 0 || cols == 0 || coils == 0)
    throw std::invalid_argument("PhantomSpec: empty dims");
  if (shapes.empty())
    throw std::invalid_argument("PhantomSpec: at least one shape required");
  for (const auto& s : shapes)
    if (s.intensity < 0)
      throw std::invalid_argument("PhantomSpec: negative intensity");
  if (phase_smoothness < 0 || noise_sigma < 0)
    throw std::invalid_argument("PhantomSpec: negative parameter");
}

ComplexTensor gen_sensitivities(std::size_t m, std::size_t n, std::size_t j) {
  if (j < 1)
    throw std::invalid_argument("gen_sensitivities: need at least one coil");
  // Four Gaussian basis lobes near the corners; every coil map is a fixed
  // complex combination of them, so the reshaped maps have rank <= 4.
  const double cm[4] = {0.2, 0.2, 0.8, 0.8};
  const double cn[4] = {0.2, 0.8, 0.2, 0.8};
  const double sigma = 0.6 * static_cast<double>(std::max(m, n));

  std::vector<RealImage> basis;
  for (int b = 0; b < 4; ++b) {
    RealImage lobe(m, n);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const double dr = static_cast<double>(r) - cm[b] * static_cast<double>(m);
        const double dc = static_cast<double>(c) - cn[b] * static_cast<double>(n);
        lobe.at(r, c) = std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
      }
    basis.push_back(std::move(lobe));
  }

  ComplexTensor maps({m, n, j});
  for (std::size_t q = 0; q < j; ++q) {
    // Coil 0 uses all-positive coefficients, keeping the pointwise energy
    // strictly positive before normalization.
    cplx coeff[4];
    for (int b = 0; b < 4; ++b) {
      const double ang = (q == 0) ? 0.0
                                  : 0.7 * static_cast<double>(q) +
                                        1.3 * static_cast<double>(b);
      const double mag = 0.5 + 0.5 * std::cos(0.9 * static_cast<double>(q) +
                                              0.4 * static_cast<double>(b)) *
                                   0.9;
      coeff[b] = mag * cplx{std::cos(ang), std::sin(ang)};
    }
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        cplx s{0, 0};
        for (int b = 0; b < 4; ++b) s += coeff[b] * basis[b].at(r, c);
        maps.at(r, c, q) = s;
      }
  }
  // Pointwise normalization is a diagonal row scaling of the reshaped maps,
  // so it preserves the rank bound.
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double e = 0.0;
      for (std::size_t q = 0; q < j; ++q) e += std::norm(maps.at(r, c, q));
      const double s = 1.0 / std::sqrt(e);
      for (std::size_t q = 0; q < j; ++q) maps.at(r, c, q) *= s;
    }
  return maps;
}

RealImage paint_shapes(std::size_t m, std::size_t n,
                       const std::vector<Shape>& shapes) {
  RealImage img(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (const auto& s : shapes)
        if (s.contains(static_cast<double>(r), static_cast<double>(c)))
          img.at(r, c) = s.intensity;
  return img;
}

PiPhantom gen_pi_phantom(const PhantomSpec& spec, std::uint64_t seed) {
  spec.validate();
  const std::size_t m = spec.rows, n = spec.cols, j = spec.coils;
  const RealImage mag = paint_shapes(m, n, spec.shapes);
  const ComplexTensor sens = gen_sensitivities(m, n, j);

  // Low-order polynomial phase with gradient bounded by phase_smoothness.
  const double g = spec.phase_smoothness;
  ComplexTensor truth({m, n, j});
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      const double u = (static_cast<double>(r) - 0.5 * static_cast<double>(m)) /
                       static_cast<double>(m);
      const double v = (static_cast<double>(c) - 0.5 * static_cast<double>(n)) /
                       static_cast<double>(n);
      const double phase =
          g * (0.35 * static_cast<double>(m) * u + 0.35 * static_cast<double>(n) * v +
               0.15 * static_cast<double>(std::min(m, n)) * (u * u - v * v));
      const cplx px = mag.at(r, c) * cplx{std::cos(phase), std::sin(phase)};
      for (std::size_t q = 0; q < j; ++q)
        truth.at(r, c, q) = px * sens.at(r, c, q);
    }

  ComplexTensor kspace = fft2d_centered(truth);
  if (spec.noise_sigma > 0.0) {
    SeededRng rng(seed);
    for (std::size_t i = 0; i < kspace.size(); ++i) {
      // Box-Muller
      const double u1 = std::max(rng.next_double(), 1e-300);
      const double u2 = rng.next_double();
      const double r0 = std::sqrt(-2.0 * std::log(u1));
      kspace[i] += spec.noise_sigma *
                   cplx{r0 * std::cos(2.0 * std::numbers::pi * u2),
                        r0 * std::sin(2.0 * std::numbers::pi * u2)};
    }
  }
  return {std::move(truth), std::move(kspace)};
}

T2Phantom gen_t2_phantom(std::size_t m, std::size_t n, std::size_t l,
                         std::size_t j, const std::vector<double>& tes_ms,
                         const std::vector<T2Region>& regions,
                         std::uint64_t /*seed*/) {
  if (tes_ms.size() != l)
    throw std::invalid_argument("gen_t2_phantom: TE count != L");
  for (std::size_t i = 0; i < l; ++i)
    if (tes_ms[i] <= 0 || (i > 0 && tes_ms[i] <= tes_ms[i - 1]))
      throw std::invalid_argument(
          "gen_t2_phantom: TEs must be positive and increasing");
  for (const auto& reg : regions)
    if (reg.t2_ms <= 0)
      throw std::invalid_argument("gen_t2_phantom: T2 must be positive");

  RealImage amp(m, n), t2(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (const auto& reg : regions)
        if (reg.shape.contains(static_cast<double>(r),
                               static_cast<double>(c))) {
          amp.at(r, c) = reg.amplitude;
          t2.at(r, c) = reg.t2_ms;
        }

  const ComplexTensor sens = gen_sensitivities(m, n, j);
  ComplexTensor truth({m, n, l, j});
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (amp.at(r, c) == 0.0) continue;
      for (std::size_t e = 0; e < l; ++e) {
        const double sig = amp.at(r, c) * std::exp(-tes_ms[e] / t2.at(r, c));
        for (std::size_t q = 0; q < j; ++q)
          truth.at(r, c, e, q) = sig * sens.at(r, c, q);
      }
    }
  return {std::move(truth), std::move(t2), std::move(amp)};
}

} // namespace shlr
