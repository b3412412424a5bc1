#include "shlr/parammap.hpp"

#include <cmath>

#include "shlr/fft.hpp"
#include "shlr/io.hpp"

namespace shlr {

void ParameterDataset::validate() const {
  if (data.rank() != 4)
    throw std::invalid_argument("ParameterDataset: expected M x N x L x J");
  if (tes_ms.size() != data.dim(2))
    throw std::invalid_argument("ParameterDataset: TE count != L");
  for (std::size_t i = 0; i < tes_ms.size(); ++i)
    if (tes_ms[i] <= 0 || (i > 0 && tes_ms[i] <= tes_ms[i - 1]))
      throw std::invalid_argument(
          "ParameterDataset: TEs must be positive and strictly increasing");
}

ParameterDataset recon_param_dataset(const ParameterDataset& y,
                                     const SamplingMask& mask,
                                     const HankelConfig& hcfg,
                                     const AdmmConfig& acfg, std::ostream* log,
                                     std::size_t* total_iters) {
  y.validate();
  const std::size_t m = y.fe(), n = y.pe(), l = y.echoes(), j = y.coils();
  if (mask.rows != n || mask.cols != l)
    throw std::invalid_argument("recon_param_dataset: mask dims mismatch");

  const ComplexTensor hybrid = fft_along_axis(y.data, 0, true);

  ParameterDataset out;
  out.tes_ms = y.tes_ms;
  out.data = ComplexTensor({m, n, l, j});
  std::size_t iters = 0;
  for (std::size_t fe = 0; fe < m; ++fe) {
    ComplexTensor slice({n, l, j});
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t e = 0; e < l; ++e)
        for (std::size_t q = 0; q < j; ++q)
          slice.at(r, e, q) = hybrid.at(fe, r, e, q);
    SolveStats stats;
    ComplexTensor rec =
        shlr_param_reconstruct_slice(slice, mask, hcfg, acfg, log, &stats);
    iters += stats.outer_iters;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t e = 0; e < l; ++e)
        for (std::size_t q = 0; q < j; ++q)
          out.data.at(fe, r, e, q) = rec.at(r, e, q);
  }
  if (total_iters) *total_iters = iters;
  return out;
}

T2Fit fit_t2(const std::vector<double>& signal,
             const std::vector<double>& tes_ms, double t2_max_ms,
             double floor) {
  const std::size_t l = signal.size();
  if (l < 3 || tes_ms.size() != l)
    throw std::invalid_argument("fit_t2: need at least 3 matching samples");
  double smax = 0.0;
  for (double s : signal) {
    if (!std::isfinite(s))
      throw std::invalid_argument("fit_t2: non-finite signal value");
    smax = std::max(smax, s);
  }
  T2Fit fit;
  if (smax < floor) return fit;

  // Log-linear initialization over the positive samples.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < l; ++i) {
    if (signal[i] <= 0) continue;
    const double x = tes_ms[i], yv = std::log(signal[i]);
    sw += 1;
    sx += x;
    sy += yv;
    sxx += x * x;
    sxy += x * yv;
  }
  if (sw < 2) return fit;
  const double det = sw * sxx - sx * sx;
  if (det == 0) return fit;
  const double slope = (sw * sxy - sx * sy) / det;
  const double icept = (sy * sxx - sx * sxy) / det;
  double a = std::exp(icept);
  double t2 = slope < 0 ? -1.0 / slope : t2_max_ms;

  // Gauss-Newton on (A, T2) with step backtracking.
  auto residual_sq = [&](double aa, double tt) {
    double s = 0;
    for (std::size_t i = 0; i < l; ++i) {
      const double d = aa * std::exp(-tes_ms[i] / tt) - signal[i];
      s += d * d;
    }
    return s;
  };
  double cost = residual_sq(a, t2);
  for (int step = 0; step < 50; ++step) {
    double jtj00 = 0, jtj01 = 0, jtj11 = 0, jtr0 = 0, jtr1 = 0;
    for (std::size_t i = 0; i < l; ++i) {
      const double e = std::exp(-tes_ms[i] / t2);
      const double r = a * e - signal[i];
      const double ja = e;
      const double jt = a * e * tes_ms[i] / (t2 * t2);
      jtj00 += ja * ja;
      jtj01 += ja * jt;
      jtj11 += jt * jt;
      jtr0 += ja * r;
      jtr1 += jt * r;
    }
    const double d = jtj00 * jtj11 - jtj01 * jtj01;
    if (d <= 0) break;
    double da = -(jtj11 * jtr0 - jtj01 * jtr1) / d;
    double dt = -(-jtj01 * jtr0 + jtj00 * jtr1) / d;
    double scale = 1.0;
    double a_new = a, t2_new = t2, cost_new = cost;
    for (int bt = 0; bt < 20; ++bt) {
      a_new = a + scale * da;
      t2_new = t2 + scale * dt;
      if (t2_new > 0 && a_new > 0) {
        cost_new = residual_sq(a_new, t2_new);
        if (cost_new <= cost) break;
      }
      scale *= 0.5;
    }
    if (!(t2_new > 0 && a_new > 0) || cost_new > cost) break;
    const double rel = std::max(std::abs(a_new - a) / std::max(a, 1e-300),
                                std::abs(t2_new - t2) / std::max(t2, 1e-300));
    a = a_new;
    t2 = t2_new;
    cost = cost_new;
    if (rel < 1e-10) break;
  }

  fit.amplitude = a;
  fit.t2_ms = t2;
  fit.valid = a > 0 && t2 > 0 && t2 <= t2_max_ms && smax >= floor;
  return fit;
}

T2Map t2_map(const ParameterDataset& images, double roi_threshold,
             double t2_max_ms) {
  images.validate();
  const std::size_t m = images.fe(), n = images.pe(), l = images.echoes(),
                    j = images.coils();

  // SSOS magnitude per echo.
  std::vector<RealImage> mag;
  mag.reserve(l);
  for (std::size_t e = 0; e < l; ++e) {
    RealImage img(m, n);
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        double s = 0;
        for (std::size_t q = 0; q < j; ++q)
          s += std::norm(images.data.at(r, c, e, q));
        img.at(r, c) = std::sqrt(s);
      }
    mag.push_back(std::move(img));
  }

  double first_max = 0;
  for (std::size_t i = 0; i < mag[0].size(); ++i)
    first_max = std::max(first_max, mag[0][i]);
  const double threshold = roi_threshold * first_max;

  T2Map out{RealImage(m, n), RealImage(m, n),
            std::vector<std::uint8_t>(m * n, 0)};
  std::vector<double> sig(l);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (mag[0].at(r, c) < threshold) continue;
      for (std::size_t e = 0; e < l; ++e) sig[e] = mag[e].at(r, c);
      T2Fit fit = fit_t2(sig, images.tes_ms, t2_max_ms);
      if (fit.valid) {
        out.t2.at(r, c) = fit.t2_ms;
        out.amplitude.at(r, c) = fit.amplitude;
        out.valid[r * n + c] = 1;
      }
    }
  return out;
}

void write_t2_map(const T2Map& map, const std::string& path) {
  const std::size_t m = map.t2.rows(), n = map.t2.cols();
  ComplexTensor t({m, n});
  ComplexTensor v({m, n});
  for (std::size_t i = 0; i < m * n; ++i) {
    t[i] = cplx{map.t2[i], 0.0};
    v[i] = cplx{map.valid[i] ? 1.0 : 0.0, 0.0};
  }
  write_cplx(t, path);
  write_cplx(v, path + ".valid");
}

} // namespace shlr
