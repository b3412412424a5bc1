#include "shlr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace shlr {

double rlne(const RealImage& ref, const RealImage& rec) {
  if (ref.rows() != rec.rows() || ref.cols() != rec.cols())
    throw std::invalid_argument("rlne: dimension mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref[i] - rec[i];
    num += d * d;
    den += ref[i] * ref[i];
  }
  if (den == 0.0)
    throw std::invalid_argument("rlne: reference image is identically zero");
  return std::sqrt(num / den);
}

double mssim(const RealImage& ref, const RealImage& rec) {
  if (ref.rows() != rec.rows() || ref.cols() != rec.cols())
    throw std::invalid_argument("mssim: dimension mismatch");
  constexpr std::size_t kWin = 11;
  constexpr double kSigma = 1.5;
  if (ref.rows() < kWin || ref.cols() < kWin)
    throw std::invalid_argument("mssim: image smaller than the 11x11 window");

  double w[kWin][kWin];
  double wsum = 0.0;
  for (std::size_t i = 0; i < kWin; ++i)
    for (std::size_t j = 0; j < kWin; ++j) {
      const double di = static_cast<double>(i) - 5.0;
      const double dj = static_cast<double>(j) - 5.0;
      w[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      wsum += w[i][j];
    }
  for (std::size_t i = 0; i < kWin; ++i)
    for (std::size_t j = 0; j < kWin; ++j) w[i][j] /= wsum;

  double maxref = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    maxref = std::max(maxref, ref[i]);
  const double c1 = (0.01 * maxref) * (0.01 * maxref);
  const double c2 = (0.03 * maxref) * (0.03 * maxref);

  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t r = 0; r + kWin <= ref.rows(); ++r)
    for (std::size_t c = 0; c + kWin <= ref.cols(); ++c) {
      double mu_a = 0.0, mu_b = 0.0;
      for (std::size_t i = 0; i < kWin; ++i)
        for (std::size_t j = 0; j < kWin; ++j) {
          mu_a += w[i][j] * ref.at(r + i, c + j);
          mu_b += w[i][j] * rec.at(r + i, c + j);
        }
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (std::size_t i = 0; i < kWin; ++i)
        for (std::size_t j = 0; j < kWin; ++j) {
          const double da = ref.at(r + i, c + j) - mu_a;
          const double db = rec.at(r + i, c + j) - mu_b;
          var_a += w[i][j] * da * da;
          var_b += w[i][j] * db * db;
          cov += w[i][j] * da * db;
        }
      const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
      const double den =
          (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
      total += num / den;
      ++windows;
    }
  return total / static_cast<double>(windows);
}

std::string metrics_csv_header() {
  return "dataset,method,mask,rlne,mssim,runtime_s,iters";
}

std::string metrics_csv_row(const std::string& dataset,
                            const std::string& method, const std::string& mask,
                            const MetricReport& report) {
  std::ostringstream os;
  os << dataset << ',' << method << ',' << mask << ',' << report.rlne << ','
     << report.mssim << ',' << report.runtime_seconds << ','
     << report.iterations;
  return os.str();
}

} // namespace shlr
