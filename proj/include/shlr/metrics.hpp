#pragma once

#include "shlr/tensor.hpp"

namespace shlr {

struct MetricReport {
  double rlne = 0.0;
  double mssim = 0.0;
  double runtime_seconds = 0.0;
  std::size_t iterations = 0;
};

// Relative l2-norm error ||ref - rec|| / ||ref||.
double rlne(const RealImage& ref, const RealImage& rec);

// Mean SSIM over 11x11 Gaussian windows (sigma = 1.5), C1 = (0.01 L)^2,
// C2 = (0.03 L)^2 with L = max(ref).
double mssim(const RealImage& ref, const RealImage& rec);

// CSV helpers for the experiment reports.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& dataset,
                            const std::string& method,
                            const std::string& mask,
                            const MetricReport& report);

} // namespace shlr
