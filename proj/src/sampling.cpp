#include "shlr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "shlr/io.hpp"

namespace shlr {

std::size_t SamplingMask::count() const {
  std::size_t c = 0;
  for (auto b : bits) c += b != 0;
  return c;
}

SamplingMask SamplingMask::transposed() const {
  SamplingMask out = *this;
  out.rows = cols;
  out.cols = rows;
  out.bits.assign(bits.size(), 0);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out.bits[c * rows + r] = bits[r * cols + c];
  return out;
}

std::pair<std::size_t, std::size_t> acs_range(std::size_t n, std::size_t acs) {
  if (acs == 0) return {0, 0};
  if (acs > n)
    throw std::invalid_argument("acs_range: acs exceeds grid size");
  const std::size_t c = n / 2;
  const std::size_t half_up = (acs + 1) / 2;
  if (half_up > c)
    throw std::invalid_argument("acs_range: acs block does not fit");
  const std::size_t start = c - half_up;
  return {start, start + acs};
}

SamplingMask mask_uniform(std::size_t n, std::size_t r, std::size_t acs) {
  if (n == 0 || r == 0)
    throw std::invalid_argument("mask_uniform: invalid n or r");
  auto [a0, a1] = acs_range(n, acs);
  SamplingMask m;
  m.rows = 1;
  m.cols = n;
  m.bits.assign(n, 0);
  for (std::size_t i = 0; i < n; i += r) m.bits[i] = 1;
  for (std::size_t i = a0; i < a1; ++i) m.bits[i] = 1;
  if (r == 1) std::fill(m.bits.begin(), m.bits.end(), std::uint8_t{1});
  m.generator = "uniform";
  m.rate = static_cast<double>(m.count()) / static_cast<double>(n);
  m.acs = acs;
  return m;
}

namespace {

// Exact-count weighted sampling without replacement over the candidate
// indices, weights proportional to a Gaussian in `dist` (distance from DC).
void draw_weighted(std::vector<std::uint8_t>& bits,
                   const std::vector<std::size_t>& candidates,
                   const std::vector<double>& weight, std::size_t want,
                   SeededRng& rng) {
  std::vector<std::size_t> pool = candidates;
  std::vector<double> w;
  w.reserve(pool.size());
  for (auto i : pool) w.push_back(weight[i]);
  for (std::size_t k = 0; k < want; ++k) {
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    double u = rng.next_double() * total;
    std::size_t pick = pool.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += w[i];
      if (u < acc) {
        pick = i;
        break;
      }
    }
    bits[pool[pick]] = 1;
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(pick));
  }
}

} // namespace

SamplingMask mask_gauss_cartesian(std::size_t n, double rate, std::size_t acs,
                                  std::uint64_t seed) {
  if (n == 0 || rate <= 0.0 || rate > 1.0)
    throw std::invalid_argument("mask_gauss_cartesian: invalid rate");
  const std::size_t want =
      static_cast<std::size_t>(std::ceil(rate * static_cast<double>(n)));
  if (want < acs)
    throw std::invalid_argument(
        "mask_gauss_cartesian: rate too small to fit the ACS block");
  auto [a0, a1] = acs_range(n, acs);

  SamplingMask m;
  m.rows = 1;
  m.cols = n;
  m.bits.assign(n, 0);
  for (std::size_t i = a0; i < a1; ++i) m.bits[i] = 1;

  const double sigma = static_cast<double>(n) / 6.0;
  const double c = static_cast<double>(n / 2);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = static_cast<double>(i) - c;
    weight[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i)
    if (!m.bits[i]) candidates.push_back(i);

  SeededRng rng(seed);
  draw_weighted(m.bits, candidates, weight, want - (a1 - a0), rng);

  m.generator = "gauss_cartesian";
  m.seed = seed;
  m.rate = rate;
  m.acs = acs;
  return m;
}

SamplingMask mask_random2d(std::size_t rows, std::size_t cols, double rate,
                           std::size_t center, std::uint64_t seed) {
  if (rows == 0 || cols == 0 || rate <= 0.0 || rate > 1.0)
    throw std::invalid_argument("mask_random2d: invalid arguments");
  const std::size_t total = rows * cols;
  const std::size_t want =
      static_cast<std::size_t>(std::ceil(rate * static_cast<double>(total)));
  auto [r0, r1] = acs_range(rows, center);
  auto [c0, c1] = acs_range(cols, center);
  const std::size_t block = (r1 - r0) * (c1 - c0);
  if (block > want)
    throw std::invalid_argument("mask_random2d: center block exceeds budget");

  SamplingMask m;
  m.rows = rows;
  m.cols = cols;
  m.bits.assign(total, 0);
  for (std::size_t r = r0; r < r1; ++r)
    for (std::size_t c = c0; c < c1; ++c) m.bits[r * cols + c] = 1;

  const double sigma = static_cast<double>(std::min(rows, cols)) / 6.0;
  const double cr = static_cast<double>(rows / 2);
  const double cc = static_cast<double>(cols / 2);
  std::vector<double> weight(total);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      double dr = static_cast<double>(r) - cr;
      double dc = static_cast<double>(c) - cc;
      weight[r * cols + c] =
          std::exp(-(dr * dr + dc * dc) / (2.0 * sigma * sigma));
    }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < total; ++i)
    if (!m.bits[i]) candidates.push_back(i);

  SeededRng rng(seed);
  draw_weighted(m.bits, candidates, weight, want - block, rng);

  m.generator = "random2d";
  m.seed = seed;
  m.rate = rate;
  m.acs = center;
  return m;
}

SamplingMask apply_partial_fourier(const SamplingMask& mask, double fraction) {
  if (!(fraction > 0.5 && fraction <= 1.0))
    throw std::invalid_argument("apply_partial_fourier: fraction must be in (1/2, 1]");
  SamplingMask out = mask;
  const std::size_t n = mask.cols;
  // Discard the highest positive frequencies: centered index >=
  // ceil(fraction * N) - floor(N / 2).
  const long cutoff = static_cast<long>(
                          std::ceil(fraction * static_cast<double>(n))) -
                      static_cast<long>(n / 2);
  for (std::size_t r = 0; r < mask.rows; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      long centered = static_cast<long>(c) - static_cast<long>(n / 2);
      if (centered >= cutoff) out.bits[r * n + c] = 0;
    }
  if (out.count() == 0)
    throw std::invalid_argument("apply_partial_fourier: mask emptied");
  out.pf = fraction;
  return out;
}

void write_mask(const SamplingMask& mask, const std::string& path) {
  ComplexTensor t({mask.rows, mask.cols});
  for (std::size_t i = 0; i < mask.bits.size(); ++i)
    t[i] = cplx{mask.bits[i] ? 1.0 : 0.0, 0.0};
  write_cplx(t, path);
  std::ofstream os(path + ".meta");
  if (!os)
    throw IoError("write_mask: cannot open " + path + ".meta");
  os << "generator=" << mask.generator << "\n";
  os << "seed=" << mask.seed << "\n";
  os << "rate=" << mask.rate << "\n";
  os << "acs=" << mask.acs << "\n";
  os << "pf=" << mask.pf << "\n";
}

SamplingMask read_mask(const std::string& path) {
  ComplexTensor t = read_cplx(path);
  if (t.rank() != 2)
    throw IoError("read_mask: mask file must be rank 2: " + path);
  SamplingMask m;
  m.rows = t.dim(0);
  m.cols = t.dim(1);
  m.bits.resize(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    m.bits[i] = t[i].real() > 0.5 ? 1 : 0;
  std::ifstream is(path + ".meta");
  if (is) {
    std::string line;
    while (std::getline(is, line)) {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(0, eq), val = line.substr(eq + 1);
      if (key == "generator") m.generator = val;
      else if (key == "seed") m.seed = std::stoull(val);
      else if (key == "rate") m.rate = std::stod(val);
      else if (key == "acs") m.acs = std::stoul(val);
      else if (key == "pf") m.pf = std::stod(val);
    }
  }
  return m;
}

} // namespace shlr
