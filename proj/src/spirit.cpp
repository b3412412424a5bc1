#include "shlr/spirit.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "shlr/fft.hpp"

namespace shlr {

SpiritKernels::SpiritKernels(std::size_t kernel_size, std::size_t coils,
                             std::vector<cplx> weights)
    : k_(kernel_size), j_(coils), weights_(std::move(weights)) {
  if (k_ % 2 == 0 || k_ == 0)
    throw std::invalid_argument("SpiritKernels: kernel size must be odd");
  if (weights_.size() != k_ * k_ * j_ * j_)
    throw std::invalid_argument("SpiritKernels: weight size mismatch");
  for (std::size_t j = 0; j < j_; ++j)
    if (weight(0, 0, j, j) != cplx{0, 0})
      throw std::invalid_argument("SpiritKernels: self center tap must be zero");
}

SpiritKernels spirit_calibrate(const ComplexTensor& acs,
                               std::size_t kernel_size, double tikhonov) {
  if (acs.rank() != 3)
    throw std::invalid_argument("spirit_calibrate: expected a x b x J ACS");
  const std::size_t a = acs.dim(0), b = acs.dim(1), j = acs.dim(2);
  const std::size_t k = kernel_size;
  if (k % 2 == 0 || k == 0)
    throw std::invalid_argument("spirit_calibrate: kernel size must be odd");
  if (a <= k || b <= k)
    throw CalibrationError("spirit_calibrate: ACS region too small");
  if (tikhonov < 0)
    throw std::invalid_argument("spirit_calibrate: negative tikhonov");

  double energy = 0.0;
  for (std::size_t i = 0; i < acs.size(); ++i) energy += std::norm(acs[i]);
  if (energy == 0.0)
    throw CalibrationError("spirit_calibrate: all-zero ACS");

  const long h = static_cast<long>(k) / 2;
  const std::size_t nr = (a - k + 1) * (b - k + 1);
  const std::size_t nf = k * k * j;

  Eigen::MatrixXcd feat(nr, nf);
  Eigen::MatrixXcd centers(nr, j);
  std::size_t row = 0;
  for (std::size_t r = static_cast<std::size_t>(h); r + static_cast<std::size_t>(h) < a; ++r)
    for (std::size_t c = static_cast<std::size_t>(h); c + static_cast<std::size_t>(h) < b; ++c, ++row) {
      std::size_t col = 0;
      for (long di = -h; di <= h; ++di)
        for (long dj = -h; dj <= h; ++dj)
          for (std::size_t s = 0; s < j; ++s, ++col)
            feat(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                acs.at(static_cast<std::size_t>(static_cast<long>(r) + di),
                       static_cast<std::size_t>(static_cast<long>(c) + dj), s);
      for (std::size_t s = 0; s < j; ++s)
        centers(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(s)) =
            acs.at(r, c, s);
    }

  std::vector<cplx> weights(k * k * j * j, cplx{0, 0});
  const std::size_t center_block = (static_cast<std::size_t>(h) * k +
                                    static_cast<std::size_t>(h)) * j;
  for (std::size_t dst = 0; dst < j; ++dst) {
    // Drop the self center tap column for this target coil.
    Eigen::MatrixXcd ad(nr, nf - 1);
    std::vector<std::size_t> colmap;
    colmap.reserve(nf - 1);
    for (std::size_t c = 0; c < nf; ++c)
      if (c != center_block + dst) colmap.push_back(c);
    for (std::size_t c = 0; c < colmap.size(); ++c)
      ad.col(static_cast<Eigen::Index>(c)) =
          feat.col(static_cast<Eigen::Index>(colmap[c]));

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(ad, Eigen::ComputeThinU |
                                                   Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double mu = tikhonov * smax;
    // w = V diag(s / (s^2 + mu^2)) U^H b
    Eigen::VectorXcd rhs = svd.matrixU().adjoint() * centers.col(static_cast<Eigen::Index>(dst));
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      rhs(i) *= s(i) / (s(i) * s(i) + mu * mu);
    Eigen::VectorXcd w = svd.matrixV() * rhs;

    for (std::size_t c = 0; c < colmap.size(); ++c) {
      const std::size_t full = colmap[c];
      const std::size_t tap = full / j;
      const std::size_t src = full % j;
      weights[(tap * j + src) * j + dst] = w(static_cast<Eigen::Index>(c));
    }
  }
  return SpiritKernels(k, j, std::move(weights));
}

namespace {

ComplexTensor fft2c_plane(const ComplexTensor& x, bool inverse) {
  return fft_along_axis(fft_along_axis(x, 0, inverse), 1, inverse);
}

} // namespace

SpiritImageOp::SpiritImageOp(const SpiritKernels& g, std::size_t m,
                             std::size_t n)
    : m_(m), n_(n), j_(g.coils()) {
  // The k-space operator is a circular convolution, hence pointwise in the
  // image domain; applying it to the all-ones image recovers the map.
  ComplexTensor ones({m_, n_});
  for (std::size_t i = 0; i < ones.size(); ++i) ones[i] = cplx{1, 0};
  const ComplexTensor k1 = fft2c_plane(ones, false);

  const long h = static_cast<long>(g.kernel_size()) / 2;
  maps_.reserve(j_ * j_);
  for (std::size_t src = 0; src < j_; ++src)
    for (std::size_t dst = 0; dst < j_; ++dst) {
      ComplexTensor conv({m_, n_});
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t c = 0; c < n_; ++c) {
          cplx s{0, 0};
          for (long di = -h; di <= h; ++di)
            for (long dj = -h; dj <= h; ++dj) {
              const std::size_t rr = static_cast<std::size_t>(
                  (static_cast<long>(r) + di + static_cast<long>(m_)) %
                  static_cast<long>(m_));
              const std::size_t cc = static_cast<std::size_t>(
                  (static_cast<long>(c) + dj + static_cast<long>(n_)) %
                  static_cast<long>(n_));
              s += g.weight(di, dj, src, dst) * k1.at(rr, cc);
            }
          conv.at(r, c) = s;
        }
      maps_.push_back(fft2c_plane(conv, true));
    }
}

ComplexTensor SpiritImageOp::apply(const ComplexTensor& x) const {
  if (x.rank() != 3 || x.dim(0) != m_ || x.dim(1) != n_ || x.dim(2) != j_)
    throw std::invalid_argument("SpiritImageOp: shape/coil mismatch");
  ComplexTensor out({m_, n_, j_});
  for (std::size_t src = 0; src < j_; ++src)
    for (std::size_t dst = 0; dst < j_; ++dst) {
      const auto& map = maps_[src * j_ + dst];
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t c = 0; c < n_; ++c)
          out.at(r, c, dst) += map.at(r, c) * x.at(r, c, src);
    }
  return out;
}

ComplexTensor SpiritImageOp::normal_minus_identity(
    const ComplexTensor& x) const {
  ComplexTensor y = apply(x);
  y -= x; // (G - I) x
  ComplexTensor out({m_, n_, j_});
  for (std::size_t src = 0; src < j_; ++src)
    for (std::size_t dst = 0; dst < j_; ++dst) {
      const auto& map = maps_[src * j_ + dst];
      for (std::size_t r = 0; r < m_; ++r)
        for (std::size_t c = 0; c < n_; ++c)
          out.at(r, c, src) += std::conj(map.at(r, c)) * y.at(r, c, dst);
    }
  out -= y; // G^H y - y = (G - I)^H y
  return out;
}

ComplexTensor spirit_apply(const SpiritKernels& g, const ComplexTensor& x) {
  if (x.rank() != 3)
    throw std::invalid_argument("spirit_apply: expected M x N x J");
  if (x.dim(2) != g.coils())
    throw std::invalid_argument("spirit_apply: coil count mismatch");
  SpiritImageOp op(g, x.dim(0), x.dim(1));
  return op.apply(x);
}

} // namespace shlr
