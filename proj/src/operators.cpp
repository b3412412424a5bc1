#include "shlr/operators.hpp"

#include "shlr/fft.hpp"

namespace shlr {

namespace {

std::vector<cplx> pointwise(const std::vector<cplx>& a,
                            const std::vector<cplx>& b) {
  std::vector<cplx> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

std::vector<cplx> pointwise_conj(const std::vector<cplx>& w,
                                 const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::conj(w[i]) * v[i];
  return out;
}

} // namespace

CMatrix lift_weighted(const std::vector<std::vector<cplx>>& vecs,
                      const HankelConfig& cfg) {
  if (vecs.empty())
    throw std::invalid_argument("lift_weighted: no coil vectors");
  const std::size_t n = vecs[0].size();
  const std::size_t p = cfg.pencil_for(n);
  const auto wc = weights_centered(cfg.filter_taps, n);
  const std::size_t q = n - p + 1;
  const std::size_t blocks = vecs.size() * (cfg.virtual_coil ? 2 : 1);
  CMatrix out(p, blocks * q);
  std::size_t col = 0;
  // Regular blocks first, then the conjugate-flipped blocks, matching the
  // bracket order of the vc-augmented lifting.
  std::vector<std::vector<cplx>> spectra;
  spectra.reserve(vecs.size());
  for (const auto& v : vecs) {
    if (v.size() != n)
      throw std::invalid_argument("lift_weighted: ragged coil vectors");
    spectra.push_back(fft1d_centered(v));
  }
  for (const auto& s : spectra) {
    out.middleCols(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(q)) =
        hankel_lift(pointwise(wc, s), p);
    col += q;
  }
  if (cfg.virtual_coil) {
    for (const auto& s : spectra) {
      out.middleCols(static_cast<Eigen::Index>(col), static_cast<Eigen::Index>(q)) =
          hankel_lift(pointwise(wc, virtual_coil_dagger(s)), p);
      col += q;
    }
  }
  return out;
}

std::vector<std::vector<cplx>> adjoint_lift_weighted(const CMatrix& m,
                                                     std::size_t len,
                                                     std::size_t coils,
                                                     const HankelConfig& cfg) {
  const std::size_t p = cfg.pencil_for(len);
  const std::size_t q = len - p + 1;
  const std::size_t blocks = coils * (cfg.virtual_coil ? 2 : 1);
  if (static_cast<std::size_t>(m.rows()) != p ||
      static_cast<std::size_t>(m.cols()) != blocks * q)
    throw std::invalid_argument("adjoint_lift_weighted: matrix dims mismatch");
  const auto wc = weights_centered(cfg.filter_taps, len);

  std::vector<std::vector<cplx>> out(coils);
  for (std::size_t j = 0; j < coils; ++j) {
    auto v = hankel_adjoint(
        m.middleCols(static_cast<Eigen::Index>(j * q),
                     static_cast<Eigen::Index>(q)),
        len);
    std::vector<cplx> s_adj = pointwise_conj(wc, v);
    if (cfg.virtual_coil) {
      auto v2 = hankel_adjoint(
          m.middleCols(static_cast<Eigen::Index>((coils + j) * q),
                       static_cast<Eigen::Index>(q)),
          len);
      // Real adjoint of s -> wc .* dagger(s) is y -> dagger(conj(wc) .* y).
      auto d = virtual_coil_dagger(pointwise_conj(wc, v2));
      for (std::size_t i = 0; i < len; ++i) s_adj[i] += d[i];
    }
    out[j] = ifft1d_centered(s_adj);
  }
  return out;
}

CMatrix lift_plain(const std::vector<std::vector<cplx>>& vecs, std::size_t p) {
  if (vecs.empty())
    throw std::invalid_argument("lift_plain: no coil vectors");
  const std::size_t n = vecs[0].size();
  const std::size_t q = n - p + 1;
  CMatrix out(p, vecs.size() * q);
  for (std::size_t j = 0; j < vecs.size(); ++j)
    out.middleCols(static_cast<Eigen::Index>(j * q),
                   static_cast<Eigen::Index>(q)) = hankel_lift(vecs[j], p);
  return out;
}

std::vector<std::vector<cplx>> adjoint_lift_plain(const CMatrix& m,
                                                  std::size_t len,
                                                  std::size_t coils) {
  const std::size_t p = static_cast<std::size_t>(m.rows());
  const std::size_t q = len - p + 1;
  if (static_cast<std::size_t>(m.cols()) != coils * q)
    throw std::invalid_argument("adjoint_lift_plain: matrix dims mismatch");
  std::vector<std::vector<cplx>> out(coils);
  for (std::size_t j = 0; j < coils; ++j)
    out[j] = hankel_adjoint(
        m.middleCols(static_cast<Eigen::Index>(j * q),
                     static_cast<Eigen::Index>(q)),
        len);
  return out;
}

std::vector<std::vector<cplx>> extract_rows(const ComplexTensor& x,
                                            std::size_t m) {
  if (x.rank() != 3 || m >= x.dim(0))
    throw std::invalid_argument("extract_rows: index out of range");
  const std::size_t n = x.dim(1), j = x.dim(2);
  std::vector<std::vector<cplx>> out(j, std::vector<cplx>(n));
  for (std::size_t q = 0; q < j; ++q)
    for (std::size_t c = 0; c < n; ++c) out[q][c] = x.at(m, c, q);
  return out;
}

std::vector<std::vector<cplx>> extract_cols(const ComplexTensor& x,
                                            std::size_t n) {
  if (x.rank() != 3 || n >= x.dim(1))
    throw std::invalid_argument("extract_cols: index out of range");
  const std::size_t m = x.dim(0), j = x.dim(2);
  std::vector<std::vector<cplx>> out(j, std::vector<cplx>(m));
  for (std::size_t q = 0; q < j; ++q)
    for (std::size_t r = 0; r < m; ++r) out[q][r] = x.at(r, n, q);
  return out;
}

CMatrix lift_rows(const ComplexTensor& x, std::size_t m,
                  const HankelConfig& cfg) {
  return lift_weighted(extract_rows(x, m), cfg);
}

CMatrix lift_cols(const ComplexTensor& x, std::size_t n,
                  const HankelConfig& cfg) {
  return lift_weighted(extract_cols(x, n), cfg);
}

ComplexTensor adjoint_lift_rows(const CMatrix& mat,
                                const std::vector<std::size_t>& dims,
                                std::size_t m, const HankelConfig& cfg) {
  ComplexTensor out(dims);
  auto rows = adjoint_lift_weighted(mat, dims[1], dims[2], cfg);
  for (std::size_t j = 0; j < dims[2]; ++j)
    for (std::size_t c = 0; c < dims[1]; ++c) out.at(m, c, j) = rows[j][c];
  return out;
}

ComplexTensor adjoint_lift_cols(const CMatrix& mat,
                                const std::vector<std::size_t>& dims,
                                std::size_t n, const HankelConfig& cfg) {
  ComplexTensor out(dims);
  auto cols = adjoint_lift_weighted(mat, dims[0], dims[2], cfg);
  for (std::size_t j = 0; j < dims[2]; ++j)
    for (std::size_t r = 0; r < dims[0]; ++r) out.at(r, n, j) = cols[j][r];
  return out;
}

std::vector<std::vector<cplx>> lift_weighted_normal(
    const std::vector<std::vector<cplx>>& vecs, const HankelConfig& cfg) {
  const std::size_t n = vecs[0].size();
  const std::size_t p = cfg.pencil_for(n);
  const auto wc = weights_centered(cfg.filter_taps, n);
  const auto counts = hankel_counts(n, p);

  std::vector<std::vector<cplx>> out(vecs.size());
  for (std::size_t j = 0; j < vecs.size(); ++j) {
    auto s = fft1d_centered(vecs[j]);
    std::vector<cplx> acc(n);
    for (std::size_t i = 0; i < n; ++i)
      acc[i] = std::conj(wc[i]) * counts[i] * wc[i] * s[i];
    if (cfg.virtual_coil) {
      auto d = virtual_coil_dagger(s);
      std::vector<cplx> t(n);
      for (std::size_t i = 0; i < n; ++i)
        t[i] = std::conj(wc[i]) * counts[i] * wc[i] * d[i];
      auto back = virtual_coil_dagger(t);
      for (std::size_t i = 0; i < n; ++i) acc[i] += back[i];
    }
    out[j] = ifft1d_centered(acc);
  }
  return out;
}

ComplexTensor apply_mask(const ComplexTensor& k, const SamplingMask& mask) {
  if (k.rank() != 3)
    throw std::invalid_argument("apply_mask: expected M x N x J");
  const std::size_t m = k.dim(0), n = k.dim(1), j = k.dim(2);
  if (mask.cols != n || (mask.rows != 1 && mask.rows != m))
    throw std::invalid_argument("apply_mask: mask dims mismatch");
  ComplexTensor out({m, n, j});
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (mask.sampled(r, c))
        for (std::size_t q = 0; q < j; ++q) out.at(r, c, q) = k.at(r, c, q);
  return out;
}

ComplexTensor normal_apply(const ComplexTensor& x, const SamplingMask& mask,
                           const SpiritImageOp* g, const HankelConfig& cfg,
                           double lambda, double lambda1, double beta) {
  if (x.rank() != 3)
    throw std::invalid_argument("normal_apply: expected M x N x J");
  const std::size_t m = x.dim(0), n = x.dim(1), j = x.dim(2);

  ComplexTensor out({m, n, j});
  if (lambda != 0.0) {
    ComplexTensor fid = ifft2d_centered(apply_mask(fft2d_centered(x), mask));
    fid *= cplx{lambda, 0};
    out += fid;
  }
  if (beta != 0.0) {
    for (std::size_t r = 0; r < m; ++r) {
      auto t = lift_weighted_normal(extract_rows(x, r), cfg);
      for (std::size_t q = 0; q < j; ++q)
        for (std::size_t c = 0; c < n; ++c)
          out.at(r, c, q) += beta * t[q][c];
    }
    for (std::size_t c = 0; c < n; ++c) {
      auto t = lift_weighted_normal(extract_cols(x, c), cfg);
      for (std::size_t q = 0; q < j; ++q)
        for (std::size_t r = 0; r < m; ++r)
          out.at(r, c, q) += beta * t[q][r];
    }
  }
  if (lambda1 != 0.0) {
    if (!g)
      throw std::invalid_argument("normal_apply: lambda1 > 0 needs kernels");
    ComplexTensor sp = g->normal_minus_identity(x);
    sp *= cplx{lambda1, 0};
    out += sp;
  }
  return out;
}

} // namespace shlr
