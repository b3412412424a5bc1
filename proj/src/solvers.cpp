#include "shlr/solvers.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <iomanip>

#include "shlr/fft.hpp"

namespace shlr {

CMatrix svt(const CMatrix& m, double tau) {
  if (tau < 0)
    throw std::invalid_argument("svt: negative threshold");
  if (m.size() == 0) return m;
  if (tau == 0.0) return m;
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < s.size(); ++i)
    s(i) = std::max(s(i) - tau, 0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
}

ComplexTensor cg_solve(
    const std::function<ComplexTensor(const ComplexTensor&)>& apply_a,
    const ComplexTensor& b, const ComplexTensor& x0, std::size_t max_iter,
    double tol, CgResult* result) {
  ComplexTensor x = x0;
  ComplexTensor r = b - apply_a(x);
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    if (result) *result = {0, 0.0};
    return ComplexTensor(b.dims());
  }
  double rel = norm2(r) / bnorm;
  if (!std::isfinite(rel))
    throw DivergenceError("cg_solve: non-finite residual");
  std::size_t it = 0;
  if (rel > tol) {
    ComplexTensor p = r;
    double rho = rdot(r, r);
    for (; it < max_iter; ++it) {
      ComplexTensor ap = apply_a(p);
      const double denom = rdot(p, ap);
      if (!std::isfinite(denom) || denom <= 0.0)
        throw DivergenceError("cg_solve: operator not positive definite");
      const double alpha = rho / denom;
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * ap[i];
      }
      const double rho_next = rdot(r, r);
      if (!std::isfinite(rho_next))
        throw DivergenceError("cg_solve: non-finite residual");
      rel = std::sqrt(rho_next) / bnorm;
      if (rel <= tol) {
        ++it;
        break;
      }
      const double gamma = rho_next / rho;
      for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = r[i] + gamma * p[i];
      rho = rho_next;
    }
  }
  if (result) *result = {it, rel};
  return x;
}

namespace {

void log_iter(std::ostream* log, std::size_t iter, double relchange,
              const CgResult& cg) {
  if (!log) return;
  (*log) << "iter=" << iter << " relchange=" << std::scientific
         << std::setprecision(3) << relchange << " cg_iters=" << cg.iterations
         << " cg_res=" << cg.relative_residual << "\n"
         << std::defaultfloat;
}

double rel_change_sq(const ComplexTensor& x_new, const ComplexTensor& x_old) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x_new.size(); ++i) {
    num += std::norm(x_new[i] - x_old[i]);
    den += std::norm(x_old[i]);
  }
  return den > 0.0 ? num / den : (num > 0.0 ? 1.0 : 0.0);
}

CMatrix ones_like(Eigen::Index rows, Eigen::Index cols) {
  return CMatrix::Ones(rows, cols);
}

} // namespace

ComplexTensor shlr_pi_reconstruct(const ComplexTensor& y,
                                  const SamplingMask& mask,
                                  const SpiritKernels* g,
                                  const HankelConfig& hcfg,
                                  const AdmmConfig& acfg, std::ostream* log,
                                  SolveStats* stats) {
  acfg.validate();
  if (y.rank() != 3)
    throw std::invalid_argument("shlr_pi_reconstruct: expected M x N x J");
  if (acfg.enable_spirit && !g)
    throw std::invalid_argument(
        "shlr_pi_reconstruct: spirit enabled without kernels");
  const std::size_t m = y.dim(0), n = y.dim(1), j = y.dim(2);
  if (mask.cols != n || (mask.rows != 1 && mask.rows != m))
    throw std::invalid_argument("shlr_pi_reconstruct: mask dims mismatch");

  HankelConfig cfg = hcfg;
  cfg.virtual_coil = acfg.enable_vc;
  const std::size_t p_row = cfg.pencil_for(n);
  const std::size_t p_col = cfg.pencil_for(m);
  const std::size_t blocks = j * (acfg.enable_vc ? 2 : 1);

  std::optional<SpiritImageOp> gop;
  const double lambda1 = acfg.enable_spirit ? acfg.lambda1 : 0.0;
  if (acfg.enable_spirit && lambda1 > 0.0) {
    if (g->coils() != j)
      throw std::invalid_argument("shlr_pi_reconstruct: kernel coil mismatch");
    gop.emplace(*g, m, n);
  }

  const ComplexTensor y_masked = apply_mask(y, mask);
  const ComplexTensor fid_rhs = ifft2d_centered(y_masked); // F* U* Y

  // Z = 0, D = 1 (all-ones), per the stated initialization.
  std::vector<CMatrix> z_row(m), d_row(m), z_col(n), d_col(n);
  for (std::size_t r = 0; r < m; ++r) {
    z_row[r] = CMatrix::Zero(static_cast<Eigen::Index>(p_row),
                             static_cast<Eigen::Index>(blocks * (n - p_row + 1)));
    d_row[r] = ones_like(z_row[r].rows(), z_row[r].cols());
  }
  for (std::size_t c = 0; c < n; ++c) {
    z_col[c] = CMatrix::Zero(static_cast<Eigen::Index>(p_col),
                             static_cast<Eigen::Index>(blocks * (m - p_col + 1)));
    d_col[c] = ones_like(z_col[c].rows(), z_col[c].cols());
  }

  ComplexTensor x = ifft2d_centered(y_masked);
  const double beta = acfg.beta;
  const auto apply_a = [&](const ComplexTensor& v) {
    return normal_apply(v, mask, gop ? &*gop : nullptr, cfg, acfg.lambda,
                        lambda1, beta);
  };

  std::size_t iters = 0;
  double relchange = 1.0;
  const std::vector<std::size_t> dims = {m, n, j};
  for (std::size_t k = 0; k < acfg.max_outer; ++k) {
    // X-update: normal equations right-hand side, then warm-started CG.
    ComplexTensor b({m, n, j});
    b += fid_rhs;
    b *= cplx{acfg.lambda, 0};
    for (std::size_t r = 0; r < m; ++r) {
      CMatrix t = z_row[r] - d_row[r] / beta;
      ComplexTensor adj = adjoint_lift_rows(t, dims, r, cfg);
      adj *= cplx{beta, 0};
      b += adj;
    }
    for (std::size_t c = 0; c < n; ++c) {
      CMatrix t = z_col[c] - d_col[c] / beta;
      ComplexTensor adj = adjoint_lift_cols(t, dims, c, cfg);
      adj *= cplx{beta, 0};
      b += adj;
    }
    CgResult cg;
    ComplexTensor x_new = cg_solve(apply_a, b, x, acfg.cg_max, acfg.cg_tol, &cg);

    // Z- then D-updates from the same lifted matrices.
    for (std::size_t r = 0; r < m; ++r) {
      CMatrix lifted = lift_rows(x_new, r, cfg);
      z_row[r] = svt(lifted + d_row[r] / beta, 1.0 / beta);
      d_row[r] += acfg.tau * (lifted - z_row[r]);
    }
    for (std::size_t c = 0; c < n; ++c) {
      CMatrix lifted = lift_cols(x_new, c, cfg);
      z_col[c] = svt(lifted + d_col[c] / beta, 1.0 / beta);
      d_col[c] += acfg.tau * (lifted - z_col[c]);
    }

    relchange = rel_change_sq(x_new, x);
    x = std::move(x_new);
    iters = k + 1;
    log_iter(log, iters, relchange, cg);
    if (relchange < acfg.tol) break;
  }
  if (stats) *stats = {iters, relchange};
  return x;
}

ComplexTensor shlr_param_reconstruct_slice(const ComplexTensor& y_m,
                                           const SamplingMask& mask,
                                           const HankelConfig& hcfg,
                                           const AdmmConfig& acfg,
                                           std::ostream* log,
                                           SolveStats* stats) {
  acfg.validate();
  if (y_m.rank() != 3)
    throw std::invalid_argument(
        "shlr_param_reconstruct_slice: expected N x L x J");
  const std::size_t n = y_m.dim(0), l = y_m.dim(1), j = y_m.dim(2);
  if (mask.rows != n || mask.cols != l)
    throw std::invalid_argument(
        "shlr_param_reconstruct_slice: mask dims mismatch");

  HankelConfig cfg = hcfg;
  cfg.virtual_coil = acfg.enable_vc;
  const std::size_t p_pe = cfg.pencil_for(n);      // PE-direction lift (Q_l)
  const std::size_t p_par = cfg.pencil_for_param(l); // parameter lift (P_n)
  const std::size_t blocks_pe = j * (acfg.enable_vc ? 2 : 1);
  const auto counts_par = hankel_counts(l, p_par);

  const ComplexTensor y_masked = apply_mask(y_m, mask);
  const ComplexTensor fid_rhs = fft_along_axis(y_masked, 0, true); // F^PE,* U* Y

  std::vector<CMatrix> z_pe(n), d_pe(n); // unweighted parameter-dim liftings
  std::vector<CMatrix> z_p(l), d_p(l);   // weighted (vc) PE-direction liftings
  for (std::size_t i = 0; i < n; ++i) {
    z_pe[i] = CMatrix::Zero(static_cast<Eigen::Index>(p_par),
                            static_cast<Eigen::Index>(j * (l - p_par + 1)));
    d_pe[i] = ones_like(z_pe[i].rows(), z_pe[i].cols());
  }
  for (std::size_t i = 0; i < l; ++i) {
    z_p[i] = CMatrix::Zero(static_cast<Eigen::Index>(p_pe),
                           static_cast<Eigen::Index>(blocks_pe * (n - p_pe + 1)));
    d_p[i] = ones_like(z_p[i].rows(), z_p[i].cols());
  }

  ComplexTensor x = fft_along_axis(y_masked, 0, true);
  const double beta = acfg.beta;
  const std::vector<std::size_t> dims = {n, l, j};

  const auto apply_a = [&](const ComplexTensor& v) {
    ComplexTensor out({n, l, j});
    ComplexTensor fid = fft_along_axis(
        apply_mask(fft_along_axis(v, 0, false), mask), 0, true);
    fid *= cplx{acfg.lambda, 0};
    out += fid;
    // beta sum_n P* H* H P: anti-diagonal multiplicities along the
    // parameter dimension.
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t q = 0; q < j; ++q)
        for (std::size_t c = 0; c < l; ++c)
          out.at(r, c, q) += beta * counts_par[c] * v.at(r, c, q);
    // beta sum_l Q* L* L Q on the weighted PE-direction liftings.
    for (std::size_t c = 0; c < l; ++c) {
      auto t = lift_weighted_normal(extract_cols(v, c), cfg);
      for (std::size_t q = 0; q < j; ++q)
        for (std::size_t r = 0; r < n; ++r)
          out.at(r, c, q) += beta * t[q][r];
    }
    return out;
  };

  std::size_t iters = 0;
  double relchange = 1.0;
  for (std::size_t k = 0; k < acfg.max_outer; ++k) {
    ComplexTensor b({n, l, j});
    b += fid_rhs;
    b *= cplx{acfg.lambda, 0};
    for (std::size_t r = 0; r < n; ++r) {
      CMatrix t = z_pe[r] - d_pe[r] / beta;
      auto rows = adjoint_lift_plain(t, l, j);
      for (std::size_t q = 0; q < j; ++q)
        for (std::size_t c = 0; c < l; ++c)
          b.at(r, c, q) += beta * rows[q][c];
    }
    for (std::size_t c = 0; c < l; ++c) {
      CMatrix t = z_p[c] - d_p[c] / beta;
      ComplexTensor adj = adjoint_lift_cols(t, dims, c, cfg);
      adj *= cplx{beta, 0};
      b += adj;
    }
    CgResult cg;
    ComplexTensor x_new = cg_solve(apply_a, b, x, acfg.cg_max, acfg.cg_tol, &cg);

    for (std::size_t r = 0; r < n; ++r) {
      CMatrix lifted = lift_plain(extract_rows(x_new, r), p_par);
      z_pe[r] = svt(lifted + d_pe[r] / beta, acfg.lambda2 / beta);
      d_pe[r] += acfg.tau * (lifted - z_pe[r]);
    }
    for (std::size_t c = 0; c < l; ++c) {
      CMatrix lifted = lift_cols(x_new, c, cfg);
      z_p[c] = svt(lifted + d_p[c] / beta, 1.0 / beta);
      d_p[c] += acfg.tau * (lifted - z_p[c]);
    }

    relchange = rel_change_sq(x_new, x);
    x = std::move(x_new);
    iters = k + 1;
    log_iter(log, iters, relchange, cg);
    if (relchange < acfg.tol) break;
  }
  if (stats) *stats = {iters, relchange};
  return x;
}

} // namespace shlr
