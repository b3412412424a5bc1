#include <doctest.h>

#include <random>
#include <sstream>

#include "shlr/fft.hpp"
#include "shlr/operators.hpp"
#include "shlr/solvers.hpp"
#include "shlr/synth.hpp"
#include "test_util.hpp"

using namespace shlr;

namespace {

CMatrix random_cmatrix(Eigen::Index r, Eigen::Index c, std::uint32_t seed) {
  auto v = test::random_cvec(static_cast<std::size_t>(r * c), seed);
  CMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      m(i, j) = v[static_cast<std::size_t>(i * c + j)];
  return m;
}

PhantomSpec small_phantom_spec(std::size_t n, std::size_t coils,
                               double phase) {
  PhantomSpec spec;
  spec.rows = spec.cols = n;
  spec.coils = coils;
  double c = static_cast<double>(n) / 2.0;
  spec.shapes = {
      {Shape::Kind::Ellipse, c, c, c * 0.7, c * 0.75, 1.0},
      {Shape::Kind::Rectangle, c * 0.7, c * 0.8, c * 0.18, c * 0.25, 1.8},
      {Shape::Kind::Ellipse, c * 1.3, c * 1.2, c * 0.15, c * 0.12, 0.5},
  };
  spec.phase_smoothness = phase;
  return spec;
}

} // namespace

TEST_CASE("svt: zero threshold reproduces the input") {
  CMatrix m = random_cmatrix(5, 7, 1);
  CHECK((svt(m, 0.0) - m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("svt: analytic rank-1 shrinkage") {
  Eigen::VectorXcd u(3), v(4);
  u << cplx{0.6, 0}, cplx{0, 0.8}, cplx{0, 0};
  v << cplx{0.5, 0}, cplx{0.5, 0}, cplx{0.5, 0}, cplx{0.5, 0};
  CMatrix m = 5.0 * u * v.adjoint();
  CMatrix want = 3.0 * u * v.adjoint();
  CHECK((svt(m, 2.0) - want).cwiseAbs().maxCoeff() < 1e-12);
  // Threshold above the only singular value annihilates the matrix.
  CHECK(svt(m, 6.0).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("svt matches an independent dense-SVD shrink oracle") {
  for (std::uint32_t seed = 0; seed < 8; ++seed) {
    CMatrix m = random_cmatrix(4, 4, 100 + seed);
    const double tau = 0.3;
    Eigen::JacobiSVD<CMatrix> svd(m,
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = svd.singularValues();
    for (Eigen::Index i = 0; i < s.size(); ++i)
      s(i) = std::max(s(i) - tau, 0.0);
    CMatrix want = svd.matrixU() * s.asDiagonal() * svd.matrixV().adjoint();
    CHECK((svt(m, tau) - want).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("svt is non-expansive and drops rank as expected") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    CMatrix a = random_cmatrix(6, 5, 200 + static_cast<std::uint32_t>(trial));
    CMatrix b = random_cmatrix(6, 5, 300 + static_cast<std::uint32_t>(trial));
    const double tau = 0.5;
    CHECK((svt(a, tau) - svt(b, tau)).norm() <= (a - b).norm() + 1e-12);

    Eigen::JacobiSVD<CMatrix> svd(a);
    Eigen::VectorXd s = svd.singularValues();
    Eigen::Index want_rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tau) ++want_rank;
    Eigen::JacobiSVD<CMatrix> svd2(svt(a, tau));
    Eigen::VectorXd s2 = svd2.singularValues();
    Eigen::Index got_rank = 0;
    for (Eigen::Index i = 0; i < s2.size(); ++i)
      if (s2(i) > 1e-10) ++got_rank;
    CHECK(got_rank == want_rank);
    CHECK(s2.sum() <= s.sum() + 1e-12); // nuclear norm non-increasing
  }
}

TEST_CASE("cg: identity system converges in one iteration") {
  ComplexTensor b = test::random_tensor({4, 3}, 1);
  ComplexTensor x0(b.dims());
  CgResult res;
  ComplexTensor x = cg_solve([](const ComplexTensor& t) { return t; }, b, x0,
                             10, 1e-12, &res);
  CHECK(res.iterations == 1);
  CHECK(test::max_abs_diff(x, b) < 1e-12);
}

TEST_CASE("cg: diagonal system has the obvious solution") {
  ComplexTensor b({3});
  b[0] = {1, 0};
  b[1] = {2, 0};
  b[2] = {4, 0};
  auto apply = [](const ComplexTensor& t) {
    ComplexTensor out = t;
    out[1] *= 2.0;
    out[2] *= 4.0;
    return out;
  };
  ComplexTensor x = cg_solve(apply, b, ComplexTensor({3}), 10, 1e-12);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(x[i] - cplx{1, 0}) < 1e-10);
}

TEST_CASE("cg matches a dense direct solve on a random SPD system") {
  const Eigen::Index n = 12;
  CMatrix b0 = random_cmatrix(n, n, 5);
  CMatrix a = b0.adjoint() * b0 + 0.5 * CMatrix::Identity(n, n);
  Eigen::VectorXcd rhs(n);
  auto rv = test::random_cvec(static_cast<std::size_t>(n), 6);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = rv[static_cast<std::size_t>(i)];
  Eigen::VectorXcd direct = a.fullPivLu().solve(rhs);

  ComplexTensor bt({static_cast<std::size_t>(n)});
  for (Eigen::Index i = 0; i < n; ++i) bt[static_cast<std::size_t>(i)] = rhs(i);
  auto apply = [&](const ComplexTensor& t) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = t[static_cast<std::size_t>(i)];
    Eigen::VectorXcd w = a * v;
    ComplexTensor out(t.dims());
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = w(i);
    return out;
  };
  ComplexTensor x =
      cg_solve(apply, bt, ComplexTensor({static_cast<std::size_t>(n)}), 200,
               1e-12);
  for (Eigen::Index i = 0; i < n; ++i)
    CHECK(std::abs(x[static_cast<std::size_t>(i)] - direct(i)) < 1e-8);
}

TEST_CASE("cg residual is non-increasing on a well-conditioned system") {
  const Eigen::Index n = 10;
  CMatrix b0 = random_cmatrix(n, n, 7);
  CMatrix a = b0.adjoint() * b0 + 2.0 * CMatrix::Identity(n, n);
  ComplexTensor bt({static_cast<std::size_t>(n)});
  auto rv = test::random_cvec(static_cast<std::size_t>(n), 8);
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) bt[i] = rv[i];
  auto apply = [&](const ComplexTensor& t) {
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = t[static_cast<std::size_t>(i)];
    Eigen::VectorXcd w = a * v;
    ComplexTensor out(t.dims());
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = w(i);
    return out;
  };
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t iters = 1; iters <= 10; ++iters) {
    CgResult res;
    cg_solve(apply, bt, ComplexTensor({static_cast<std::size_t>(n)}), iters,
             0.0, &res);
    CHECK(res.relative_residual <= prev + 1e-12);
    prev = res.relative_residual;
  }
}

TEST_CASE("cg flags non-finite arithmetic as divergence") {
  ComplexTensor b({2});
  b[0] = {1, 0};
  auto apply = [](const ComplexTensor& t) {
    ComplexTensor out = t;
    out[0] = cplx{std::numeric_limits<double>::quiet_NaN(), 0};
    return out;
  };
  CHECK_THROWS_AS(cg_solve(apply, b, ComplexTensor({2}), 5, 1e-10),
                  DivergenceError);
}

TEST_CASE("parallel imaging: full sampling with strong fidelity is exact") {
  PhantomSpec spec = small_phantom_spec(32, 2, 0.05);
  PiPhantom ph = gen_pi_phantom(spec, 11);
  SamplingMask full = mask_uniform(32, 1, 0);
  HankelConfig hcfg;
  AdmmConfig acfg;
  acfg.lambda = 1e6;
  acfg.enable_vc = true;
  acfg.max_outer = 10;
  ComplexTensor rec = shlr_pi_reconstruct(ph.kspace, full, nullptr, hcfg, acfg);
  ComplexTensor direct = ifft2d_centered(ph.kspace);
  CHECK(test::rel_diff(direct, rec) < 1e-3);
}

TEST_CASE("parallel imaging: determinism and progress log format") {
  PhantomSpec spec = small_phantom_spec(24, 2, 0.05);
  PiPhantom ph = gen_pi_phantom(spec, 21);
  SamplingMask mask = mask_gauss_cartesian(24, 0.6, 6, 5);
  HankelConfig hcfg;
  AdmmConfig acfg;
  acfg.max_outer = 3;
  std::ostringstream log;
  SolveStats stats;
  ComplexTensor a =
      shlr_pi_reconstruct(ph.kspace, mask, nullptr, hcfg, acfg, &log, &stats);
  ComplexTensor b = shlr_pi_reconstruct(ph.kspace, mask, nullptr, hcfg, acfg);
  CHECK(test::max_abs_diff(a, b) == 0.0);
  CHECK(stats.outer_iters == 3);
  std::string line;
  std::istringstream in(log.str());
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    CHECK(line.find("iter=") != std::string::npos);
    CHECK(line.find("relchange=") != std::string::npos);
    CHECK(line.find("cg_iters=") != std::string::npos);
    CHECK(line.find("cg_res=") != std::string::npos);
    ++lines;
  }
  CHECK(lines == 3);
}

TEST_CASE("variant nesting: vc off equals the base model bitwise") {
  PhantomSpec spec = small_phantom_spec(16, 2, 0.0);
  PiPhantom ph = gen_pi_phantom(spec, 31);
  SamplingMask mask = mask_gauss_cartesian(16, 0.75, 4, 9);
  HankelConfig hcfg;
  AdmmConfig base;
  base.max_outer = 4;
  AdmmConfig same = base;
  same.enable_vc = false;
  same.enable_spirit = false;
  ComplexTensor a = shlr_pi_reconstruct(ph.kspace, mask, nullptr, hcfg, base);
  ComplexTensor b = shlr_pi_reconstruct(ph.kspace, mask, nullptr, hcfg, same);
  CHECK(test::max_abs_diff(a, b) == 0.0);
}

TEST_CASE("parallel imaging: missing kernels with spirit enabled is an error") {
  ComplexTensor y({8, 8, 2});
  y.at(4, 4, 0) = {1, 0};
  SamplingMask mask = mask_uniform(8, 1, 0);
  HankelConfig hcfg;
  AdmmConfig acfg;
  acfg.enable_spirit = true;
  CHECK_THROWS_AS(
      shlr_pi_reconstruct(y, mask, nullptr, hcfg, acfg),
      std::invalid_argument);
}

TEST_CASE("parameter slice: full sampling with strong fidelity is exact") {
  const std::size_t n = 16, l = 6, j = 2;
  std::vector<double> tes;
  for (std::size_t i = 1; i <= l; ++i) tes.push_back(15.0 * static_cast<double>(i));
  std::vector<T2Region> regions = {
      {{Shape::Kind::Ellipse, 8, 8, 5, 6, 1.0}, 1.0, 80.0},
      {{Shape::Kind::Rectangle, 6, 6, 2, 2, 1.0}, 1.5, 50.0},
  };
  T2Phantom ph = gen_t2_phantom(n, n, l, j, tes, regions, 3);
  // Build the PE-P plane at one FE position: transform along PE only.
  ComplexTensor plane({n, l, j});
  const std::size_t fe = 8;
  for (std::size_t pe = 0; pe < n; ++pe)
    for (std::size_t e = 0; e < l; ++e)
      for (std::size_t q = 0; q < j; ++q)
        plane.at(pe, e, q) = ph.truth.at(fe, pe, e, q);
  ComplexTensor y = fft_along_axis(plane, 0, false);

  SamplingMask full = mask_uniform(n, 1, 0);
  SamplingMask plane_mask;
  plane_mask.rows = n;
  plane_mask.cols = l;
  plane_mask.bits.assign(n * l, 1);

  HankelConfig hcfg;
  AdmmConfig acfg;
  acfg.lambda = 1e6;
  acfg.max_outer = 10;
  acfg.enable_vc = true;
  ComplexTensor rec = shlr_param_reconstruct_slice(y, plane_mask, hcfg, acfg);
  CHECK(test::rel_diff(plane, rec) < 1e-3);
}

TEST_CASE("stopping rules: iteration caps and early exit on stagnation") {
  PhantomSpec spec = small_phantom_spec(16, 2, 0.0);
  PiPhantom ph = gen_pi_phantom(spec, 41);
  SamplingMask mask = mask_gauss_cartesian(16, 0.6, 4, 2);
  HankelConfig hcfg;

  AdmmConfig capped;
  capped.max_outer = 2;
  SolveStats stats;
  shlr_pi_reconstruct(ph.kspace, mask, nullptr, hcfg, capped, nullptr, &stats);
  CHECK(stats.outer_iters == 2);

  // A huge tolerance makes the relative-change rule fire immediately.
  AdmmConfig loose;
  loose.tol = 1e9;
  shlr_pi_reconstruct(ph.kspace, mask, nullptr, hcfg, loose, nullptr, &stats);
  CHECK(stats.outer_iters == 1);
}
