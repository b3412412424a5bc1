#include <doctest.h>

#include <random>

#include "shlr/fft.hpp"
#include "shlr/operators.hpp"
#include "shlr/sampling.hpp"
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

cplx frob_dot(const CMatrix& a, const CMatrix& b) {
  return (a.array() * b.array().conjugate()).sum();
}

double rvec_dot(const std::vector<std::vector<cplx>>& a,
                const std::vector<std::vector<cplx>>& b) {
  cplx s{0, 0};
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t i = 0; i < a[j].size(); ++i)
      s += a[j][i] * std::conj(b[j][i]);
  return s.real();
}

std::vector<std::vector<cplx>> random_group(std::size_t coils, std::size_t len,
                                            std::uint32_t seed) {
  std::vector<std::vector<cplx>> g(coils);
  for (std::size_t j = 0; j < coils; ++j)
    g[j] = test::random_cvec(len, seed + static_cast<std::uint32_t>(j));
  return g;
}

} // namespace

TEST_CASE("weighted lift degenerates to a plain spectral Hankel lift") {
  HankelConfig cfg;
  cfg.pencil = 3;
  cfg.filter_taps = {cplx{1, 0}};
  auto v = test::random_cvec(8, 1);
  CMatrix got = lift_weighted({v}, cfg);
  CMatrix want = hankel_lift(fft1d_centered(v), 3);
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("virtual coil doubles the lifted column count") {
  HankelConfig cfg;
  cfg.pencil = 3;
  auto g = random_group(2, 9, 10);
  CMatrix plain = lift_weighted(g, cfg);
  cfg.virtual_coil = true;
  CMatrix vc = lift_weighted(g, cfg);
  CHECK(vc.rows() == plain.rows());
  CHECK(vc.cols() == 2 * plain.cols());
  // The regular blocks are unchanged by enabling vc.
  CHECK((vc.leftCols(plain.cols()) - plain).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lift_weighted adjoint identity (complex pairing, no vc)") {
  HankelConfig cfg;
  cfg.pencil = 4;
  const std::size_t len = 10, coils = 2;
  auto s = random_group(coils, len, 20);
  CMatrix probe = random_cmatrix(4, static_cast<Eigen::Index>(coils * (len - 4 + 1)), 21);
  CMatrix ls = lift_weighted(s, cfg);
  auto adj = adjoint_lift_weighted(probe, len, coils, cfg);
  cplx lhs = frob_dot(ls, probe);
  cplx rhs{0, 0};
  for (std::size_t j = 0; j < coils; ++j)
    for (std::size_t i = 0; i < len; ++i)
      rhs += s[j][i] * std::conj(adj[j][i]);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("lift_weighted adjoint identity (real pairing, vc on)") {
  HankelConfig cfg;
  cfg.pencil = 4;
  cfg.virtual_coil = true;
  const std::size_t len = 11, coils = 2;
  auto s = random_group(coils, len, 30);
  CMatrix probe = random_cmatrix(4, static_cast<Eigen::Index>(2 * coils * (len - 4 + 1)), 31);
  double lhs = frob_dot(lift_weighted(s, cfg), probe).real();
  double rhs = rvec_dot(s, adjoint_lift_weighted(probe, len, coils, cfg));
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("lift_weighted_normal equals adjoint-of-lift on both vc settings") {
  for (bool vc : {false, true}) {
    HankelConfig cfg;
    cfg.pencil = 4;
    cfg.virtual_coil = vc;
    const std::size_t len = 10, coils = 3;
    auto s = random_group(coils, len, vc ? 40 : 41);
    auto fast = lift_weighted_normal(s, cfg);
    auto slow = adjoint_lift_weighted(lift_weighted(s, cfg), len, coils, cfg);
    for (std::size_t j = 0; j < coils; ++j)
      for (std::size_t i = 0; i < len; ++i)
        CHECK(std::abs(fast[j][i] - slow[j][i]) < 1e-10);
  }
}

TEST_CASE("plain lift and its adjoint pair up") {
  const std::size_t len = 9, coils = 2, p = 3;
  auto s = random_group(coils, len, 50);
  CMatrix probe = random_cmatrix(p, static_cast<Eigen::Index>(coils * (len - p + 1)), 51);
  cplx lhs = frob_dot(lift_plain(s, p), probe);
  auto adj = adjoint_lift_plain(probe, len, coils);
  cplx rhs{0, 0};
  for (std::size_t j = 0; j < coils; ++j)
    for (std::size_t i = 0; i < len; ++i)
      rhs += s[j][i] * std::conj(adj[j][i]);
  CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
}

TEST_CASE("row/column extraction picks the expected fibers") {
  ComplexTensor x = test::random_tensor({4, 5, 2}, 60);
  auto rows = extract_rows(x, 2);
  REQUIRE(rows.size() == 2);
  REQUIRE(rows[0].size() == 5);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t n = 0; n < 5; ++n) CHECK(rows[j][n] == x.at(2, n, j));
  auto cols = extract_cols(x, 3);
  REQUIRE(cols[0].size() == 4);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t m = 0; m < 4; ++m) CHECK(cols[j][m] == x.at(m, 3, j));
  CHECK_THROWS_AS(extract_rows(x, 4), std::invalid_argument);
  CHECK_THROWS_AS(extract_cols(x, 5), std::invalid_argument);
}

TEST_CASE("lift_rows / adjoint_lift_rows real-pairing adjoint identity") {
  for (bool vc : {false, true}) {
    HankelConfig cfg;
    cfg.pencil = 3;
    cfg.virtual_coil = vc;
    ComplexTensor x = test::random_tensor({5, 8, 2}, vc ? 70 : 71);
    const std::size_t m = 1;
    CMatrix lx = lift_rows(x, m, cfg);
    CMatrix probe = random_cmatrix(lx.rows(), lx.cols(), 72);
    ComplexTensor adj = adjoint_lift_rows(probe, x.dims(), m, cfg);
    double lhs = frob_dot(lx, probe).real();
    double rhs = rdot(x, adj);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
    // The adjoint only touches row m.
    for (std::size_t r = 0; r < 5; ++r)
      if (r != m)
        for (std::size_t c = 0; c < 8; ++c)
          for (std::size_t j = 0; j < 2; ++j)
            CHECK(adj.at(r, c, j) == cplx{0, 0});
  }
}

TEST_CASE("lift_cols / adjoint_lift_cols real-pairing adjoint identity") {
  HankelConfig cfg;
  cfg.pencil = 3;
  cfg.virtual_coil = true;
  ComplexTensor x = test::random_tensor({7, 6, 2}, 80);
  const std::size_t n = 4;
  CMatrix lx = lift_cols(x, n, cfg);
  CMatrix probe = random_cmatrix(lx.rows(), lx.cols(), 81);
  ComplexTensor adj = adjoint_lift_cols(probe, x.dims(), n, cfg);
  CHECK(std::abs(frob_dot(lx, probe).real() - rdot(x, adj)) <
        1e-10 * std::abs(rdot(x, adj)));
}

TEST_CASE("apply_mask broadcasts line masks and zeroes the complement") {
  ComplexTensor k = test::random_tensor({4, 6, 2}, 90);
  SamplingMask mask = mask_uniform(6, 3, 0);
  ComplexTensor masked = apply_mask(k, mask);
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 6; ++c)
      for (std::size_t j = 0; j < 2; ++j) {
        if (mask.sampled(r, c))
          CHECK(masked.at(r, c, j) == k.at(r, c, j));
        else
          CHECK(masked.at(r, c, j) == cplx{0, 0});
      }
}

TEST_CASE("normal operator: zero weights give the zero tensor") {
  ComplexTensor x = test::random_tensor({6, 6, 1}, 100);
  SamplingMask mask = mask_uniform(6, 2, 2);
  HankelConfig cfg;
  cfg.pencil = 3;
  ComplexTensor out = normal_apply(x, mask, nullptr, cfg, 0, 0, 0);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == cplx{0, 0});
}

TEST_CASE("normal operator is self-adjoint under the real pairing") {
  for (bool vc : {false, true}) {
    HankelConfig cfg;
    cfg.pencil = 3;
    cfg.virtual_coil = vc;
    SamplingMask mask = mask_uniform(7, 2, 3);
    ComplexTensor x = test::random_tensor({6, 7, 2}, vc ? 110 : 111);
    ComplexTensor y = test::random_tensor({6, 7, 2}, vc ? 112 : 113);
    auto a = [&](const ComplexTensor& t) {
      return normal_apply(t, mask, nullptr, cfg, 2.5, 0.0, 1.5);
    };
    double lhs = rdot(a(x), y);
    double rhs = rdot(x, a(y));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs));
    CHECK(rdot(a(x), x) >= 0.0); // positive semi-definite
  }
}

TEST_CASE("normal operator matches a lift-then-adjoint composition oracle") {
  HankelConfig cfg;
  cfg.pencil = 3;
  cfg.virtual_coil = true;
  SamplingMask mask = mask_uniform(6, 2, 2);
  ComplexTensor x = test::random_tensor({5, 6, 2}, 120);
  const double lambda = 3.0, beta = 0.7;

  ComplexTensor want = cplx{lambda, 0} *
                       ifft2d_centered(apply_mask(fft2d_centered(x), mask));
  for (std::size_t m = 0; m < 5; ++m)
    want += cplx{beta, 0} *
            adjoint_lift_rows(lift_rows(x, m, cfg), x.dims(), m, cfg);
  for (std::size_t n = 0; n < 6; ++n)
    want += cplx{beta, 0} *
            adjoint_lift_cols(lift_cols(x, n, cfg), x.dims(), n, cfg);

  ComplexTensor got = normal_apply(x, mask, nullptr, cfg, lambda, 0.0, beta);
  CHECK(test::max_abs_diff(got, want) < 1e-10);
}
