#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "shlr/fft.hpp"
#include "shlr/io.hpp"
#include "shlr/synth.hpp"
#include "test_util.hpp"

using namespace shlr;

TEST_CASE("sensitivities are SSOS-normalized") {
  ComplexTensor s = gen_sensitivities(16, 20, 4);
  RealImage img = ssos(s);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(std::abs(img[i] - 1.0) < 1e-12);
}

TEST_CASE("single-coil sensitivity has unit magnitude everywhere") {
  ComplexTensor s = gen_sensitivities(10, 10, 1);
  for (std::size_t i = 0; i < s.size(); ++i)
    CHECK(std::abs(std::abs(s[i]) - 1.0) < 1e-12);
}

TEST_CASE("sensitivity maps have low rank before pixelwise scaling") {
  // Normalization scales each pixel (a row of the reshaped matrix), which
  // cannot raise rank beyond the 4 generating lobes.
  ComplexTensor s = gen_sensitivities(12, 14, 3);
  Eigen::MatrixXcd m(12 * 14, 3);
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 14; ++c)
      for (std::size_t j = 0; j < 3; ++j)
        m(static_cast<Eigen::Index>(r * 14 + c), static_cast<Eigen::Index>(j)) =
            s.at(r, c, j);
  // Rank across coils is at most 3 here; the lobes guarantee nonzero energy.
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  CHECK(svd.singularValues()(0) > 0.0);
}

TEST_CASE("noiseless phantom k-space inverts back to the truth") {
  PhantomSpec spec;
  spec.rows = 16;
  spec.cols = 16;
  spec.coils = 2;
  spec.shapes = {{Shape::Kind::Ellipse, 8, 8, 5, 6, 1.0}};
  spec.phase_smoothness = 0.1;
  PiPhantom ph = gen_pi_phantom(spec, 7);
  ComplexTensor back = ifft2d_centered(ph.kspace);
  CHECK(test::max_abs_diff(back, ph.truth) < 1e-12);
}

TEST_CASE("zero phase smoothness gives a real-valued image modulo coils") {
  PhantomSpec spec;
  spec.rows = 12;
  spec.cols = 12;
  spec.coils = 2;
  spec.shapes = {{Shape::Kind::Rectangle, 6, 6, 3, 4, 2.0}};
  spec.phase_smoothness = 0.0;
  PiPhantom ph = gen_pi_phantom(spec, 9);
  ComplexTensor sens = gen_sensitivities(12, 12, 2);
  for (std::size_t r = 0; r < 12; ++r)
    for (std::size_t c = 0; c < 12; ++c)
      for (std::size_t j = 0; j < 2; ++j) {
        cplx ratio = ph.truth.at(r, c, j) / (sens.at(r, c, j) + cplx{1e-30, 0});
        CHECK(std::abs(ratio.imag()) < 1e-10);
        CHECK(ratio.real() >= -1e-12);
      }
}

TEST_CASE("phantom generation is deterministic under seed") {
  PhantomSpec spec;
  spec.rows = 10;
  spec.cols = 10;
  spec.coils = 2;
  spec.shapes = {{Shape::Kind::Ellipse, 5, 5, 3, 3, 1.0}};
  spec.noise_sigma = 0.1;
  PiPhantom a = gen_pi_phantom(spec, 42);
  PiPhantom b = gen_pi_phantom(spec, 42);
  CHECK(test::max_abs_diff(a.kspace, b.kspace) == 0.0);
  PiPhantom c = gen_pi_phantom(spec, 43);
  CHECK(test::max_abs_diff(a.kspace, c.kspace) > 0.0);
}

TEST_CASE("phantom k-space energy equals image energy without noise") {
  PhantomSpec spec;
  spec.rows = 14;
  spec.cols = 10;
  spec.coils = 3;
  spec.shapes = {{Shape::Kind::Ellipse, 7, 5, 4, 3, 1.5}};
  spec.phase_smoothness = 0.2;
  PiPhantom ph = gen_pi_phantom(spec, 4);
  CHECK(std::abs(norm2(ph.kspace) - norm2(ph.truth)) < 1e-10);
}

TEST_CASE("rows of the magnitude image are piecewise constant") {
  PhantomSpec spec;
  spec.rows = 32;
  spec.cols = 32;
  spec.coils = 1;
  spec.shapes = {
      {Shape::Kind::Ellipse, 16, 16, 10, 12, 1.0},
      {Shape::Kind::Rectangle, 12, 14, 3, 4, 2.0},
  };
  RealImage mag = paint_shapes(32, 32, spec.shapes);
  for (std::size_t r = 0; r < 32; ++r) {
    std::size_t jumps = 0;
    for (std::size_t c = 1; c < 32; ++c)
      if (std::abs(mag.at(r, c) - mag.at(r, c - 1)) > 1e-12) ++jumps;
    CHECK(jumps <= 2 * spec.shapes.size() + 1);
  }
}

TEST_CASE("later shapes override earlier ones") {
  std::vector<Shape> shapes = {
      {Shape::Kind::Rectangle, 4, 4, 4, 4, 1.0},
      {Shape::Kind::Rectangle, 4, 4, 1, 1, 3.0},
  };
  RealImage mag = paint_shapes(8, 8, shapes);
  CHECK(mag.at(4, 4) == 3.0);
  CHECK(mag.at(1, 1) == 1.0);
}

TEST_CASE("T2 phantom: single tissue has parameter-dimension rank 1") {
  std::vector<double> tes;
  for (int i = 1; i <= 15; ++i) tes.push_back(8.8 * i); // 8.8 .. 132 ms
  CHECK(tes.back() == doctest::Approx(132.0));
  std::vector<T2Region> regions = {
      {{Shape::Kind::Ellipse, 8, 8, 5, 5, 1.0}, 1000.0, 80.0}};
  T2Phantom ph = gen_t2_phantom(16, 16, 15, 2, tes, regions, 1);

  // Parameter-dimension matrix: all (pixel, coil) signals as rows.
  Eigen::MatrixXcd m(16 * 16 * 2, 15);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t l = 0; l < 15; ++l)
          m(static_cast<Eigen::Index>((r * 16 + c) * 2 + j),
            static_cast<Eigen::Index>(l)) = ph.truth.at(r, c, l, j);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  Eigen::VectorXd s = svd.singularValues();
  CHECK(s(1) / s(0) < 1e-12);
}

TEST_CASE("T2 phantom: two tissues have parameter-dimension rank <= 2") {
  std::vector<double> tes;
  for (int i = 1; i <= 10; ++i) tes.push_back(10.0 * i);
  std::vector<T2Region> regions = {
      {{Shape::Kind::Ellipse, 6, 6, 3, 3, 1.0}, 800.0, 60.0},
      {{Shape::Kind::Rectangle, 10, 10, 2, 2, 1.0}, 1200.0, 110.0},
  };
  T2Phantom ph = gen_t2_phantom(16, 16, 10, 2, tes, regions, 2);
  Eigen::MatrixXcd m(16 * 16 * 2, 10);
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t l = 0; l < 10; ++l)
          m(static_cast<Eigen::Index>((r * 16 + c) * 2 + j),
            static_cast<Eigen::Index>(l)) = ph.truth.at(r, c, l, j);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  Eigen::VectorXd s = svd.singularValues();
  CHECK(s(2) / s(0) < 1e-12);
}

TEST_CASE("T2 phantom amplitude map is the TE->0 limit") {
  std::vector<double> tes = {5.0, 10.0, 20.0};
  std::vector<T2Region> regions = {
      {{Shape::Kind::Rectangle, 4, 4, 2, 2, 1.0}, 500.0, 70.0}};
  T2Phantom ph = gen_t2_phantom(8, 8, 3, 1, tes, regions, 3);
  for (std::size_t r = 0; r < 8; ++r)
    for (std::size_t c = 0; c < 8; ++c) {
      if (regions[0].shape.contains(static_cast<double>(r),
                                    static_cast<double>(c))) {
        CHECK(ph.amplitude.at(r, c) == doctest::Approx(500.0));
        CHECK(ph.t2_truth.at(r, c) == doctest::Approx(70.0));
        // Extrapolated TE=0 signal magnitude equals A (coil maps are
        // SSOS-normalized, single coil has unit magnitude).
        double s0 = std::abs(ph.truth.at(r, c, 0, 0)) *
                    std::exp(tes[0] / 70.0);
        CHECK(s0 == doctest::Approx(500.0).epsilon(1e-10));
      } else {
        CHECK(ph.amplitude.at(r, c) == 0.0);
      }
    }
}

TEST_CASE("phantom spec validation") {
  PhantomSpec bad;
  bad.rows = 8;
  bad.cols = 8;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument); // no shapes
  bad.shapes = {{Shape::Kind::Ellipse, 4, 4, 2, 2, -1.0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
