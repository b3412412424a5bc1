#include "shlr/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace shlr {

static_assert(std::endian::native == std::endian::little,
              "cplx I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'P', 'L', 'X', '0', '0', '0', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is)
    throw TruncatedFileError("truncated .cplx file: " + path);
  return v;
}

} // namespace

void write_cplx(const ComplexTensor& t, const std::string& path,
                int precision) {
  if (precision != 32 && precision != 64)
    throw IoError("write_cplx: precision must be 32 or 64");
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw IoError("write_cplx: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  put<std::uint8_t>(os, precision == 32 ? 0 : 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.dims()) put<std::uint64_t>(os, d);
  if (precision == 64) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      put<double>(os, t[i].real());
      put<double>(os, t[i].imag());
    }
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) {
      put<float>(os, static_cast<float>(t[i].real()));
      put<float>(os, static_cast<float>(t[i].imag()));
    }
  }
  os.flush();
  if (!os)
    throw IoError("write_cplx: I/O failure writing " + path);
}

ComplexTensor read_cplx(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw IoError("read_cplx: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is)
    throw TruncatedFileError("truncated .cplx file: " + path);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw BadMagicError("bad magic in " + path);
  auto prec = get<std::uint8_t>(is, path);
  if (prec > 1)
    throw IoError("read_cplx: unknown precision code in " + path);
  auto ndim = get<std::uint32_t>(is, path);
  if (ndim == 0 || ndim > 16)
    throw DimOverflowError("read_cplx: unreasonable rank in " + path);
  std::vector<std::size_t> dims(ndim);
  std::size_t total = 1;
  for (auto& d : dims) {
    auto v = get<std::uint64_t>(is, path);
    if (v == 0 || v > (std::uint64_t{1} << 40) ||
        total > std::size_t{1} << 40)
      throw DimOverflowError("read_cplx: dimension overflow in " + path);
    d = static_cast<std::size_t>(v);
    total *= d;
  }
  ComplexTensor t(dims);
  if (prec == 1) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      double re = get<double>(is, path);
      double im = get<double>(is, path);
      t[i] = {re, im};
    }
  } else {
    for (std::size_t i = 0; i < t.size(); ++i) {
      float re = get<float>(is, path);
      float im = get<float>(is, path);
      t[i] = {re, im};
    }
  }
  return t;
}

RealImage ssos(const ComplexTensor& x) {
  if (x.rank() != 3)
    throw std::invalid_argument("ssos: expected an M x N x J tensor");
  const std::size_t m = x.dim(0), n = x.dim(1), j = x.dim(2);
  RealImage out(m, n);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      double s = 0.0;
      for (std::size_t k = 0; k < j; ++k) s += std::norm(x.at(r, c, k));
      out.at(r, c) = std::sqrt(s);
    }
  return out;
}

ComplexTensor coil_compress(const ComplexTensor& k, std::size_t j_out,
                            double* retained_energy) {
  if (k.rank() != 3)
    throw std::invalid_argument("coil_compress: expected an M x N x J tensor");
  const std::size_t m = k.dim(0), n = k.dim(1), j = k.dim(2);
  if (j_out < 1 || j_out > j)
    throw std::invalid_argument("coil_compress: coil count out of range");

  Eigen::MatrixXcd a(m * n, j);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t q = 0; q < j; ++q)
        a(static_cast<Eigen::Index>(r * n + c), static_cast<Eigen::Index>(q)) =
            k.at(r, c, q);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (retained_energy) {
    double total = sv.array().square().sum();
    double kept = sv.head(static_cast<Eigen::Index>(j_out)).array().square().sum();
    *retained_energy = total > 0.0 ? kept / total : 1.0;
  }
  Eigen::MatrixXcd proj =
      a * svd.matrixV().leftCols(static_cast<Eigen::Index>(j_out));

  ComplexTensor out({m, n, j_out});
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t q = 0; q < j_out; ++q)
        out.at(r, c, q) = proj(static_cast<Eigen::Index>(r * n + c),
                               static_cast<Eigen::Index>(q));
  return out;
}

} // namespace shlr
