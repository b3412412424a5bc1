// Command-line front end: mask/phantom generation, reconstruction runs,
// metric and benchmark reports. Configuration is flat key=value text; every
// flag mirrors a config key and flags override the config file.
//
// Exit codes: 0 success, 2 missing/unreadable file, 3 dimension mismatch,
// 4 solver divergence.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "shlr/fft.hpp"
#include "shlr/hankel.hpp"
#include "shlr/io.hpp"
#include "shlr/metrics.hpp"
#include "shlr/operators.hpp"
#include "shlr/parammap.hpp"
#include "shlr/sampling.hpp"
#include "shlr/solvers.hpp"
#include "shlr/spirit.hpp"
#include "shlr/synth.hpp"

using namespace shlr;

namespace {

struct DimMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Expand `--config path` into the equivalent `--key=value` tokens in place,
// so unknown keys are rejected by the normal option parser and later
// command-line flags override the file.
std::vector<std::string> expand_config_args(int argc, char** argv) {
  std::vector<std::string> out;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc) {
      path = argv[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      path = arg.substr(9);
    } else {
      out.push_back(std::move(arg));
      continue;
    }
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file: " + path);
    std::string line;
    while (std::getline(f, line)) {
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      const auto eq = line.find('=', first);
      if (eq == std::string::npos)
        throw std::invalid_argument("config line is not key=value: " + line);
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      std::string key = trim(line.substr(first, eq - first));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config line has an empty key: " + line);
      if (!value.empty()) out.push_back("--" + key + "=" + value);
    }
  }
  return out;
}

// ------------------------------------------------------------------ manifest

class Manifest {
public:
  explicit Manifest(std::string subcommand) : sub_(std::move(subcommand)) {}

  void add(const std::string& key, const std::string& v) {
    kv_.emplace_back(key, v);
  }
  void add(const std::string& key, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    add(key, std::string(buf));
  }
  void add(const std::string& key, std::size_t v) {
    add(key, std::to_string(v));
  }
  void add(const std::string& key, const char* v) {
    add(key, std::string(v));
  }
  void add(const std::string& key, bool v) {
    add(key, std::string(v ? "1" : "0"));
  }

  // The manifest is itself a loadable config: rerunning the subcommand with
  // `--config <manifest>` reproduces the outputs bitwise.
  void write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write manifest: " + path);
    f << "# shlr " << sub_ << "\n";
    for (const auto& [k, v] : kv_) f << k << "=" << v << "\n";
  }

private:
  std::string sub_;
  std::vector<std::pair<std::string, std::string>> kv_;
};

// --------------------------------------------------------------- conversions

ComplexTensor to_tensor(const RealImage& img) {
  ComplexTensor t({img.rows(), img.cols()});
  for (std::size_t i = 0; i < img.size(); ++i) t[i] = cplx{img[i], 0.0};
  return t;
}

RealImage magnitude_image(const ComplexTensor& t) {
  if (t.rank() == 3) return ssos(t);
  if (t.rank() != 2)
    throw DimMismatchError("expected a rank-2 or rank-3 tensor for an image");
  RealImage img(t.dim(0), t.dim(1));
  for (std::size_t i = 0; i < t.size(); ++i) img[i] = std::abs(t[i]);
  return img;
}

// Comma-separated taps, each `re` or `re:im`.
std::vector<cplx> parse_taps(const std::string& s) {
  std::vector<cplx> taps;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double re = 0, im = 0;
    auto colon = item.find(':');
    if (colon == std::string::npos) {
      re = std::stod(item);
    } else {
      re = std::stod(item.substr(0, colon));
      im = std::stod(item.substr(colon + 1));
    }
    taps.push_back(cplx{re, im});
  }
  if (taps.empty()) throw std::invalid_argument("empty filter taps");
  return taps;
}

std::string taps_to_string(const std::vector<cplx>& taps) {
  std::string s;
  for (const auto& t : taps) {
    if (!s.empty()) s += ",";
    char buf[80];
    if (t.imag() == 0.0)
      std::snprintf(buf, sizeof buf, "%.17g", t.real());
    else
      std::snprintf(buf, sizeof buf, "%.17g:%.17g", t.real(), t.imag());
    s += buf;
  }
  return s;
}

std::vector<double> read_te_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open TE file: " + path);
  std::vector<double> tes;
  double v;
  while (f >> v) tes.push_back(v);
  if (tes.empty()) throw IoError("TE file has no values: " + path);
  return tes;
}

void write_te_file(const std::vector<double>& tes, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write TE file: " + path);
  for (double t : tes) f << t << "\n";
}

// ------------------------------------------------------------ shared options

struct SolverOptions {
  AdmmConfig admm;
  std::size_t pencil = 0;
  std::size_t pencil_param = 0;
  std::string filter = "1,-1";

  void attach(CLI::App* cmd) {
    cmd->add_option("--lambda", admm.lambda, "data fidelity weight");
    cmd->add_option("--lambda1", admm.lambda1, "self-consistency weight");
    cmd->add_option("--lambda2", admm.lambda2, "parameter-dimension weight");
    cmd->add_option("--beta", admm.beta, "ADMM penalty");
    cmd->add_option("--tau", admm.tau, "multiplier step");
    cmd->add_option("--max-outer", admm.max_outer, "outer iteration cap");
    cmd->add_option("--tol", admm.tol, "relative-change stopping tolerance");
    cmd->add_option("--cg-max", admm.cg_max, "inner CG iteration cap");
    cmd->add_option("--cg-tol", admm.cg_tol, "inner CG tolerance");
    cmd->add_option("--pencil", pencil, "Hankel pencil (0 = default rule)");
    cmd->add_option("--pencil-param", pencil_param,
                    "parameter-direction pencil (0 = default rule)");
    cmd->add_option("--filter", filter,
                    "sparsifying filter taps, comma-separated re[:im]");
  }

  HankelConfig hankel(bool vc) const {
    HankelConfig h;
    h.pencil = pencil;
    h.pencil_param = pencil_param;
    h.filter_taps = parse_taps(filter);
    h.virtual_coil = vc;
    return h;
  }

  void echo(Manifest& m) const {
    m.add("lambda", admm.lambda);
    m.add("lambda1", admm.lambda1);
    m.add("lambda2", admm.lambda2);
    m.add("beta", admm.beta);
    m.add("tau", admm.tau);
    m.add("max-outer", admm.max_outer);
    m.add("tol", admm.tol);
    m.add("cg-max", admm.cg_max);
    m.add("cg-tol", admm.cg_tol);
    m.add("pencil", pencil);
    m.add("pencil-param", pencil_param);
    m.add("filter", taps_to_string(parse_taps(filter)));
  }
};

void check_mask_matches(const SamplingMask& mask, std::size_t rows,
                        std::size_t cols) {
  const bool line = mask.rows == 1 && mask.cols == cols;
  const bool full = mask.rows == rows && mask.cols == cols;
  if (!line && !full)
    throw DimMismatchError("mask dims do not match data dims");
}

void append_metrics_row(const std::string& path, const std::string& dataset,
                        const std::string& method, const std::string& mask,
                        const MetricReport& report) {
  const bool fresh = !std::ifstream(path).good();
  std::ofstream f(path, std::ios::app);
  if (!f) throw IoError("cannot write metrics file: " + path);
  if (fresh) f << metrics_csv_header() << "\n";
  f << metrics_csv_row(dataset, method, mask, report) << "\n";
}

// ------------------------------------------------------------------ commands

int cmd_mask(const std::string& type, std::size_t n, std::size_t m,
             std::size_t r, double rate, std::size_t acs, std::size_t center,
             std::size_t echoes, std::uint64_t seed, double pf,
             const std::string& out) {
  SamplingMask mask;
  if (type == "uniform") {
    if (echoes > 0) {
      // PE-P plane: every r-th PE line per echo with the offset cycling
      // across echoes, plus an always-sampled centered ACS block.
      mask.rows = n;
      mask.cols = echoes;
      mask.bits.assign(n * echoes, 0);
      auto [a0, a1] = acs_range(n, acs);
      for (std::size_t e = 0; e < echoes; ++e)
        for (std::size_t row = 0; row < n; ++row)
          if ((row + r - e % r) % r == 0 || (acs > 0 && row >= a0 && row < a1))
            mask.bits[row * echoes + e] = 1;
      mask.generator = "uniform-pep";
      mask.acs = acs;
    } else {
      mask = mask_uniform(n, r, acs);
    }
  } else if (type == "gauss") {
    mask = mask_gauss_cartesian(n, rate, acs, seed);
  } else if (type == "random2d") {
    mask = mask_random2d(m, n, rate, center, seed);
  } else {
    throw std::invalid_argument("unknown mask type: " + type);
  }
  if (pf < 1.0) mask = apply_partial_fourier(mask, pf);
  write_mask(mask, out);

  Manifest man("mask");
  man.add("type", type);
  man.add("n", n);
  man.add("m", m);
  man.add("r", r);
  man.add("rate", rate);
  man.add("acs", acs);
  man.add("center", center);
  man.add("echoes", echoes);
  man.add("seed", static_cast<std::size_t>(seed));
  man.add("pf", pf);
  man.add("out", out);
  man.write(out + ".manifest");
  return 0;
}

std::vector<Shape> default_pi_shapes(std::size_t rows, std::size_t cols) {
  const double cr = static_cast<double>(rows) / 2.0;
  const double cc = static_cast<double>(cols) / 2.0;
  return {
      {Shape::Kind::Ellipse, cr, cc, cr * 0.72, cc * 0.78, 1.0},
      {Shape::Kind::Rectangle, cr * 0.75, cc * 0.85, cr * 0.18, cc * 0.22,
       1.8},
      {Shape::Kind::Ellipse, cr * 1.3, cc * 1.15, cr * 0.16, cc * 0.13, 0.5},
      {Shape::Kind::Rectangle, cr * 1.2, cc * 0.7, cr * 0.1, cc * 0.28, 1.3},
  };
}

int cmd_phantom(const std::string& kind, std::size_t rows, std::size_t cols,
                std::size_t coils, std::size_t echoes, double te0, double dte,
                double phase, double noise, std::uint64_t seed,
                const std::string& out) {
  Manifest man("phantom");
  man.add("kind", kind);
  man.add("rows", rows);
  man.add("cols", cols);
  man.add("coils", coils);
  man.add("echoes", echoes);
  man.add("te0", te0);
  man.add("dte", dte);
  man.add("phase", phase);
  man.add("noise", noise);
  man.add("seed", static_cast<std::size_t>(seed));
  man.add("out", out);

  if (kind == "pi") {
    PhantomSpec spec;
    spec.rows = rows;
    spec.cols = cols;
    spec.coils = coils;
    spec.shapes = default_pi_shapes(rows, cols);
    spec.phase_smoothness = phase;
    spec.noise_sigma = noise;
    PiPhantom ph = gen_pi_phantom(spec, seed);
    write_cplx(ph.truth, out + "_truth.cplx");
    write_cplx(ph.kspace, out + "_kspace.cplx");
  } else if (kind == "t2") {
    std::vector<double> tes;
    for (std::size_t i = 0; i < echoes; ++i)
      tes.push_back(te0 + dte * static_cast<double>(i));
    const double cr = static_cast<double>(rows) / 2.0;
    const double cc = static_cast<double>(cols) / 2.0;
    std::vector<T2Region> regions = {
        {{Shape::Kind::Ellipse, cr, cc, cr * 0.8, cc * 0.66, 1.0}, 1.0, 120.0},
        {{Shape::Kind::Rectangle, cr, cc * 0.8, cr * 0.4, cc * 0.24, 1.0}, 1.4,
         50.0},
    };
    T2Phantom ph = gen_t2_phantom(rows, cols, echoes, coils, tes, regions,
                                  seed);
    write_cplx(ph.truth, out + "_truth.cplx");
    write_cplx(fft_along_axis(fft_along_axis(ph.truth, 0, false), 1, false),
               out + "_kspace.cplx");
    write_cplx(to_tensor(ph.t2_truth), out + "_t2.cplx");
    write_te_file(tes, out + "_tes.txt");
  } else {
    throw std::invalid_argument("unknown phantom kind: " + kind);
  }
  man.write(out + ".manifest");
  return 0;
}

int cmd_recon_pi(const std::string& input, const std::string& mask_path,
                 const std::string& method, const std::string& ref_path,
                 const SolverOptions& sopt, std::size_t acs,
                 std::size_t kernel, const std::string& out) {
  if (method != "shlr" && method != "shlr-s" && method != "shlr-v" &&
      method != "shlr-sv")
    throw std::invalid_argument("unknown method: " + method);
  const bool use_spirit = method == "shlr-s" || method == "shlr-sv";
  const bool use_vc = method == "shlr-v" || method == "shlr-sv";

  ComplexTensor k = read_cplx(input);
  if (k.rank() != 3)
    throw DimMismatchError("recon-pi expects M x N x J k-space");
  SamplingMask mask = read_mask(mask_path);
  check_mask_matches(mask, k.dim(0), k.dim(1));
  ComplexTensor y = apply_mask(k, mask);

  SpiritKernels g;
  if (use_spirit) {
    std::size_t lines = acs ? acs : mask.acs;
    if (lines == 0)
      throw std::invalid_argument(
          "SPIRiT calibration needs ACS lines (--acs or mask meta)");
    auto [a0, a1] = acs_range(k.dim(1), lines);
    ComplexTensor block({k.dim(0), a1 - a0, k.dim(2)});
    for (std::size_t r = 0; r < k.dim(0); ++r)
      for (std::size_t c = a0; c < a1; ++c)
        for (std::size_t j = 0; j < k.dim(2); ++j)
          block.at(r, c - a0, j) = y.at(r, c, j);
    g = spirit_calibrate(block, kernel);
  }

  AdmmConfig acfg = sopt.admm;
  acfg.enable_spirit = use_spirit;
  acfg.enable_vc = use_vc;
  HankelConfig hcfg = sopt.hankel(use_vc);

  std::ofstream log(out + ".log");
  SolveStats stats;
  auto t0 = std::chrono::steady_clock::now();
  ComplexTensor rec = shlr_pi_reconstruct(y, mask, use_spirit ? &g : nullptr,
                                          hcfg, acfg, &log, &stats);
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

  write_cplx(rec, out + ".cplx");
  RealImage img = ssos(rec);
  write_cplx(to_tensor(img), out + "_ssos.cplx");

  if (!ref_path.empty()) {
    RealImage ref = magnitude_image(read_cplx(ref_path));
    MetricReport report;
    report.rlne = rlne(ref, img);
    report.mssim = mssim(ref, img);
    report.runtime_seconds = secs;
    report.iterations = stats.outer_iters;
    append_metrics_row(out + "_metrics.csv", input, method, mask_path, report);
  }

  Manifest man("recon-pi");
  man.add("input", input);
  man.add("mask", mask_path);
  man.add("method", method);
  man.add("ref", ref_path);
  man.add("acs", acs);
  man.add("kernel", kernel);
  sopt.echo(man);
  man.add("out", out);
  man.write(out + ".manifest");
  return 0;
}

int cmd_recon_param(const std::string& input, const std::string& te_path,
                    const std::string& mask_path, const std::string& method,
                    const std::string& ref_path, const SolverOptions& sopt,
                    int vc_override, bool emit_t2, double roi_threshold,
                    const std::string& out) {
  if (method != "shlr-p" && method != "shlr-vp")
    throw std::invalid_argument("unknown method: " + method);
  bool use_vc = method == "shlr-vp";
  if (vc_override >= 0) use_vc = vc_override != 0;

  ParameterDataset y;
  y.data = read_cplx(input);
  if (y.data.rank() != 4)
    throw DimMismatchError("recon-param expects M x N x L x J k-space");
  y.tes_ms = read_te_file(te_path);
  if (y.tes_ms.size() != y.data.dim(2))
    throw DimMismatchError("TE count does not match the echo dimension");
  SamplingMask mask = read_mask(mask_path);
  if (mask.rows != y.data.dim(1) || mask.cols != y.data.dim(2))
    throw DimMismatchError("mask dims do not match the PE-P plane");

  // Enforce the mask on the input (zero-fill unacquired locations).
  for (std::size_t a = 0; a < y.data.dim(0); ++a)
    for (std::size_t r = 0; r < mask.rows; ++r)
      for (std::size_t c = 0; c < mask.cols; ++c)
        if (!mask.at(r, c))
          for (std::size_t j = 0; j < y.data.dim(3); ++j)
            y.data.at(a, r, c, j) = cplx{0, 0};

  AdmmConfig acfg = sopt.admm;
  acfg.enable_vc = use_vc;
  HankelConfig hcfg = sopt.hankel(use_vc);

  std::ofstream log(out + ".log");
  std::size_t total_iters = 0;
  auto t0 = std::chrono::steady_clock::now();
  ParameterDataset rec = recon_param_dataset(y, mask, hcfg, acfg, &log,
                                             &total_iters);
  double secs = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();

  write_cplx(rec.data, out + ".cplx");

  // Per-echo SSOS stack.
  const std::size_t m = rec.fe(), n = rec.pe(), l = rec.echoes(),
                    j = rec.coils();
  ComplexTensor stack({m, n, l});
  for (std::size_t e = 0; e < l; ++e) {
    ComplexTensor echo({m, n, j});
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t q = 0; q < j; ++q)
          echo.at(a, b, q) = rec.data.at(a, b, e, q);
    RealImage img = ssos(echo);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < n; ++b)
        stack.at(a, b, e) = cplx{img.at(a, b), 0.0};
  }
  write_cplx(stack, out + "_ssos.cplx");

  if (emit_t2) {
    T2Map map = t2_map(rec, roi_threshold);
    write_t2_map(map, out + "_t2.cplx");
  }

  if (!ref_path.empty()) {
    ComplexTensor ref = read_cplx(ref_path);
    if (!ref.same_shape(rec.data))
      throw DimMismatchError("reference dims do not match the reconstruction");
    // Mean per-echo RLNE/MSSIM of the SSOS images.
    MetricReport report;
    for (std::size_t e = 0; e < l; ++e) {
      ComplexTensor re({m, n, j}), rc({m, n, j});
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < n; ++b)
          for (std::size_t q = 0; q < j; ++q) {
            re.at(a, b, q) = ref.at(a, b, e, q);
            rc.at(a, b, q) = rec.data.at(a, b, e, q);
          }
      RealImage ri = ssos(re), ci = ssos(rc);
      report.rlne += rlne(ri, ci) / static_cast<double>(l);
      report.mssim += mssim(ri, ci) / static_cast<double>(l);
    }
    report.runtime_seconds = secs;
    report.iterations = total_iters;
    append_metrics_row(out + "_metrics.csv", input, method, mask_path, report);
  }

  Manifest man("recon-param");
  man.add("input", input);
  man.add("tes", te_path);
  man.add("mask", mask_path);
  man.add("method", method);
  man.add("ref", ref_path);
  man.add("vc", use_vc);
  man.add("t2map", emit_t2);
  man.add("roi-threshold", roi_threshold);
  sopt.echo(man);
  man.add("out", out);
  man.write(out + ".manifest");
  return 0;
}

int cmd_t2fit(const std::string& input, const std::string& te_path,
              double roi_threshold, double t2_max, const std::string& out) {
  ParameterDataset images;
  images.data = read_cplx(input);
  if (images.data.rank() != 4)
    throw DimMismatchError("t2fit expects M x N x L x J echo images");
  images.tes_ms = read_te_file(te_path);
  if (images.tes_ms.size() != images.data.dim(2))
    throw DimMismatchError("TE count does not match the echo dimension");
  T2Map map = t2_map(images, roi_threshold, t2_max);
  write_t2_map(map, out);

  Manifest man("t2fit");
  man.add("input", input);
  man.add("tes", te_path);
  man.add("roi-threshold", roi_threshold);
  man.add("t2-max", t2_max);
  man.add("out", out);
  man.write(out + ".manifest");
  return 0;
}

int cmd_metrics(const std::string& ref_path, const std::string& rec_path,
                const std::string& dataset, const std::string& method,
                const std::string& mask_label, const std::string& out) {
  RealImage ref = magnitude_image(read_cplx(ref_path));
  RealImage rec = magnitude_image(read_cplx(rec_path));
  MetricReport report;
  report.rlne = rlne(ref, rec);
  report.mssim = mssim(ref, rec);
  if (out.empty()) {
    std::cout << metrics_csv_header() << "\n"
              << metrics_csv_row(dataset, method, mask_label, report) << "\n";
  } else {
    append_metrics_row(out, dataset, method, mask_label, report);
  }
  return 0;
}

int cmd_bench(const std::string& sizes_str, std::size_t coils, double rate,
              std::size_t acs, std::uint64_t seed, const SolverOptions& sopt,
              const std::string& out) {
  std::vector<std::size_t> sizes;
  {
    std::stringstream ss(sizes_str);
    std::string item;
    while (std::getline(ss, item, ',')) sizes.push_back(std::stoul(item));
  }
  if (sizes.empty()) throw std::invalid_argument("bench: empty size list");

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out);
    if (!file) throw IoError("cannot write bench file: " + out);
    os = &file;
  }
  *os << "size,method,iters,wall_seconds,peak_lifted_entries\n";

  const char* methods[] = {"shlr", "shlr-s", "shlr-v", "shlr-sv"};
  for (std::size_t n : sizes) {
    PhantomSpec spec;
    spec.rows = spec.cols = n;
    spec.coils = coils;
    spec.shapes = default_pi_shapes(n, n);
    PiPhantom ph = gen_pi_phantom(spec, seed);
    SamplingMask mask = mask_gauss_cartesian(n, rate, acs, seed);
    ComplexTensor y = apply_mask(ph.kspace, mask);
    auto [a0, a1] = acs_range(n, acs);
    ComplexTensor block({n, a1 - a0, coils});
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = a0; c < a1; ++c)
        for (std::size_t j = 0; j < coils; ++j)
          block.at(r, c - a0, j) = y.at(r, c, j);
    SpiritKernels g = spirit_calibrate(block, 5);

    for (const char* method : methods) {
      const std::string m = method;
      const bool use_spirit = m == "shlr-s" || m == "shlr-sv";
      const bool use_vc = m == "shlr-v" || m == "shlr-sv";
      AdmmConfig acfg = sopt.admm;
      acfg.enable_spirit = use_spirit;
      acfg.enable_vc = use_vc;
      HankelConfig hcfg = sopt.hankel(use_vc);

      SolveStats stats;
      auto t0 = std::chrono::steady_clock::now();
      shlr_pi_reconstruct(y, mask, use_spirit ? &g : nullptr, hcfg, acfg,
                          nullptr, &stats);
      double secs = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      HankelDims dims =
          hankel_dims(n, n, coils, hcfg.pencil_for(n), use_vc);
      *os << n << "," << m << "," << stats.outer_iters << "," << secs << ","
          << dims.separable_rows * dims.separable_cols << "\n";
    }
  }

  if (!out.empty()) {
    Manifest man("bench");
    man.add("sizes", sizes_str);
    man.add("coils", coils);
    man.add("rate", rate);
    man.add("acs", acs);
    man.add("seed", static_cast<std::size_t>(seed));
    sopt.echo(man);
    man.add("out", out);
    man.write(out + ".manifest");
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Separable low-rank Hankel MRI reconstruction"};
  app.require_subcommand(1);
  // Config-derived tokens come first, so later command-line flags win.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  // `--config` is expanded before parsing; this option only documents it.
  std::string config_doc;

  // --- mask
  auto* mask_cmd = app.add_subcommand("mask", "generate an undersampling mask");
  std::string mask_type = "uniform", mask_out = "mask.cplx";
  std::size_t mask_n = 0, mask_m = 0, mask_r = 2, mask_acs = 0,
              mask_center = 0, mask_echoes = 0;
  double mask_rate = 0.5, mask_pf = 1.0;
  std::uint64_t mask_seed = 0;
  mask_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  mask_cmd->add_option("--type", mask_type, "uniform | gauss | random2d");
  mask_cmd->add_option("--n", mask_n, "phase-encoding size")->required();
  mask_cmd->add_option("--m", mask_m, "readout size (random2d)");
  mask_cmd->add_option("--r", mask_r, "reduction factor (uniform)");
  mask_cmd->add_option("--rate", mask_rate, "sampling rate (gauss/random2d)");
  mask_cmd->add_option("--acs", mask_acs, "ACS line count");
  mask_cmd->add_option("--center", mask_center, "center block (random2d)");
  mask_cmd->add_option("--echoes", mask_echoes,
                       "emit an interleaved N x L PE-P mask (uniform)");
  mask_cmd->add_option("--seed", mask_seed, "generator seed");
  mask_cmd->add_option("--pf", mask_pf, "partial Fourier fraction");
  mask_cmd->add_option("--out", mask_out, "output path");

  // --- phantom
  auto* ph_cmd = app.add_subcommand("phantom", "generate a synthetic phantom");
  std::string ph_kind = "pi", ph_out = "phantom";
  std::size_t ph_rows = 64, ph_cols = 64, ph_coils = 2, ph_echoes = 15;
  double ph_te0 = 8.8, ph_dte = 8.8, ph_phase = 0.0, ph_noise = 0.0;
  std::uint64_t ph_seed = 0;
  ph_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  ph_cmd->add_option("--kind", ph_kind, "pi | t2");
  ph_cmd->add_option("--rows", ph_rows, "image rows");
  ph_cmd->add_option("--cols", ph_cols, "image cols");
  ph_cmd->add_option("--coils", ph_coils, "coil count");
  ph_cmd->add_option("--echoes", ph_echoes, "echo count (t2)");
  ph_cmd->add_option("--te0", ph_te0, "first TE in ms (t2)");
  ph_cmd->add_option("--dte", ph_dte, "TE spacing in ms (t2)");
  ph_cmd->add_option("--phase", ph_phase, "phase smoothness (pi)");
  ph_cmd->add_option("--noise", ph_noise, "k-space noise sigma (pi)");
  ph_cmd->add_option("--seed", ph_seed, "generator seed");
  ph_cmd->add_option("--out", ph_out, "output path prefix");

  // --- recon-pi
  auto* pi_cmd =
      app.add_subcommand("recon-pi", "parallel-imaging reconstruction");
  std::string pi_input, pi_mask, pi_method = "shlr-sv", pi_ref,
              pi_out = "recon";
  std::size_t pi_acs = 0, pi_kernel = 5;
  SolverOptions pi_sopt;
  pi_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  pi_cmd->add_option("--input", pi_input, "k-space .cplx (M x N x J)")
      ->required();
  pi_cmd->add_option("--mask", pi_mask, "mask path")->required();
  pi_cmd->add_option("--method", pi_method, "shlr | shlr-s | shlr-v | shlr-sv");
  pi_cmd->add_option("--ref", pi_ref, "reference image .cplx for metrics");
  pi_cmd->add_option("--acs", pi_acs,
                     "ACS lines for calibration (0 = mask meta)");
  pi_cmd->add_option("--kernel", pi_kernel, "SPIRiT kernel size");
  pi_sopt.attach(pi_cmd);
  pi_cmd->add_option("--out", pi_out, "output path prefix");

  // --- recon-param
  auto* pa_cmd =
      app.add_subcommand("recon-param", "parameter-imaging reconstruction");
  std::string pa_input, pa_tes, pa_mask, pa_method = "shlr-vp", pa_ref,
              pa_out = "recon";
  int pa_vc = -1;
  bool pa_t2map = false;
  double pa_roi = 0.1;
  SolverOptions pa_sopt;
  pa_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  pa_cmd->add_option("--input", pa_input, "k-space .cplx (M x N x L x J)")
      ->required();
  pa_cmd->add_option("--tes", pa_tes, "TE file, one ms value per line")
      ->required();
  pa_cmd->add_option("--mask", pa_mask, "PE-P mask path")->required();
  pa_cmd->add_option("--method", pa_method, "shlr-p | shlr-vp");
  pa_cmd->add_option("--ref", pa_ref, "reference dataset .cplx for metrics");
  pa_cmd->add_option("--vc", pa_vc, "override virtual coil (0/1)");
  pa_cmd->add_flag("--t2map", pa_t2map, "also write a fitted T2 map");
  pa_cmd->add_option("--roi-threshold", pa_roi, "T2 map ROI threshold");
  pa_sopt.attach(pa_cmd);
  pa_cmd->add_option("--out", pa_out, "output path prefix");

  // --- t2fit
  auto* fit_cmd = app.add_subcommand("t2fit", "pixelwise T2 map fit");
  std::string fit_input, fit_tes, fit_out = "t2map.cplx";
  double fit_roi = 0.1, fit_max = 400.0;
  fit_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  fit_cmd->add_option("--input", fit_input, "echo images .cplx (M x N x L x J)")
      ->required();
  fit_cmd->add_option("--tes", fit_tes, "TE file, one ms value per line")
      ->required();
  fit_cmd->add_option("--roi-threshold", fit_roi, "ROI threshold");
  fit_cmd->add_option("--t2-max", fit_max, "maximum valid T2 in ms");
  fit_cmd->add_option("--out", fit_out, "output path");

  // --- metrics
  auto* met_cmd = app.add_subcommand("metrics", "RLNE/MSSIM report");
  std::string met_ref, met_rec, met_dataset = "-", met_method = "-",
              met_mask = "-", met_out;
  met_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  met_cmd->add_option("--ref", met_ref, "reference .cplx")->required();
  met_cmd->add_option("--rec", met_rec, "reconstruction .cplx")->required();
  met_cmd->add_option("--dataset", met_dataset, "dataset label");
  met_cmd->add_option("--method", met_method, "method label");
  met_cmd->add_option("--mask", met_mask, "mask label");
  met_cmd->add_option("--out", met_out, "CSV path (default: stdout)");

  // --- bench
  auto* bench_cmd = app.add_subcommand("bench", "timing benchmark");
  std::string bench_sizes, bench_out;
  std::size_t bench_coils = 2, bench_acs = 8;
  double bench_rate = 0.4;
  std::uint64_t bench_seed = 1;
  SolverOptions bench_sopt;
  bench_cmd->add_option("--config", config_doc, "key=value config file; flags override");
  bench_cmd->add_option("--sizes", bench_sizes, "comma-separated image sizes")
      ->required();
  bench_cmd->add_option("--coils", bench_coils, "coil count");
  bench_cmd->add_option("--rate", bench_rate, "sampling rate");
  bench_cmd->add_option("--acs", bench_acs, "ACS line count");
  bench_cmd->add_option("--seed", bench_seed, "phantom/mask seed");
  bench_sopt.attach(bench_cmd);
  bench_cmd->add_option("--out", bench_out, "CSV path (default: stdout)");

  std::vector<std::string> args;
  try {
    args = expand_config_args(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (mask_cmd->parsed())
      return cmd_mask(mask_type, mask_n, mask_m, mask_r, mask_rate, mask_acs,
                      mask_center, mask_echoes, mask_seed, mask_pf, mask_out);
    if (ph_cmd->parsed())
      return cmd_phantom(ph_kind, ph_rows, ph_cols, ph_coils, ph_echoes,
                         ph_te0, ph_dte, ph_phase, ph_noise, ph_seed, ph_out);
    if (pi_cmd->parsed())
      return cmd_recon_pi(pi_input, pi_mask, pi_method, pi_ref, pi_sopt,
                          pi_acs, pi_kernel, pi_out);
    if (pa_cmd->parsed())
      return cmd_recon_param(pa_input, pa_tes, pa_mask, pa_method, pa_ref,
                             pa_sopt, pa_vc, pa_t2map, pa_roi, pa_out);
    if (fit_cmd->parsed())
      return cmd_t2fit(fit_input, fit_tes, fit_roi, fit_max, fit_out);
    if (met_cmd->parsed())
      return cmd_metrics(met_ref, met_rec, met_dataset, met_method, met_mask,
                         met_out);
    if (bench_cmd->parsed())
      return cmd_bench(bench_sizes, bench_coils, bench_rate, bench_acs,
                       bench_seed, bench_sopt, bench_out);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DimMismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
