#include "kdvlab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kdvlab/fft.hpp"
#include "kdvlab/util.hpp"

namespace kdvlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SpectralField::SpectralField(int n_max) {
  if (n_max < 0) throw std::invalid_argument("SpectralField: n_max < 0");
  half_.assign(std::size_t(n_max) + 1, cplx{0.0, 0.0});
}

SpectralField SpectralField::from_half(std::vector<cplx> half) {
  if (half.empty()) throw std::invalid_argument("SpectralField: empty half");
  // The zero mode of a real field is real; tolerate roundoff, reject junk.
  double scale = 0.0;
  for (const cplx& c : half) scale = std::max(scale, std::abs(c));
  if (std::abs(half[0].imag()) > 1e-9 * std::max(scale, 1.0)) {
    throw std::runtime_error("SpectralField: zero mode has imaginary part");
  }
  half[0] = cplx{half[0].real(), 0.0};
  SpectralField f;
  f.half_ = std::move(half);
  return f;
}

void SpectralField::set_coef(int n, cplx v) {
  if (n < 0 || n >= int(half_.size())) {
    throw std::out_of_range("SpectralField::set_coef: n outside [0, n_max]");
  }
  if (n == 0) v = cplx{v.real(), 0.0};
  half_[std::size_t(n)] = v;
}

std::vector<double> inverse_transform(const SpectralField& f, int grid) {
  if (grid <= 2 * f.n_max()) {
    throw std::invalid_argument("inverse_transform: grid too small for band");
  }
  std::vector<cplx> buf(std::size_t(grid) / 2 + 1, cplx{0.0, 0.0});
  for (int n = 0; n <= f.n_max(); ++n) buf[std::size_t(n)] = f.coef(n);
  std::vector<double> out(static_cast<std::size_t>(grid));
  fft::c2r(buf.data(), out.data(), grid);
  for (double& v : out) v /= kTwoPi;
  return out;
}

SpectralField forward_transform(const std::vector<double>& samples, int n_max) {
  int grid = int(samples.size());
  if (grid <= 2 * n_max) {
    throw std::invalid_argument("forward_transform: grid too small for band");
  }
  std::vector<cplx> buf(std::size_t(grid) / 2 + 1);
  fft::r2c(samples.data(), buf.data(), grid);
  std::vector<cplx> half(std::size_t(n_max) + 1);
  double scale = kTwoPi / grid;
  for (int n = 0; n <= n_max; ++n) half[std::size_t(n)] = scale * buf[std::size_t(n)];
  return SpectralField::from_half(std::move(half));
}

int dealias_grid(int n_max, int power) {
  return fft::fast_size(power * n_max + 1);
}

SpectralField derivative(const SpectralField& f) {
  std::vector<cplx> half = f.half();
  for (int n = 0; n < int(half.size()); ++n) {
    half[std::size_t(n)] *= cplx{0.0, double(n)};
  }
  return SpectralField::from_half(std::move(half));
}

SpectralField project_modes(const SpectralField& f, int lo, int hi) {
  std::vector<cplx> half = f.half();
  for (int n = 0; n < int(half.size()); ++n) {
    if (n < lo || n > hi) half[std::size_t(n)] = cplx{0.0, 0.0};
  }
  return SpectralField::from_half(std::move(half));
}

int dyadic_block_of(int n) {
  int a = n < 0 ? -n : n;
  if (a <= 1) return 0;
  int k = 0;
  while ((1 << (k + 1)) <= a) ++k;
  return k;
}

int dyadic_block_count(int n_max) {
  return dyadic_block_of(n_max) + 1;
}

SpectralField project_dyadic(const SpectralField& f, int block) {
  if (block < 0) throw std::invalid_argument("project_dyadic: block < 0");
  if (block == 0) return project_modes(f, 0, 1);
  return project_modes(f, 1 << block, (1 << (block + 1)) - 1);
}

double l2_norm_sq(const SpectralField& f) {
  double s = std::norm(f.coef(0));
  for (int n = 1; n <= f.n_max(); ++n) s += 2.0 * std::norm(f.coef(n));
  return s;
}

double sobolev_norm_sq(const SpectralField& f, double s) {
  double acc = std::norm(f.coef(0));
  for (int n = 1; n <= f.n_max(); ++n) {
    acc += 2.0 * std::pow(1.0 + double(n) * double(n), s) * std::norm(f.coef(n));
  }
  return acc;
}

double weighted_norm_sq(const SpectralField& f,
                        const std::function<double(int)>& weight) {
  double acc = weight(0) * std::norm(f.coef(0));
  for (int n = 1; n <= f.n_max(); ++n) {
    acc += 2.0 * weight(n) * std::norm(f.coef(n));
  }
  return acc;
}

SpectralField random_field(int n_max, double sigma, uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> half(std::size_t(n_max) + 1);
  half[0] = cplx{rng.normal(), 0.0};  // <0> = 1
  for (int n = 1; n <= n_max; ++n) {
    double w = std::pow(1.0 + double(n) * double(n), -sigma / 2.0);
    // Complex standard normal: variance 1/2 per component.
    half[std::size_t(n)] =
        w * cplx{rng.normal() * std::numbers::sqrt2 / 2.0,
                 rng.normal() * std::numbers::sqrt2 / 2.0};
  }
  return SpectralField::from_half(std::move(half));
}

SpectralField normalize_sobolev(SpectralField f, double s, double target) {
  double cur = sobolev_norm_sq(f, s);
  if (!(cur > 0.0)) {
    throw std::runtime_error("normalize_sobolev: zero field");
  }
  double scale = target / std::sqrt(cur);
  std::vector<cplx> half = f.half();
  for (cplx& c : half) c *= scale;
  return SpectralField::from_half(std::move(half));
}

std::string dump_spectrum(const SpectralField& f) {
  std::string out;
  out.reserve(std::size_t(2 * f.n_max() + 1) * 48);
  for (int n = -f.n_max(); n <= f.n_max(); ++n) {
    cplx c = f.coef(n);
    out += str_printf("%d %.17g %.17g\n", n, c.real(), c.imag());
  }
  return out;
}

SpectralField parse_spectrum(std::string_view text) {
  std::istringstream in{std::string(text)};
  struct Row {
    int n;
    cplx c;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int n = 0;
    double re = 0.0, im = 0.0;
    if (!(ls >> n >> re >> im)) {
      throw std::runtime_error("parse_spectrum: malformed line: " + line);
    }
    rows.push_back({n, cplx{re, im}});
  }
  if (rows.empty()) throw std::runtime_error("parse_spectrum: empty input");
  int n_max = 0;
  double scale = 0.0;
  for (const Row& r : rows) {
    n_max = std::max(n_max, std::abs(r.n));
    scale = std::max(scale, std::abs(r.c));
  }
  scale = std::max(scale, 1e-300);
  std::vector<cplx> pos(std::size_t(n_max) + 1, cplx{0.0, 0.0});
  std::vector<cplx> neg(std::size_t(n_max) + 1, cplx{0.0, 0.0});
  std::vector<bool> have_pos(std::size_t(n_max) + 1, false),
      have_neg(std::size_t(n_max) + 1, false);
  for (const Row& r : rows) {
    if (r.n >= 0) {
      pos[std::size_t(r.n)] = r.c;
      have_pos[std::size_t(r.n)] = true;
    }
    if (r.n <= 0) {
      neg[std::size_t(-r.n)] = r.c;
      have_neg[std::size_t(-r.n)] = true;
    }
  }
  for (int n = 0; n <= n_max; ++n) {
    if (!have_pos[std::size_t(n)]) {
      throw std::runtime_error(
          str_printf("parse_spectrum: missing mode %d", n));
    }
    if (have_neg[std::size_t(n)] &&
        std::abs(neg[std::size_t(n)] - std::conj(pos[std::size_t(n)])) >
            1e-12 * scale) {
      throw std::runtime_error(str_printf(
          "parse_spectrum: hermitian symmetry violated at n = %d", n));
    }
  }
  return SpectralField::from_half(std::move(pos));
}

}  // namespace kdvlab
