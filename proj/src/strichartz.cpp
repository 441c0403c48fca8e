#include "kdvlab/strichartz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kdvlab/fft.hpp"
#include "kdvlab/spacetime.hpp"
#include "kdvlab/util.hpp"

namespace kdvlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSupportHalf = 1.6;  // support radius of eta0, as in spacetime.cpp

// ---- window Fourier tables -------------------------------------------------
//
// PowerTable holds G_p(δ) = ∫ φ(t)^p e^{−iδt} dt on the grid δ_i = i·dstep,
// where φ(t) = η₀(t/width).  φ is even, so G_p is real and even and only the
// δ ≥ 0 half is stored; the table is truncated where it falls below 1e−11 of
// G_p(0), which bounds the near-diagonal window of the pair sums below.

struct PowerTable {
  double dstep = 1.0;
  std::vector<double> v;

  double range() const { return dstep * double(v.size() - 1); }
  double value(double delta) const {  // cubic interpolation, 0 past the table
    double x = std::abs(delta) / dstep;
    if (x >= double(v.size() - 1)) return 0.0;
    auto i = std::size_t(x);
    double f = x - double(i);
    if (i + 2 >= v.size()) {  // tail cells hold <= 1e-11 of the peak; linear
      return v[i] * (1.0 - f) + v[i + 1] * f;
    }
    // Four-point Lagrange on the uniform grid, O(dstep^4) instead of the
    // O(dstep^2) of linear interpolation; the function is even in delta, so
    // the sample left of the origin is v[1] reflected.
    double ym = (i == 0) ? v[1] : v[i - 1];
    double y0 = v[i];
    double y1 = v[i + 1];
    double y2 = v[i + 2];
    return ym * (-f * (f - 1.0) * (f - 2.0) / 6.0) +
           y0 * ((f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0) +
           y1 * (-(f + 1.0) * f * (f - 2.0) / 2.0) +
           y2 * ((f + 1.0) * f * (f - 1.0) / 6.0);
  }
};

PowerTable build_power_table(double width, int power) {
  // Sample φ^power on its support, zero-pad 64×, and read G_p off one
  // unnormalized real-to-complex transform.  The sampled function is smooth
  // and vanishes to all orders at the support ends, so the Riemann sum is
  // spectrally accurate at every δ far below the sampling Nyquist rate.
  const int support_points = 4096;
  const int padded = 64 * support_points;
  const double span = 2.0 * kSupportHalf * width;
  const double dt = span / double(support_points);
  std::vector<double> samples(std::size_t(padded), 0.0);
  for (int i = 0; i < support_points; ++i) {
    double t = -kSupportHalf * width + double(i) * dt;
    samples[std::size_t(i)] = std::pow(eta0(t / width), double(power));
  }
  std::vector<cplx> bins(std::size_t(padded / 2 + 1));
  fft::r2c(samples.data(), bins.data(), padded);

  PowerTable table;
  table.dstep = kTwoPi / (double(padded) * dt);
  std::vector<double> vals(bins.size());
  for (std::size_t k = 0; k < bins.size(); ++k) {
    // Undo the −1.6·width grid origin so the value is the centered transform.
    double phase = table.dstep * double(k) * kSupportHalf * width;
    vals[k] = dt * (std::cos(phase) * bins[k].real() -
                    std::sin(phase) * bins[k].imag());
  }
  double scale = std::abs(vals[0]);
  std::size_t keep = vals.size();
  while (keep > 2 && std::abs(vals[keep - 1]) <= 1e-11 * scale &&
         std::abs(vals[keep - 2]) <= 1e-11 * scale) {
    --keep;
  }
  vals.resize(keep);
  table.v = std::move(vals);
  return table;
}

const PowerTable& power_table(double width, int power) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, PowerTable> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(width, power);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, build_power_table(width, power)).first;
  }
  return it->second;
}

// W_b(σ) = ∫ ⟨ξ+σ⟩^{2b} |φ̂(ξ)|² dξ, evaluated on the φ̂ table with a
// 4× stride (the integrand varies on unit scale, far coarser than the grid).
double direct_weight(const PowerTable& phihat, double b, double sigma) {
  const int stride = 4;
  double acc = 0.0;
  for (std::size_t i = 0; i < phihat.v.size(); i += stride) {
    double xi = phihat.dstep * double(i);
    double w = phihat.v[i] * phihat.v[i];
    acc += std::pow(1.0 + (xi + sigma) * (xi + sigma), b) * w;
    if (i > 0) acc += std::pow(1.0 + (sigma - xi) * (sigma - xi), b) * w;
  }
  return acc * phihat.dstep * double(stride);
}

struct WeightTable {
  double step = 0.25;
  std::vector<double> v;  // W_b(i·step), i = 0..cap/step  (W_b is even in σ)
};

double modulation_weight(double width, double b, double sigma) {
  static std::mutex mu;
  static std::map<std::pair<double, double>, WeightTable> cache;
  const double cap = 128.0;
  const WeightTable* table = nullptr;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(width, b);
    auto it = cache.find(key);
    if (it == cache.end()) {
      WeightTable wt;
      const PowerTable& ph = power_table(width, 1);
      int count = int(cap / wt.step) + 1;
      wt.v.resize(std::size_t(count));
      for (int i = 0; i < count; ++i) {
        wt.v[std::size_t(i)] = direct_weight(ph, b, wt.step * double(i));
      }
      it = cache.emplace(key, std::move(wt)).first;
    }
    table = &it->second;
  }
  double s = std::abs(sigma);
  double x = s / table->step;
  if (x < double(table->v.size() - 1)) {
    auto i = std::size_t(x);
    double f = x - double(i);
    return table->v[i] * (1.0 - f) + table->v[i + 1] * f;
  }
  return direct_weight(power_table(width, 1), b, s);
}

// ---- frequency-pair machinery ----------------------------------------------

struct PairEntry {
  double omega = 0.0;
  cplx amp = 0.0;
};

// Sort by frequency and merge exactly equal frequencies (ordered pairs of the
// same unordered pair produce bitwise-equal sums, and integer frequencies of
// unmodulated families collide often).
void consolidate(std::vector<PairEntry>& v) {
  std::sort(v.begin(), v.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.omega < b.omega; });
  std::size_t w = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (w > 0 && v[w - 1].omega == v[i].omega) {
      v[w - 1].amp += v[i].amp;
    } else {
      v[w++] = v[i];
    }
  }
  v.resize(w);
}

// Σ_{a,b} amp_a conj(amp_b) G(ω_a − ω_b) for a frequency-sorted list; only
// pairs within the table range contribute (G is negligible beyond it).
double gram_sum(const std::vector<PairEntry>& v, const PowerTable& g) {
  if (v.empty()) return 0.0;
  const double g0 = g.v[0];
  const double dmax = g.range();
  double total = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    total += std::norm(v[a].amp) * g0;
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      double d = v[b].omega - v[a].omega;
      if (d > dmax) break;
      total += 2.0 * (v[a].amp * std::conj(v[b].amp)).real() * g.value(d);
    }
  }
  return total;
}

double family_xsb_sq(const WindowedFamily& f, double s, double b) {
  double total = 0.0;
  for (int n = -f.n_cut; n <= f.n_cut; ++n) {
    cplx c = f.at(n);
    if (c == cplx(0.0)) continue;
    double wn = std::pow(1.0 + double(n) * double(n), s);
    total += wn * std::norm(c) * modulation_weight(f.width, b, f.mod_at_const(n));
  }
  return total;
}

std::vector<double> family_omegas(const WindowedFamily& f) {
  std::vector<double> w(std::size_t(2 * f.n_cut + 1));
  for (int n = -f.n_cut; n <= f.n_cut; ++n) {
    w[std::size_t(n + f.n_cut)] =
        double(n) * double(n) * double(n) + f.mod_at_const(n);
  }
  return w;
}

// Pair lists of u²: for each m, the (ω, amplitude) entries of
// S_m(t) = Σ_{n1+n2=m} c_{n1} c_{n2} e^{i(ω_{n1}+ω_{n2})t}, consolidated.
std::vector<std::vector<PairEntry>> pair_lists(const WindowedFamily& f) {
  const int N = f.n_cut;
  const std::vector<double> omega = family_omegas(f);
  std::vector<std::vector<PairEntry>> lists(std::size_t(4 * N + 1));
  for (int m = -2 * N; m <= 2 * N; ++m) {
    auto& list = lists[std::size_t(m + 2 * N)];
    int lo = std::max(-N, m - N);
    int hi = std::min(N, m + N);
    for (int n1 = lo; n1 <= hi; ++n1) {
      cplx amp = f.at(n1) * f.at(m - n1);
      if (amp == cplx(0.0)) continue;
      list.push_back({omega[std::size_t(n1 + N)] + omega[std::size_t(m - n1 + N)], amp});
    }
    consolidate(list);
  }
  return lists;
}

double ratio_or_zero(double num, double den) {
  if (!(num > 0.0) || !(den > 0.0)) return 0.0;
  return num / den;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t point, std::uint64_t draw) {
  return base ^ (point << 32) ^ (draw * 0x9e3779b97f4a7c15ull);
}

}  // namespace

// ---- windowed families -----------------------------------------------------

WindowedFamily::WindowedFamily(int cut, double w)
    : n_cut(cut),
      width(w),
      coef(std::size_t(2 * cut + 1), cplx(0.0)),
      mod(std::size_t(2 * cut + 1), 0.0) {
  if (cut < 0) throw std::invalid_argument("WindowedFamily: negative cutoff");
  if (!(w > 0.0)) throw std::invalid_argument("WindowedFamily: width must be positive");
}

cplx& WindowedFamily::at(int n) {
  if (n < -n_cut || n > n_cut) throw std::out_of_range("WindowedFamily::at");
  return coef[std::size_t(n + n_cut)];
}

cplx WindowedFamily::at(int n) const {
  if (n < -n_cut || n > n_cut) throw std::out_of_range("WindowedFamily::at");
  return coef[std::size_t(n + n_cut)];
}

double& WindowedFamily::mod_at(int n) {
  if (n < -n_cut || n > n_cut) throw std::out_of_range("WindowedFamily::mod_at");
  return mod[std::size_t(n + n_cut)];
}

double WindowedFamily::mod_at_const(int n) const {
  if (n < -n_cut || n > n_cut) throw std::out_of_range("WindowedFamily::mod_at_const");
  return mod[std::size_t(n + n_cut)];
}

WindowedFamily random_family(int n_cut, double sigma_max, double width,
                             std::uint64_t seed) {
  WindowedFamily f(n_cut, width);
  Rng rng(seed);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (int n = -n_cut; n <= n_cut; ++n) {
    f.at(n) = cplx(rng.normal(), rng.normal()) * inv_sqrt2;
  }
  if (sigma_max != 0.0) {
    for (int n = -n_cut; n <= n_cut; ++n) {
      f.mod_at(n) = sigma_max * (2.0 * rng.uniform() - 1.0);
    }
  }
  return f;
}

double l4_norm(const WindowedFamily& family) {
  const PowerTable& g4 = power_table(family.width, 4);
  auto lists = pair_lists(family);
  double fourth = 0.0;
  for (const auto& list : lists) fourth += gram_sum(list, g4);
  fourth /= std::pow(kTwoPi, 3.0);
  return fourth > 0.0 ? std::pow(fourth, 0.25) : 0.0;
}

double l8_norm(const WindowedFamily& family) {
  const PowerTable& g8 = power_table(family.width, 8);
  const int N = family.n_cut;
  auto lists = pair_lists(family);
  double eighth = 0.0;
  std::vector<PairEntry> quad;
  for (int m = -4 * N; m <= 4 * N; ++m) {
    quad.clear();
    int lo = std::max(-2 * N, m - 2 * N);
    int hi = std::min(2 * N, m + 2 * N);
    for (int m2 = lo; m2 <= hi; ++m2) {
      const auto& a = lists[std::size_t(m2 + 2 * N)];
      const auto& b = lists[std::size_t(m - m2 + 2 * N)];
      for (const auto& pa : a) {
        for (const auto& pb : b) {
          quad.push_back({pa.omega + pb.omega, pa.amp * pb.amp});
        }
      }
    }
    consolidate(quad);
    eighth += gram_sum(quad, g8);
  }
  eighth /= std::pow(kTwoPi, 7.0);
  return eighth > 0.0 ? std::pow(eighth, 0.125) : 0.0;
}

double l4_ratio(const WindowedFamily& family) {
  double den = std::sqrt(family_xsb_sq(family, 0.0, 1.0 / 3.0));
  return ratio_or_zero(l4_norm(family), den);
}

double l8_ratio(const WindowedFamily& family) {
  double den = std::sqrt(family_xsb_sq(family, 0.01, 0.51));
  return ratio_or_zero(l8_norm(family), den);
}

// ---- free-evolution probes -------------------------------------------------

double l6_free_ratio(const SpectralField& u0) {
  const int N = u0.n_max();
  std::vector<cplx> c(std::size_t(2 * N + 1));
  std::vector<int> active;
  for (int n = -N; n <= N; ++n) {
    cplx v = u0.coef(n);
    c[std::size_t(n + N)] = v;
    if (v != cplx(0.0)) active.push_back(n);
  }
  if (active.empty()) return 0.0;

  // u³ lives on the integer lattice (m, ω) = (Σnᵢ, Σnᵢ³); distinct points are
  // orthogonal over the space-time torus, so ∫∫ u⁶ = (2π)^{-4} Σ |B_{m,ω}|².
  struct Term {
    long long key;
    cplx amp;
  };
  std::vector<Term> acc;
  acc.reserve(active.size() * active.size() * active.size());
  const long long stride = 6LL * N + 1;
  for (int na : active) {
    long long wa = (long long)na * na * na;
    cplx ca = c[std::size_t(na + N)];
    for (int nb : active) {
      long long wab = wa + (long long)nb * nb * nb;
      cplx cab = ca * c[std::size_t(nb + N)];
      for (int nc : active) {
        long long w = wab + (long long)nc * nc * nc;
        long long m = na + nb + nc;
        acc.push_back({w * stride + m, cab * c[std::size_t(nc + N)]});
      }
    }
  }
  std::sort(acc.begin(), acc.end(),
            [](const Term& a, const Term& b) { return a.key < b.key; });
  double total = 0.0;
  std::size_t i = 0;
  while (i < acc.size()) {
    cplx sum = acc[i].amp;
    std::size_t j = i + 1;
    while (j < acc.size() && acc[j].key == acc[i].key) sum += acc[j++].amp;
    total += std::norm(sum);
    i = j;
  }
  total /= std::pow(kTwoPi, 4.0);
  double num = std::pow(total, 1.0 / 6.0);
  double den = std::sqrt(l2_norm_sq(u0) / kTwoPi);
  return ratio_or_zero(num, den);
}

double l6_shorttime_ratio(const SpectralField& u0, int block) {
  if (block < 0) throw std::invalid_argument("l6_shorttime_ratio: negative block");
  for (int n = 0; n <= u0.n_max(); ++n) {
    if (u0.coef(n) != cplx(0.0) && dyadic_block_of(n) != block) {
      throw std::invalid_argument(str_printf(
          "l6_shorttime_ratio: data outside block %d (mode n = %d)", block, n));
    }
  }
  double mass = l2_norm_sq(u0);
  if (mass == 0.0) return 0.0;

  const int top = (1 << (block + 1)) - 1;
  const double horizon = std::ldexp(1.0, -2 * block);
  const int grid = dealias_grid(top, 6);
  // Trapezoid steps keep the top-mode phase increment at 0.25, so the sextic
  // integrand advances at most 1.5 radians per step; its oscillatory parts
  // are themselves O(1/ω) small, leaving a sub-percent quadrature bias that
  // is uniform across blocks.
  double cycles = double(top) * double(top) * double(top) * horizon;
  int steps = std::max(64, int(std::ceil(4.0 * cycles)));
  const double dt = horizon / double(steps);

  SpectralField snapshot(top);
  double integral = 0.0;
  for (int j = 0; j <= steps; ++j) {
    double t = dt * double(j);
    for (int n = 0; n <= top; ++n) {
      double phase = double(n) * double(n) * double(n) * t;
      snapshot.set_coef(n, u0.coef(n) * std::polar(1.0, phase));
    }
    std::vector<double> u = inverse_transform(snapshot, grid);
    double sixth = 0.0;
    for (double x : u) {
      double x2 = x * x;
      sixth += x2 * x2 * x2;
    }
    sixth *= kTwoPi / double(grid);
    integral += (j == 0 || j == steps) ? 0.5 * sixth : sixth;
  }
  integral *= dt;

  double num = std::exp2(double(block) / 6.0) * std::pow(integral, 1.0 / 6.0);
  double den = std::sqrt(mass / kTwoPi);
  return ratio_or_zero(num, den);
}

// ---- lattice fields and the bilinear probe ---------------------------------

LatticeField::LatticeField(int lo, int hi, int j_exp) : n_lo(lo), n_hi(hi), j(j_exp) {
  if (hi < lo) throw std::invalid_argument("LatticeField: empty column range");
  if (j_exp < 0 || j_exp > 24) throw std::invalid_argument("LatticeField: bad exponent");
  vals.assign(std::size_t(cols()) * std::size_t(rows()), cplx(0.0));
}

cplx& LatticeField::at(int sigma, int n) {
  int r = 1 << j;
  if (n < n_lo || n > n_hi || sigma < -r || sigma > r) {
    throw std::out_of_range("LatticeField::at");
  }
  return vals[std::size_t(n - n_lo) * std::size_t(rows()) + std::size_t(sigma + r)];
}

cplx LatticeField::at(int sigma, int n) const {
  return const_cast<LatticeField*>(this)->at(sigma, n);
}

double LatticeField::l2_norm() const {
  double total = 0.0;
  for (const cplx& v : vals) total += std::norm(v);
  return std::sqrt(total);
}

LatticeField random_lattice(int n_lo, int n_hi, int j_exp, std::uint64_t seed) {
  LatticeField f(n_lo, n_hi, j_exp);
  Rng rng(seed);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  for (cplx& v : f.vals) v = cplx(rng.normal(), rng.normal()) * inv_sqrt2;
  return f;
}

double bilinear_ratio(const LatticeField& f1, const LatticeField& f2, int k) {
  if (k < 0 || k > 30) throw std::invalid_argument("bilinear_ratio: bad band exponent");
  double norm1 = f1.l2_norm();
  double norm2 = f2.l2_norm();
  int j_lo = std::min(f1.j, f2.j);
  int j_hi = std::max(f1.j, f2.j);
  double rhs = std::exp2(0.5 * double(j_lo)) *
               (std::exp2(0.25 * double(j_hi - k)) + 1.0) * norm1 * norm2;
  if (rhs == 0.0) return 0.0;

  const int r1 = 1 << f1.j;
  const int r2 = 1 << f2.j;
  const int rows2 = f2.rows();
  const long long band = 1LL << k;
  double num_sq = 0.0;
  std::vector<cplx> buf;
  for (int n = f1.n_lo + f2.n_lo; n <= f1.n_hi + f2.n_hi; ++n) {
    if (std::llabs((long long)n) < band) continue;
    int a = std::max(f1.n_lo, n - f2.n_hi);
    int b = std::min(f1.n_hi, n - f2.n_lo);
    if (a > b) continue;
    // Demodulated products land at σ = σ₁ + σ₂ − 3 n₁ n₂ n.
    long long lo = std::numeric_limits<long long>::max();
    long long hi = std::numeric_limits<long long>::min();
    for (int n1 = a; n1 <= b; ++n1) {
      long long off = -3LL * n1 * (n - n1) * n;
      lo = std::min(lo, off - r1 - r2);
      hi = std::max(hi, off + r1 + r2);
    }
    buf.assign(std::size_t(hi - lo + 1), cplx(0.0));
    for (int n1 = a; n1 <= b; ++n1) {
      int n2 = n - n1;
      long long base = -3LL * n1 * (long long)n2 * n - lo;
      const cplx* col2 = &f2.vals[std::size_t(n2 - f2.n_lo) * std::size_t(rows2)];
      for (int s1 = -r1; s1 <= r1; ++s1) {
        cplx v1 = f1.at(s1, n1);
        if (v1 == cplx(0.0)) continue;
        // Storage row s2 carries modulation s2 - r2, so the slot for
        // σ = off + s1 + (s2 - r2) is (base + s1 - r2) + s2.
        cplx* out = &buf[std::size_t(base + s1 - r2)];
        for (int s2 = 0; s2 < rows2; ++s2) out[s2] += v1 * col2[s2];
      }
    }
    for (const cplx& v : buf) num_sq += std::norm(v);
  }
  return ratio_or_zero(std::sqrt(num_sq), rhs);
}

// ---- report assembly -------------------------------------------------------

const char* probe_kind_name(ProbeKind kind) {
  switch (kind) {
    case ProbeKind::L4: return "l4";
    case ProbeKind::L6_free: return "l6-free";
    case ProbeKind::L6_shorttime: return "l6-shorttime";
    case ProbeKind::L8: return "l8";
    case ProbeKind::bilinear: return "bilinear";
  }
  return "unknown";
}

ProbeKind probe_kind_from_name(const std::string& name) {
  if (name == "l4") return ProbeKind::L4;
  if (name == "l6-free") return ProbeKind::L6_free;
  if (name == "l6-shorttime") return ProbeKind::L6_shorttime;
  if (name == "l8") return ProbeKind::L8;
  if (name == "bilinear") return ProbeKind::bilinear;
  throw std::invalid_argument(
      "unknown probe kind '" + name +
      "' (expected l4, l6-free, l6-shorttime, l8, or bilinear)");
}

std::string ProbeReport::rows_csv() const {
  std::string out;
  for (const ProbeRow& r : rows) {
    out += str_printf("%s,%d,%d,%d,%.12g,%.12g,%llu\n", probe_kind_name(kind),
                      r.n_or_k, r.j1, r.j2, r.ratio, slope,
                      (unsigned long long)r.seed);
  }
  return out;
}

std::string ProbeReport::to_csv() const {
  return "kind,N_or_k,j1,j2,ratio,slope,seed\n" + rows_csv();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    double lx = std::log2(x[i]);
    double ly = std::log2(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  return (double(n) * sxy - sx * sy) / denom;
}

ProbeReport strichartz_probe(ProbeKind kind, const ProbeConfig& config) {
  if (config.n_min < 1 || config.n_max < config.n_min) {
    throw std::invalid_argument("strichartz_probe: bad cutoff range");
  }
  if (config.seeds < 1) throw std::invalid_argument("strichartz_probe: seeds < 1");
  if (!(config.width > 0.0)) throw std::invalid_argument("strichartz_probe: bad width");
  if (config.block_min < 0 || config.block_max < config.block_min) {
    throw std::invalid_argument("strichartz_probe: bad block range");
  }

  ProbeReport rep;
  rep.kind = kind;

  auto run_ladder = [&](int cap, auto&& ratio_fn) {
    std::vector<int> ladder;
    for (int n = config.n_min; n <= cap; n *= 2) ladder.push_back(n);
    if (!ladder.empty() && ladder.back() < cap) ladder.push_back(cap);
    std::vector<double> xs, sups;
    for (int n : ladder) {
      double sup = 0.0;
      for (int r = 1; r <= config.seeds; ++r) {
        double ratio = ratio_fn(n, r, mix_seed(config.seed, std::uint64_t(n), std::uint64_t(r)));
        rep.rows.push_back({n, 0, 0, ratio, std::uint64_t(r)});
        sup = std::max(sup, ratio);
      }
      xs.push_back(double(n));
      sups.push_back(sup);
    }
    rep.slope = loglog_slope(xs, sups);
    rep.has_slope = xs.size() >= 2;
  };

  switch (kind) {
    case ProbeKind::L4:
      run_ladder(config.n_max, [&](int n, int r, std::uint64_t s) {
        double sigma_max = (r % 2 == 0) ? 32.0 : 0.0;
        return l4_ratio(random_family(n, sigma_max, config.width, s));
      });
      break;
    case ProbeKind::L8:
      run_ladder(std::min(config.n_max, 24), [&](int n, int r, std::uint64_t s) {
        double sigma_max = (r % 2 == 0) ? 32.0 : 0.0;
        return l8_ratio(random_family(n, sigma_max, config.width, s));
      });
      break;
    case ProbeKind::L6_free:
      run_ladder(std::min(config.n_max, 64), [&](int n, int /*r*/, std::uint64_t s) {
        return l6_free_ratio(random_field(n, 0.0, s));
      });
      break;
    case ProbeKind::L6_shorttime: {
      std::vector<double> xs, sups;
      for (int b = config.block_min; b <= config.block_max; ++b) {
        double sup = 0.0;
        for (int r = 1; r <= config.seeds; ++r) {
          std::uint64_t s = mix_seed(config.seed, std::uint64_t(b), std::uint64_t(r));
          SpectralField u0 = project_dyadic(random_field((1 << (b + 1)) - 1, 0.0, s), b);
          double ratio = l6_shorttime_ratio(u0, b);
          rep.rows.push_back({b, 0, 0, ratio, std::uint64_t(r)});
          sup = std::max(sup, ratio);
        }
        xs.push_back(std::exp2(double(b)));
        sups.push_back(sup);
      }
      rep.slope = loglog_slope(xs, sups);
      rep.has_slope = xs.size() >= 2;
      break;
    }
    case ProbeKind::bilinear: {
      const int ks[] = {4, 6};
      const int js[] = {0, 3, 6, 9};
      for (int k : ks) {
        for (int j1 : js) {
          for (int j2 : js) {
            if (j2 < j1) continue;
            for (int r = 1; r <= config.seeds; ++r) {
              std::uint64_t point = std::uint64_t(k) * 10000 + std::uint64_t(j1) * 100 +
                                    std::uint64_t(j2);
              LatticeField f1 = random_lattice(-8, 8, j1,
                                               mix_seed(config.seed, point, std::uint64_t(2 * r)));
              LatticeField f2 = random_lattice(1 << k, (1 << k) + 7, j2,
                                               mix_seed(config.seed, point, std::uint64_t(2 * r + 1)));
              double ratio = bilinear_ratio(f1, f2, k);
              rep.rows.push_back({k, j1, j2, ratio, std::uint64_t(r)});
            }
          }
        }
      }
      break;
    }
  }

  for (const ProbeRow& r : rep.rows) rep.max_ratio = std::max(rep.max_ratio, r.ratio);
  return rep;
}

}  // namespace kdvlab
