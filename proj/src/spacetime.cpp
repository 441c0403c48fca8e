#include "kdvlab/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kdvlab/equations.hpp"
#include "kdvlab/fft.hpp"
#include "kdvlab/util.hpp"

namespace kdvlab {
namespace {

constexpr double kPlateau = 1.25;  // 5/4
constexpr double kSupport = 1.6;   // 8/5

double transition(double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; }

// Highest shell index needed so that eta_leq(j_top, ·) == 1 over |x| <= m.
int shell_top(double max_modulation) {
  int j = 0;
  while (kPlateau * std::exp2(double(j)) < max_modulation) ++j;
  return j;
}

}  // namespace

double eta0(double x) {
  double a = std::fabs(x);
  if (a <= kPlateau) return 1.0;
  if (a >= kSupport) return 0.0;
  double y = (kSupport - a) / (kSupport - kPlateau);
  double e1 = transition(y);
  double e2 = transition(1.0 - y);
  return e1 / (e1 + e2);
}

double eta_shell(int j, double x) {
  if (j < 0) throw std::invalid_argument("eta_shell: negative shell index");
  if (j == 0) return eta0(x);
  return eta0(x / std::exp2(double(j))) - eta0(x / std::exp2(double(j - 1)));
}

double eta_leq(int m, double x) {
  if (m < 0) throw std::invalid_argument("eta_leq: negative shell index");
  return eta0(x / std::exp2(double(m)));
}

double SpaceTimeSpectrum::l2_mass_sq() const {
  double total = 0.0;
  for (const cplx& v : values) total += std::norm(v);
  return total * tau_resolution;
}

SpaceTimeSpectrum spacetime_transform(const Trajectory& traj,
                                      const WindowSpec& win, int block) {
  if (traj.n_samples() < 2)
    throw std::invalid_argument("spacetime_transform: need >= 2 samples");
  if (!(win.width > 0.0))
    throw std::invalid_argument("spacetime_transform: window width must be positive");
  const double dt = traj.sample_dt();
  const int n_max = traj.slices.front().comps[0].n_max();

  // Sample range with w > 0 (the window vanishes outside kSupport * width).
  const double lo = win.center - kSupport * win.width;
  const double hi = win.center + kSupport * win.width;
  int i0 = 0;
  int i1 = traj.n_samples();
  while (i0 < i1 && traj.times[std::size_t(i0)] <= lo) ++i0;
  while (i1 > i0 && traj.times[std::size_t(i1 - 1)] >= hi) --i1;
  if (i1 <= i0) {  // window misses the sampled interval: all-zero spectrum
    i0 = 0;
    i1 = 1;
  }
  const int kw = i1 - i0;
  const int L = fft::fast_size(8 * kw);
  const double t_start = traj.times[std::size_t(i0)];

  SpaceTimeSpectrum out;
  out.n_max = n_max;
  out.tau_bins = L;
  out.tau_resolution = 2.0 * M_PI / (double(L) * dt);
  out.window = TimeWindow{win.center, win.width, dt, t_start, kw, L};
  out.values.assign(std::size_t(2 * n_max + 1) * std::size_t(L),
                    cplx(0.0, 0.0));

  std::vector<double> w(static_cast<std::size_t>(kw));
  for (int i = 0; i < kw; ++i)
    w[std::size_t(i)] =
        eta0((traj.times[std::size_t(i0 + i)] - win.center) / win.width);

  std::vector<cplx> buf(static_cast<std::size_t>(L));
  std::vector<cplx> freq(static_cast<std::size_t>(L));
  for (int n = -n_max; n <= n_max; ++n) {
    if (block >= 0 && dyadic_block_of(n) != block) continue;
    std::fill(buf.begin(), buf.end(), cplx(0.0, 0.0));
    bool any = false;
    const double dn = double(n);
    const double omega = dn * dn * dn;
    for (int i = 0; i < kw; ++i) {
      if (w[std::size_t(i)] == 0.0) continue;
      cplx c = traj.slices[std::size_t(i0 + i)].comps[0].coef(n);
      if (c == cplx(0.0, 0.0)) continue;
      const double t = traj.times[std::size_t(i0 + i)];
      cplx demod = c * std::polar(w[std::size_t(i)], -omega * t);
      if (i & 1) demod = -demod;  // fftshift: centers the τ-grid at ω(n)
      buf[std::size_t(i)] = demod;
      any = true;
    }
    if (!any) continue;
    fft::c2c_forward(buf.data(), freq.data(), L);
    for (int m = 0; m < L; ++m) {
      const double sigma = out.modulation(m);
      out.at(n, m) =
          dt * std::polar(1.0, -sigma * t_start) * freq[std::size_t(m)];
    }
  }
  return out;
}

ModulationDecomposition modulation_decompose(const SpaceTimeSpectrum& f) {
  const double max_mod = double(f.tau_bins) / 2.0 * f.tau_resolution;
  ModulationDecomposition out;
  out.j_top = shell_top(max_mod);
  for (int j = 0; j <= out.j_top; ++j) {
    SpaceTimeSpectrum slice = f;
    for (int m = 0; m < f.tau_bins; ++m) {
      const double wj = eta_shell(j, f.modulation(m));
      for (int n = -f.n_max; n <= f.n_max; ++n) slice.at(n, m) *= wj;
    }
    out.blocks.emplace(j, std::move(slice));
  }
  return out;
}

double xsb_norm(const SpaceTimeSpectrum& f, double s, double b) {
  double total = 0.0;
  for (int n = -f.n_max; n <= f.n_max; ++n) {
    const double wn = std::pow(bracket(double(n)), 2.0 * s);
    double col = 0.0;
    for (int m = 0; m < f.tau_bins; ++m) {
      const double v = std::norm(f.at(n, m));
      if (v == 0.0) continue;
      col += std::pow(bracket(f.modulation(m)), 2.0 * b) * v;
    }
    total += wn * col;
  }
  return std::sqrt(total * f.tau_resolution);
}

double xk_norm(const SpaceTimeSpectrum& f, int block) {
  if (block < 0) throw std::invalid_argument("xk_norm: negative block");
  for (int n = -f.n_max; n <= f.n_max; ++n) {
    if (dyadic_block_of(n) == block) continue;
    for (int m = 0; m < f.tau_bins; ++m) {
      if (std::norm(f.at(n, m)) > 0.0)
        throw std::invalid_argument(str_printf(
            "xk_norm: spatial support outside block %d (mode n = %d)", block,
            n));
    }
  }

  // Per-bin column mass, then shell masses (η_j depends only on the bin).
  const double max_mod = double(f.tau_bins) / 2.0 * f.tau_resolution;
  const int j_top = shell_top(max_mod);
  std::vector<double> mass(std::size_t(j_top) + 1, 0.0);
  for (int m = 0; m < f.tau_bins; ++m) {
    double col = 0.0;
    for (int n = -f.n_max; n <= f.n_max; ++n) col += std::norm(f.at(n, m));
    if (col == 0.0) continue;
    const double x = f.modulation(m);
    for (int j = 0; j <= j_top; ++j) {
      const double wj = eta_shell(j, x);
      if (wj > 0.0) mass[std::size_t(j)] += wj * wj * col;
    }
  }
  double total = 0.0;
  for (int j = 0; j <= j_top; ++j)
    total += std::exp2(double(j) / 2.0) *
             std::sqrt(mass[std::size_t(j)] * f.tau_resolution);
  return total;
}

double short_time_norm(const Trajectory& traj, int block, double alpha,
                       ShortTimeKind kind) {
  if (block < 0)
    throw std::invalid_argument("short_time_norm: negative block");
  const double width = std::exp2(-alpha * double(block));
  if (traj.n_samples() < 2)
    throw std::runtime_error(
        "resolution error: short_time_norm needs at least 2 samples");
  const double dt = traj.sample_dt();
  if (!(dt > 0.0) || dt > width / 32.0 * (1.0 + 1e-9))
    throw std::runtime_error(str_printf(
        "resolution error: sample spacing %.6e exceeds %.6e "
        "(window width 2^{-alpha k} / 32 at block %d, alpha %g)",
        dt, width / 32.0, block, alpha));

  const double lambda = 1.0 / width;  // 2^{α k}
  const double t0 = traj.t0();
  const double t1 = traj.t1();
  const double step = width / 8.0;
  const int j_max = int(std::ceil((t1 - t0) / step - 1e-12));

  double best = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    const double tc = std::min(t0 + step * double(j), t1);
    SpaceTimeSpectrum spec = spacetime_transform(traj, {tc, width}, block);
    if (kind == ShortTimeKind::N) {
      for (int m = 0; m < spec.tau_bins; ++m) {
        const cplx wmul = 1.0 / cplx(spec.modulation(m), lambda);
        for (int n = -spec.n_max; n <= spec.n_max; ++n) spec.at(n, m) *= wmul;
      }
    }
    best = std::max(best, xk_norm(spec, block));
  }
  return best;
}

namespace {

// Per-block squared masses Σ_{n ∈ block} |û(n)|² of one field.
std::vector<double> block_masses(const SpectralField& u) {
  std::vector<double> mass(std::size_t(dyadic_block_count(u.n_max())), 0.0);
  for (int n = 0; n <= u.n_max(); ++n) {
    const double m = std::norm(u.coef(n)) * (n > 0 ? 2.0 : 1.0);
    mass[std::size_t(dyadic_block_of(n))] += m;
  }
  return mass;
}

// Σ_k 2^{2ks} mass_k of one field (the dyadic H^s-equivalent norm squared).
double dyadic_sobolev_sq(const SpectralField& u, double s) {
  const std::vector<double> mass = block_masses(u);
  double total = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k)
    total += std::exp2(2.0 * s * double(k)) * mass[k];
  return total;
}

// Which blocks hold mass anywhere in the sampled series.
std::vector<bool> occupied_blocks(const Trajectory& traj) {
  const int blocks =
      dyadic_block_count(traj.slices.front().comps[0].n_max());
  std::vector<bool> occupied(std::size_t(blocks), false);
  for (const SystemState& s : traj.slices) {
    const std::vector<double> mass = block_masses(s.comps[0]);
    for (std::size_t k = 0; k < mass.size(); ++k)
      if (mass[k] > 0.0) occupied[k] = true;
  }
  return occupied;
}

double composite_norm(const Trajectory& traj, double s, double alpha,
                      ShortTimeKind kind) {
  if (traj.slices.empty()) return 0.0;
  const std::vector<bool> occupied = occupied_blocks(traj);
  double total = 0.0;
  for (std::size_t k = 0; k < occupied.size(); ++k) {
    if (!occupied[k]) continue;
    const double fk = short_time_norm(traj, int(k), alpha, kind);
    total += std::exp2(2.0 * s * double(k)) * fk * fk;
  }
  return std::sqrt(total);
}

}  // namespace

double energy_norm(const Trajectory& traj, double s) {
  if (traj.slices.empty()) return 0.0;
  const int blocks =
      dyadic_block_count(traj.slices.front().comps[0].n_max());
  std::vector<double> best(std::size_t(blocks), 0.0);
  for (const SystemState& state : traj.slices) {
    const std::vector<double> mass = block_masses(state.comps[0]);
    for (std::size_t k = 0; k < mass.size(); ++k)
      best[k] = std::max(best[k], mass[k]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < best.size(); ++k)
    total += std::exp2(2.0 * s * double(k)) * best[k];
  return std::sqrt(total);
}

double composite_f_norm(const Trajectory& traj, double s, double alpha) {
  return composite_norm(traj, s, alpha, ShortTimeKind::F);
}

double composite_n_norm(const Trajectory& traj, double s, double alpha) {
  if (traj.slices.empty()) return 0.0;
  Trajectory tendency = traj;
  for (std::size_t i = 0; i < traj.slices.size(); ++i)
    tendency.slices[i].comps = evaluate_rhs(traj.eq, traj.slices[i]);
  return composite_norm(tendency, s, alpha, ShortTimeKind::N);
}

ThreeEstimateAudit three_estimate_audit(const Trajectory& traj, double s,
                                        double alpha) {
  ThreeEstimateAudit a;
  if (traj.slices.empty()) return a;
  a.f = composite_f_norm(traj, s, alpha);
  a.n3 = composite_n_norm(traj, s, alpha);
  a.e = energy_norm(traj, s);
  a.h0 = std::sqrt(dyadic_sobolev_sq(traj.slices.front().comps[0], s));
  if (a.f > 0.0 && a.e + a.n3 > 0.0) a.ratio_linear = a.f / (a.e + a.n3);
  if (a.n3 > 0.0 && a.f > 0.0) a.ratio_nonlinear = a.n3 / (a.f * a.f * a.f);
  const double rhs =
      a.h0 * a.h0 + std::pow(a.f, 4.0) + std::pow(a.f, 6.0);
  if (a.e > 0.0 && rhs > 0.0) a.ratio_energy = a.e * a.e / rhs;
  return a;
}

}  // namespace kdvlab
