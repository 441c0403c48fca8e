#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "kdvlab/equations.hpp"
#include "kdvlab/integrator.hpp"
#include "kdvlab/spacetime.hpp"
#include "kdvlab/spectrum.hpp"
#include "kdvlab/util.hpp"

using namespace kdvlab;

namespace {

// Trajectory skeleton with uniformly sampled, caller-supplied coefficients.
// fill(n, t) returns the coefficient of mode n >= 0 at absolute time t.
template <typename Fill>
Trajectory sampled_trajectory(int n_max, double t0, double T, int samples,
                              Fill fill) {
  Trajectory traj;
  traj.eq = EquationSpec::mkdv(+1);
  traj.dt_internal = T / double(samples);
  for (int i = 0; i <= samples; ++i) {
    double t = t0 + T * double(i) / double(samples);
    SpectralField f(n_max);
    for (int n = 0; n <= n_max; ++n) f.set_coef(n, fill(n, t));
    traj.times.push_back(t);
    traj.slices.push_back(SystemState{{f}, t});
  }
  return traj;
}

Trajectory zero_trajectory(int n_max, double t0, double T, int samples) {
  return sampled_trajectory(n_max, t0, T, samples,
                            [](int, double) { return cplx(0.0, 0.0); });
}

// Real field cos(n0 x + n0³ t) * amp evolving freely: coef(n0) = amp·π·e^{i n0³ t}.
Trajectory free_mode_trajectory(int n_max, int n0, double amp, double t0,
                                double T, int samples) {
  return sampled_trajectory(n_max, t0, T, samples, [&](int n, double t) {
    if (n != n0) return cplx(0.0, 0.0);
    double w = double(n0) * double(n0) * double(n0);
    return std::polar(amp * M_PI, w * t);
  });
}

SpaceTimeSpectrum blank_spectrum(int n_max, int tau_bins, double dtau) {
  SpaceTimeSpectrum f;
  f.n_max = n_max;
  f.tau_bins = tau_bins;
  f.tau_resolution = dtau;
  f.window.dt = 2.0 * M_PI / (double(tau_bins) * dtau);
  f.window.padded = tau_bins;
  f.values.assign(std::size_t(2 * n_max + 1) * std::size_t(tau_bins),
                  cplx(0.0, 0.0));
  return f;
}

double max_cell_diff(const SpaceTimeSpectrum& a, const SpaceTimeSpectrum& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

}  // namespace

TEST_SUITE("spacetime") {

TEST_CASE("eta0 plateau, support, transition") {
  for (double x : {0.0, 0.3, -1.0, 1.25, -1.25, 1.2499}) CHECK(eta0(x) == 1.0);
  for (double x : {1.6, -1.6, 2.0, -5.0, 1e9}) CHECK(eta0(x) == 0.0);
  // strictly between on the transition, even, monotone on [5/4, 8/5]
  double prev = 1.0;
  for (int i = 1; i <= 34; ++i) {
    double x = 1.25 + 0.01 * double(i);
    double v = eta0(x);
    CHECK(v <= prev + 1e-15);
    CHECK(v == eta0(-x));
    if (x < 1.6) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    prev = v;
  }
  CHECK(eta0(1.425) == doctest::Approx(0.5).epsilon(1e-12));  // midpoint symmetry
}

TEST_CASE("shell partition of unity") {
  for (double x : {0.0, 0.7, -3.2, 10.0, 1234.5, -99999.0, 5e5}) {
    int m = 0;
    while (1.25 * std::exp2(double(m)) < std::fabs(x)) ++m;
    double sum = 0.0;
    for (int j = 0; j <= m; ++j) sum += eta_shell(j, x);
    CHECK(std::fabs(sum - 1.0) < 1e-14);
    CHECK(std::fabs(sum - eta_leq(m, x)) < 1e-15);
  }
  // at most two consecutive shells active
  for (double x : {1.3, 2.6, 11.0, 300.0}) {
    int active = 0;
    for (int j = 0; j <= 12; ++j)
      if (eta_shell(j, x) > 1e-15) ++active;
    CHECK(active <= 2);
  }
}

TEST_CASE("modulation decomposition reconstructs the spectrum") {
  Rng rng(123);
  SpaceTimeSpectrum f = blank_spectrum(6, 128, 0.35);
  for (cplx& v : f.values) v = cplx(rng.normal(), rng.normal());
  ModulationDecomposition dec = modulation_decompose(f);
  CHECK(dec.j_top >= 1);
  SpaceTimeSpectrum sum = blank_spectrum(6, 128, 0.35);
  for (const auto& [j, slice] : dec.blocks) {
    (void)j;
    for (std::size_t i = 0; i < sum.values.size(); ++i)
      sum.values[i] += slice.values[i];
  }
  CHECK(max_cell_diff(sum, f) < 1e-10);
}

TEST_CASE("xsb norm: zero and single-cell closed form") {
  SpaceTimeSpectrum z = blank_spectrum(4, 64, 0.5);
  CHECK(xsb_norm(z, 0.7, 0.4) == 0.0);

  SpaceTimeSpectrum f = blank_spectrum(4, 64, 0.5);
  cplx v(0.7, -0.2);
  f.at(3, 41) = v;
  double sigma = f.modulation(41);
  CHECK(sigma == doctest::Approx(4.5));
  double cell_mass = std::abs(v) * std::sqrt(f.tau_resolution);
  double s = 0.6, b = 0.31;
  double expected =
      std::pow(bracket(3.0), s) * std::pow(bracket(sigma), b) * cell_mass;
  CHECK(xsb_norm(f, s, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("xsb norm of a windowed free solution matches the window transform") {
  const int n0 = 5;
  const double amp = 0.8;
  const double t0 = 0.0, T = 2.0;
  const int samples = 512;  // dt = 1/256
  Trajectory traj = free_mode_trajectory(8, n0, amp, t0, T, samples);

  WindowSpec win{1.0, 0.25};
  SpaceTimeSpectrum spec = spacetime_transform(traj, win);
  const double s = 0.75, b = 0.4;
  double got = xsb_norm(spec, s, b);

  // Oracle: evaluate the window's time transform directly on the same τ-grid
  // with a 16x finer trapezoid quadrature; both ±n0 columns carry the same
  // modulus, so the norm is √2·<n0>^s·πA·||<σ>^b ŵ||_{ℓ²(Δτ)}.
  const double dt_fine = traj.sample_dt() / 16.0;
  const double lo = win.center - 1.6 * win.width;
  const double hi = win.center + 1.6 * win.width;
  const int fine = int(std::ceil((hi - lo) / dt_fine));
  double acc = 0.0;
  for (int m = 0; m < spec.tau_bins; ++m) {
    const double sigma = spec.modulation(m);
    cplx what(0.0, 0.0);
    for (int i = 0; i <= fine; ++i) {
      double t = lo + (hi - lo) * double(i) / double(fine);
      double w = eta0((t - win.center) / win.width);
      if (w == 0.0) continue;
      double trap = (i == 0 || i == fine) ? 0.5 : 1.0;
      what += trap * w * std::polar(1.0, -sigma * t);
    }
    what *= (hi - lo) / double(fine);
    acc += std::pow(bracket(sigma), 2.0 * b) * std::norm(what);
  }
  double oracle = std::sqrt(2.0 * acc * spec.tau_resolution) *
                  std::pow(bracket(double(n0)), s) * (M_PI * amp);
  CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("xk norm: zero, support precondition, single-cell shell factor") {
  SpaceTimeSpectrum z = blank_spectrum(7, 64, 0.75);
  CHECK(xk_norm(z, 2) == 0.0);

  // support violation: mass at n = 2 is outside block 2
  SpaceTimeSpectrum bad = blank_spectrum(7, 64, 0.75);
  bad.at(2, 30) = cplx(1.0, 0.0);
  bool threw = false;
  try {
    xk_norm(bad, 2);
  } catch (const std::invalid_argument& e) {
    threw = true;
    CHECK(std::string(e.what()).find("support") != std::string::npos);
  }
  CHECK(threw);

  // single cell in block 2 at modulation 12 (dyadic shell j = 3)
  SpaceTimeSpectrum f = blank_spectrum(7, 64, 0.75);
  cplx v(0.3, 0.45);
  f.at(5, 48) = v;
  double sigma = f.modulation(48);
  CHECK(sigma == doctest::Approx(12.0));
  double mass = std::abs(v) * std::sqrt(f.tau_resolution);
  double overlap =
      eta_shell(3, sigma) + std::sqrt(2.0) * eta_shell(4, sigma);
  CHECK(overlap >= 1.0 - 1e-12);
  CHECK(overlap <= std::sqrt(2.0) + 1e-12);
  double expected = std::exp2(1.5) * overlap * mass;
  CHECK(xk_norm(f, 2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("xk norm dominates the l2-over-shells combination") {
  Rng rng(77);
  SpaceTimeSpectrum f = blank_spectrum(7, 128, 0.6);
  for (int n = 4; n <= 7; ++n)
    for (int m = 0; m < f.tau_bins; ++m)
      f.at(n, m) = cplx(rng.normal(), rng.normal());
  double l1 = xk_norm(f, 2);
  ModulationDecomposition dec = modulation_decompose(f);
  double sq = 0.0;
  for (const auto& [j, slice] : dec.blocks)
    sq += std::exp2(double(j)) * slice.l2_mass_sq();
  CHECK(l1 + 1e-12 >= std::sqrt(sq));
}

TEST_CASE("xk norm is homogeneous and satisfies the triangle inequality") {
  Rng rng(9091);
  for (int rep = 0; rep < 5; ++rep) {
    SpaceTimeSpectrum f = blank_spectrum(7, 64, 0.8);
    SpaceTimeSpectrum g = blank_spectrum(7, 64, 0.8);
    for (int n = 4; n <= 7; ++n)
      for (int m = 0; m < f.tau_bins; ++m) {
        f.at(n, m) = cplx(rng.normal(), rng.normal());
        g.at(n, m) = cplx(rng.normal(), rng.normal());
      }
    double nf = xk_norm(f, 2);
    double ng = xk_norm(g, 2);

    SpaceTimeSpectrum scaled = f;
    for (cplx& v : scaled.values) v *= 2.5;
    CHECK(xk_norm(scaled, 2) == doctest::Approx(2.5 * nf).epsilon(1e-10));

    SpaceTimeSpectrum sum = f;
    for (std::size_t i = 0; i < sum.values.size(); ++i)
      sum.values[i] += g.values[i];
    CHECK(xk_norm(sum, 2) <= nf + ng + 1e-10 * (nf + ng));
  }
}

TEST_CASE("short-time norm: zero data and resolution precondition") {
  Trajectory z = zero_trajectory(16, 0.0, 0.5, 200);
  CHECK(short_time_norm(z, 2, 1.0, ShortTimeKind::F) == 0.0);
  CHECK(short_time_norm(z, 2, 1.0, ShortTimeKind::N) == 0.0);

  // block 4 at alpha 1 needs dt <= 2^{-4}/32 = 1/512; dt = 1/100 is too coarse
  Trajectory coarse = zero_trajectory(31, 0.0, 1.0, 100);
  bool threw = false;
  try {
    short_time_norm(coarse, 4, 1.0, ShortTimeKind::F);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("resolution") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("short-time F norm of a free mode is translation invariant") {
  const int n0 = 9;  // block 3
  const double T = 0.5;
  const int samples = 256;  // dt = 1/512 <= 2^{-3}/32 = 1/256
  Trajectory a = free_mode_trajectory(15, n0, 1.0, 0.0, T, samples);
  Trajectory b = free_mode_trajectory(15, n0, 1.0, 0.1237, T, samples);
  double fa = short_time_norm(a, 3, 1.0, ShortTimeKind::F);
  double fb = short_time_norm(b, 3, 1.0, ShortTimeKind::F);
  CHECK(fa > 0.0);
  CHECK(fa == doctest::Approx(fb).epsilon(1e-8));
}

TEST_CASE("L-infinity L2 embeds into the F norm (constant recorded)") {
  const int block = 3;
  const double alpha = 1.0;
  const double T = 0.4;
  const int samples = 128;  // dt = 1/320 <= 2^{-3}/32
  double worst = 0.0;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(seed * 7919u);
    // random block-3 trajectory: free phases with a band-limited beat note
    std::vector<cplx> base(16), beat(16);
    std::vector<double> mu(16);
    for (int i = 0; i < 16; ++i) {
      base[std::size_t(i)] = cplx(rng.normal(), rng.normal());
      beat[std::size_t(i)] =
          0.5 * cplx(rng.normal(), rng.normal());
      mu[std::size_t(i)] = 32.0 * (2.0 * rng.uniform() - 1.0);
    }
    Trajectory traj =
        sampled_trajectory(15, 0.0, T, samples, [&](int n, double t) {
          if (n < 8 || n > 15) return cplx(0.0, 0.0);
          double w = double(n) * double(n) * double(n);
          cplx env = base[std::size_t(n - 8)] +
                     beat[std::size_t(n - 8)] *
                         std::polar(1.0, mu[std::size_t(n - 8)] * t);
          return std::polar(1.0, w * t) * env;
        });
    double sup = 0.0;
    for (const SystemState& s : traj.slices)
      sup = std::max(sup, std::sqrt(l2_norm_sq(s.comps[0])));
    double f = short_time_norm(traj, block, alpha, ShortTimeKind::F);
    REQUIRE(f > 0.0);
    double ratio = sup / f;
    worst = std::max(worst, ratio);
    CHECK(ratio <= k_embedding_constant);
  }
  MESSAGE("embedding ratio sup_t L2 / F over 100 seeds: max = ", worst);
}

TEST_CASE("energy norm: zero, constant, and free trajectories") {
  Trajectory z = zero_trajectory(8, 0.0, 0.2, 10);
  CHECK(energy_norm(z, 0.5) == 0.0);

  SpectralField u = random_field(10, 1.2, 404);
  Trajectory c = sampled_trajectory(10, 0.0, 0.2, 10,
                                    [&](int n, double) { return u.coef(n); });
  double s = 0.5;
  double direct = 0.0;
  for (int k = 0; k < dyadic_block_count(10); ++k)
    direct += std::exp2(2.0 * s * double(k)) * l2_norm_sq(project_dyadic(u, k));
  CHECK(energy_norm(c, s) == doctest::Approx(std::sqrt(direct)).epsilon(1e-14));

  // free Airy flow: phases rotate, moduli fixed, norm equals the t = 0 value
  Trajectory f = sampled_trajectory(10, 0.0, 0.3, 24, [&](int n, double t) {
    double w = double(n) * double(n) * double(n);
    return u.coef(n) * std::polar(1.0, w * t);
  });
  CHECK(energy_norm(f, s) ==
        doctest::Approx(std::sqrt(direct)).epsilon(1e-13));
}

TEST_CASE("three-estimate audit: zero data and a small solved trajectory") {
  Trajectory z = zero_trajectory(8, 0.0, 0.1, 40);
  ThreeEstimateAudit za = three_estimate_audit(z, 0.5, 1.0);
  CHECK(za.ratio_linear == 0.0);
  CHECK(za.ratio_nonlinear == 0.0);
  CHECK(za.ratio_energy == 0.0);

  SystemState init;
  init.comps = {normalize_sobolev(random_field(8, 1.5, 2024), 0.5, 0.5)};
  EvolveOptions opt;
  opt.dt = 1e-3;
  opt.samples = 32;  // sample dt = 1/320 <= 2^{-3}/32 for the top block
  opt.warn_stiff = false;
  Trajectory traj =
      evolve(init, EquationSpec::renormalized_mkdv(+1), 0.1, opt);
  ThreeEstimateAudit a = three_estimate_audit(traj, 0.5, 1.0);
  CHECK(a.f > 0.0);
  CHECK(a.n3 > 0.0);
  CHECK(a.e > 0.0);
  CHECK(a.h0 == doctest::Approx(0.5).epsilon(0.2));  // dyadic vs <n> weights
  for (double r : {a.ratio_linear, a.ratio_nonlinear, a.ratio_energy}) {
    CHECK(std::isfinite(r));
    CHECK(r > 0.0);
    CHECK(r < 1e6);
  }
}

}  // TEST_SUITE
