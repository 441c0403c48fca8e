#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kdvlab/spacetime.hpp"
#include "kdvlab/spectrum.hpp"
#include "kdvlab/strichartz.hpp"

using namespace kdvlab;

namespace {

constexpr double kPi = std::numbers::pi;

// ∫∫ |u|^p dx dt of a windowed family by dense quadrature: the space grid is
// exact for the trigonometric polynomial |u|^p, and the time trapezoid over
// the window support is spectrally accurate for the smooth compactly
// supported integrand.
double brute_lp_power(const WindowedFamily& f, int p, int t_steps) {
  const int m_grid = 8 * (2 * f.n_cut + 1);
  const double half = 1.6 * f.width;
  const double dt = 2.0 * half / double(t_steps);
  double total = 0.0;
  for (int j = 0; j <= t_steps; ++j) {
    double t = -half + dt * double(j);
    double w = eta0(t / f.width);
    double slab = 0.0;
    for (int mx = 0; mx < m_grid; ++mx) {
      double x = 2.0 * kPi * double(mx) / double(m_grid);
      cplx u = 0.0;
      for (int n = -f.n_cut; n <= f.n_cut; ++n) {
        double omega = double(n) * double(n) * double(n) + f.mod_at_const(n);
        u += f.at(n) * std::polar(1.0, double(n) * x + omega * t);
      }
      u *= w / (2.0 * kPi);
      slab += std::pow(std::norm(u), double(p) / 2.0);
    }
    slab *= 2.0 * kPi / double(m_grid);
    total += (j == 0 || j == t_steps) ? 0.5 * slab : slab;
  }
  return total * dt;
}

WindowedFamily sample_family(int cut) {
  WindowedFamily f(cut, 1.0);
  int idx = 0;
  for (int n = -cut; n <= cut; ++n) {
    double a = 0.4 + 0.13 * double(idx);
    double b = 0.21 * double(idx) - 0.5;
    f.at(n) = cplx(a, b);
    f.mod_at(n) = 1.7 * double(idx % 5) - 3.1;
    ++idx;
  }
  return f;
}

}  // namespace

TEST_SUITE("strichartz") {

TEST_CASE("probe kind names round-trip") {
  const ProbeKind kinds[] = {ProbeKind::L4, ProbeKind::L6_free,
                             ProbeKind::L6_shorttime, ProbeKind::L8,
                             ProbeKind::bilinear};
  for (ProbeKind k : kinds) {
    CHECK(probe_kind_from_name(probe_kind_name(k)) == k);
  }
  bool threw = false;
  try {
    probe_kind_from_name("l5");
  } catch (const std::invalid_argument& e) {
    threw = std::string(e.what()).find("probe kind") != std::string::npos;
  }
  CHECK(threw);
}

TEST_CASE("zero data gives zero ratios") {
  WindowedFamily f(6, 1.0);
  CHECK(l4_ratio(f) == 0.0);
  CHECK(l8_ratio(f) == 0.0);
  CHECK(l4_norm(f) == 0.0);

  SpectralField u0(8);
  CHECK(l6_free_ratio(u0) == 0.0);

  SpectralField b2(7);
  CHECK(l6_shorttime_ratio(b2, 2) == 0.0);

  LatticeField f1(-2, 2, 1);
  LatticeField f2(8, 11, 1);
  CHECK(bilinear_ratio(f1, f2, 3) == 0.0);
}

TEST_CASE("single free mode: L4 ratio is cutoff-independent") {
  double reference = 0.0;
  for (int n : {4, 16, 64, 256}) {
    WindowedFamily f(n, 1.0);
    f.at(n) = cplx(1.3, 0.0);
    double r = l4_ratio(f);
    CHECK(r > 0.0);
    if (reference == 0.0) {
      reference = r;
    } else {
      CHECK(std::abs(r - reference) <= 1e-12 * reference);
    }
  }
  // Scale invariance of the ratio.
  WindowedFamily f(4, 1.0);
  f.at(4) = cplx(1.3, 0.0);
  WindowedFamily g = f;
  g.at(4) *= cplx(2.0, 1.0);
  CHECK(std::abs(l4_ratio(g) - reference) <= 1e-12 * reference);
}

TEST_CASE("L4 and L8 norms match brute-force integrals") {
  WindowedFamily f = sample_family(3);
  double brute4 = std::pow(brute_lp_power(f, 4, 4096), 0.25);
  double fast4 = l4_norm(f);
  CHECK(std::abs(fast4 - brute4) <= 1e-6 * brute4);

  WindowedFamily g = sample_family(2);
  double brute8 = std::pow(brute_lp_power(g, 8, 4096), 0.125);
  double fast8 = l8_norm(g);
  CHECK(std::abs(fast8 - brute8) <= 1e-6 * brute8);
}

TEST_CASE("L6 free ratio: single-mode value and exact lattice join") {
  // Single cosine: u = (c/π) cos(nx + n³t), so the space-time integral of u⁶
  // is (2π)²·(5/16)·(c/π)⁶ and the ratio has the closed form below.
  SpectralField u0(9);
  u0.set_coef(7, cplx(2.4, 0.0));
  double expected =
      std::pow((2.0 * kPi) * (2.0 * kPi) * (5.0 / 16.0), 1.0 / 6.0) *
      (2.4 / kPi) / ((2.4 / kPi) * std::sqrt(kPi));
  // ratio = ((2π)²·5/16)^{1/6}/√π, amplitude-independent.
  CHECK(std::abs(l6_free_ratio(u0) - expected) <= 1e-12 * expected);

  // Mixed field: compare against the exact space-time grid quadrature (both
  // directions are trigonometric polynomials, so the grid sums are exact).
  SpectralField v(3);
  v.set_coef(0, cplx(0.31, 0.0));
  v.set_coef(1, cplx(-0.22, 0.4));
  v.set_coef(2, cplx(0.12, 0.05));
  v.set_coef(3, cplx(-0.07, -0.33));
  const int tg = 256, xg = 64;
  double brute = 0.0;
  for (int jt = 0; jt < tg; ++jt) {
    double t = 2.0 * kPi * double(jt) / double(tg);
    for (int jx = 0; jx < xg; ++jx) {
      double x = 2.0 * kPi * double(jx) / double(xg);
      cplx acc = 0.0;
      for (int n = -3; n <= 3; ++n) {
        acc += v.coef(n) *
               std::polar(1.0, double(n) * x + double(n) * double(n) * double(n) * t);
      }
      double u = acc.real() / (2.0 * kPi);
      brute += std::pow(u, 6.0);
    }
  }
  brute *= (2.0 * kPi / double(tg)) * (2.0 * kPi / double(xg));
  double num = std::pow(brute, 1.0 / 6.0);
  double den = std::sqrt(l2_norm_sq(v) / (2.0 * kPi));
  double expected2 = num / den;
  CHECK(std::abs(l6_free_ratio(v) - expected2) <= 1e-10 * expected2);
}

TEST_CASE("short-time L6: single-mode oracle and support check") {
  // One mode in block b: |u| is constant in time, the trapezoid is exact, and
  // ratio = 2^{-b/6} (5π/8)^{1/6} / √π independent of amplitude and mode.
  for (int b : {2, 3}) {
    SpectralField u0((1 << (b + 1)) - 1);
    int n = (1 << b) + 1;
    u0.set_coef(n, cplx(2.2, 0.0));
    double expected = std::exp2(-double(b) / 6.0) *
                      std::pow(5.0 * kPi / 8.0, 1.0 / 6.0) / std::sqrt(kPi);
    double r = l6_shorttime_ratio(u0, b);
    CHECK(std::abs(r - expected) <= 1e-10 * expected);
  }

  SpectralField bad(7);
  bad.set_coef(2, cplx(1.0, 0.0));
  bool threw = false;
  try {
    l6_shorttime_ratio(bad, 2);
  } catch (const std::invalid_argument& e) {
    threw = std::string(e.what()).find("block") != std::string::npos;
  }
  CHECK(threw);
}

TEST_CASE("bilinear: single-cell convolution has a closed form") {
  LatticeField f1(-8, 8, 2);
  f1.at(-1, 3) = cplx(1.0, 2.0);
  LatticeField f2(16, 23, 0);
  f2.at(1, 17) = cplx(2.0, -1.0);
  // Product lands at n = 20, σ = −1 + 1 − 3·3·17·20; its mass is |v₁v₂| = 5.
  double expected = 5.0 / (std::exp2(0.0 / 2.0) * (std::exp2((2.0 - 4.0) / 4.0) + 1.0) *
                           f1.l2_norm() * f2.l2_norm());
  CHECK(std::abs(bilinear_ratio(f1, f2, 4) - expected) <= 1e-12 * expected);
  // With the band raised past |n| = 20, the output is filtered out entirely.
  CHECK(bilinear_ratio(f1, f2, 5) == 0.0);
}

TEST_CASE("bilinear matches a direct dense convolution") {
  LatticeField f1 = random_lattice(-2, 2, 2, 99);
  LatticeField f2 = random_lattice(8, 11, 1, 100);
  const int k = 3;
  std::map<std::pair<int, long long>, cplx> dense;
  for (int n1 = f1.n_lo; n1 <= f1.n_hi; ++n1) {
    for (int s1 = -4; s1 <= 4; ++s1) {
      for (int n2 = f2.n_lo; n2 <= f2.n_hi; ++n2) {
        for (int s2 = -2; s2 <= 2; ++s2) {
          int n = n1 + n2;
          if (std::abs(n) < (1 << k)) continue;
          long long sigma = (long long)s1 + s2 - 3LL * n1 * n2 * n;
          dense[{n, sigma}] += f1.at(s1, n1) * f2.at(s2, n2);
        }
      }
    }
  }
  double num_sq = 0.0;
  for (const auto& kv : dense) num_sq += std::norm(kv.second);
  double expected = std::sqrt(num_sq) /
                    (std::exp2(1.0 / 2.0) * (std::exp2((2.0 - 3.0) / 4.0) + 1.0) *
                     f1.l2_norm() * f2.l2_norm());
  double got = bilinear_ratio(f1, f2, k);
  CHECK(std::abs(got - expected) <= 1e-12 * expected);
}

TEST_CASE("loglog slope fits exact power laws") {
  std::vector<double> x = {4, 8, 16, 32, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.7));
  CHECK(std::abs(loglog_slope(x, y) - 0.7) <= 1e-12);

  std::vector<double> partial = {0.0, 24.0, 48.0, 0.0, 192.0};
  // Only the three positive entries participate; they lie on slope 1.
  std::vector<double> xs = {4, 8, 16, 32, 64};
  CHECK(std::abs(loglog_slope(xs, partial) - 1.0) <= 1e-12);

  std::vector<double> one = {4.0};
  std::vector<double> oney = {2.0};
  CHECK(loglog_slope(one, oney) == 0.0);
}

TEST_CASE("probe reports: shape, determinism, bounded small ladders") {
  ProbeConfig cfg;
  cfg.n_min = 4;
  cfg.n_max = 8;
  cfg.seeds = 2;
  cfg.seed = 77;
  ProbeReport a = strichartz_probe(ProbeKind::L4, cfg);
  ProbeReport b = strichartz_probe(ProbeKind::L4, cfg);
  CHECK(a.rows.size() == 4);
  CHECK(a.has_slope);
  CHECK(a.max_ratio > 0.0);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.to_csv().rfind("kind,N_or_k,j1,j2,ratio,slope,seed\n", 0) == 0);
  for (const ProbeRow& row : a.rows) {
    CHECK(row.ratio > 0.0);
    CHECK(row.ratio < 10.0);
  }

  ProbeConfig c6 = cfg;
  c6.block_min = 2;
  c6.block_max = 3;
  c6.seeds = 1;
  ProbeReport dinh = strichartz_probe(ProbeKind::L6_shorttime, c6);
  CHECK(dinh.rows.size() == 2);
  for (const ProbeRow& row : dinh.rows) {
    CHECK(row.ratio > 0.0);
    CHECK(row.ratio < 5.0);
  }

  ProbeConfig c8 = cfg;
  c8.seeds = 2;
  ProbeReport l8 = strichartz_probe(ProbeKind::L8, c8);
  CHECK(l8.rows.size() == 4);
  CHECK(l8.max_ratio > 0.0);

  ProbeConfig cf = cfg;
  cf.n_max = 16;
  ProbeReport free6 = strichartz_probe(ProbeKind::L6_free, cf);
  CHECK(free6.rows.size() == 6);
  for (const ProbeRow& row : free6.rows) CHECK(row.ratio > 0.0);
}

TEST_CASE("L4 probe stays bounded on a medium ladder") {
  ProbeConfig cfg;
  cfg.n_min = 4;
  cfg.n_max = 64;
  cfg.seeds = 2;
  cfg.seed = 5;
  ProbeReport rep = strichartz_probe(ProbeKind::L4, cfg);
  CHECK(rep.max_ratio > 0.0);
  CHECK(rep.max_ratio < 10.0);
  CHECK(std::abs(rep.slope) <= 0.15);
  MESSAGE("L4 medium-ladder max ratio ", rep.max_ratio, " slope ", rep.slope);
}

TEST_CASE("bilinear probe rows cover the grid deterministically") {
  ProbeConfig cfg;
  cfg.seeds = 1;
  cfg.seed = 11;
  ProbeReport rep = strichartz_probe(ProbeKind::bilinear, cfg);
  CHECK(rep.rows.size() == 20);  // two bands × ten ordered (j1, j2) pairs
  for (const ProbeRow& row : rep.rows) {
    CHECK(row.ratio > 0.0);
    CHECK(row.j1 <= row.j2);
    CHECK(row.ratio < 10.0);
  }
  ProbeReport again = strichartz_probe(ProbeKind::bilinear, cfg);
  CHECK(rep.to_csv() == again.to_csv());
}

}  // TEST_SUITE
