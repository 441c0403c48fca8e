// Oracle-first checks for the interaction sums: every production path
// (Filon quartic kernel, sextic phase classes) is compared against direct
// tuple enumeration with dense trapezoid + Richardson time quadrature, and
// against the exactly known identities.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "kdvlab/calibration.hpp"
#include "kdvlab/equations.hpp"
#include "kdvlab/filon.hpp"
#include "kdvlab/integrator.hpp"
#include "kdvlab/modified_energy.hpp"
#include "kdvlab/util.hpp"

using namespace kdvlab;

namespace {

SystemState single_state(SpectralField f) {
  SystemState s;
  s.comps.push_back(std::move(f));
  return s;
}

SpectralField decaying_random_field(int n_max, double decay, uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> half(std::size_t(n_max) + 1);
  half[0] = cplx{0.3 * rng.normal(), 0.0};
  for (int n = 1; n <= n_max; ++n) {
    double w = std::exp(-decay * n);
    half[std::size_t(n)] = w * cplx{rng.normal(), rng.normal()} / std::sqrt(2.0);
  }
  return SpectralField::from_half(std::move(half));
}

Trajectory make_renorm_traj(int n_max, double T, int samples, uint64_t seed) {
  EvolveOptions opt;
  opt.dt = 1e-3;
  opt.samples = samples;
  opt.warn_stiff = false;
  return evolve(single_state(decaying_random_field(n_max, 0.5, seed)),
                EquationSpec::renormalized_mkdv(+1), T, opt);
}

Trajectory thin(const Trajectory& t, int stride) {
  Trajectory o;
  o.eq = t.eq;
  o.dt_internal = t.dt_internal;
  for (int j = 0; j < t.n_samples(); j += stride) {
    o.times.push_back(t.times[std::size_t(j)]);
    o.slices.push_back(t.slices[std::size_t(j)]);
  }
  return o;
}

bool in_band(TupleBand band, int M, int n1, int n2, int n3, int n4) {
  int m = std::max(std::max(std::abs(n1), std::abs(n2)),
                   std::max(std::abs(n3), std::abs(n4)));
  if (band == TupleBand::below) return m <= M;
  if (band == TupleBand::above) return m > M;
  return true;
}

// Enumerate zero-sum nonresonant quadruples with |n_i| <= N.
template <typename Fn>
void for_each_tuple(int N, Fn&& fn) {
  for (int n1 = -N; n1 <= N; ++n1) {
    for (int n2 = -N; n2 <= N; ++n2) {
      if (n1 + n2 == 0) continue;
      for (int n3 = -N; n3 <= N; ++n3) {
        int n4 = -(n1 + n2 + n3);
        if (std::abs(n4) > N) continue;
        if (n1 + n3 == 0 || n2 + n3 == 0) continue;
        fn(n1, n2, n3, n4);
      }
    }
  }
}

struct OracleSum {
  double value = 0.0;  // Im of the Richardson-extrapolated complex total
  double mass = 0.0;   // Σ |w| |∫| (roundoff yardstick)
};

// Trapezoid at h and 2h, Richardson-extrapolated; K must be even.
template <typename Weight, typename Factor1>
OracleSum oracle_quartic(const Trajectory& traj, TupleBand band, int M,
                         Weight&& weight, Factor1&& factor1) {
  int N = traj.slices[0].comps[0].n_max();
  int K = traj.n_samples() - 1;
  REQUIRE(K % 2 == 0);
  double h = traj.sample_dt();
  cplx total(0.0, 0.0);
  double mass = 0.0;
  std::vector<cplx> F(std::size_t(K) + 1);
  for_each_tuple(N, [&](int n1, int n2, int n3, int n4) {
    if (!in_band(band, M, n1, n2, n3, n4)) return;
    double w = weight(n1, n2, n3, n4);
    if (w == 0.0) return;
    for (int k = 0; k <= K; ++k) {
      const SpectralField& u = traj.slices[std::size_t(k)].comps[0];
      F[std::size_t(k)] =
          factor1(n1, k) * u.coef(n2) * u.coef(n3) * u.coef(n4);
    }
    cplx Ih(0.0, 0.0), I2h(0.0, 0.0);
    for (int k = 0; k <= K; ++k) Ih += F[std::size_t(k)];
    Ih -= 0.5 * (F[0] + F[std::size_t(K)]);
    Ih *= h;
    for (int k = 0; k <= K; k += 2) I2h += F[std::size_t(k)];
    I2h -= 0.5 * (F[0] + F[std::size_t(K)]);
    I2h *= 2.0 * h;
    cplx I = (4.0 * Ih - I2h) / 3.0;
    total += w * I;
    mass += std::abs(w) * std::abs(I);
  });
  return {total.imag(), mass};
}

}  // namespace

TEST_SUITE("modified_energy") {

TEST_CASE("filon moments: identities, Taylor/closed-form seam, trapezoid limit") {
  // Defining identity iθ M0 = e^{iθ} - 1 on both branches.
  for (double th : {1e-8, 0.3, 0.4999, 0.5001, 3.0, 200.0}) {
    FilonMoments m = filon_moments(th);
    cplx it(0.0, th);
    CHECK(std::abs(it * m.m0 - (m.expi - 1.0)) <= 1e-14 * (1.0 + std::abs(th)));
  }
  // Continuity across the series/closed-form seam.  The straddle must be
  // tight enough that the genuine variation |M'| * 2δ stays below the
  // tolerance; δ = 1e-12 leaves the branch mismatch as the dominant term.
  FilonMoments lo = filon_moments(0.5 - 1e-12);
  FilonMoments hi = filon_moments(0.5 + 1e-12);
  CHECK(std::abs(lo.m0 - hi.m0) <= 1e-10);
  CHECK(std::abs(lo.m1 - hi.m1) <= 1e-10);
  CubicMoments clo = cubic_moments(1.0 - 1e-12);
  CubicMoments chi = cubic_moments(1.0 + 1e-12);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(clo.m[j] - chi.m[j]) <= 1e-10);
  }
  // Cubic moments against explicit values at θ = 0: M_j = 1/(j+1).
  CubicMoments c0 = cubic_moments(0.0);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(c0.m[j] - 1.0 / double(j + 1)) <= 1e-15);
  }
  // θ = 0 reduces the assembled integral to the composite trapezoid.
  Rng rng(5);
  const int K = 7;
  const double h = 0.37;
  std::vector<cplx> F(K + 1);
  for (cplx& v : F) v = cplx{rng.normal(), rng.normal()};
  cplx P(0.0, 0.0);
  for (const cplx& v : F) P += v;
  cplx got = filon_integral(P, F.front(), F.back(), h, filon_moments(0.0));
  cplx trap = -0.5 * (F.front() + F.back());
  for (const cplx& v : F) trap += v;
  trap *= h;
  CHECK(std::abs(got - trap) <= 1e-14 * std::abs(trap));
}

TEST_CASE("r4 agrees with dense brute force, including banded variants") {
  // Dense trajectory: trapezoid+Richardson is the independent oracle there;
  // the production path is also run on a 64x-thinned copy, where only the
  // Filon correction can keep the large phases accurate.
  Trajectory dense = make_renorm_traj(6, 0.05, 16384, 1234);
  Trajectory coarse = thin(dense, 64);
  Symbol a = sobolev_symbol(2.0);  // H^1 weight

  auto psi = [&a](int n1, int n2, int n3, int n4) {
    return a(n1) * n1 + a(n2) * n2 + a(n3) * n3 + a(n4) * n4;
  };
  auto plain = [&dense](int n1, int k) {
    return dense.slices[std::size_t(k)].comps[0].coef(n1);
  };

  struct Case {
    TupleBand band;
    int M;
  };
  for (Case c : {Case{TupleBand::all, 0}, Case{TupleBand::below, 4},
                 Case{TupleBand::above, 4}, Case{TupleBand::above, 2}}) {
    OracleSum want = oracle_quartic(dense, c.band, c.M, psi, plain);
    double got_dense = r4_sum(dense, a, c.band, c.M);
    double got_coarse = r4_sum(coarse, a, c.band, c.M);
    double yard = std::max(want.mass, 1e-12);
    CHECK(std::abs(got_dense - want.value) <= 1e-9 * yard);
    CHECK(std::abs(got_coarse - want.value) <= 1e-6 * yard);
  }
}

TEST_CASE("fundamental quartic identity closes to near machine precision") {
  Trajectory traj = make_renorm_traj(8, 0.1, 2048, 777);
  for (double expo : {0.0, 1.0, 2.0}) {
    Symbol a = sobolev_symbol(expo);
    FundamentalReport rep = fundamental_identity_residual(traj, a);
    INFO("exponent ", expo, " lhs ", rep.lhs, " rhs ", rep.rhs);
    CHECK(rep.residual <= 1e-10);
  }
}

TEST_CASE("sextic terms agree with the collapsed brute force") {
  Trajectory dense = make_renorm_traj(6, 0.05, 16384, 4321);
  Symbol a = sobolev_symbol(2.0);
  const int M = 2;
  const int N = 6;
  const int K = dense.n_samples() - 1;

  // T⋆(n, t_k) from the validated nonresonant split: nonres(n) = i n T⋆(n).
  std::vector<std::vector<cplx>> tstar(
      std::size_t(K) + 1, std::vector<cplx>(std::size_t(2 * N) + 1));
  for (int k = 0; k <= K; ++k) {
    NonlinearitySplit sp = split_renormalized(dense.slices[std::size_t(k)].comps[0]);
    for (int n = 1; n <= N; ++n) {
      cplx t = sp.nonresonant.coef(n) / cplx(0.0, double(n));
      tstar[std::size_t(k)][std::size_t(n + N)] = t;
      tstar[std::size_t(k)][std::size_t(-n + N)] = std::conj(t);
    }
  }

  auto wdiag = [&a](int n1, int n2, int n3, int n4) {
    long long om = -3LL * (n1 + n2) * (n1 + n3) * (n2 + n3);
    double psi = a(n1) * n1 + a(n2) * n2 + a(n3) * n3 + a(n4) * n4;
    return psi * double(n1) / double(om);
  };
  auto cubed = [&dense](int n1, int k) {
    cplx v = dense.slices[std::size_t(k)].comps[0].coef(n1);
    return std::norm(v) * v;
  };
  auto star = [&tstar, N](int n1, int k) {
    return tstar[std::size_t(k)][std::size_t(n1 + N)];
  };

  OracleSum want_I = oracle_quartic(dense, TupleBand::above, M, wdiag, cubed);
  OracleSum want_II = oracle_quartic(dense, TupleBand::above, M, wdiag, star);

  LedgerOptions opts;
  opts.prune_rel = 0.0;  // compare unpruned
  SexticTerms got = r6_terms(dense, a, M, opts);
  CHECK(got.skipped_bound == 0.0);
  CHECK(std::abs(got.term_I - want_I.value) <= 1e-8 * std::max(want_I.mass, 1e-12));
  CHECK(std::abs(got.term_II - want_II.value) <=
        1e-7 * std::max(want_II.mass, 1e-12));

  // Default pruning must stay within its own reported bound of the unpruned
  // answer.
  LedgerOptions pruned;
  SexticTerms got2 = r6_terms(dense, a, M, pruned);
  CHECK(std::abs(got2.term_II - got.term_II) <= got2.skipped_bound + 1e-12);
}

TEST_CASE("differentiation-by-parts ledger closes at every threshold") {
  Trajectory traj = make_renorm_traj(8, 0.1, 2048, 2025);
  Symbol a = sobolev_symbol(1.0);
  LedgerOptions opts;
  opts.coarse_samples = 256;
  opts.phi_split = 1e9;  // all pairs on the cubic path: quadrature-exact
  opts.prune_rel = 0.0;
  for (int M : {1, 2, 4}) {
    EnergyLedger led = build_energy_ledger(traj, a, "sobolev(1)", M, opts);
    INFO("M ", M, " lhs ", led.r4_above_M, " rhs ", led.rhs_above);
    CHECK(led.residual_rel <= 1e-10);
    CHECK(std::abs(led.r4_full - led.r4_below_M - led.r4_above_M) <=
          1e-10 * std::max(1.0, std::abs(led.r4_full)));
  }
}

TEST_CASE("degenerate thresholds give exact zeros") {
  Trajectory traj = make_renorm_traj(8, 0.1, 1024, 99);
  Symbol a = sobolev_symbol(1.0);
  // M above the band: the above-M set is empty.
  CHECK(r4_sum(traj, a, TupleBand::above, 16) == 0.0);
  CHECK(b4_boundary(traj, a, TupleBand::above, 16) == 0.0);
  SexticTerms st = r6_terms(traj, a, 16, LedgerOptions{});
  CHECK(st.term_I == 0.0);
  CHECK(st.term_II == 0.0);
  // M = 1: every zero-sum quadruple inside |n| <= 1 is resonant.
  CHECK(r4_sum(traj, a, TupleBand::below, 1) == 0.0);
}

TEST_CASE("preconditions are enforced") {
  Symbol a = sobolev_symbol(1.0);
  // Wrong equation kind.
  {
    EvolveOptions opt;
    opt.dt = 1e-3;
    opt.samples = 256;
    opt.warn_stiff = false;
    Trajectory plain = evolve(single_state(decaying_random_field(4, 0.5, 1)),
                              EquationSpec::mkdv(+1), 0.1, opt);
    CHECK_THROWS_AS(r4_sum(plain, a, TupleBand::all, 0), std::invalid_argument);
  }
  // Too sparse in time.
  {
    EvolveOptions opt;
    opt.dt = 1e-3;
    opt.samples = 4;
    opt.warn_stiff = false;
    Trajectory sparse = evolve(single_state(decaying_random_field(8, 0.5, 2)),
                               EquationSpec::renormalized_mkdv(+1), 0.1, opt);
    CHECK_THROWS_AS(r4_sum(sparse, a, TupleBand::all, 0),
                    std::invalid_argument);
  }
  Trajectory good = make_renorm_traj(4, 0.1, 512, 3);
  // Banded sums demand a power-of-two threshold.
  CHECK_THROWS_AS(r4_sum(good, a, TupleBand::below, 3), std::invalid_argument);
  CHECK_THROWS_AS(b4_boundary(good, a, TupleBand::above, 0),
                  std::invalid_argument);
  // A corrupted slice no longer solves the equation.
  Trajectory bogus = good;
  {
    std::vector<cplx> half = bogus.slices[1].comps[0].half();
    for (cplx& c : half) c *= 1.5;
    bogus.slices[1].comps[0] = SpectralField::from_half(std::move(half));
  }
  CHECK_THROWS_AS(r4_sum(bogus, a, TupleBand::all, 0), std::invalid_argument);
}

TEST_CASE("ledger serializes deterministically with the frozen constants") {
  Trajectory traj = make_renorm_traj(6, 0.1, 1024, 55);
  Symbol a = sobolev_symbol(1.0);
  EnergyLedger led = build_energy_ledger(traj, a, "sobolev(1)", 2);
  std::string j1 = ledger_to_json(led);
  std::string j2 = ledger_to_json(build_energy_ledger(traj, a, "sobolev(1)", 2));
  CHECK(j1 == j2);
  nlohmann::json parsed = nlohmann::json::parse(j1);
  CHECK(parsed["symbol"] == "sobolev(1)");
  CHECK(parsed["M"] == 2);
  CHECK(parsed["constants"]["c_quartic"].get<double>() ==
        doctest::Approx(calib::c_quartic).epsilon(1e-15));
  CHECK(parsed["identity"]["residual_rel"].get<double>() <=
        parsed["identity"]["tolerance"].get<double>());
  CHECK(parsed["sums"].contains("term_II"));
}

}  // TEST_SUITE
