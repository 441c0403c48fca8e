#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "kdvlab/resonance.hpp"
#include "kdvlab/util.hpp"

using namespace kdvlab;

TEST_SUITE("resonance") {

TEST_CASE("quadruple resonance factorization, spot values") {
  CHECK(omega4(1, 2, 3, -6) == -180);        // 1+8+27-216
  CHECK(omega4(5, -5, 7, -7) == 0);          // pairing tuple
  CHECK(omega4(0, 1, 2, -3) == -18);
  CHECK_THROWS_AS(omega4(1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("triple resonance is +3 n1 n2 n3") {
  CHECK(omega3(1, 2, -3) == -18);
  CHECK(omega3(4, -1, -3) == 36);
  CHECK(omega3(0, 5, -5) == 0);
  CHECK_THROWS_AS(omega3(1, 2, 3), std::invalid_argument);
  // Exhaustive against direct cubes on a box (the factored form is also
  // cross-checked internally).
  for (int a = -25; a <= 25; ++a) {
    for (int b = -25; b <= 25; ++b) {
      int c = -a - b;
      if (std::abs(c) > 25) continue;
      long long direct = (long long)a * a * a + (long long)b * b * b +
                         (long long)c * c * c;
      REQUIRE(omega3(a, b, c) == direct);
      REQUIRE(direct == 3LL * a * b * c);
    }
  }
}

TEST_CASE("sextuple resonance agrees with the direct cube sum") {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    int n[6];
    long long s = 0;
    for (int i = 0; i < 5; ++i) {
      n[i] = int(rng.next_u64() % 4001) - 2000;
      s += n[i];
    }
    if (std::abs(s) > 2000) continue;
    n[5] = int(-s);
    long long direct = 0;
    for (int i = 0; i < 6; ++i) direct += (long long)n[i] * n[i] * n[i];
    REQUIRE(omega6(n[0], n[1], n[2], n[3], n[4], n[5]) == direct);
  }
}

TEST_CASE("star predicate matches omega4 != 0") {
  for (int a = -12; a <= 12; ++a) {
    for (int b = -12; b <= 12; ++b) {
      for (int c = -12; c <= 12; ++c) {
        int d = -a - b - c;
        if (std::abs(d) > 12) continue;
        REQUIRE(star_nonresonant(a, b, c, d) == (omega4(a, b, c, d) != 0));
      }
    }
  }
}

TEST_CASE("psi multiplier vanishes on constant symbols") {
  Symbol flat([](int) { return 2.5; });
  CHECK(psi_multiplier(flat, 3, -1, 4, -6) == doctest::Approx(0.0));
  Symbol sob = sobolev_symbol(2.0);
  double expect = 0.0;
  for (int n : {3, -1, 4, -6}) expect += (1.0 + n * n) * n;
  CHECK(psi_multiplier(sob, 3, -1, 4, -6) == doctest::Approx(expect));
}

TEST_CASE("exhaustive multiplier probe: case split is total, sup finite") {
  MultiplierProbeReport rep = multiplier_bound_probe_exhaustive(0.25, 0.125, 24);
  CHECK(rep.sampled > 0);
  CHECK(rep.resonant_skipped > 0);
  CHECK(rep.sup_overall > 0.0);
  CHECK(std::isfinite(rep.sup_overall));
  long long counted = rep.resonant_skipped;
  for (const auto& row : rep.rows) {
    CHECK((row.case_id >= 1 && row.case_id <= 3));
    CHECK(row.sup_ratio <= rep.sup_overall + 1e-15);
    counted += row.count;
  }
  CHECK(counted == rep.sampled);
  std::string csv = rep.to_csv();
  CHECK(csv.rfind("case,k1star,ratio,count\n", 0) == 0);
}

TEST_CASE("random multiplier probe is deterministic in the seed") {
  auto a = multiplier_bound_probe_random(0.25, 0.125, 512, 2000, 9);
  auto b = multiplier_bound_probe_random(0.25, 0.125, 512, 2000, 9);
  CHECK(a.to_csv() == b.to_csv());
  CHECK(a.sampled == 2000);
}

TEST_CASE("symbol class report: smooth symbols pass, caps reject junk") {
  Symbol sob = sobolev_symbol(0.5);
  SymbolClassReport rep = symbol_class_report(sob, 0.25, 0.125, 256);
  CHECK(rep.neighbor_ratio < 1.5);
  CHECK(rep.diff1 < 2.0);
  CHECK(rep.diff2 < 4.0);
  CHECK(rep.growth < 1.5);
  CHECK(rep.decay < 1.5);
  CHECK_NOTHROW(require_symbol_class(sob, 0.25, 0.125, 256, 8.0, "test"));
  Symbol spiky([](int n) { return n == 37 ? 1e6 : 1.0; });
  CHECK_THROWS_AS(require_symbol_class(spiky, 0.25, 0.125, 256, 8.0, "test"),
                  std::runtime_error);
}

}  // TEST_SUITE
