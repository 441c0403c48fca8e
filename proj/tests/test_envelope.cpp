#include <doctest.h>

#include <cmath>

#include "kdvlab/envelope.hpp"

using namespace kdvlab;

namespace {

void check_envelope_invariants(const FrequencyEnvelope& env) {
  double csum = 0.0;
  for (double v : env.c) csum += v;
  CHECK(std::abs(csum - 1.0) < 1e-12);
  // (a) majorant
  for (int k = 0; k < env.blocks; ++k) {
    CHECK(env.beta[std::size_t(k)] >= env.c[std::size_t(k)] - 1e-15);
  }
  // (b) summability against the documented constant (include the tail)
  double bsum = 0.0;
  for (int k = 0; k < env.blocks + 60; ++k) bsum += env.beta_at(k);
  CHECK(bsum <= env.sum_bound() + 1e-12);
  // (c) log-Lipschitz with constant eps/2
  for (int j = 0; j < env.blocks + 20; ++j) {
    for (int k = 0; k < env.blocks + 20; ++k) {
      double lhs = env.beta_at(j);
      double rhs = std::exp2((env.eps / 2.0) * std::abs(j - k)) * env.beta_at(k);
      CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
  }
}

}  // namespace

TEST_SUITE("envelope") {

TEST_CASE("invariants across data laws and s") {
  for (double s : {0.0, 0.25, 0.5}) {
    for (uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
      SpectralField u = random_field(128, 0.9, seed);
      FrequencyEnvelope env = build_envelope(u, s, 0.125);
      check_envelope_invariants(env);
    }
  }
}

TEST_CASE("single-block datum saturates its own block") {
  // All mass in block 3 (modes 8..15).
  SpectralField u(31);
  u.set_coef(9, cplx{0.4, -0.2});
  u.set_coef(13, cplx{0.1, 0.3});
  FrequencyEnvelope env = build_envelope(u, 0.5, 0.125);
  CHECK(env.c[3] == doctest::Approx(1.0));
  CHECK(env.beta[3] == doctest::Approx(1.0));
  // Neighbors decay at exactly the Lipschitz rate until the floor takes over.
  CHECK(env.beta_at(4) == doctest::Approx(std::exp2(-0.0625)));
  CHECK(env.beta_at(2) == doctest::Approx(std::exp2(-0.0625)));
  // Below block 3/2 the 2^{-(eps/2)k} floor dominates: beta_1 has floor
  // 2^{-eps/2} > lipschitz 2^{-eps}.
  CHECK(env.beta_at(1) == doctest::Approx(std::exp2(-0.0625)));
  CHECK(env.beta_at(0) == doctest::Approx(1.0));
  check_envelope_invariants(env);
}

TEST_CASE("exact scale invariance") {
  SpectralField u = random_field(64, 1.1, 77);
  SpectralField big = u;
  for (int n = 0; n <= 64; ++n) big.set_coef(n, 1.7e3 * u.coef(n));
  FrequencyEnvelope a = build_envelope(u, 0.25, 0.125);
  FrequencyEnvelope b = build_envelope(big, 0.25, 0.125);
  for (int k = 0; k < a.blocks; ++k) {
    CHECK(a.beta[std::size_t(k)] == b.beta[std::size_t(k)]);
    CHECK(a.c[std::size_t(k)] == doctest::Approx(b.c[std::size_t(k)]).epsilon(1e-14));
  }
}

TEST_CASE("zero field is rejected") {
  CHECK_THROWS_AS(build_envelope(SpectralField(16), 0.5, 0.125),
                  std::runtime_error);
}

TEST_CASE("envelope csv shape") {
  SpectralField u = random_field(32, 1.0, 3);
  FrequencyEnvelope env = build_envelope(u, 0.25, 0.125);
  std::string csv = envelope_to_csv(env);
  CHECK(csv.rfind("n,c_n,beta_n\n", 0) == 0);
  int lines = 0;
  for (char ch : csv) {
    if (ch == '\n') ++lines;
  }
  CHECK(lines == env.blocks + 1);
}

TEST_CASE("envelope symbol matches the blocks and passes its class audit") {
  SpectralField u = random_field(128, 0.8, 21);
  FrequencyEnvelope env = build_envelope(u, 0.25, 0.125);
  Symbol a = envelope_symbol(env);
  for (int k = 0; k < env.blocks; ++k) {
    double expect = std::exp2(2.0 * env.s * k) / env.beta[std::size_t(k)];
    CHECK(a(1 << k) == doctest::Approx(expect).epsilon(1e-12));
  }
  // Even, positive, sane growth.
  CHECK(a(-8) == a(8));
  CHECK(a(3000) > 0.0);
}

}  // TEST_SUITE
