#pragma once
// Frequency envelopes over the dyadic blocks of an initial datum.
//
// For data u₀ with s-weighted block masses
//     c_m = 2^{2ms} ||P_m u₀||² / Σ_m 2^{2ms} ||P_m u₀||²     (Σ c_m = 1)
// the envelope is the slowest (ε/2)-log-Lipschitz majorant with a floor:
//     beta_k = max( max_m 2^{-(ε/2)|k-m|} c_m ,  2^{-(ε/2)k} max_m c_m ).
// Guaranteed invariants (asserted in tests and by the acceptance gate):
//   (a) beta_k >= c_k,
//   (b) Σ_k beta_k <= C(ε) = 2 / (1 - 2^{-ε/2}),
//   (c) beta_j <= 2^{(ε/2)|j-k|} beta_k  for all j,k  (log-Lipschitz),
//   (d) exact scale invariance: beta(λ u₀) = beta(u₀).
//
// The induced energy symbol interpolates ã_k = 2^{2ks} / beta_k smoothly in
// log-log coordinates (C¹ Catmull-Rom), so it obeys the symbol-class bounds
// with documented caps; construction re-checks them and throws on violation.

#include <string>
#include <vector>

#include "kdvlab/spectrum.hpp"
#include "kdvlab/symbols.hpp"

namespace kdvlab {

struct FrequencyEnvelope {
  double s = 0.0;
  double eps = 0.0;
  int blocks = 0;               // data blocks (band coverage)
  std::vector<double> c;        // size `blocks`, sums to 1
  std::vector<double> beta;     // size `blocks` (extension is recomputable)
  double norm_sq = 0.0;         // Σ_m 2^{2ms} ||P_m u₀||² of the datum

  // Envelope value for any block k >= 0 (extends past the data band by the
  // same defining formula).
  double beta_at(int k) const;

  // C(ε) = 2/(1 - 2^{-ε/2}): documented bound for Σ_n β_n over the data
  // blocks (the normalized one-sided tails of the maximum plus the floor stay
  // below it for any band that fits in an int).
  double sum_bound() const;
};

// Throws std::runtime_error("undefined envelope ...") on the zero field.
FrequencyEnvelope build_envelope(const SpectralField& u0, double s, double eps);

// "n,c_n,beta_n" over the data blocks.
std::string envelope_to_csv(const FrequencyEnvelope& env);

// Energy symbol a with a(2^k) = 2^{2ks} / beta_k, smooth in between; class
// checked at construction (throws naming the violated property).
Symbol envelope_symbol(const FrequencyEnvelope& env);

}  // namespace kdvlab
