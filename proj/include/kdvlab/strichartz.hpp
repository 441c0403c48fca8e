#pragma once
// Space-time integrability probes: empirical left/right ratios for the
// L⁴, L⁶, and L⁸ bounds satisfied by windowed superpositions of Airy waves,
// plus a bilinear convolution bound on the integer modulation lattice.
//
// Each probe draws randomized admissible data, computes the exact ratio of
// the estimate's two sides (the frequency-localized quantities are evaluated
// by closed-form pair/triple sums, not by sampling u on a grid), records the
// supremum over draws for each cutoff, and fits a log-log slope of that
// supremum against the cutoff where a growth trend is meaningful.
//
// Conventions
//   - Windowed families are complex superpositions
//         u(t,x) = (1/2π) Σ_n c_n exp(i(n x + (n³ + σ_n) t)) φ(t),
//     with φ(t) = η₀(t / width) the plateau window from spacetime.hpp and
//     σ_n a per-mode modulation offset.  No Hermitian symmetry is imposed;
//     the estimates under test hold for complex data.
//   - L^p norms are genuine integrals over ℝ_t × T_x.  Powers of u are
//     expanded into frequency pairs, so ∫|u²|² and ∫|u⁴|² reduce to sums of
//     amp·conj(amp')·G_{2p}(ω − ω') with G_{2p}(δ) = ∫ φ^{2p}(t) e^{iδt} dt;
//     G is real and even because φ is even, and decays rapidly, so only
//     near-diagonal frequency pairs contribute.
//   - The X^{s,b} norm of a windowed family is the closed form
//         ‖u‖²_{X^{s,b}} = Σ_n ⟨n⟩^{2s} |c_n|² W_b(σ_n),
//         W_b(σ) = ∫ ⟨ξ + σ⟩^{2b} |φ̂(ξ)|² dξ,
//     which matches Σ_n ∫ ⟨n⟩^{2s}⟨τ − n³⟩^{2b}|ũ(τ,n)|² dτ for the
//     τ-continuous transform of the family.  Ratios therefore carry a fixed
//     2π-convention constant which is the same for every cutoff and draw;
//     the probes report boundedness and slopes, for which that constant is
//     irrelevant.
//   - Lattice fields (bilinear probe) live on integer modulation bins:
//     g(σ, n) for n in a contiguous band and σ ∈ [−2^j, 2^j] ∩ ℤ, with the
//     counting-measure ℓ² norm.  The demodulated convolution of two lattice
//     fields places each product at σ = σ₁ + σ₂ − 3 n₁ n₂ (n₁ + n₂), the
//     integer resonance offset for the cubic dispersion.
//   - Every ratio is defined as 0 when either side vanishes (zero data).
//
// Report rows carry (kind, N_or_k, j1, j2, ratio, slope, seed): N_or_k is
// the frequency cutoff N (L4 / L6_free / L8), the dyadic block index
// (L6_shorttime), or the output band exponent k (bilinear); j1/j2 are the
// bilinear modulation exponents and 0 elsewhere; slope repeats the fitted
// report-level slope on every row (0 when no slope is fitted); seed is the
// 1-based draw index within the grid point.

#include <cstdint>
#include <string>
#include <vector>

#include "kdvlab/spectrum.hpp"

namespace kdvlab {

enum class ProbeKind { L4, L6_free, L6_shorttime, L8, bilinear };

// Canonical lowercase kind names used on the CLI and in CSV rows:
// "l4", "l6-free", "l6-shorttime", "l8", "bilinear".
const char* probe_kind_name(ProbeKind kind);
ProbeKind probe_kind_from_name(const std::string& name);  // throws std::invalid_argument

struct ProbeConfig {
  int n_min = 4;        // first frequency cutoff of the dyadic ladder (L4, L6_free, L8)
  int n_max = 256;      // last cutoff; each kind clamps to its feasible range
  int block_min = 2;    // dyadic block range for the short-time L⁶ probe
  int block_max = 8;
  int seeds = 4;        // randomized draws per grid point
  std::uint64_t seed = 1;  // base seed; draw r at cutoff N uses seed ^ (N<<32) ^ r
  double width = 1.0;   // window width for windowed families
};

struct ProbeRow {
  int n_or_k = 0;
  int j1 = 0;
  int j2 = 0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

struct ProbeReport {
  ProbeKind kind = ProbeKind::L4;
  std::vector<ProbeRow> rows;
  double slope = 0.0;      // fitted log₂(sup ratio) vs log₂(cutoff); 0 when not fitted
  double max_ratio = 0.0;  // supremum of ratio over all rows
  bool has_slope = false;

  // CSV with header "kind,N_or_k,j1,j2,ratio,slope,seed".
  std::string to_csv() const;
  // The data rows alone (for callers concatenating several reports).
  std::string rows_csv() const;
};

// Runs one probe kind over its grid.  Deterministic for fixed config.
ProbeReport strichartz_probe(ProbeKind kind, const ProbeConfig& config);

// ---- building blocks (exposed for direct testing) ----

// Windowed superposition of modulated Airy waves; modes n ∈ [−n_cut, n_cut],
// coef[i] is c_n for n = i − n_cut and mod[i] the offset σ_n.
struct WindowedFamily {
  int n_cut = 0;
  double width = 1.0;
  std::vector<cplx> coef;
  std::vector<double> mod;

  explicit WindowedFamily(int cut = 0, double w = 1.0);
  cplx& at(int n);
  cplx at(int n) const;
  double& mod_at(int n);
  double mod_at_const(int n) const;
};

// Random family with unit-scale complex Gaussian coefficients and modulation
// offsets drawn uniformly from [−sigma_max, sigma_max] (σ ≡ 0 if sigma_max = 0).
WindowedFamily random_family(int n_cut, double sigma_max, double width,
                             std::uint64_t seed);

// ‖u‖_{L⁴(ℝ×T)} and ‖u‖_{L⁸(ℝ×T)} of a windowed family, by the exact
// frequency-pair expansion (near-diagonal G-weighted Gram sums).
double l4_norm(const WindowedFamily& family);
double l8_norm(const WindowedFamily& family);

// ‖u‖_{L⁴(ℝ×T)} / ‖u‖_{X^{0,1/3}} for a windowed family; 0 for zero data.
double l4_ratio(const WindowedFamily& family);

// ‖u‖_{L⁸(ℝ×T)} / ‖u‖_{X^{0.01,0.51}}.  The slightly raised exponents stand
// in for the "s > 0, b > 1/2" regularity the sharp L⁸ bound requires; they
// are fixed here so slope reports are comparable across runs.
double l8_ratio(const WindowedFamily& family);

// ‖e^{t∂³}u₀‖_{L⁶([0,2π]²)} / ‖u₀‖_{L²(T)} for real data u₀ (Hermitian
// spectrum).  Evaluated exactly via the integer frequency/dispersion join of
// cubic products; 0 for zero data.
double l6_free_ratio(const SpectralField& u0);

// 2^{block/6} · ‖e^{t∂³}u₀‖_{L⁶([0,2^{−2·block}]×T)} / ‖u₀‖_{L²(T)} for real
// data supported on one dyadic block.  Time integral by trapezoid with phase
// increment ≤ 2/3 per step on the top mode; space integral exact for the
// trigonometric polynomial u⁶.  Throws std::invalid_argument if u0 has mass
// outside the block.
double l6_shorttime_ratio(const SpectralField& u0, int block);

// Field on the integer modulation lattice: columns n ∈ [n_lo, n_hi], rows
// σ ∈ [−2^j, 2^j].  at(sigma, n) indexes the value grid.
struct LatticeField {
  int n_lo = 0;
  int n_hi = -1;
  int j = 0;
  std::vector<cplx> vals;  // column-major, (n − n_lo)·rows + (σ + 2^j)

  LatticeField() = default;
  LatticeField(int lo, int hi, int j_exp);
  int rows() const { return 2 * (1 << j) + 1; }
  int cols() const { return n_hi - n_lo + 1; }
  cplx& at(int sigma, int n);
  cplx at(int sigma, int n) const;
  double l2_norm() const;  // counting-measure ℓ²
};

LatticeField random_lattice(int n_lo, int n_hi, int j_exp, std::uint64_t seed);

// ‖f₁ * f₂‖_{ℓ²(|n| ≥ 2^k)} / (2^{j₁/2} (2^{(j₂−k)/4} + 1) ‖f₁‖ ‖f₂‖) with
// j₁ ≤ j₂ the sorted modulation exponents of the two inputs; the convolution
// is the demodulated lattice convolution described above.  0 for zero data.
double bilinear_ratio(const LatticeField& f1, const LatticeField& f2, int k);

// Least-squares slope of log₂(y) against log₂(x); pairs with y ≤ 0 are
// skipped, and the fit needs at least two surviving points (else 0).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace kdvlab
