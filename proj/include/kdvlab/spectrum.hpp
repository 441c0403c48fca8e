#pragma once
// Real-valued spectral fields on the 2π-periodic torus T = R/2πZ.
//
// Transform convention used throughout the library:
//
//     coef(n) = ∫_T u(x) e^{-inx} dx            (analysis)
//     u(x)    = (1/2π) Σ_{n∈Z} coef(n) e^{inx}  (synthesis)
//
// Fields are real, so coef(-n) = conj(coef(n)) and only the non-negative
// half-spectrum is stored; coef(0) is forced real. All coefficient-side
// norms are plain sums with no 2π factor:
//
//     l2_norm_sq(u)        = Σ_{n∈Z} |coef(n)|²      ( = 2π ∫ u² dx )
//     sobolev_norm_sq(u,s) = Σ_{n∈Z} <n>^{2s} |coef(n)|²,  <n> = sqrt(1+n²)
//
// Dyadic blocks: block 0 covers |n| <= 1; block k >= 1 covers
// 2^k <= |n| <= 2^{k+1}-1.
//
// Fields are plain value types; all free functions are pure (they return new
// fields) so sharing instances across threads is safe as long as nobody
// mutates a shared one.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace kdvlab {

using cplx = std::complex<double>;

class SpectralField {
 public:
  SpectralField() = default;

  // Zero field with modes |n| <= n_max.
  explicit SpectralField(int n_max);

  // Takes the non-negative half-spectrum [coef(0), ..., coef(n_max)].
  // coef(0) must be (numerically) real; its imaginary part is dropped after
  // a sanity check.
  static SpectralField from_half(std::vector<cplx> half);

  int n_max() const { return int(half_.size()) - 1; }

  // Coefficient at any n; conjugate symmetry for n < 0, zero for |n| > n_max.
  cplx coef(int n) const {
    int a = n < 0 ? -n : n;
    if (a >= int(half_.size())) return {0.0, 0.0};
    return n < 0 ? std::conj(half_[std::size_t(a)]) : half_[std::size_t(a)];
  }

  // Set coefficient for n >= 0 (the negative side is implied). n = 0 keeps
  // only the real part.
  void set_coef(int n, cplx v);

  const std::vector<cplx>& half() const { return half_; }

 private:
  std::vector<cplx> half_;
};

// --- transforms -------------------------------------------------------------

// Synthesis on the uniform grid x_j = 2πj/grid, j = 0..grid-1.
// Requires grid > 2*n_max (otherwise the grid cannot hold the band).
std::vector<double> inverse_transform(const SpectralField& f, int grid);

// Analysis from samples on the uniform grid; exact for band-limited input
// when samples.size() > 2*n_max.
SpectralField forward_transform(const std::vector<double>& samples, int n_max);

// Smallest fast grid that de-aliases a product of `power` fields of band
// n_max (power*n_max + 1 points are required; rounded up to a 5-smooth size).
int dealias_grid(int n_max, int power);

// --- calculus helpers -------------------------------------------------------

// ∂x in coefficient space: coef(n) -> i n coef(n).
SpectralField derivative(const SpectralField& f);

// Keep modes with lo <= |n| <= hi, zero the rest.
SpectralField project_modes(const SpectralField& f, int lo, int hi);

// Dyadic Littlewood-Paley piece: block 0 is |n| <= 1, block k is
// [2^k, 2^{k+1}-1].
SpectralField project_dyadic(const SpectralField& f, int block);

// Index of the dyadic block containing frequency n (any sign).
int dyadic_block_of(int n);

// Number of dyadic blocks needed to cover |n| <= n_max.
int dyadic_block_count(int n_max);

// --- norms ------------------------------------------------------------------

double l2_norm_sq(const SpectralField& f);
double sobolev_norm_sq(const SpectralField& f, double s);

// Σ_n w(|n|) |coef(n)|² for an arbitrary even weight, evaluated at n >= 0.
double weighted_norm_sq(const SpectralField& f,
                        const std::function<double(int)>& weight);

// --- random data ------------------------------------------------------------

// Random field with the power-law data law coef(n) = <n>^{-sigma} g_n where
// g_n are independent standard complex Gaussians (real for n = 0), Hermitian
// symmetry by construction. Deterministic in `seed`.
SpectralField random_field(int n_max, double sigma, uint64_t seed);

// Rescale so that sobolev_norm_sq(f, s) == target²; zero fields throw.
SpectralField normalize_sobolev(SpectralField f, double s, double target);

// --- text round-trip --------------------------------------------------------

// One line per mode, "n re im", n ascending over [-n_max, n_max], LF line
// endings, full double precision.
std::string dump_spectrum(const SpectralField& f);

// Inverse of dump_spectrum. Rejects malformed lines and Hermitian-symmetry
// violations (|coef(-n) - conj(coef(n))| > 1e-12 * scale) with
// std::runtime_error.
SpectralField parse_spectrum(std::string_view text);

}  // namespace kdvlab
