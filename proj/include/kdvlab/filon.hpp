#pragma once
// Oscillatory time quadrature on uniform grids.
//
// All quartic/sextic sums integrate products of coefficients that factor as
// F(t) = e^{iWt} g(t) with integer phase rate W (a cube sum) and slow g (the
// interaction-picture residue). The composite trapezoid is applied to g with
// the phase integrated exactly per interval (piecewise-linear Filon): with
// moments
//     M0(θ) = (e^{iθ}-1)/(iθ),   M1(θ) = (e^{iθ}(iθ-1)+1)/(iθ)²,  θ = W h,
// and the plain sample sum P = Σ_{k=0}^{K} F_k taken over stored products,
//     ∫_{t₀}^{t₀+Kh} F dt ≈ h [ (M0-M1)(P - F_K) + M1 e^{-iθ} (P - F_0) ].
// θ→0 recovers the composite trapezoid; the quadrature error involves only
// d²g/dt², never W.
//
// The interior weight implied by this formula is sinc²(θ/2) =
// 2(1-cosθ)/θ², which is occasionally handy for error reasoning.

#include <complex>

namespace kdvlab {

struct FilonMoments {
  std::complex<double> m0, m1;
  std::complex<double> expi;  // e^{iθ}
};

// Stable for any θ (Taylor below |θ| = 0.5).
FilonMoments filon_moments(double theta);

inline std::complex<double> filon_integral(std::complex<double> P,
                                           std::complex<double> F0,
                                           std::complex<double> FK, double h,
                                           const FilonMoments& m) {
  std::complex<double> expmi = std::conj(m.expi);
  return h * ((m.m0 - m.m1) * (P - FK) + m.m1 * expmi * (P - F0));
}

// Power-basis moments M_j(θ) = ∫₀¹ τ^j e^{iθτ} dτ for j = 0..3, used by the
// piecewise-cubic variants below and in the sextic pair stage.
struct CubicMoments {
  std::complex<double> m[4];
  std::complex<double> expi;
};

CubicMoments cubic_moments(double theta);

// Piecewise-cubic composite rule with exact slopes.  Samples F_k = e^{iWt_k}
// g_k and their time derivatives F'_k are reduced to two plain sums
//     P = Σ_k F_k,   P' = Σ_k F'_k,
// and the slow-slope terms G_k = F'_k - iW F_k (= e^{iWt_k} g'_k).  With the
// Hermite basis expressed through the power moments,
//     a = M0 - 3M2 + 2M3,  b = 3M2 - 2M3,  c = M1 - 2M2 + M3,  d = M3 - M2,
// the integral over the K uniform intervals is
//   h [ a (P - F_K) + b e^{-iθ} (P - F_0)
//       + h ( c (Q - G_K) + d e^{-iθ} (Q - G_0) ) ],   Q = P' - iW P.
// θ→0 recovers the trapezoid with the Euler–Maclaurin h²/12 (g'_0 - g'_K)
// endpoint correction; the quadrature error is O(h⁴ d⁴g/dt⁴), never W.
inline std::complex<double> filon_integral_cubic(
    std::complex<double> P, std::complex<double> Pd, std::complex<double> F0,
    std::complex<double> FK, std::complex<double> Fd0, std::complex<double> FdK,
    double W, double h, const CubicMoments& cm) {
  std::complex<double> a = cm.m[0] - 3.0 * cm.m[2] + 2.0 * cm.m[3];
  std::complex<double> b = 3.0 * cm.m[2] - 2.0 * cm.m[3];
  std::complex<double> c = cm.m[1] - 2.0 * cm.m[2] + cm.m[3];
  std::complex<double> d = cm.m[3] - cm.m[2];
  std::complex<double> iW(0.0, W);
  std::complex<double> Q = Pd - iW * P;
  std::complex<double> G0 = Fd0 - iW * F0;
  std::complex<double> GK = FdK - iW * FK;
  std::complex<double> emi = std::conj(cm.expi);
  return h * (a * (P - FK) + b * emi * (P - F0) +
              h * (c * (Q - GK) + d * emi * (Q - G0)));
}

}  // namespace kdvlab
