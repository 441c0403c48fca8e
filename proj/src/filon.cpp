#include "kdvlab/filon.hpp"

#include <cmath>

namespace kdvlab {

using cplx = std::complex<double>;

FilonMoments filon_moments(double theta) {
  FilonMoments out;
  out.expi = cplx(std::cos(theta), std::sin(theta));
  if (std::abs(theta) < 0.5) {
    // M0 = Σ_j (iθ)^j / (j+1)!,  M1 = Σ_j (iθ)^j (j+1) / (j+2)!.
    // Truncation after j = 14 is below 2e-18 for |θ| < 0.5.
    cplx it(0.0, theta);
    cplx pw(1.0, 0.0);
    cplx m0(0.0, 0.0), m1(0.0, 0.0);
    double fact = 1.0;  // j!
    for (int j = 0; j <= 14; ++j) {
      m0 += pw / (fact * (j + 1));
      m1 += pw * double(j + 1) / (fact * (j + 1) * (j + 2));
      pw *= it;
      fact *= (j + 1);
    }
    out.m0 = m0;
    out.m1 = m1;
  } else {
    cplx it(0.0, theta);
    out.m0 = (out.expi - 1.0) / it;
    out.m1 = (out.expi * (it - 1.0) + 1.0) / (it * it);
  }
  return out;
}

CubicMoments cubic_moments(double theta) {
  CubicMoments out;
  out.expi = cplx(std::cos(theta), std::sin(theta));
  if (std::abs(theta) < 1.0) {
    // M_j(θ) = Σ_r (iθ)^r / (r! (j+r+1)); 18 terms keep the tail < 1e-17
    // for |θ| < 1.
    cplx it(0.0, theta);
    for (int j = 0; j < 4; ++j) {
      cplx pw(1.0, 0.0);
      double fact = 1.0;
      cplx acc(0.0, 0.0);
      for (int r = 0; r <= 17; ++r) {
        acc += pw / (fact * (j + r + 1));
        pw *= it;
        fact *= (r + 1);
      }
      out.m[j] = acc;
    }
  } else {
    // Upward recurrence M_j = (e^{iθ} - j M_{j-1}) / (iθ); stable for
    // |θ| ≥ 1.
    cplx it(0.0, theta);
    out.m[0] = (out.expi - 1.0) / it;
    for (int j = 1; j < 4; ++j) {
      out.m[j] = (out.expi - double(j) * out.m[j - 1]) / it;
    }
  }
  return out;
}

}  // namespace kdvlab
