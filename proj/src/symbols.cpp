#include "kdvlab/symbols.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvlab/spectrum.hpp"
#include "kdvlab/util.hpp"

namespace kdvlab {

Symbol sobolev_symbol(double exponent) {
  return Symbol([exponent](int n) {
    return std::pow(1.0 + double(n) * double(n), exponent / 2.0);
  });
}

Symbol block_power_symbol(double s, double eps) {
  double rate = 2.0 * (s + eps);
  return Symbol([rate](int n) {
    return std::exp2(rate * double(dyadic_block_of(n)));
  });
}

SymbolClassReport symbol_class_report(const Symbol& a, double s, double eps,
                                      int n_max) {
  if (n_max < 4) throw std::invalid_argument("symbol_class_report: n_max < 4");
  SymbolClassReport rep;
  std::vector<double> v(std::size_t(n_max) + 3);
  for (int n = 0; n <= n_max + 2; ++n) {
    v[std::size_t(n)] = a(n);
    if (!(v[std::size_t(n)] > 0.0)) {
      throw std::runtime_error("symbol_class_report: symbol not positive");
    }
  }
  for (int n = 1; n <= n_max; ++n) {
    double an = v[std::size_t(n)];
    double r = v[std::size_t(n + 1)] / an;
    rep.neighbor_ratio = std::max(rep.neighbor_ratio, std::max(r, 1.0 / r));
    double d1 = v[std::size_t(n + 1)] - an;
    double d2 = v[std::size_t(n + 2)] - 2.0 * v[std::size_t(n + 1)] + an;
    double br = bracket(double(n));
    rep.diff1 = std::max(rep.diff1, std::abs(d1) * br / an);
    rep.diff2 = std::max(rep.diff2, std::abs(d2) * br * br / an);
  }
  double rate = 2.0 * (s + eps);
  // Growth/decay windows on a dyadic subsample (full double loop is O(n²)
  // and adds nothing).
  for (int n = 1; n <= n_max; n = (n < 16 ? n + 1 : n + std::max(1, n / 7))) {
    for (int m = 1; m <= n; m = (m < 16 ? m + 1 : m + std::max(1, m / 7))) {
      double ratio = v[std::size_t(n)] / v[std::size_t(m)];
      double cap = std::pow(double(n) / double(m), rate);
      rep.growth = std::max(rep.growth, ratio / cap);
      rep.decay = std::max(rep.decay, 1.0 / ratio);
    }
  }
  return rep;
}

void require_symbol_class(const Symbol& a, double s, double eps, int n_max,
                          double cap, const std::string& who) {
  SymbolClassReport r = symbol_class_report(a, s, eps, n_max);
  auto fail = [&](const char* what, double got) {
    throw std::runtime_error(str_printf(
        "%s: symbol class violation: %s = %.6g exceeds cap %.6g", who.c_str(),
        what, got, cap));
  };
  if (r.neighbor_ratio > cap) fail("neighbor ratio", r.neighbor_ratio);
  if (r.diff1 > cap) fail("first difference bound", r.diff1);
  if (r.diff2 > cap) fail("second difference bound", r.diff2);
  if (r.growth > cap) fail("growth window", r.growth);
  if (r.decay > cap) fail("decay window", r.decay);
}

}  // namespace kdvlab
