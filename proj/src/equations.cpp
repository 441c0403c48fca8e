#include "kdvlab/equations.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kdvlab/util.hpp"

namespace kdvlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Pointwise product helpers on a shared de-aliasing grid.
std::vector<double> grid_samples(const SpectralField& f, int grid) {
  return inverse_transform(f, grid);
}

SpectralField tendency_from_grid(const std::vector<double>& w, int n_max) {
  SpectralField t = forward_transform(w, n_max);
  t.set_coef(0, cplx{0.0, 0.0});  // total-derivative nonlinearities keep the mean
  return t;
}

}  // namespace

const char* eq_kind_name(EqKind k) {
  switch (k) {
    case EqKind::mkdv: return "mkdv";
    case EqKind::renormalized_mkdv: return "renormalized_mkdv";
    case EqKind::kdv: return "kdv";
    case EqKind::kdv_mkdv: return "kdv_mkdv";
    case EqKind::mkdv_mkdv_system: return "mkdv_mkdv_system";
  }
  throw std::logic_error("eq_kind_name: bad kind");
}

EqKind eq_kind_from_name(const std::string& name) {
  for (EqKind k : {EqKind::mkdv, EqKind::renormalized_mkdv, EqKind::kdv,
                   EqKind::kdv_mkdv, EqKind::mkdv_mkdv_system}) {
    if (name == eq_kind_name(k)) return k;
  }
  throw std::invalid_argument("unknown equation kind: " + name);
}

EquationSpec EquationSpec::mkdv(int sign) { return {EqKind::mkdv, sign}; }
EquationSpec EquationSpec::renormalized_mkdv(int sign) {
  return {EqKind::renormalized_mkdv, sign};
}
EquationSpec EquationSpec::kdv() { return {EqKind::kdv, 0}; }
EquationSpec EquationSpec::kdv_mkdv(int sign) {
  return {EqKind::kdv_mkdv, sign};
}
EquationSpec EquationSpec::mkdv_mkdv_system() {
  return {EqKind::mkdv_mkdv_system, 0};
}

void EquationSpec::validate() const {
  if (has_sign()) {
    if (sign != 1 && sign != -1) {
      throw std::invalid_argument(
          str_printf("equation %s requires sign ±1, got %d",
                     eq_kind_name(kind), sign));
    }
  } else if (sign != 0) {
    throw std::invalid_argument(str_printf(
        "equation %s carries no sign, got %d", eq_kind_name(kind), sign));
  }
}

std::vector<SpectralField> evaluate_rhs(const EquationSpec& eq,
                                        const SystemState& state) {
  eq.validate();
  if (int(state.comps.size()) != eq.n_components()) {
    throw std::invalid_argument("evaluate_rhs: component count mismatch");
  }
  const SpectralField& u = state.comps[0];
  int n_max = u.n_max();
  int grid = dealias_grid(n_max, 4);  // cubic-safe for every kind

  switch (eq.kind) {
    case EqKind::mkdv:
    case EqKind::renormalized_mkdv: {
      std::vector<double> up = grid_samples(u, grid);
      std::vector<double> uxp = grid_samples(derivative(u), grid);
      double mean_sq = 0.0;
      if (eq.kind == EqKind::renormalized_mkdv) {
        // (1/2π) ∫ u² dx, computed exactly in coefficient space.
        mean_sq = l2_norm_sq(u) / (kTwoPi * kTwoPi);
      }
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        w[j] = double(eq.sign) * (up[j] * up[j] - mean_sq) * uxp[j];
      }
      return {tendency_from_grid(w, n_max)};
    }
    case EqKind::kdv: {
      std::vector<double> up = grid_samples(u, grid);
      std::vector<double> uxp = grid_samples(derivative(u), grid);
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) w[j] = up[j] * uxp[j];
      return {tendency_from_grid(w, n_max)};
    }
    case EqKind::kdv_mkdv: {
      std::vector<double> up = grid_samples(u, grid);
      std::vector<double> uxp = grid_samples(derivative(u), grid);
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        w[j] = (up[j] + double(eq.sign) * up[j] * up[j]) * uxp[j];
      }
      return {tendency_from_grid(w, n_max)};
    }
    case EqKind::mkdv_mkdv_system: {
      const SpectralField& v = state.comps[1];
      if (v.n_max() != n_max) {
        throw std::invalid_argument("evaluate_rhs: component bands differ");
      }
      std::vector<double> up = grid_samples(u, grid);
      std::vector<double> vp = grid_samples(v, grid);
      std::vector<double> wu(up.size()), wv(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        wu[j] = up[j] * vp[j] * vp[j];  // u v², then ∂x below
        wv[j] = vp[j] * up[j] * up[j];
      }
      SpectralField tu = derivative(forward_transform(wu, n_max));
      SpectralField tv = derivative(forward_transform(wv, n_max));
      tu.set_coef(0, cplx{0.0, 0.0});
      tv.set_coef(0, cplx{0.0, 0.0});
      return {tu, tv};
    }
  }
  throw std::logic_error("evaluate_rhs: unreachable");
}

NonlinearitySplit split_renormalized(const SpectralField& u) {
  int n_max = u.n_max();
  // Direct (*)-filtered convolution.  The alternative subtraction form
  // Σ_(*) = T₃ - 3 S₂ u^(n) + 3 |u^(n)|² u^(n) runs large mean-mode
  // products through a cancellation, so near-degenerate data (a small
  // u^(n) under a large mean) leaves the tiny star sum buried in their
  // roundoff; summing only the surviving triples keeps every addend on
  // the scale of the result.  This is a small-band diagnostic and the
  // cubic loop is cheap there.
  auto at = [&u, n_max](int m) -> cplx {
    if (std::abs(m) > n_max) return cplx{0.0, 0.0};
    return m >= 0 ? u.coef(m) : std::conj(u.coef(-m));
  };
  NonlinearitySplit out{SpectralField(n_max), SpectralField(n_max)};
  for (int n = 1; n <= n_max; ++n) {
    cplx un = u.coef(n);
    cplx res = cplx{0.0, double(n)} * un * std::conj(un) * un;
    cplx star{0.0, 0.0};
    for (int a = -n_max; a <= n_max; ++a) {
      for (int b = -n_max; b <= n_max; ++b) {
        int c = n - a - b;
        if (std::abs(c) > n_max) continue;
        if (a + b == 0 || a + c == 0 || b + c == 0) continue;
        star += at(a) * at(b) * at(c);
      }
    }
    out.resonant.set_coef(n, res);
    out.nonresonant.set_coef(n, cplx{0.0, double(n)} * star);
  }
  return out;
}

double mean_integral(const SpectralField& u) { return u.coef(0).real(); }

double mass_integral(const SpectralField& u) {
  return l2_norm_sq(u) / kTwoPi;
}

namespace {

// ∫ f(samples of all fields) dx by exact band-limited quadrature.
double grid_integral(const std::vector<double>& w, int grid) {
  double s = 0.0;
  for (double v : w) s += v;
  return s * kTwoPi / double(grid);
}

}  // namespace

double energy_integral(const EquationSpec& eq, const SystemState& state) {
  eq.validate();
  const SpectralField& u = state.comps[0];
  int n_max = u.n_max();
  int grid = dealias_grid(n_max, 4);  // quartic-safe quadrature
  std::vector<double> up = inverse_transform(u, grid);
  // ∫ u_x² is cheapest in coefficients: (1/2π) Σ n² |u^|².
  double grad_u = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    grad_u += 2.0 * double(n) * double(n) * std::norm(u.coef(n));
  }
  grad_u /= kTwoPi;

  switch (eq.kind) {
    case EqKind::mkdv:
    case EqKind::renormalized_mkdv: {
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        double u2 = up[j] * up[j];
        w[j] = double(eq.sign) * u2 * u2 / 12.0;
      }
      return grad_u / 2.0 + grid_integral(w, grid);
    }
    case EqKind::kdv: {
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        w[j] = up[j] * up[j] * up[j] / 6.0;
      }
      return grad_u / 2.0 + grid_integral(w, grid);
    }
    case EqKind::kdv_mkdv: {
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        double u2 = up[j] * up[j];
        w[j] = up[j] * u2 / 6.0 + double(eq.sign) * u2 * u2 / 12.0;
      }
      return grad_u / 2.0 + grid_integral(w, grid);
    }
    case EqKind::mkdv_mkdv_system: {
      const SpectralField& v = state.comps[1];
      std::vector<double> vp = inverse_transform(v, grid);
      double grad_v = 0.0;
      for (int n = 1; n <= v.n_max(); ++n) {
        grad_v += 2.0 * double(n) * double(n) * std::norm(v.coef(n));
      }
      grad_v /= kTwoPi;
      std::vector<double> w(up.size());
      for (std::size_t j = 0; j < up.size(); ++j) {
        w[j] = up[j] * up[j] * vp[j] * vp[j] / 2.0;
      }
      return (grad_u + grad_v) / 2.0 + grid_integral(w, grid);
    }
  }
  throw std::logic_error("energy_integral: unreachable");
}

SpectralField translate_field(const SpectralField& u, double shift) {
  std::vector<cplx> half = u.half();
  for (int n = 0; n < int(half.size()); ++n) {
    double ph = -double(n) * shift;
    half[std::size_t(n)] *= cplx{std::cos(ph), std::sin(ph)};
  }
  return SpectralField::from_half(std::move(half));
}

SpectralField miura_field(const SpectralField& u, double alpha, double beta) {
  int n_max = u.n_max();
  int out_band = 2 * n_max;
  int grid = dealias_grid(n_max, 4);  // holds the squared band exactly
  std::vector<double> up = inverse_transform(u, grid);
  std::vector<double> w(up.size());
  for (std::size_t j = 0; j < up.size(); ++j) w[j] = alpha * up[j] * up[j];
  SpectralField sq = forward_transform(w, out_band);
  SpectralField ux = derivative(u);
  std::vector<cplx> half = sq.half();
  for (int n = 0; n <= n_max; ++n) {
    half[std::size_t(n)] += beta * ux.coef(n);
  }
  return SpectralField::from_half(std::move(half));
}

}  // namespace kdvlab
