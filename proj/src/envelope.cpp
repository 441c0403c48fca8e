#include "kdvlab/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kdvlab/util.hpp"

namespace kdvlab {

double FrequencyEnvelope::beta_at(int k) const {
  if (k < 0) throw std::invalid_argument("beta_at: negative block");
  if (k < blocks) return beta[std::size_t(k)];
  double cmax = 0.0;
  for (double v : c) cmax = std::max(cmax, v);
  double best = std::exp2(-(eps / 2.0) * double(k)) * cmax;
  for (int m = 0; m < blocks; ++m) {
    best = std::max(best,
                    std::exp2(-(eps / 2.0) * double(k - m)) * c[std::size_t(m)]);
  }
  return best;
}

double FrequencyEnvelope::sum_bound() const {
  return 2.0 / (1.0 - std::exp2(-eps / 2.0));
}

FrequencyEnvelope build_envelope(const SpectralField& u0, double s,
                                 double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_envelope: eps <= 0");
  FrequencyEnvelope env;
  env.s = s;
  env.eps = eps;
  env.blocks = dyadic_block_count(u0.n_max());
  env.c.assign(std::size_t(env.blocks), 0.0);
  for (int m = 0; m < env.blocks; ++m) {
    double mass = l2_norm_sq(project_dyadic(u0, m));
    env.c[std::size_t(m)] = std::exp2(2.0 * s * double(m)) * mass;
    env.norm_sq += env.c[std::size_t(m)];
  }
  if (!(env.norm_sq > 0.0)) {
    throw std::runtime_error(
        "undefined envelope: zero field has no frequency envelope");
  }
  for (double& v : env.c) v /= env.norm_sq;

  double cmax = 0.0;
  for (double v : env.c) cmax = std::max(cmax, v);
  env.beta.assign(std::size_t(env.blocks), 0.0);
  for (int k = 0; k < env.blocks; ++k) {
    double best = std::exp2(-(eps / 2.0) * double(k)) * cmax;
    for (int m = 0; m < env.blocks; ++m) {
      best = std::max(best, std::exp2(-(eps / 2.0) * std::abs(k - m)) *
                                env.c[std::size_t(m)]);
    }
    env.beta[std::size_t(k)] = best;
  }
  return env;
}

std::string envelope_to_csv(const FrequencyEnvelope& env) {
  std::string out = "n,c_n,beta_n\n";
  for (int k = 0; k < env.blocks; ++k) {
    out += str_printf("%d,%.17g,%.17g\n", k, env.c[std::size_t(k)],
                      env.beta[std::size_t(k)]);
  }
  return out;
}

Symbol envelope_symbol(const FrequencyEnvelope& env) {
  // Tabulate y_k = log2(2^{2ks}/beta_k) far past the data band, then C¹
  // Catmull-Rom in (log2 n, y).
  constexpr int kTableBlocks = 44;
  std::vector<double> y(kTableBlocks);
  for (int k = 0; k < kTableBlocks; ++k) {
    y[std::size_t(k)] = 2.0 * env.s * double(k) - std::log2(env.beta_at(k));
  }
  std::vector<double> slope(kTableBlocks);
  for (int k = 0; k < kTableBlocks; ++k) {
    if (k == 0) {
      slope[0] = y[1] - y[0];
    } else if (k == kTableBlocks - 1) {
      slope[std::size_t(k)] = y[std::size_t(k)] - y[std::size_t(k) - 1];
    } else {
      slope[std::size_t(k)] = (y[std::size_t(k) + 1] - y[std::size_t(k) - 1]) / 2.0;
    }
  }
  auto eval = [y, slope](int n_abs) -> double {
    double t = n_abs <= 1 ? 0.0 : std::log2(double(n_abs));
    int k = std::min(int(t), kTableBlocks - 2);
    double u = t - double(k);
    double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
    double h10 = u * (1.0 - u) * (1.0 - u);
    double h01 = u * u * (3.0 - 2.0 * u);
    double h11 = u * u * (u - 1.0);
    double yk = y[std::size_t(k)], yk1 = y[std::size_t(k) + 1];
    double mk = slope[std::size_t(k)], mk1 = slope[std::size_t(k) + 1];
    return std::exp2(h00 * yk + h10 * mk + h01 * yk1 + h11 * mk1);
  };
  Symbol a{eval};
  // Class audit with documented caps: generous enough for admissible
  // envelopes, tight enough to reject spiky or runaway symbols.
  int check_to = 4 << std::min(10, std::max(1, env.blocks));
  double rate = 2.0 * (env.s + env.eps);
  double cap = std::max(8.0, 8.0 * (rate + 1.0) * (rate + 1.0));
  require_symbol_class(a, env.s, env.eps, check_to, cap, "envelope_symbol");
  return a;
}

}  // namespace kdvlab
