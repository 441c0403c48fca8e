#include "kdvlab/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "kdvlab/spectrum.hpp"
#include "kdvlab/util.hpp"

namespace kdvlab {

namespace {

inline __int128 cube(long long n) {
  return __int128(n) * n * n;
}

inline void require_zero_sum(long long s, const char* who) {
  if (s != 0) {
    throw std::invalid_argument(std::string(who) + ": tuple does not sum to zero");
  }
}

}  // namespace

long long omega4(int n1, int n2, int n3, int n4) {
  require_zero_sum((long long)n1 + n2 + n3 + n4, "omega4");
  __int128 factored = __int128(-3) * (n1 + n2) * (__int128)(n1 + n3) * (n2 + n3);
  __int128 direct = cube(n1) + cube(n2) + cube(n3) + cube(n4);
  if (factored != direct) {
    throw std::logic_error("omega4: factorization mismatch (overflow?)");
  }
  return (long long)direct;
}

long long omega3(int n1, int n2, int n3) {
  require_zero_sum((long long)n1 + n2 + n3, "omega3");
  __int128 factored = __int128(3) * n1 * (__int128)n2 * n3;
  __int128 direct = cube(n1) + cube(n2) + cube(n3);
  if (factored != direct) {
    throw std::logic_error("omega3: factorization mismatch (overflow?)");
  }
  return (long long)direct;
}

long long omega6(int n1, int n2, int n3, int n4, int n5, int n6) {
  require_zero_sum((long long)n1 + n2 + n3 + (long long)n4 + n5 + n6, "omega6");
  long long p = (long long)n4 + n5 + n6;  // = -(n1+n2+n3)
  if (std::abs(p) > (1 << 22)) {
    throw std::invalid_argument("omega6: pivot out of the exact range");
  }
  // Split through the pivot: both groups are zero-sum quadruples.
  __int128 g1 = cube(n1) + cube(n2) + cube(n3) + cube(p);
  __int128 g2 = cube(n4) + cube(n5) + cube(n6) + cube(-p);
  __int128 direct =
      cube(n1) + cube(n2) + cube(n3) + cube(n4) + cube(n5) + cube(n6);
  if (g1 + g2 != direct) {
    throw std::logic_error("omega6: pivot decomposition mismatch");
  }
  return (long long)direct;
}

bool star_nonresonant(int n1, int n2, int n3, int n4) {
  require_zero_sum((long long)n1 + n2 + n3 + n4, "star_nonresonant");
  return (n1 + n2) != 0 && (n1 + n3) != 0 && (n2 + n3) != 0;
}

double psi_multiplier(const Symbol& a, int n1, int n2, int n3, int n4) {
  return a(n1) * n1 + a(n2) * n2 + a(n3) * n3 + a(n4) * n4;
}

namespace {

struct ProbeAccum {
  std::map<std::pair<int, int>, MultiplierProbeRow> cells;
  MultiplierProbeReport rep;

  void add(double s, double eps, int n1, int n2, int n3, int n4,
           const Symbol& a) {
    ++rep.sampled;
    if (!star_nonresonant(n1, n2, n3, n4)) {
      ++rep.resonant_skipped;
      return;
    }
    int k[4] = {dyadic_block_of(n1), dyadic_block_of(n2), dyadic_block_of(n3),
                dyadic_block_of(n4)};
    int k1s = std::max(std::max(k[0], k[1]), std::max(k[2], k[3]));
    int big = 0;
    for (int i = 0; i < 4; ++i) {
      if (k[i] >= k1s - 2) ++big;
    }
    // Zero sum makes the second-largest magnitude at least a third of the
    // largest (the other three sum to its negative), so with blocks
    // [2^k, 2^{k+1}) it sits at most two blocks below the top: 2^{k*}/3 is
    // never below 2^{k*-2}.  A tuple with a lone big frequency is impossible.
    if (big < 2) {
      throw std::logic_error("multiplier probe: single-big tuple encountered");
    }
    int case_id = (big == 4) ? 1 : (big == 3 ? 2 : 3);
    double psi = psi_multiplier(a, n1, n2, n3, n4);
    double omega = double(omega4(n1, n2, n3, n4));
    double top = std::exp2(double(k1s));
    double atilde = std::exp2(2.0 * (s + eps) * double(k1s));
    double ratio = std::abs(psi) * top * top / (atilde * std::abs(omega));
    auto& cell = cells[{case_id, k1s}];
    cell.case_id = case_id;
    cell.k1star = k1s;
    cell.sup_ratio = std::max(cell.sup_ratio, ratio);
    ++cell.count;
    rep.sup_overall = std::max(rep.sup_overall, ratio);
    rep.sup_by_case[case_id] = std::max(rep.sup_by_case[case_id], ratio);
  }

  MultiplierProbeReport finish() {
    for (auto& kv : cells) rep.rows.push_back(kv.second);
    return std::move(rep);
  }
};

}  // namespace

std::string MultiplierProbeReport::to_csv() const {
  std::string out = "case,k1star,ratio,count\n";
  for (const auto& r : rows) {
    out += str_printf("%d,%d,%.17g,%lld\n", r.case_id, r.k1star, r.sup_ratio,
                      r.count);
  }
  return out;
}

MultiplierProbeReport multiplier_bound_probe_random(double s, double eps,
                                                    int n_range,
                                                    long long tuple_count,
                                                    uint64_t seed) {
  Symbol a = block_power_symbol(s, eps);
  Rng rng(seed);
  ProbeAccum acc;
  long long kept = 0;
  while (kept < tuple_count) {
    int span = 2 * n_range + 1;
    int n1 = int(rng.next_u64() % std::uint64_t(span)) - n_range;
    int n2 = int(rng.next_u64() % std::uint64_t(span)) - n_range;
    int n3 = int(rng.next_u64() % std::uint64_t(span)) - n_range;
    long long n4 = -((long long)n1 + n2 + n3);
    if (std::abs(n4) > n_range) continue;
    acc.add(s, eps, n1, n2, n3, int(n4), a);
    ++kept;
  }
  return acc.finish();
}

MultiplierProbeReport multiplier_bound_probe_exhaustive(double s, double eps,
                                                        int n_range) {
  Symbol a = block_power_symbol(s, eps);
  ProbeAccum acc;
  for (int n1 = -n_range; n1 <= n_range; ++n1) {
    for (int n2 = -n_range; n2 <= n_range; ++n2) {
      for (int n3 = -n_range; n3 <= n_range; ++n3) {
        long long n4 = -((long long)n1 + n2 + n3);
        if (std::abs(n4) > n_range) continue;
        acc.add(s, eps, n1, n2, n3, int(n4), a);
      }
    }
  }
  return acc.finish();
}

}  // namespace kdvlab
