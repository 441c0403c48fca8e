#pragma once
// Even frequency symbols a(n) used as norm weights and energy multipliers,
// together with the regularity checks that admissible symbol classes demand.

#include <functional>
#include <memory>
#include <string>

namespace kdvlab {

// An even, strictly positive weight on integer frequencies. Call with any
// sign; evaluation uses |n|.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::function<double(int)> eval_abs)
      : eval_(std::move(eval_abs)) {}

  double operator()(int n) const { return eval_(n < 0 ? -n : n); }
  bool valid() const { return bool(eval_); }

 private:
  std::function<double(int)> eval_;
};

// a(n) = <n>^exponent with <n> = sqrt(1+n²). The H^s norm weight is
// sobolev_symbol(2s).
Symbol sobolev_symbol(double exponent);

// Blockwise-constant power law: a(n) = 2^{2 k(n) (s+eps)} where k(n) is the
// dyadic block of n. This is the reference growth law for multiplier probes.
Symbol block_power_symbol(double s, double eps);

// Result of the symbol-class audit on 1 <= n <= n_max:
//   neighbor_ratio   sup of max(a(n+1)/a(n), a(n)/a(n+1))
//   diff1, diff2     sup of |Δ a(n)| <n> / a(n) and |Δ² a(n)| <n>² / a(n)
//                    (forward differences)
//   growth           sup over 1 <= m <= n of a(n)/a(m) / (n/m)^{2(s+eps)}
//   decay            sup over 1 <= m <= n of a(m)/a(n)   (monotone defect)
struct SymbolClassReport {
  double neighbor_ratio = 0.0;
  double diff1 = 0.0;
  double diff2 = 0.0;
  double growth = 0.0;
  double decay = 0.0;
};

// Audit a symbol against the class S(s, eps) on [1, n_max]. Returns the
// measured constants; callers decide what counts as a violation.
SymbolClassReport symbol_class_report(const Symbol& a, double s, double eps,
                                      int n_max);

// Throwing variant used by constructors: rejects the symbol with a
// std::runtime_error naming the violated property when a measured constant
// exceeds the given cap.
void require_symbol_class(const Symbol& a, double s, double eps, int n_max,
                          double cap, const std::string& who);

}  // namespace kdvlab
