#include "kdvlab/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>

namespace kdvlab::fft {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;   // r2c
  fftw_plan bwd = nullptr;   // c2r
  double* real = nullptr;    // n doubles (fftw-aligned)
  fftw_complex* cplx = nullptr;  // n/2+1 entries
  int n = 0;
};

struct PlanC2C {
  fftw_plan fwd = nullptr;       // complex forward (FFTW_FORWARD)
  fftw_complex* buf = nullptr;   // n entries, in-place
  int n = 0;
};

std::mutex g_mutex;
std::map<int, PlanPair>& cache() {
  static std::map<int, PlanPair> c;
  return c;
}

std::map<int, PlanC2C>& cache_c2c() {
  static std::map<int, PlanC2C> c;
  return c;
}

PlanC2C& plans_c2c_for(int n) {
  auto it = cache_c2c().find(n);
  if (it != cache_c2c().end()) return it->second;
  PlanC2C p;
  p.n = n;
  p.buf = fftw_alloc_complex(n);
  p.fwd = fftw_plan_dft_1d(n, p.buf, p.buf, FFTW_FORWARD, FFTW_ESTIMATE);
  return cache_c2c().emplace(n, p).first->second;
}

PlanPair& plans_for(int n) {
  auto it = cache().find(n);
  if (it != cache().end()) return it->second;
  PlanPair p;
  p.n = n;
  p.real = fftw_alloc_real(n);
  p.cplx = fftw_alloc_complex(n / 2 + 1);
  // FFTW_ESTIMATE keeps planning deterministic and cheap; these sizes are
  // 5-smooth so the difference from MEASURE is negligible.
  p.fwd = fftw_plan_dft_r2c_1d(n, p.real, p.cplx, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_c2r_1d(n, p.cplx, p.real, FFTW_ESTIMATE);
  return cache().emplace(n, p).first->second;
}

}  // namespace

void r2c(const double* in, std::complex<double>* out, int n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanPair& p = plans_for(n);
  std::memcpy(p.real, in, sizeof(double) * n);
  fftw_execute(p.fwd);
  // std::complex<double> is layout-compatible with fftw_complex (double[2]).
  std::memcpy(static_cast<void*>(out), p.cplx,
              sizeof(fftw_complex) * (n / 2 + 1));
}

void c2r(const std::complex<double>* in, double* out, int n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanPair& p = plans_for(n);
  std::memcpy(p.cplx, in, sizeof(fftw_complex) * (n / 2 + 1));
  fftw_execute(p.bwd);
  std::memcpy(out, p.real, sizeof(double) * n);
}

void c2c_forward(const std::complex<double>* in, std::complex<double>* out,
                 int n) {
  std::lock_guard<std::mutex> lock(g_mutex);
  PlanC2C& p = plans_c2c_for(n);
  std::memcpy(p.buf, in, sizeof(fftw_complex) * n);
  fftw_execute(p.fwd);
  std::memcpy(static_cast<void*>(out), p.buf, sizeof(fftw_complex) * n);
}

int fast_size(int minimum) {
  if (minimum < 2) return 2;
  for (int n = minimum;; ++n) {
    int m = n;
    for (int f : {2, 3, 5}) {
      while (m % f == 0) m /= f;
    }
    if (m == 1) return n;
  }
}

}  // namespace kdvlab::fft
