#pragma once
// Thin FFTW3 wrapper: real <-> complex transforms of arbitrary size with a
// process-wide plan cache. Plans are created lazily under a mutex (FFTW
// planning is not thread-safe); execution copies through cached aligned
// buffers, also under the lock. The hot loops of this project do their FFTs
// outside of worker threads, so serializing here costs nothing.

#include <complex>
#include <vector>

namespace kdvlab::fft {

// Forward DFT of a real sequence: out[k] = Σ_j in[j] e^{-2πi jk/n},
// k = 0..n/2. `out` must have n/2+1 slots.
void r2c(const double* in, std::complex<double>* out, int n);

// Hermitian synthesis (FFTW c2r, unnormalized): treats `in[0..n/2]` as the
// non-negative frequencies of a Hermitian sequence and returns
// out[j] = Σ_{k=-n/2..n/2} X_k e^{+2πi jk/n}. Callers apply their own
// normalization.
void c2r(const std::complex<double>* in, double* out, int n);

// Forward complex DFT: out[k] = Σ_j in[j] e^{-2πi jk/n} (unnormalized,
// FFTW sign convention FFTW_FORWARD). `in` and `out` hold n entries and may
// not alias.
void c2c_forward(const std::complex<double>* in, std::complex<double>* out,
                 int n);

// Smallest 5-smooth size (2^a 3^b 5^c) >= minimum; FFTW is fast for these.
int fast_size(int minimum);

}  // namespace kdvlab::fft
