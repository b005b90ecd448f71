#pragma once

#include <complex>
#include <vector>

// Thin plan-caching facade over FFTW. Plans are created once per shape with
// FFTW_ESTIMATE (deterministic algorithm choice, reproducible runs) and
// executed through the new-array interface. Unnormalized transforms; callers
// own the scaling.

namespace mkin::fft {

// In-place complex DFT over an arbitrary rank. sign: -1 forward, +1 backward.
void dft(std::complex<double>* data, const std::vector<int>& dims, int sign);

// Batched in-place 3-D complex DFT over the trailing n^3 of each block.
void dft_v3_batch(std::complex<double>* data, long howmany, int n, int sign);

// 3-D real-to-complex / complex-to-real on an n^3 cube; out has n*n*(n/2+1)
// complex entries. c2r destroys its input, per FFTW contract.
void r2c_3d(double* in, std::complex<double>* out, int n);
void c2r_3d(std::complex<double>* in, double* out, int n);

}  // namespace mkin::fft
