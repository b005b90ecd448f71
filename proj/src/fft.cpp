#include "mkin/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>

namespace mkin::fft {

namespace {

std::mutex plan_mutex;

std::string key_of(const char* tag, const std::vector<int>& dims, long howmany, int sign) {
  std::string k = tag;
  for (int d : dims) k += ":" + std::to_string(d);
  k += "#" + std::to_string(howmany) + "@" + std::to_string(sign);
  return k;
}

fftw_plan get_plan(const std::string& key, auto make) {
  static std::map<std::string, fftw_plan>& cache = *new std::map<std::string, fftw_plan>();
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  fftw_plan p = make();
  cache.emplace(key, p);
  return p;
}

}  // namespace

void dft(std::complex<double>* data, const std::vector<int>& dims, int sign) {
  const std::string key = key_of("c", dims, 1, sign);
  fftw_plan plan = get_plan(key, [&] {
    long n = 1;
    for (int d : dims) n *= d;
    fftw_complex* buf = fftw_alloc_complex(n);
    fftw_plan p = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    return p;
  });
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, d, d);
}

void dft_v3_batch(std::complex<double>* data, long howmany, int n, int sign) {
  const std::string key = key_of("b", {n, n, n}, howmany, sign);
  fftw_plan plan = get_plan(key, [&] {
    const long block = static_cast<long>(n) * n * n;
    fftw_complex* buf = fftw_alloc_complex(block * howmany);
    int dims[3] = {n, n, n};
    fftw_plan p = fftw_plan_many_dft(3, dims, static_cast<int>(howmany), buf, nullptr, 1,
                                     static_cast<int>(block), buf, nullptr, 1,
                                     static_cast<int>(block), sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    return p;
  });
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan, d, d);
}

void r2c_3d(double* in, std::complex<double>* out, int n) {
  const std::string key = key_of("r2c", {n, n, n}, 1, -1);
  fftw_plan plan = get_plan(key, [&] {
    double* rbuf = fftw_alloc_real(static_cast<long>(n) * n * n);
    fftw_complex* cbuf = fftw_alloc_complex(static_cast<long>(n) * n * (n / 2 + 1));
    fftw_plan p = fftw_plan_dft_r2c_3d(n, n, n, rbuf, cbuf, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(cbuf);
    fftw_free(rbuf);
    return p;
  });
  fftw_execute_dft_r2c(plan, in, reinterpret_cast<fftw_complex*>(out));
}

void c2r_3d(std::complex<double>* in, double* out, int n) {
  const std::string key = key_of("c2r", {n, n, n}, 1, +1);
  fftw_plan plan = get_plan(key, [&] {
    double* rbuf = fftw_alloc_real(static_cast<long>(n) * n * n);
    fftw_complex* cbuf = fftw_alloc_complex(static_cast<long>(n) * n * (n / 2 + 1));
    fftw_plan p = fftw_plan_dft_c2r_3d(n, n, n, cbuf, rbuf, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(cbuf);
    fftw_free(rbuf);
    return p;
  });
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace mkin::fft
