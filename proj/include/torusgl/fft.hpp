#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace tgl::detail {

// In-place 2-D complex FFT on an n x n array, row-major.  Plans are cached per
// (n, sign); the FFTW planner is serialized, execution on distinct arrays is not.
inline void fft2_inplace(int n, std::complex<double>* data, int sign) {
  static std::mutex planner_mutex;
  static std::map<std::pair<int, int>, fftw_plan> plans;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    const auto key = std::make_pair(n, sign);
    auto it = plans.find(key);
    if (it == plans.end()) {
      std::vector<std::complex<double>> probe(static_cast<size_t>(n) * n);
      plan = fftw_plan_dft_2d(n, n,
                              reinterpret_cast<fftw_complex*>(probe.data()),
                              reinterpret_cast<fftw_complex*>(probe.data()),
                              sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
      plans.emplace(key, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

inline void fft2_forward(int n, std::complex<double>* data) {
  fft2_inplace(n, data, FFTW_FORWARD);
}

inline void fft2_backward(int n, std::complex<double>* data) {
  fft2_inplace(n, data, FFTW_BACKWARD);
}

}  // namespace tgl::detail
