#include "nlsv/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "nlsv/error.hpp"

namespace nlsv {

namespace detail {
void* fft_alloc(std::size_t bytes) { return fftw_malloc(bytes); }
void fft_free(void* p) noexcept { fftw_free(p); }
}  // namespace detail

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// The FFTW planner is not thread safe; execution of an existing plan on new
// arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const std::size_t total = static_cast<std::size_t>(n) * n * n;
  ComplexBuffer scratch(total);
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair plans;
  plans.forward = fftw_plan_dft_3d(n, n, n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
  plans.backward = fftw_plan_dft_3d(n, n, n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans.forward || !plans.backward) fail(ErrorCode::Numerical, "FFTW planning failed");
  return cache.emplace(n, plans).first->second;
}

void check_size(const ComplexBuffer& data, int n) {
  require(data.size() == static_cast<std::size_t>(n) * n * n, "fft: buffer size is not n^3");
}

}  // namespace

void fft3_forward(ComplexBuffer& data, int n) {
  check_size(data, n);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(n).forward, p, p);
}

void fft3_backward(ComplexBuffer& data, int n) {
  check_size(data, n);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_for(n).backward, p, p);
}

}  // namespace nlsv
