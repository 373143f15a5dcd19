#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace nlsv {

using Complex = std::complex<double>;

namespace detail {
void* fft_alloc(std::size_t bytes);
void fft_free(void* p) noexcept;
}  // namespace detail

// Allocator returning SIMD-aligned storage so that cached FFTW plans can be
// executed on any buffer.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = detail::fft_alloc(n * sizeof(T));
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { detail::fft_free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<Complex, AlignedAllocator<Complex>>;

// In-place unnormalized 3D transforms on an n^3 cube, x fastest.
//   forward:  out_k = sum_j in_j e^{-i k.x_j}
//   backward: out_j = sum_k in_k e^{+i k.x_j}
void fft3_forward(ComplexBuffer& data, int n);
void fft3_backward(ComplexBuffer& data, int n);

}  // namespace nlsv
