#ifndef SPIX_MAT_HPP
#define SPIX_MAT_HPP

#include <cstddef>
#include <vector>

namespace spix {

/// Dense row-major matrix, sized for small-network batches.
template <class T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c) {}

  T* row(int r) { return v.data() + static_cast<std::size_t>(r) * cols; }
  const T* row(int r) const { return v.data() + static_cast<std::size_t>(r) * cols; }

  T& at(int r, int c) { return v[static_cast<std::size_t>(r) * cols + c]; }
  T at(int r, int c) const { return v[static_cast<std::size_t>(r) * cols + c]; }

  void fill(T x) { std::fill(v.begin(), v.end(), x); }
};

}  // namespace spix

#endif  // SPIX_MAT_HPP
