#include <bit>

#include "kernels_impl.hpp"

namespace shapcf::kernels::detail {

namespace {

double dot_ref(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance_ref(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void squared_distances_ref(const double* query, const double* rows,
                           std::size_t n_rows, std::size_t dim, double* out) {
  for (std::size_t r = 0; r < n_rows; ++r) {
    out[r] = squared_distance_ref(query, rows + r * dim, dim);
  }
}

void bit_or_ref(std::uint64_t* dst, const std::uint64_t* src, std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) dst[i] |= src[i];
}

void bit_andnot_ref(std::uint64_t* dst, const std::uint64_t* src,
                    std::size_t words) {
  for (std::size_t i = 0; i < words; ++i) dst[i] &= ~src[i];
}

std::size_t popcount_ref(const std::uint64_t* words, std::size_t n) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) total += std::popcount(words[i]);
  return total;
}

}  // namespace

const KernelTable kReferenceTable = {
    "ref",          dot_ref,       squared_distance_ref, axpy_ref,
    squared_distances_ref, bit_or_ref, bit_andnot_ref,   popcount_ref,
};

}  // namespace shapcf::kernels::detail
