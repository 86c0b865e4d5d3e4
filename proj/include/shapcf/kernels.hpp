#pragma once

// Data-parallel inner loops used by the utility models and entry sets.
//
// Every kernel has a portable reference implementation and, on x86-64, an
// AVX2/FMA variant. The variant is chosen once per process from the CPU
// capabilities; SHAPCF_SIMD=ref in the environment pins the reference table.
// Floating-point reductions in the vector variants sum in a different order,
// so results agree with the reference to rounding, not bit-for-bit. Bitwise
// kernels are exact.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace shapcf::kernels {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = |query - rows[r]|^2 for a row-major (n_rows x dim) block.
  void (*squared_distances)(const double* query, const double* rows,
                            std::size_t n_rows, std::size_t dim, double* out);
  void (*bit_or)(std::uint64_t* dst, const std::uint64_t* src, std::size_t words);
  // dst &= ~src
  void (*bit_andnot)(std::uint64_t* dst, const std::uint64_t* src,
                     std::size_t words);
  std::size_t (*popcount)(const std::uint64_t* words, std::size_t n);
};

const KernelTable& reference_table();

// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// The table used by the wrappers below.
const KernelTable& active_table();

// Overrides the process-wide selection. Accepts "ref" or "avx2"; returns
// false (and leaves the selection alone) if the request cannot be honoured.
bool select_table(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_table().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a,
                               std::span<const double> b) {
  return active_table().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_table().axpy(alpha, x.data(), y.data(), x.size());
}

inline void squared_distances(std::span<const double> query,
                              std::span<const double> rows,
                              std::span<double> out) {
  active_table().squared_distances(query.data(), rows.data(), out.size(),
                                   query.size(), out.data());
}

inline void bit_or(std::span<std::uint64_t> dst,
                   std::span<const std::uint64_t> src) {
  active_table().bit_or(dst.data(), src.data(), dst.size());
}

inline void bit_andnot(std::span<std::uint64_t> dst,
                       std::span<const std::uint64_t> src) {
  active_table().bit_andnot(dst.data(), src.data(), dst.size());
}

inline std::size_t popcount(std::span<const std::uint64_t> words) {
  return active_table().popcount(words.data(), words.size());
}

}  // namespace shapcf::kernels
