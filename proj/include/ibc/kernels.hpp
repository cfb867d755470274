#pragma once

// Dense per-bank inner loops with a scalar reference implementation and an
// AVX2 variant selected at runtime. Every variant must produce bit-identical
// output to the scalar reference; the build disables floating-point
// contraction so separate multiply/subtract steps round the same way.

#include <cstddef>
#include <cstdint>
#include <span>

namespace ibc::kernels {

struct SheetInputs {
  std::span<const double> lending;
  std::span<const double> borrowing;
  std::span<const double> tv_mean;
};

struct SheetOutputs {
  std::span<double> total_assets;
  std::span<double> external_assets;
  std::span<double> capital;
  std::span<double> deposits;
};

struct SheetCoefficients {
  double two_theta = 0.4;        // 2 * theta
  double gamma = 0.05;           // capital / total assets
  double one_minus_gamma = 0.95; // 1 - gamma
  bool clamp = false;            // raise TA to max(TA, L, B / (1 - gamma)), floor D at 0
};

struct KernelTable {
  const char* name;

  // TA = tv / (2 theta), A = TA - L, C = gamma TA, D = (1 - gamma) TA - B,
  // element-wise over equally sized columns.
  void (*synthesize_sheets)(const SheetInputs& in, const SheetCoefficients& k, const SheetOutputs& out);

  // Writes, in ascending order, every index i with !defaulted[i] and
  // shock[i] >= threshold[i]; returns how many were written. `out` must hold
  // shock.size() entries.
  std::size_t (*scan_crossings)(std::span<const std::int64_t> shock, std::span<const std::int64_t> threshold,
                                std::span<const std::uint8_t> defaulted, std::span<std::uint32_t> out);

  // dst |= src over equally sized word arrays.
  void (*or_into)(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src);

  // next &= ~visited; visited |= next; returns popcount(next).
  std::size_t (*advance_frontier)(std::span<std::uint64_t> next, std::span<std::uint64_t> visited);
};

const KernelTable& scalar();

// nullptr when the CPU (or the build) lacks AVX2.
const KernelTable* avx2();

// The table used by the library: AVX2 when available unless the environment
// variable IBC_SIMD is set to "scalar".
const KernelTable& active();

}  // namespace ibc::kernels
