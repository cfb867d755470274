#include <bit>

#include "ibc/kernels.hpp"

namespace ibc::kernels {

namespace {

void synthesize_sheets_scalar(const SheetInputs& in, const SheetCoefficients& k, const SheetOutputs& out) {
  const std::size_t n = in.tv_mean.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double l = in.lending[i];
    const double b = in.borrowing[i];
    double ta = in.tv_mean[i] / k.two_theta;
    if (k.clamp) {
      ta = ta > l ? ta : l;
      const double floor_ta = b / k.one_minus_gamma;
      ta = ta > floor_ta ? ta : floor_ta;
    }
    double d = k.one_minus_gamma * ta;
    d = d - b;
    if (k.clamp) d = d > 0.0 ? d : 0.0;
    out.total_assets[i] = ta;
    out.external_assets[i] = ta - l;
    out.capital[i] = k.gamma * ta;
    out.deposits[i] = d;
  }
}

std::size_t scan_crossings_scalar(std::span<const std::int64_t> shock, std::span<const std::int64_t> threshold,
                                  std::span<const std::uint8_t> defaulted, std::span<std::uint32_t> out) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < shock.size(); ++i)
    if (!defaulted[i] && shock[i] >= threshold[i]) out[count++] = static_cast<std::uint32_t>(i);
  return count;
}

void or_into_scalar(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] |= src[i];
}

std::size_t advance_frontier_scalar(std::span<std::uint64_t> next, std::span<std::uint64_t> visited) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < next.size(); ++i) {
    next[i] &= ~visited[i];
    visited[i] |= next[i];
    count += static_cast<std::size_t>(std::popcount(next[i]));
  }
  return count;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{"scalar", synthesize_sheets_scalar, scan_crossings_scalar, or_into_scalar,
                                 advance_frontier_scalar};
  return table;
}

}  // namespace ibc::kernels
