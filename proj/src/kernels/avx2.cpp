// Compiled with -mavx2 -mpopcnt; only reached after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "ibc/kernels.hpp"

namespace ibc::kernels {

namespace {

void synthesize_sheets_avx2(const SheetInputs& in, const SheetCoefficients& k, const SheetOutputs& out) {
  const std::size_t n = in.tv_mean.size();
  const __m256d two_theta = _mm256_set1_pd(k.two_theta);
  const __m256d gamma = _mm256_set1_pd(k.gamma);
  const __m256d omg = _mm256_set1_pd(k.one_minus_gamma);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d l = _mm256_loadu_pd(in.lending.data() + i);
    const __m256d b = _mm256_loadu_pd(in.borrowing.data() + i);
    __m256d ta = _mm256_div_pd(_mm256_loadu_pd(in.tv_mean.data() + i), two_theta);
    if (k.clamp) {
      ta = _mm256_max_pd(ta, l);
      ta = _mm256_max_pd(ta, _mm256_div_pd(b, omg));
    }
    __m256d d = _mm256_sub_pd(_mm256_mul_pd(omg, ta), b);
    if (k.clamp) d = _mm256_max_pd(d, zero);
    _mm256_storeu_pd(out.total_assets.data() + i, ta);
    _mm256_storeu_pd(out.external_assets.data() + i, _mm256_sub_pd(ta, l));
    _mm256_storeu_pd(out.capital.data() + i, _mm256_mul_pd(gamma, ta));
    _mm256_storeu_pd(out.deposits.data() + i, d);
  }
  if (i < n) {
    const SheetInputs tail_in{in.lending.subspan(i), in.borrowing.subspan(i), in.tv_mean.subspan(i)};
    const SheetOutputs tail_out{out.total_assets.subspan(i), out.external_assets.subspan(i),
                                out.capital.subspan(i), out.deposits.subspan(i)};
    scalar().synthesize_sheets(tail_in, k, tail_out);
  }
}

std::size_t scan_crossings_avx2(std::span<const std::int64_t> shock, std::span<const std::int64_t> threshold,
                                std::span<const std::uint8_t> defaulted, std::span<std::uint32_t> out) {
  const std::size_t n = shock.size();
  const __m256i zero = _mm256_setzero_si256();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(shock.data() + i));
    const __m256i t = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(threshold.data() + i));
    std::int32_t flags;
    __builtin_memcpy(&flags, defaulted.data() + i, 4);
    const __m256i def = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(flags));
    const __m256i below = _mm256_cmpgt_epi64(t, s);
    const __m256i alive = _mm256_cmpeq_epi64(def, zero);
    const __m256i hit = _mm256_andnot_si256(below, alive);
    unsigned mask = static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(hit)));
    while (mask) {
      const int lane = std::countr_zero(mask);
      out[count++] = static_cast<std::uint32_t>(i + static_cast<std::size_t>(lane));
      mask &= mask - 1;
    }
  }
  for (; i < n; ++i)
    if (!defaulted[i] && shock[i] >= threshold[i]) out[count++] = static_cast<std::uint32_t>(i);
  return count;
}

void or_into_avx2(std::span<std::uint64_t> dst, std::span<const std::uint64_t> src) {
  const std::size_t n = dst.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    auto* d = reinterpret_cast<__m256i*>(dst.data() + i);
    const __m256i v = _mm256_or_si256(_mm256_loadu_si256(d),
                                      _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src.data() + i)));
    _mm256_storeu_si256(d, v);
  }
  for (; i < n; ++i) dst[i] |= src[i];
}

std::size_t advance_frontier_avx2(std::span<std::uint64_t> next, std::span<std::uint64_t> visited) {
  const std::size_t n = next.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    auto* np = reinterpret_cast<__m256i*>(next.data() + i);
    auto* vp = reinterpret_cast<__m256i*>(visited.data() + i);
    const __m256i v = _mm256_loadu_si256(vp);
    const __m256i fresh = _mm256_andnot_si256(v, _mm256_loadu_si256(np));
    _mm256_storeu_si256(np, fresh);
    _mm256_storeu_si256(vp, _mm256_or_si256(v, fresh));
    alignas(32) std::uint64_t words[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(words), fresh);
    for (std::uint64_t w : words) count += static_cast<std::size_t>(std::popcount(w));
  }
  for (; i < n; ++i) {
    next[i] &= ~visited[i];
    visited[i] |= next[i];
    count += static_cast<std::size_t>(std::popcount(next[i]));
  }
  return count;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", synthesize_sheets_avx2, scan_crossings_avx2, or_into_avx2,
                                 advance_frontier_avx2};
  return table;
}

}  // namespace ibc::kernels
