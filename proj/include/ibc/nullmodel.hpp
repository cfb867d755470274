#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ibc/balance.hpp"
#include "ibc/network.hpp"

namespace ibc {

enum class NullModelKind { Empirical, Rewired, Random, FixedWeight, RandomFixedWeight };

inline constexpr NullModelKind kAllNullModelKinds[] = {NullModelKind::Empirical, NullModelKind::Rewired,
                                                       NullModelKind::Random, NullModelKind::FixedWeight,
                                                       NullModelKind::RandomFixedWeight};

std::string_view to_string(NullModelKind kind);
// Accepts the names printed by to_string (case-insensitive) and the short
// forms empirical, rewired, random, fixed, random-fixed.
std::optional<NullModelKind> parse_null_model(std::string_view text);

struct RewireConfig {
  double weight_tolerance = 0.10;        // max |w1 - w2| / max(w1, w2) for a swap
  std::uint32_t swaps_per_edge = 10;
  std::uint32_t max_attempts_factor = 100;
  std::uint64_t seed = 0;
  std::uint64_t total_swaps = 0;         // overrides swaps_per_edge * |E| when non-zero
};

struct RewireOutcome {
  DailyNetwork network;
  std::uint64_t target_swaps = 0;
  std::uint64_t swaps = 0;
  std::uint64_t attempts = 0;
  double final_tolerance = 0;
  // Attempt budget ran out before the target; the network is still valid.
  bool partial() const { return swaps < target_swaps; }
};

// Degree- and weight-preserving double-edge swaps between links of similar
// size: (a->b, w1), (c->d, w2) become (a->d, w1), (c->b, w2). Swaps that would
// create a self-loop, a duplicate or a reciprocal pair are rejected. If fewer
// than 1% of the pairings drawn in a window of 1000 attempts pass the weight
// test, the tolerance doubles. Requires at least two edges.
RewireOutcome rewire(const DailyNetwork& net, const RewireConfig& cfg);

// Same node set, edge count and weight multiset; each weight lands on a
// uniformly drawn ordered pair, without self-loops, duplicates or reciprocal
// pairs. Requires at least two nodes.
DailyNetwork randomize(const DailyNetwork& net, std::uint64_t seed);

// Same topology; every weight becomes total / |E| in money units. When the
// division leaves a remainder r, the first r edges (in lender, borrower
// order) carry one extra unit so total lending is preserved exactly.
DailyNetwork fix_weights(const DailyNetwork& net);

// randomize(fix_weights(net), seed).
DailyNetwork randomize_fixed(const DailyNetwork& net, std::uint64_t seed);

// Generates one network of the given kind. Empirical returns `net` itself.
DailyNetwork generate_null_model(NullModelKind kind, const DailyNetwork& net, std::uint64_t seed,
                                 const RewireConfig& rewire_cfg = {}, RewireOutcome* rewire_info = nullptr);

// Balance sheets for a generated network whose node set equals the original.
// Empirical and Rewired keep the rolling volume `rolling_tv`; the other kinds
// use each bank's same-day L + B in the generated network. Banks left without
// links keep their rolling volume (they carry no interbank position).
std::vector<BalanceSheet> rebuild_sheets(NullModelKind kind, const DailyNetwork& null_net,
                                         std::span<const double> rolling_tv, const Params& p,
                                         SheetPolicy policy = SheetPolicy::Clamp);

// Throws std::logic_error naming the violated quantity if `generated` does
// not preserve what `kind` promises relative to `original`, or breaks the
// netted-network invariants.
void check_preservation(NullModelKind kind, const DailyNetwork& original, const DailyNetwork& generated);

// Reproducible per-replicate seeds from a master seed (SplitMix64 chain over
// master, day index, kind and replicate).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t day, NullModelKind kind, std::uint64_t replicate);

}  // namespace ibc
