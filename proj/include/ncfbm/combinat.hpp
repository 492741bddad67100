#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ncfbm {

/// A perfect matching of {1,...,2m}. Blocks are stored as (p,q) with p<q,
/// sorted by p, which is the order the enumerators produce them in.
struct Pairing {
  std::vector<std::pair<int, int>> blocks;

  int size() const { return static_cast<int>(blocks.size()); }
  bool operator==(const Pairing&) const = default;
  auto operator<=>(const Pairing&) const = default;

  /// "(1,4)(2,3)"
  std::string to_string() const;
};

/// Number of interleaved block pairs p1<p2<q1<q2.
struct CrossingCount {
  std::int64_t value = 0;
  bool operator==(const CrossingCount&) const = default;
};

/// Caps on the list-returning and streaming enumerators.
inline constexpr int kPairingListCap = 8;
inline constexpr int kPairingVisitCap = 10;
inline constexpr int kNoncrossingCap = 12;
inline constexpr int kCatalanCap = 30;

/// (2m-1)!!, the number of pairings of 2m points.
std::uint64_t double_factorial_odd(int m);

/// C_m = (2m)!/(m!(m+1)!), exact for m <= 30.
std::uint64_t catalan(int m);

CrossingCount crossing_number(const Pairing& p);

/// All (2m-1)!! pairings of {1..2m} in canonical form, deterministic order.
/// Throws SizeLimitError past kPairingListCap.
std::vector<Pairing> enumerate_pairings(int m);

/// The catalan(m) non-crossing pairings. Throws SizeLimitError past kNoncrossingCap.
std::vector<Pairing> enumerate_noncrossing(int m);

/// Streaming traversal. The visitor receives the current blocks (0-based
/// indices into the word) and the crossing count of the full pairing. The
/// block list is only valid for the duration of the call. Drive each
/// traversal from a single thread.
using PairingVisitor =
    std::function<void(const std::vector<std::pair<int, int>>& blocks0, std::int64_t crossings)>;

/// Visits all pairings of 2m points; m <= kPairingVisitCap.
void for_each_pairing(int m, const PairingVisitor& visit);

/// Visits all non-crossing pairings of 2m points; m <= kNoncrossingCap.
void for_each_noncrossing(int m, const PairingVisitor& visit);

}  // namespace ncfbm
