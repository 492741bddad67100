#include "ncfbm/combinat.hpp"

#include <sstream>

#include "ncfbm/errors.hpp"

namespace ncfbm {

namespace {

// Recursive matcher: always pairs the smallest free index with each larger
// free index in increasing order. `crossings` is maintained incrementally:
// a new block (p,q) crosses an existing block (p1,q1) iff p < q1 < q, since
// every existing block has p1 < p.
class Matcher {
 public:
  Matcher(int m, bool noncrossing, const PairingVisitor& visit)
      : n_(2 * m), noncrossing_(noncrossing), visit_(visit), used_(n_, false) {
    blocks_.reserve(m);
  }

  void run() { recurse(0, 0); }

 private:
  void recurse(int first_free, std::int64_t crossings) {
    while (first_free < n_ && used_[first_free]) ++first_free;
    if (first_free == n_) {
      visit_(blocks_, crossings);
      return;
    }
    const int p = first_free;
    used_[p] = true;
    int free_between = 0;
    for (int q = p + 1; q < n_; ++q) {
      if (used_[q]) continue;
      std::int64_t added = 0;
      for (const auto& [p1, q1] : blocks_) {
        if (p < q1 && q1 < q) ++added;
      }
      if (noncrossing_ && (added != 0 || free_between % 2 != 0)) {
        ++free_between;
        continue;
      }
      used_[q] = true;
      blocks_.emplace_back(p, q);
      recurse(p + 1, crossings + added);
      blocks_.pop_back();
      used_[q] = false;
      ++free_between;
    }
    used_[p] = false;
  }

  int n_;
  bool noncrossing_;
  const PairingVisitor& visit_;
  std::vector<bool> used_;
  std::vector<std::pair<int, int>> blocks_;
};

std::vector<Pairing> collect(int m, bool noncrossing) {
  std::vector<Pairing> out;
  out.reserve(noncrossing ? catalan(m) : double_factorial_odd(m));
  Matcher(m, noncrossing, [&](const std::vector<std::pair<int, int>>& b, std::int64_t) {
    Pairing p;
    p.blocks.reserve(b.size());
    for (const auto& [x, y] : b) p.blocks.emplace_back(x + 1, y + 1);
    out.push_back(std::move(p));
  }).run();
  return out;
}

void check_m(int m, int cap, bool noncrossing) {
  if (m < 1) throw ParameterError("pairing enumeration needs m >= 1, got " + std::to_string(m));
  if (m > cap) {
    std::ostringstream os;
    os << "m=" << m << " exceeds the " << (noncrossing ? "non-crossing " : "") << "enumeration cap "
       << cap << " (";
    if (noncrossing) {
      os << catalan(m) << " non-crossing pairings)";
    } else {
      os << "(2m-1)!! = " << double_factorial_odd(m) << " pairings)";
    }
    throw SizeLimitError(os.str());
  }
}

}  // namespace

std::string Pairing::to_string() const {
  std::ostringstream os;
  for (const auto& [p, q] : blocks) os << '(' << p << ',' << q << ')';
  return os.str();
}

std::uint64_t double_factorial_odd(int m) {
  if (m < 0) throw ParameterError("double factorial needs m >= 0");
  if (m > 19) throw SizeLimitError("(2m-1)!! overflows 64 bits for m=" + std::to_string(m));
  std::uint64_t r = 1;
  for (int k = 1; k <= m; ++k) r *= static_cast<std::uint64_t>(2 * k - 1);
  return r;
}

std::uint64_t catalan(int m) {
  if (m < 0) throw ParameterError("catalan needs m >= 0");
  if (m > kCatalanCap) {
    throw SizeLimitError("catalan(" + std::to_string(m) + ") exceeds the exact 64-bit cap m <= " +
                         std::to_string(kCatalanCap));
  }
  // C_{k+1} = C_k * 2(2k+1)/(k+2); the division is exact, the intermediate
  // product fits in 128 bits for k < 30.
  unsigned __int128 c = 1;
  for (int k = 0; k < m; ++k) c = c * (2 * (2 * k + 1)) / (k + 2);
  return static_cast<std::uint64_t>(c);
}

CrossingCount crossing_number(const Pairing& p) {
  CrossingCount c;
  const auto& b = p.blocks;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (i == j) continue;
      const auto [p1, q1] = b[i];
      const auto [p2, q2] = b[j];
      if (p1 < p2 && p2 < q1 && q1 < q2) ++c.value;
    }
  }
  return c;
}

std::vector<Pairing> enumerate_pairings(int m) {
  check_m(m, kPairingListCap, false);
  return collect(m, false);
}

std::vector<Pairing> enumerate_noncrossing(int m) {
  check_m(m, kNoncrossingCap, true);
  return collect(m, true);
}

void for_each_pairing(int m, const PairingVisitor& visit) {
  check_m(m, kPairingVisitCap, false);
  Matcher(m, false, visit).run();
}

void for_each_noncrossing(int m, const PairingVisitor& visit) {
  check_m(m, kNoncrossingCap, true);
  Matcher(m, true, visit).run();
}

}  // namespace ncfbm
