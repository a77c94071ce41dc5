#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stacklab::site {

using Rat = boost::rational<std::int64_t>;

std::string to_string(const Rat& q);
Rat parse_rat(const std::string& s);  // "p/q" or "p"

// Basic open of the unit interval: the open interval (lo, hi).
struct IntervalOpen {
  Rat lo;
  Rat hi;
  bool operator==(const IntervalOpen&) const = default;
};

// Basic open of Cantor space: the cylinder of a finite bit string.
struct PrefixOpen {
  std::string bits;
  bool operator==(const PrefixOpen&) const = default;
};

template <typename Open>
struct Cover {
  Open target;
  std::vector<Open> pieces;  // nonempty
};

// The rational-interval site over (0,1). Covers are overlapping dyadic
// chains: at level k, 2^k pieces widened by a quarter step on both sides
// and clipped to the target.
class IntervalSite {
public:
  using Open = IntervalOpen;

  static Open top() { return {Rat(0), Rat(1)}; }
  static bool valid(const Open& u) { return Rat(0) <= u.lo && u.lo < u.hi && u.hi <= Rat(1); }
  static bool leq(const Open& a, const Open& b) { return b.lo <= a.lo && a.hi <= b.hi; }
  static std::optional<Open> meet(const Open& a, const Open& b);
  static std::vector<Cover<Open>> covers(const Open& u, int level);
  static std::string to_string(const Open& u);
  static Open parse_open(const std::string& s);
  static Rat length(const Open& u) { return u.hi - u.lo; }
  static const char* name() { return "interval"; }
};

// The binary-tree site: finite bit strings ordered by reverse prefix
// extension. Covers are the full sets of k-bit extensions.
class CantorSite {
public:
  using Open = PrefixOpen;

  static Open top() { return {""}; }
  static bool valid(const Open& u) {
    return u.bits.find_first_not_of("01") == std::string::npos;
  }
  static bool leq(const Open& a, const Open& b) { return a.bits.rfind(b.bits, 0) == 0; }
  static std::optional<Open> meet(const Open& a, const Open& b);
  static std::vector<Cover<Open>> covers(const Open& u, int level);
  static std::string to_string(const Open& u) { return u.bits.empty() ? "eps" : u.bits; }
  static Open parse_open(const std::string& s) { return {s == "eps" ? "" : s}; }
  static const char* name() { return "cantor"; }
};

// Common refinement: pairwise meets with subsumed pieces dropped.
template <typename S>
Cover<typename S::Open> refine(const Cover<typename S::Open>& c1, const Cover<typename S::Open>& c2);

// Every piece of `fine` sits inside some piece of `coarse`.
template <typename S>
bool refines(const Cover<typename S::Open>& fine, const Cover<typename S::Open>& coarse) {
  for (const auto& p : fine.pieces) {
    bool found = false;
    for (const auto& q : coarse.pieces)
      if (S::leq(p, q)) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

// Connectivity of the overlap graph of a cover's pieces.
template <typename S>
bool is_chain_connected(const Cover<typename S::Open>& c);

// Exact check that the pieces cover the target.
bool covers_exactly(const Cover<IntervalOpen>& c);
bool covers_exactly(const Cover<PrefixOpen>& c);

// All opens reachable as cover pieces of u at levels <= depth, target first.
template <typename S>
std::vector<typename S::Open> generated_opens(const typename S::Open& u, int depth);

}  // namespace stacklab::site
