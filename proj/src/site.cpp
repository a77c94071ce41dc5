#include "stacklab/site.hpp"

#include <algorithm>
#include <stdexcept>

namespace stacklab::site {

std::string to_string(const Rat& q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(std::stoll(s));
  return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

std::optional<IntervalOpen> IntervalSite::meet(const Open& a, const Open& b) {
  Rat lo = std::max(a.lo, b.lo);
  Rat hi = std::min(a.hi, b.hi);
  if (lo < hi) return Open{lo, hi};
  return std::nullopt;
}

std::vector<Cover<IntervalOpen>> IntervalSite::covers(const Open& u, int level) {
  if (level < 0) throw std::invalid_argument("cover level must be nonnegative");
  Cover<Open> c;
  c.target = u;
  Rat len = u.hi - u.lo;
  std::int64_t n = std::int64_t{1} << level;
  Rat width = len / n;
  Rat margin = width / 4;
  for (std::int64_t i = 0; i < n; ++i) {
    Rat lo = u.lo + width * i - margin;
    Rat hi = u.lo + width * (i + 1) + margin;
    c.pieces.push_back(Open{std::max(lo, u.lo), std::min(hi, u.hi)});
  }
  return {c};
}

std::string IntervalSite::to_string(const Open& u) {
  return "(" + site::to_string(u.lo) + "," + site::to_string(u.hi) + ")";
}

IntervalOpen IntervalSite::parse_open(const std::string& s) {
  std::string t = s;
  if (!t.empty() && t.front() == '(') t = t.substr(1);
  if (!t.empty() && t.back() == ')') t.pop_back();
  auto comma = t.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("interval open: expected lo,hi");
  Open u{parse_rat(t.substr(0, comma)), parse_rat(t.substr(comma + 1))};
  if (!valid(u)) throw std::invalid_argument("interval open out of range");
  return u;
}

std::optional<PrefixOpen> CantorSite::meet(const Open& a, const Open& b) {
  if (leq(a, b)) return a;
  if (leq(b, a)) return b;
  return std::nullopt;
}

std::vector<Cover<PrefixOpen>> CantorSite::covers(const Open& u, int level) {
  if (level < 0) throw std::invalid_argument("cover level must be nonnegative");
  Cover<Open> c;
  c.target = u;
  std::int64_t n = std::int64_t{1} << level;
  for (std::int64_t i = 0; i < n; ++i) {
    std::string bits = u.bits;
    for (int b = level - 1; b >= 0; --b) bits.push_back((i >> b) & 1 ? '1' : '0');
    c.pieces.push_back(Open{std::move(bits)});
  }
  return {c};
}

namespace {

template <typename S>
Cover<typename S::Open> refine_impl(const Cover<typename S::Open>& c1,
                                    const Cover<typename S::Open>& c2) {
  Cover<typename S::Open> out;
  out.target = c1.target;
  std::vector<typename S::Open> meets;
  for (const auto& p : c1.pieces)
    for (const auto& q : c2.pieces)
      if (auto m = S::meet(p, q)) {
        if (std::find(meets.begin(), meets.end(), *m) == meets.end()) meets.push_back(*m);
      }
  // drop pieces strictly inside another kept piece
  for (std::size_t i = 0; i < meets.size(); ++i) {
    bool subsumed = false;
    for (std::size_t j = 0; j < meets.size() && !subsumed; ++j)
      if (i != j && S::leq(meets[i], meets[j]) && !(meets[i] == meets[j])) subsumed = true;
    if (!subsumed) out.pieces.push_back(meets[i]);
  }
  return out;
}

}  // namespace

template <>
Cover<IntervalOpen> refine<IntervalSite>(const Cover<IntervalOpen>& c1, const Cover<IntervalOpen>& c2) {
  auto out = refine_impl<IntervalSite>(c1, c2);
  std::sort(out.pieces.begin(), out.pieces.end(),
            [](const IntervalOpen& a, const IntervalOpen& b) {
              return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
            });
  return out;
}

template <>
Cover<PrefixOpen> refine<CantorSite>(const Cover<PrefixOpen>& c1, const Cover<PrefixOpen>& c2) {
  auto out = refine_impl<CantorSite>(c1, c2);
  std::sort(out.pieces.begin(), out.pieces.end(),
            [](const PrefixOpen& a, const PrefixOpen& b) { return a.bits < b.bits; });
  return out;
}

namespace {

template <typename S>
bool chain_connected_impl(const Cover<typename S::Open>& c) {
  std::size_t n = c.pieces.size();
  if (n == 0) return false;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (S::meet(c.pieces[i], c.pieces[j])) parent[find(i)] = find(j);
  for (std::size_t i = 0; i < n; ++i)
    if (find(i) != find(0)) return false;
  return true;
}

}  // namespace

template <>
bool is_chain_connected<IntervalSite>(const Cover<IntervalOpen>& c) {
  return chain_connected_impl<IntervalSite>(c);
}

template <>
bool is_chain_connected<CantorSite>(const Cover<PrefixOpen>& c) {
  return chain_connected_impl<CantorSite>(c);
}

bool covers_exactly(const Cover<IntervalOpen>& c) {
  auto pieces = c.pieces;
  if (pieces.empty()) return false;
  std::sort(pieces.begin(), pieces.end(),
            [](const IntervalOpen& a, const IntervalOpen& b) { return a.lo < b.lo; });
  for (const auto& p : pieces)
    if (!IntervalSite::leq(p, c.target)) return false;
  if (pieces.front().lo != c.target.lo) return false;
  Rat reach = pieces.front().hi;
  for (std::size_t i = 1; i < pieces.size(); ++i) {
    // open intervals: touching endpoints leave a gap
    if (pieces[i].lo >= reach) return false;
    reach = std::max(reach, pieces[i].hi);
  }
  return reach == c.target.hi;
}

bool covers_exactly(const Cover<PrefixOpen>& c) {
  if (c.pieces.empty()) return false;
  // pieces extend the target, are pairwise non-nested, and measure up to 1
  Rat total(0);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const auto& p = c.pieces[i];
    if (!CantorSite::leq(p, c.target)) return false;
    for (std::size_t j = i + 1; j < c.pieces.size(); ++j)
      if (CantorSite::meet(p, c.pieces[j])) return false;
    int rel = static_cast<int>(p.bits.size() - c.target.bits.size());
    if (rel > 62) return false;
    total += Rat(1, std::int64_t{1} << rel);
  }
  return total == Rat(1);
}

namespace {

template <typename S>
std::vector<typename S::Open> generated_opens_impl(const typename S::Open& u, int depth) {
  std::vector<typename S::Open> out{u};
  for (int k = 1; k <= depth; ++k)
    for (const auto& c : S::covers(u, k))
      for (const auto& p : c.pieces)
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  return out;
}

}  // namespace

template <>
std::vector<IntervalOpen> generated_opens<IntervalSite>(const IntervalOpen& u, int depth) {
  return generated_opens_impl<IntervalSite>(u, depth);
}

template <>
std::vector<PrefixOpen> generated_opens<CantorSite>(const PrefixOpen& u, int depth) {
  return generated_opens_impl<CantorSite>(u, depth);
}

}  // namespace stacklab::site
