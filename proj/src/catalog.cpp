#include "stacklab/catalog.hpp"

#include <algorithm>

namespace stacklab::stack {

using site::CantorSite;
using site::IntervalOpen;
using site::IntervalSite;
using site::PrefixOpen;
using site::Rat;

std::vector<Rat> rationals_up_to_den(int max_den) {
  std::vector<Rat> out;
  for (int d = 1; d <= max_den; ++d)
    for (int p = 0; p <= d; ++p) out.push_back(Rat(p, d));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Rat> within_witnesses(const IntervalOpen& u, int n, int max_den) {
  std::vector<Rat> out;
  Rat radius(1, n);
  for (const Rat& q : rationals_up_to_den(max_den))
    if (q - radius <= u.lo && u.hi <= q + radius) out.push_back(q);
  return out;
}

namespace {

template <typename S>
Prestack<S> constant_prestack(const std::string& name, const groupoid::FiniteGroupoid& fiber,
                              bool prop) {
  Prestack<S> f;
  f.name = name;
  f.prop_fibers = prop;
  f.at = [fiber](const typename S::Open&) { return fiber; };
  groupoid::Functor id = groupoid::identity_functor(fiber);
  f.restrict_to = [id](const typename S::Open&, const typename S::Open&) { return id; };
  return f;
}

// A family of locally available witnesses: the fiber over u is the discrete
// or codiscrete groupoid on keys(u), and restriction is key inclusion,
// which requires keys(sup) to be a subset of keys(sub) for sub <= sup.
template <typename S, typename Key>
Prestack<S> witness_family(const std::string& name, bool prop,
                           std::function<std::vector<Key>(const typename S::Open&)> keys) {
  Prestack<S> f;
  f.name = name;
  f.prop_fibers = prop;
  f.at = [keys, prop](const typename S::Open& u) {
    int n = static_cast<int>(keys(u).size());
    return prop ? groupoid::codiscrete_groupoid(n) : groupoid::discrete_groupoid(n);
  };
  f.restrict_to = [keys, prop](const typename S::Open& sub, const typename S::Open& sup) {
    auto sup_keys = keys(sup);
    auto sub_keys = keys(sub);
    groupoid::Functor r;
    r.obj.reserve(sup_keys.size());
    for (const Key& k : sup_keys) {
      auto it = std::find(sub_keys.begin(), sub_keys.end(), k);
      if (it == sub_keys.end())
        throw std::logic_error("witness family: keys are not hereditary under restriction");
      r.obj.push_back(static_cast<int>(it - sub_keys.begin()));
    }
    int n_sup = static_cast<int>(sup_keys.size());
    int n_sub = static_cast<int>(sub_keys.size());
    if (prop) {
      r.mor.resize(n_sup * n_sup);
      for (int x = 0; x < n_sup; ++x)
        for (int y = 0; y < n_sup; ++y) r.mor[x * n_sup + y] = r.obj[x] * n_sub + r.obj[y];
    } else {
      r.mor = r.obj;
    }
    return r;
  };
  return f;
}

std::vector<int> hit_positions(const PrefixOpen& u) {
  std::vector<int> out;
  for (std::size_t i = 0; i < u.bits.size(); ++i)
    if (u.bits[i] == '1') out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace

Prestack<IntervalSite> interval_prestack(const std::string& name) {
  if (name == "const1") return constant_prestack<IntervalSite>(name, groupoid::discrete_groupoid(1), false);
  if (name == "const2") return constant_prestack<IntervalSite>(name, groupoid::discrete_groupoid(2), false);
  if (name == "const3") return constant_prestack<IntervalSite>(name, groupoid::discrete_groupoid(3), false);
  if (name == "codisc2") return constant_prestack<IntervalSite>(name, groupoid::codiscrete_groupoid(2), true);
  if (name == "codisc3") return constant_prestack<IntervalSite>(name, groupoid::codiscrete_groupoid(3), true);
  bool disc = false;
  std::string base = name;
  if (base.size() > 5 && base.substr(base.size() - 5) == "-disc") {
    disc = true;
    base = base.substr(0, base.size() - 5);
  }
  if (base.rfind("within", 0) == 0) {
    int n = std::stoi(base.substr(6));
    if (n < 2 || n > 16) throw std::invalid_argument("within level out of range: " + name);
    return witness_family<IntervalSite, Rat>(
        name, !disc, [n](const IntervalOpen& u) { return within_witnesses(u, n, kWithinDenBound); });
  }
  throw std::invalid_argument("unknown interval prestack: " + name);
}

Prestack<CantorSite> cantor_prestack(const std::string& name) {
  if (name == "const1") return constant_prestack<CantorSite>(name, groupoid::discrete_groupoid(1), false);
  if (name == "const2") return constant_prestack<CantorSite>(name, groupoid::discrete_groupoid(2), false);
  if (name == "const3") return constant_prestack<CantorSite>(name, groupoid::discrete_groupoid(3), false);
  if (name == "codisc2") return constant_prestack<CantorSite>(name, groupoid::codiscrete_groupoid(2), true);
  if (name == "codisc3") return constant_prestack<CantorSite>(name, groupoid::codiscrete_groupoid(3), true);
  if (name == "hitone")
    return witness_family<CantorSite, int>(name, true, [](const PrefixOpen& u) { return hit_positions(u); });
  if (name == "hitone-disc")
    return witness_family<CantorSite, int>(name, false, [](const PrefixOpen& u) { return hit_positions(u); });
  throw std::invalid_argument("unknown cantor prestack: " + name);
}

std::vector<std::string> interval_catalog_names() {
  std::vector<std::string> out = {"const1", "const2", "const3", "codisc2", "codisc3"};
  for (int n = 2; n <= 16; ++n) {
    out.push_back("within" + std::to_string(n));
    out.push_back("within" + std::to_string(n) + "-disc");
  }
  return out;
}

std::vector<std::string> cantor_catalog_names() {
  return {"const1", "const2", "const3", "codisc2", "codisc3", "hitone", "hitone-disc"};
}

}  // namespace stacklab::stack
