#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>

#include "stacklab/groupoid.hpp"
#include "stacklab/site.hpp"

namespace stacklab::stack {

using groupoid::Budget;
using groupoid::FiniteGroupoid;
using groupoid::Functor;

struct RestrictionUnsupported : std::runtime_error {
  explicit RestrictionUnsupported(const std::string& what) : std::runtime_error(what) {}
};

// A strict groupoid-valued prestack: fibers per open and restriction
// functors along inclusions, composing on the nose.
template <typename S>
struct Prestack {
  std::string name;
  bool prop_fibers = false;
  std::function<FiniteGroupoid(const typename S::Open&)> at;
  // restrict_to(sub, sup) : F(sup) -> F(sub), defined for sub <= sup
  std::function<Functor(const typename S::Open& sub, const typename S::Open& sup)> restrict_to;
};

// Sections over the cover pieces plus transition isomorphisms on defined
// binary overlaps, stored for i < j; the reverse direction is the inverse.
template <typename S>
struct DescentDatum {
  site::Cover<typename S::Open> cover;
  std::vector<int> sections;
  std::map<std::pair<int, int>, int> transitions;

  bool operator==(const DescentDatum& o) const {
    return sections == o.sections && transitions == o.transitions;
  }
};

template <typename S>
DescentDatum<S> effective_datum(const Prestack<S>& f, const typename S::Open& u,
                                const site::Cover<typename S::Open>& cover, int object);

// Checks the transition layout and the cocycle condition exactly; throws
// std::invalid_argument on malformed data (missing or spurious transition).
template <typename S>
bool check_cocycle(const Prestack<S>& f, const DescentDatum<S>& d);

template <typename S>
struct DescMorphism {
  int src = 0;
  int dst = 0;
  std::vector<int> comps;  // per piece
};

template <typename S>
struct DescGroupoid {
  FiniteGroupoid gpd;
  std::vector<DescentDatum<S>> data;
  std::vector<DescMorphism<S>> mors;
};

template <typename S>
DescGroupoid<S> descent_groupoid(const Prestack<S>& f, const site::Cover<typename S::Open>& cover,
                                 Budget& budget);

// The comparison functor F(U) -> Desc(F, cover).
template <typename S>
Functor comparison_functor(const Prestack<S>& f, const typename S::Open& u,
                           const site::Cover<typename S::Open>& cover, const DescGroupoid<S>& desc);

struct StackRecord {
  std::string open;
  int level = 0;
  bool fully_faithful = false;
  bool essentially_surjective = false;
  std::string counterexample;
};

struct StackReport {
  std::string prestack;
  int depth = 0;
  bool is_stack = true;
  std::vector<StackRecord> records;
};

template <typename S>
StackReport is_stack(const Prestack<S>& f, const std::vector<typename S::Open>& opens, int depth,
                     Budget& budget);

// Depth-bounded stackification: the fiber at U is the descent groupoid of
// the level-`depth` cover. Restriction is canonical up to isomorphism; it
// is computed by a piece-fitting protocol and is partial in general.
template <typename S>
Prestack<S> stackify(const Prestack<S>& f, int depth, std::shared_ptr<Budget> budget);

// Codiscrete replacement followed by stackification; fibers come back
// skeletal (one object when local data glue, none otherwise).
template <typename S>
Prestack<S> trunc_stack(const Prestack<S>& f, int depth, std::shared_ptr<Budget> budget);

template <typename S>
Prestack<S> codiscrete_replacement(const Prestack<S>& f);

template <typename S>
bool has_section(const Prestack<S>& f, const typename S::Open& u) {
  return f.at(u).n_obj > 0;
}

// ---------------------------------------------------------------------------
// implementation

namespace detail {

template <typename S>
int transition_between(const Prestack<S>& f, const DescentDatum<S>& d,
                       const FiniteGroupoid& meet_fib, int i, int j) {
  if (i == j) {
    auto m = S::meet(d.cover.pieces[i], d.cover.pieces[j]);
    int r = f.restrict_to(*m, d.cover.pieces[i]).obj[d.sections[i]];
    return meet_fib.id_mor[r];
  }
  if (i < j) return d.transitions.at({i, j});
  return meet_fib.inv[d.transitions.at({j, i})];
}

}  // namespace detail

template <typename S>
DescentDatum<S> effective_datum(const Prestack<S>& f, const typename S::Open& u,
                                const site::Cover<typename S::Open>& cover, int object) {
  DescentDatum<S> d;
  d.cover = cover;
  for (const auto& p : cover.pieces) d.sections.push_back(f.restrict_to(p, u).obj[object]);
  int n = static_cast<int>(cover.pieces.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto m = S::meet(cover.pieces[i], cover.pieces[j]);
      if (!m) continue;
      // strictness: both restrictions land on the same object
      int r = f.restrict_to(*m, u).obj[object];
      d.transitions[{i, j}] = f.at(*m).id_mor[r];
    }
  return d;
}

template <typename S>
bool check_cocycle(const Prestack<S>& f, const DescentDatum<S>& d) {
  int n = static_cast<int>(d.cover.pieces.size());
  // layout: transitions exactly at the defined meets, endpoints correct
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto m = S::meet(d.cover.pieces[i], d.cover.pieces[j]);
      bool have = d.transitions.count({i, j}) > 0;
      if (!m && have) throw std::invalid_argument("transition given for an empty overlap");
      if (m && !have) throw std::invalid_argument("missing transition for a defined overlap");
      if (!m) continue;
      FiniteGroupoid fib = f.at(*m);
      int phi = d.transitions.at({i, j});
      int ri = f.restrict_to(*m, d.cover.pieces[i]).obj[d.sections[i]];
      int rj = f.restrict_to(*m, d.cover.pieces[j]).obj[d.sections[j]];
      if (phi < 0 || phi >= fib.n_mor()) return false;
      if (fib.mor_src[phi] != ri || fib.mor_dst[phi] != rj) return false;
    }
  // cocycle on every triple overlap with a defined meet
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        auto mij = S::meet(d.cover.pieces[i], d.cover.pieces[j]);
        auto mjk = S::meet(d.cover.pieces[j], d.cover.pieces[k]);
        auto mik = S::meet(d.cover.pieces[i], d.cover.pieces[k]);
        if (!mij || !mjk || !mik) continue;
        auto triple = S::meet(*mij, d.cover.pieces[k]);
        if (!triple) continue;
        FiniteGroupoid tf = f.at(*triple);
        int pij = f.restrict_to(*triple, *mij).mor[detail::transition_between(f, d, f.at(*mij), i, j)];
        int pjk = f.restrict_to(*triple, *mjk).mor[detail::transition_between(f, d, f.at(*mjk), j, k)];
        int pik = f.restrict_to(*triple, *mik).mor[detail::transition_between(f, d, f.at(*mik), i, k)];
        if (tf.compose(pjk, pij) != pik) return false;
      }
  return true;
}

template <typename S>
DescGroupoid<S> descent_groupoid(const Prestack<S>& f, const site::Cover<typename S::Open>& cover,
                                 Budget& budget) {
  DescGroupoid<S> out;
  int n = static_cast<int>(cover.pieces.size());
  std::vector<FiniteGroupoid> piece_fib;
  piece_fib.reserve(n);
  for (const auto& p : cover.pieces) piece_fib.push_back(f.at(p));

  struct MeetInfo {
    int i, j;
    typename S::Open open;
    FiniteGroupoid fib;
    Functor from_i, from_j;
  };
  std::vector<MeetInfo> meets;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (auto m = S::meet(cover.pieces[i], cover.pieces[j]))
        meets.push_back({i, j, *m, f.at(*m), f.restrict_to(*m, cover.pieces[i]),
                         f.restrict_to(*m, cover.pieces[j])});

  // enumerate data: objects per piece, transitions per defined meet
  DescentDatum<S> cur;
  cur.cover = cover;
  cur.sections.assign(n, -1);
  std::function<void(std::size_t)> assign_trans = [&](std::size_t mi) {
    if (mi == meets.size()) {
      if (check_cocycle(f, cur)) out.data.push_back(cur);
      return;
    }
    budget.spend();
    const MeetInfo& m = meets[mi];
    int ri = m.from_i.obj[cur.sections[m.i]];
    int rj = m.from_j.obj[cur.sections[m.j]];
    for (int phi : m.fib.homset(ri, rj)) {
      cur.transitions[{m.i, m.j}] = phi;
      assign_trans(mi + 1);
    }
    cur.transitions.erase({m.i, m.j});
  };
  std::function<void(int)> assign_obj = [&](int i) {
    if (i == n) {
      assign_trans(0);
      return;
    }
    budget.spend();
    for (int o = 0; o < piece_fib[i].n_obj; ++o) {
      cur.sections[i] = o;
      // prune: every already-assigned overlapping piece must admit a transition
      bool feasible = true;
      for (const MeetInfo& m : meets) {
        if (m.j != i || cur.sections[m.i] < 0) continue;
        if (m.fib.homset(m.from_i.obj[cur.sections[m.i]], m.from_j.obj[o]).empty()) {
          feasible = false;
          break;
        }
      }
      if (feasible) assign_obj(i + 1);
    }
    cur.sections[i] = -1;
  };
  assign_obj(0);

  // morphisms: per-piece maps commuting with the transitions
  for (int a = 0; a < static_cast<int>(out.data.size()); ++a)
    for (int b = 0; b < static_cast<int>(out.data.size()); ++b) {
      std::vector<int> comps(n, -1);
      std::function<void(int)> go = [&](int i) {
        if (i == n) {
          for (const MeetInfo& m : meets) {
            int mi = m.from_i.mor[comps[m.i]];
            int mj = m.from_j.mor[comps[m.j]];
            int lhs = m.fib.compose(out.data[b].transitions.at({m.i, m.j}), mi);
            int rhs = m.fib.compose(mj, out.data[a].transitions.at({m.i, m.j}));
            if (lhs != rhs) return;
          }
          out.mors.push_back({a, b, comps});
          return;
        }
        budget.spend();
        for (int mor : piece_fib[i].homset(out.data[a].sections[i], out.data[b].sections[i])) {
          comps[i] = mor;
          go(i + 1);
        }
        comps[i] = -1;
      };
      go(0);
    }

  FiniteGroupoid& g = out.gpd;
  g.n_obj = static_cast<int>(out.data.size());
  for (const auto& m : out.mors) {
    g.mor_src.push_back(m.src);
    g.mor_dst.push_back(m.dst);
  }
  int nm = g.n_mor();
  g.comp.assign(nm, std::vector<int>(nm, -1));
  std::map<std::pair<std::pair<int, int>, std::vector<int>>, int> lookup;
  for (int i = 0; i < nm; ++i) lookup[{{out.mors[i].src, out.mors[i].dst}, out.mors[i].comps}] = i;
  for (int x = 0; x < nm; ++x)
    for (int y = 0; y < nm; ++y) {
      if (out.mors[x].dst != out.mors[y].src) continue;
      budget.spend();
      std::vector<int> comps(n);
      for (int i = 0; i < n; ++i) comps[i] = piece_fib[i].compose(out.mors[y].comps[i], out.mors[x].comps[i]);
      g.comp[y][x] = lookup.at({{out.mors[x].src, out.mors[y].dst}, comps});
    }
  g.hom.assign(g.n_obj, std::vector<std::vector<int>>(g.n_obj));
  for (int m = 0; m < nm; ++m) g.hom[g.mor_src[m]][g.mor_dst[m]].push_back(m);
  g.id_mor.assign(g.n_obj, -1);
  for (int d = 0; d < g.n_obj; ++d) {
    std::vector<int> comps(n);
    for (int i = 0; i < n; ++i) comps[i] = piece_fib[i].id_mor[out.data[d].sections[i]];
    g.id_mor[d] = lookup.at({{d, d}, comps});
  }
  g.inv.assign(nm, -1);
  for (int m = 0; m < nm; ++m) {
    std::vector<int> comps(n);
    for (int i = 0; i < n; ++i) comps[i] = piece_fib[i].inv[out.mors[m].comps[i]];
    g.inv[m] = lookup.at({{out.mors[m].dst, out.mors[m].src}, comps});
  }
  return out;
}

template <typename S>
Functor comparison_functor(const Prestack<S>& f, const typename S::Open& u,
                           const site::Cover<typename S::Open>& cover, const DescGroupoid<S>& desc) {
  FiniteGroupoid fu = f.at(u);
  int n = static_cast<int>(cover.pieces.size());
  std::vector<Functor> res;
  res.reserve(n);
  for (const auto& p : cover.pieces) res.push_back(f.restrict_to(p, u));
  Functor out;
  out.obj.resize(fu.n_obj);
  for (int a = 0; a < fu.n_obj; ++a) {
    DescentDatum<S> eff = effective_datum(f, u, cover, a);
    auto it = std::find(desc.data.begin(), desc.data.end(), eff);
    if (it == desc.data.end()) throw std::logic_error("comparison: effective datum not enumerated");
    out.obj[a] = static_cast<int>(it - desc.data.begin());
  }
  out.mor.resize(fu.n_mor());
  for (int m = 0; m < fu.n_mor(); ++m) {
    std::vector<int> comps(n);
    for (int i = 0; i < n; ++i) comps[i] = res[i].mor[m];
    int found = -1;
    for (int i = 0; i < static_cast<int>(desc.mors.size()); ++i)
      if (desc.mors[i].src == out.obj[fu.mor_src[m]] && desc.mors[i].dst == out.obj[fu.mor_dst[m]] &&
          desc.mors[i].comps == comps) {
        found = i;
        break;
      }
    if (found < 0) throw std::logic_error("comparison: restricted morphism family not enumerated");
    out.mor[m] = found;
  }
  return out;
}

template <typename S>
StackReport is_stack(const Prestack<S>& f, const std::vector<typename S::Open>& opens, int depth,
                     Budget& budget) {
  StackReport rep;
  rep.prestack = f.name;
  rep.depth = depth;
  for (const auto& u : opens) {
    for (int level = 0; level <= depth; ++level) {
      for (const auto& cover : S::covers(u, level)) {
        StackRecord rec;
        rec.open = S::to_string(u);
        rec.level = level;
        DescGroupoid<S> desc = descent_groupoid(f, cover, budget);
        Functor cmp = comparison_functor(f, u, cover, desc);
        FiniteGroupoid fu = f.at(u);
        // fully faithful: hom(a,b) maps bijectively onto hom(eff a, eff b)
        rec.fully_faithful = true;
        for (int a = 0; a < fu.n_obj && rec.fully_faithful; ++a)
          for (int b = 0; b < fu.n_obj && rec.fully_faithful; ++b) {
            std::vector<int> image;
            for (int m : fu.homset(a, b)) image.push_back(cmp.mor[m]);
            std::sort(image.begin(), image.end());
            if (std::unique(image.begin(), image.end()) != image.end()) {
              rec.fully_faithful = false;
              rec.counterexample = "comparison not faithful at " + rec.open;
            }
            if (image.size() != desc.gpd.homset(cmp.obj[a], cmp.obj[b]).size()) {
              rec.fully_faithful = false;
              rec.counterexample = "comparison not full at " + rec.open;
            }
          }
        // essentially surjective: every datum is isomorphic to an effective one
        rec.essentially_surjective = true;
        for (int d = 0; d < desc.gpd.n_obj && rec.essentially_surjective; ++d) {
          bool hit = false;
          for (int a = 0; a < fu.n_obj && !hit; ++a)
            if (!desc.gpd.homset(cmp.obj[a], d).empty()) hit = true;
          if (!hit) {
            rec.essentially_surjective = false;
            rec.counterexample = "non-glueing datum at " + rec.open + " level " + std::to_string(level);
          }
        }
        if (!rec.fully_faithful || !rec.essentially_surjective) rep.is_stack = false;
        rep.records.push_back(std::move(rec));
      }
    }
  }
  return rep;
}

namespace detail {

// Fit every piece of `fine` into some piece of `coarse`, preferring the
// least index.
template <typename S>
std::optional<std::vector<int>> fit_map(const std::vector<typename S::Open>& fine,
                                        const std::vector<typename S::Open>& coarse) {
  std::vector<int> fit(fine.size(), -1);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    for (std::size_t j = 0; j < coarse.size(); ++j)
      if (S::leq(fine[i], coarse[j])) {
        fit[i] = static_cast<int>(j);
        break;
      }
    if (fit[i] < 0) return std::nullopt;
  }
  return fit;
}

// Restricts a datum on covers(sup, depth) to a datum on covers(sub, depth)
// by hosting each sub piece inside a covering piece (least index). Total
// whenever sub lies inside some covering piece, which includes all pieces
// and binary meets of the cover itself.
template <typename S>
DescentDatum<S> restrict_datum(const Prestack<S>& f, const DescentDatum<S>& d,
                               const typename S::Open& sub, int depth,
                               std::vector<int>* fit_out = nullptr) {
  const auto& sup_pieces = d.cover.pieces;
  auto cover = S::covers(sub, depth).at(0);
  auto fit = fit_map<S>(cover.pieces, sup_pieces);
  if (!fit)
    throw RestrictionUnsupported("no cover of the sub-open fits the covering pieces at this depth");
  if (fit_out) *fit_out = *fit;
  DescentDatum<S> out;
  out.cover = cover;
  int n = static_cast<int>(cover.pieces.size());
  for (int i = 0; i < n; ++i)
    out.sections.push_back(
        f.restrict_to(cover.pieces[i], sup_pieces[(*fit)[i]]).obj[d.sections[(*fit)[i]]]);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto m = S::meet(cover.pieces[i], cover.pieces[j]);
      if (!m) continue;
      int fi = (*fit)[i], fj = (*fit)[j];
      FiniteGroupoid mf = f.at(*m);
      if (fi == fj) {
        int r = f.restrict_to(*m, sup_pieces[fi]).obj[d.sections[fi]];
        out.transitions[{i, j}] = mf.id_mor[r];
      } else {
        auto sup_meet = S::meet(sup_pieces[std::min(fi, fj)], sup_pieces[std::max(fi, fj)]);
        if (!sup_meet) throw RestrictionUnsupported("fitted pieces overlap but their hosts do not");
        int phi = transition_between(f, d, f.at(*sup_meet), fi, fj);
        out.transitions[{i, j}] = f.restrict_to(*m, *sup_meet).mor[phi];
      }
    }
  return out;
}

}  // namespace detail

template <typename S>
DescentDatum<S> effective_datum(const Prestack<S>& f, const typename S::Open& u,
                                const site::Cover<typename S::Open>& cover, int object) {
  DescentDatum<S> d;
  d.cover = cover;
  for (const auto& p : cover.pieces) d.sections.push_back(f.restrict_to(p, u).obj[object]);
  int n = static_cast<int>(cover.pieces.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto m = S::meet(cover.pieces[i], cover.pieces[j]);
      if (!m) continue;
      // strictness: both restrictions land on the same object
      int r = f.restrict_to(*m, u).obj[object];
      d.transitions[{i, j}] = f.at(*m).id_mor[r];
    }
  return d;
}

template <typename S>
bool check_cocycle(const Prestack<S>& f, const DescentDatum<S>& d) {
  int n = static_cast<int>(d.cover.pieces.size());
  // layout: transitions exactly at the defined meets, endpoints correct
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto m = S::meet(d.cover.pieces[i], d.cover.pieces[j]);
      bool have = d.transitions.count({i, j}) > 0;
      if (!m && have) throw std::invalid_argument("transition given for an empty overlap");
      if (m && !have) throw std::invalid_argument("missing transition for a defined overlap");
      if (!m) continue;
      FiniteGroupoid fib = f.at(*m);
      int phi = d.transitions.at({i, j});
      int ri = f.restrict_to(*m, d.cover.pieces[i]).obj[d.sections[i]];
      int rj = f.restrict_to(*m, d.cover.pieces[j]).obj[d.sections[j]];
      if (phi < 0 || phi >= fib.n_mor()) return false;
      if (fib.mor_src[phi] != ri || fib.mor_dst[phi] != rj) return false;
    }
  // cocycle on every triple overlap with a defined meet
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == j || j == k || i == k) continue;
        auto mij = S::meet(d.cover.pieces[i], d.cover.pieces[j]);
        auto mjk = S::meet(d.cover.pieces[j], d.cover.pieces[k]);
        auto mik = S::meet(d.cover.pieces[i], d.cover.pieces[k]);
        if (!mij || !mjk || !mik) continue;
        auto triple = S::meet(*mij, d.cover.pieces[k]);
        if (!triple) continue;
        FiniteGroupoid tf = f.at(*triple);
        int pij = f.restrict_to(*triple, *mij).mor[detail::transition_between(f, d, f.at(*mij), i, j)];
        int pjk = f.restrict_to(*triple, *mjk).mor[detail::transition_between(f, d, f.at(*mjk), j, k)];
        int pik = f.restrict_to(*triple, *mik).mor[detail::transition_between(f, d, f.at(*mik), i, k)];
        if (tf.compose(pjk, pij) != pik) return false;
      }
  return true;
}

template <typename S>
DescGroupoid<S> descent_groupoid(const Prestack<S>& f, const site::Cover<typename S::Open>& cover,
                                 Budget& budget) {
  DescGroupoid<S> out;
  int n = static_cast<int>(cover.pieces.size());
  std::vector<FiniteGroupoid> piece_fib;
  piece_fib.reserve(n);
  for (const auto& p : cover.pieces) piece_fib.push_back(f.at(p));

  struct MeetInfo {
    int i, j;
    typename S::Open open;
    FiniteGroupoid fib;
    Functor from_i, from_j;
  };
  std::vector<MeetInfo> meets;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (auto m = S::meet(cover.pieces[i], cover.pieces[j]))
        meets.push_back({i, j, *m, f.at(*m), f.restrict_to(*m, cover.pieces[i]),
                         f.restrict_to(*m, cover.pieces[j])});

  // enumerate data: objects per piece, transitions per defined meet
  DescentDatum<S> cur;
  cur.cover = cover;
  cur.sections.assign(n, -1);
  std::function<void(std::size_t)> assign_trans = [&](std::size_t mi) {
    if (mi == meets.size()) {
      if (check_cocycle(f, cur)) out.data.push_back(cur);
      return;
    }
    budget.spend();
    const MeetInfo& m = meets[mi];
    int ri = m.from_i.obj[cur.sections[m.i]];
    int rj = m.from_j.obj[cur.sections[m.j]];
    for (int phi : m.fib.homset(ri, rj)) {
      cur.transitions[{m.i, m.j}] = phi;
      assign_trans(mi + 1);
    }
    cur.transitions.erase({m.i, m.j});
  };
  std::function<void(int)> assign_obj = [&](int i) {
    if (i == n) {
      assign_trans(0);
      return;
    }
    budget.spend();
    for (int o = 0; o < piece_fib[i].n_obj; ++o) {
      cur.sections[i] = o;
      // prune: every already-assigned overlapping piece must admit a transition
      bool feasible = true;
      for (const MeetInfo& m : meets) {
        if (m.j != i || cur.sections[m.i] < 0) continue;
        if (m.fib.homset(m.from_i.obj[cur.sections[m.i]], m.from_j.obj[o]).empty()) {
          feasible = false;
          break;
        }
      }
      if (feasible) assign_obj(i + 1);
    }
    cur.sections[i] = -1;
  };
  assign_obj(0);

  // morphisms: per-piece maps commuting with the transitions
  for (int a = 0; a < static_cast<int>(out.data.size()); ++a)
    for (int b = 0; b < static_cast<int>(out.data.size()); ++b) {
      std::vector<int> comps(n, -1);
      std::function<void(int)> go = [&](int i) {
        if (i == n) {
          for (const MeetInfo& m : meets) {
            int mi = m.from_i.mor[comps[m.i]];
            int mj = m.from_j.mor[comps[m.j]];
            int lhs = m.fib.compose(out.data[b].transitions.at({m.i, m.j}), mi);
            int rhs = m.fib.compose(mj, out.data[a].transitions.at({m.i, m.j}));
            if (lhs != rhs) return;
          }
          out.mors.push_back({a, b, comps});
          return;
        }
        budget.spend();
        for (int mor : piece_fib[i].homset(out.data[a].sections[i], out.data[b].sections[i])) {
          comps[i] = mor;
          go(i + 1);
        }
        comps[i] = -1;
      };
      go(0);
    }

  FiniteGroupoid& g = out.gpd;
  g.n_obj = static_cast<int>(out.data.size());
  for (const auto& m : out.mors) {
    g.mor_src.push_back(m.src);
    g.mor_dst.push_back(m.dst);
  }
  int nm = g.n_mor();
  g.comp.assign(nm, std::vector<int>(nm, -1));
  std::map<std::pair<std::pair<int, int>, std::vector<int>>, int> lookup;
  for (int i = 0; i < nm; ++i) lookup[{{out.mors[i].src, out.mors[i].dst}, out.mors[i].comps}] = i;
  for (int x = 0; x < nm; ++x)
    for (int y = 0; y < nm; ++y) {
      if (out.mors[x].dst != out.mors[y].src) continue;
      budget.spend();
      std::vector<int> comps(n);
      for (int i = 0; i < n; ++i) comps[i] = piece_fib[i].compose(out.mors[y].comps[i], out.mors[x].comps[i]);
      g.comp[y][x] = lookup.at({{out.mors[x].src, out.mors[y].dst}, comps});
    }
  g.hom.assign(g.n_obj, std::vector<std::vector<int>>(g.n_obj));
  for (int m = 0; m < nm; ++m) g.hom[g.mor_src[m]][g.mor_dst[m]].push_back(m);
  g.id_mor.assign(g.n_obj, -1);
  for (int d = 0; d < g.n_obj; ++d) {
    std::vector<int> comps(n);
    for (int i = 0; i < n; ++i) comps[i] = piece_fib[i].id_mor[out.data[d].sections[i]];
    g.id_mor[d] = lookup.at({{d, d}, comps});
  }
  g.inv.assign(nm, -1);
  for (int m = 0; m < nm; ++m) {
    std::vector<int> comps(n);
    for (int i = 0; i < n; ++i) comps[i] = piece_fib[i].inv[out.mors[m].comps[i]];
    g.inv[m] = lookup.at({{out.mors[m].dst, out.mors[m].src}, comps});
  }
  return out;
}

template <typename S>
Functor comparison_functor(const Prestack<S>& f, const typename S::Open& u,
                           const site::Cover<typename S::Open>& cover, const DescGroupoid<S>& desc) {
  FiniteGroupoid fu = f.at(u);
  int n = static_cast<int>(cover.pieces.size());
  std::vector<Functor> res;
  res.reserve(n);
  for (const auto& p : cover.pieces) res.push_back(f.restrict_to(p, u));
  Functor out;
  out.obj.resize(fu.n_obj);
  for (int a = 0; a < fu.n_obj; ++a) {
    DescentDatum<S> eff = effective_datum(f, u, cover, a);
    auto it = std::find(desc.data.begin(), desc.data.end(), eff);
    if (it == desc.data.end()) throw std::logic_error("comparison: effective datum not enumerated");
    out.obj[a] = static_cast<int>(it - desc.data.begin());
  }
  out.mor.resize(fu.n_mor());
  for (int m = 0; m < fu.n_mor(); ++m) {
    std::vector<int> comps(n);
    for (int i = 0; i < n; ++i) comps[i] = res[i].mor[m];
    int found = -1;
    for (int i = 0; i < static_cast<int>(desc.mors.size()); ++i)
      if (desc.mors[i].src == out.obj[fu.mor_src[m]] && desc.mors[i].dst == out.obj[fu.mor_dst[m]] &&
          desc.mors[i].comps == comps) {
        found = i;
        break;
      }
    if (found < 0) throw std::logic_error("comparison: restricted morphism family not enumerated");
    out.mor[m] = found;
  }
  return out;
}

template <typename S>
StackReport is_stack(const Prestack<S>& f, const std::vector<typename S::Open>& opens, int depth,
                     Budget& budget) {
  StackReport rep;
  rep.prestack = f.name;
  rep.depth = depth;
  for (const auto& u : opens) {
    for (int level = 0; level <= depth; ++level) {
      for (const auto& cover : S::covers(u, level)) {
        StackRecord rec;
        rec.open = S::to_string(u);
        rec.level = level;
        DescGroupoid<S> desc = descent_groupoid(f, cover, budget);
        Functor cmp = comparison_functor(f, u, cover, desc);
        FiniteGroupoid fu = f.at(u);
        // fully faithful: hom(a,b) maps bijectively onto hom(eff a, eff b)
        rec.fully_faithful = true;
        for (int a = 0; a < fu.n_obj && rec.fully_faithful; ++a)
          for (int b = 0; b < fu.n_obj && rec.fully_faithful; ++b) {
            std::vector<int> image;
            for (int m : fu.homset(a, b)) image.push_back(cmp.mor[m]);
            std::sort(image.begin(), image.end());
            if (std::unique(image.begin(), image.end()) != image.end()) {
              rec.fully_faithful = false;
              rec.counterexample = "comparison not faithful at " + rec.open;
            }
            if (image.size() != desc.gpd.homset(cmp.obj[a], cmp.obj[b]).size()) {
              rec.fully_faithful = false;
              rec.counterexample = "comparison not full at " + rec.open;
            }
          }
        // essentially surjective: every datum is isomorphic to an effective one
        rec.essentially_surjective = true;
        for (int d = 0; d < desc.gpd.n_obj && rec.essentially_surjective; ++d) {
          bool hit = false;
          for (int a = 0; a < fu.n_obj && !hit; ++a)
            if (!desc.gpd.homset(cmp.obj[a], d).empty()) hit = true;
          if (!hit) {
            rec.essentially_surjective = false;
            rec.counterexample = "non-glueing datum at " + rec.open + " level " + std::to_string(level);
          }
        }
        if (!rec.fully_faithful || !rec.essentially_surjective) rep.is_stack = false;
        rep.records.push_back(std::move(rec));
      }
    }
  }
  return rep;
}

namespace detail {

// Fit every piece of `fine` into some piece of `coarse`, preferring the
// least index.
template <typename S>
std::optional<std::vector<int>> fit_map(const std::vector<typename S::Open>& fine,
                                        const std::vector<typename S::Open>& coarse) {
  std::vector<int> fit(fine.size(), -1);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    for (std::size_t j = 0; j < coarse.size(); ++j)
      if (S::leq(fine[i], coarse[j])) {
        fit[i] = static_cast<int>(j);
        break;
      }
    if (fit[i] < 0) return std::nullopt;
  }
  return fit;
}

// Restricts a datum on covers(sup, depth) to a datum on covers(sub, depth):
// first land on the finest level of `sub` that fits into the sup cover,
// then push down the canonical refinement chain.
template <typename S>
DescentDatum<S> restrict_datum(const Prestack<S>& f, const DescentDatum<S>& d,
                               const typename S::Open& sub, int depth) {
  const auto& sup_pieces = d.cover.pieces;
  int fit_level = -1;
  std::vector<int> fit;
  for (int k = 0; k <= depth; ++k) {
    auto c = S::covers(sub, k).at(0);
    std::vector<typename S::Open> pieces = c.pieces;
    if (auto m = fit_map<S>(pieces, sup_pieces)) {
      fit_level = k;
      fit = *m;
      break;
    }
  }
  if (fit_level < 0)
    throw RestrictionUnsupported("no cover of the sub-open fits the covering pieces at this depth");

  auto cover_at = [&](int k) { return S::covers(sub, k).at(0); };
  DescentDatum<S> cur;
  cur.cover = cover_at(fit_level);
  int n = static_cast<int>(cur.cover.pieces.size());
  for (int i = 0; i < n; ++i)
    cur.sections.push_back(
        f.restrict_to(cur.cover.pieces[i], sup_pieces[fit[i]]).obj[d.sections[fit[i]]]);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      auto m = S::meet(cur.cover.pieces[i], cur.cover.pieces[j]);
      if (!m) continue;
      int fi = fit[i], fj = fit[j];
      FiniteGroupoid mf = f.at(*m);
      if (fi == fj) {
        int r = f.restrict_to(*m, sup_pieces[fi]).obj[d.sections[fi]];
        cur.transitions[{i, j}] = mf.id_mor[r];
      } else {
        auto sup_meet = S::meet(sup_pieces[std::min(fi, fj)], sup_pieces[std::max(fi, fj)]);
        if (!sup_meet) throw RestrictionUnsupported("fitted pieces overlap but their hosts do not");
        int phi = transition_between(f, d, f.at(*sup_meet), fi, fj);
        cur.transitions[{i, j}] = f.restrict_to(*m, *sup_meet).mor[phi];
      }
    }

  // refine down to `depth`
  for (int k = fit_level; k < depth; ++k) {
    auto next = cover_at(k + 1);
    auto factor = fit_map<S>(next.pieces, cur.cover.pieces);
    if (!factor) throw std::logic_error("refinement chain broken");
    DescentDatum<S> fine;
    fine.cover = next;
    int fn = static_cast<int>(next.pieces.size());
    for (int i = 0; i < fn; ++i)
      fine.sections.push_back(
          f.restrict_to(next.pieces[i], cur.cover.pieces[(*factor)[i]]).obj[cur.sections[(*factor)[i]]]);
    for (int i = 0; i < fn; ++i)
      for (int j = i + 1; j < fn; ++j) {
        auto m = S::meet(next.pieces[i], next.pieces[j]);
        if (!m) continue;
        int fi = (*factor)[i], fj = (*factor)[j];
        FiniteGroupoid mf = f.at(*m);
        if (fi == fj) {
          int r = f.restrict_to(*m, cur.cover.pieces[fi]).obj[cur.sections[fi]];
          fine.transitions[{i, j}] = mf.id_mor[r];
        } else {
          auto pm = S::meet(cur.cover.pieces[std::min(fi, fj)], cur.cover.pieces[std::max(fi, fj)]);
          if (!pm) throw std::logic_error("refinement: factor pieces do not overlap");
          int phi = transition_between(f, cur, f.at(*pm), fi, fj);
          fine.transitions[{i, j}] = f.restrict_to(*m, *pm).mor[phi];
        }
      }
    cur = std::move(fine);
  }
  return cur;
}

}  // namespace detail

template <typename S>
Prestack<S> codiscrete_replacement(const Prestack<S>& f) {
  Prestack<S> out;
  out.name = f.name + "-codiscrete";
  out.prop_fibers = true;
  auto base_at = f.at;
  auto base_res = f.restrict_to;
  out.at = [base_at](const typename S::Open& u) {
    return groupoid::codiscrete_groupoid(base_at(u).n_obj);
  };
  out.restrict_to = [base_at, base_res](const typename S::Open& sub, const typename S::Open& sup) {
    Functor r = base_res(sub, sup);
    int n_sup = base_at(sup).n_obj;
    int n_sub = base_at(sub).n_obj;
    Functor out_f;
    out_f.obj = r.obj;
    out_f.mor.resize(n_sup * n_sup);
    for (int x = 0; x < n_sup; ++x)
      for (int y = 0; y < n_sup; ++y) out_f.mor[x * n_sup + y] = r.obj[x] * n_sub + r.obj[y];
    return out_f;
  };
  return out;
}

template <typename S>
Prestack<S> stackify(const Prestack<S>& f, int depth, std::shared_ptr<Budget> budget) {
  Prestack<S> out;
  out.name = f.name + "-stackified@" + std::to_string(depth);
  out.prop_fibers = f.prop_fibers;

  if (f.prop_fibers) {
    // propositional fibers: coherence is empty, so a datum exists exactly
    // when every piece has a local object; the fiber is skeletal
    auto base_at = f.at;
    out.at = [base_at, depth](const typename S::Open& u) {
      auto cover = S::covers(u, depth).at(0);
      for (const auto& p : cover.pieces)
        if (base_at(p).n_obj == 0) return groupoid::codiscrete_groupoid(0);
      return groupoid::codiscrete_groupoid(1);
    };
    auto self_at = out.at;
    out.restrict_to = [self_at](const typename S::Open& sub, const typename S::Open& sup) {
      int n_sup = self_at(sup).n_obj;
      int n_sub = self_at(sub).n_obj;
      if (n_sup > 0 && n_sub == 0)
        throw RestrictionUnsupported("section lost under restriction of a stackified proposition");
      Functor r;
      r.obj.assign(n_sup, 0);
      r.mor.assign(n_sup * n_sup, 0);
      return r;
    };
    return out;
  }

  auto cache = std::make_shared<std::map<std::string, DescGroupoid<S>>>();
  auto fiber = [f, depth, budget, cache](const typename S::Open& u) -> const DescGroupoid<S>& {
    std::string key = S::to_string(u);
    auto it = cache->find(key);
    if (it == cache->end())
      it = cache->emplace(key, descent_groupoid(f, S::covers(u, depth).at(0), *budget)).first;
    return it->second;
  };
  out.at = [fiber](const typename S::Open& u) { return fiber(u).gpd; };
  out.restrict_to = [f, fiber, depth](const typename S::Open& sub, const typename S::Open& sup) {
    const DescGroupoid<S>& src = fiber(sup);
    const DescGroupoid<S>& dst = fiber(sub);
    Functor r;
    std::vector<int> fit;
    r.obj.resize(src.data.size());
    for (std::size_t d = 0; d < src.data.size(); ++d) {
      auto restricted = detail::restrict_datum(f, src.data[d], sub, depth, &fit);
      auto it = std::find(dst.data.begin(), dst.data.end(), restricted);
      if (it == dst.data.end()) throw std::logic_error("stackify: restricted datum not enumerated");
      r.obj[d] = static_cast<int>(it - dst.data.begin());
    }
    r.mor.resize(src.mors.size());
    auto fine = S::covers(sub, depth).at(0);
    for (std::size_t m = 0; m < src.mors.size(); ++m) {
      // components restrict along the same piece fitting as the objects
      const DescMorphism<S>& dm = src.mors[m];
      std::vector<int> comps(fine.pieces.size());
      for (std::size_t i = 0; i < fine.pieces.size(); ++i)
        comps[i] =
            f.restrict_to(fine.pieces[i], src.data[dm.src].cover.pieces[fit[i]]).mor[dm.comps[fit[i]]];
      int found = -1;
      for (std::size_t k = 0; k < dst.mors.size(); ++k)
        if (dst.mors[k].src == r.obj[dm.src] && dst.mors[k].dst == r.obj[dm.dst] &&
            dst.mors[k].comps == comps) {
          found = static_cast<int>(k);
          break;
        }
      if (found < 0) throw std::logic_error("stackify: restricted morphism not enumerated");
      r.mor[m] = found;
    }
    return r;
  };
  return out;
}

template <typename S>
Prestack<S> trunc_stack(const Prestack<S>& f, int depth, std::shared_ptr<Budget> budget) {
  Prestack<S> out = stackify(codiscrete_replacement(f), depth, std::move(budget));
  out.name = f.name + "-truncated@" + std::to_string(depth);
  return out;
}

}  // namespace stacklab::stack
