#include "stacklab/groupoid.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

namespace stacklab::groupoid {

namespace {

void index_homs(FiniteGroupoid& g) {
  g.hom.assign(g.n_obj, std::vector<std::vector<int>>(g.n_obj));
  for (int m = 0; m < g.n_mor(); ++m) g.hom[g.mor_src[m]][g.mor_dst[m]].push_back(m);
}

void derive_structure(FiniteGroupoid& g) {
  index_homs(g);
  g.id_mor.assign(g.n_obj, -1);
  for (int m = 0; m < g.n_mor(); ++m) {
    if (g.mor_src[m] != g.mor_dst[m]) continue;
    bool is_id = true;
    for (int f = 0; f < g.n_mor() && is_id; ++f) {
      if (g.mor_dst[f] == g.mor_src[m] && g.comp[m][f] != f) is_id = false;
      if (g.mor_src[f] == g.mor_dst[m] && g.comp[f][m] != f) is_id = false;
    }
    if (is_id) g.id_mor[g.mor_src[m]] = m;
  }
  for (int x = 0; x < g.n_obj; ++x)
    if (g.id_mor[x] < 0) throw std::logic_error("groupoid: missing identity");
  g.inv.assign(g.n_mor(), -1);
  for (int m = 0; m < g.n_mor(); ++m) {
    for (int w : g.hom[g.mor_dst[m]][g.mor_src[m]]) {
      if (g.comp[w][m] == g.id_mor[g.mor_src[m]] && g.comp[m][w] == g.id_mor[g.mor_dst[m]]) {
        g.inv[m] = w;
        break;
      }
    }
    if (g.inv[m] < 0) throw std::logic_error("groupoid: missing inverse");
  }
}

}  // namespace

FiniteGroupoid discrete_groupoid(int n) {
  FiniteGroupoid g;
  g.n_obj = n;
  g.mor_src.resize(n);
  g.mor_dst.resize(n);
  std::iota(g.mor_src.begin(), g.mor_src.end(), 0);
  std::iota(g.mor_dst.begin(), g.mor_dst.end(), 0);
  g.comp.assign(n, std::vector<int>(n, -1));
  for (int i = 0; i < n; ++i) g.comp[i][i] = i;
  derive_structure(g);
  return g;
}

FiniteGroupoid codiscrete_groupoid(int n) {
  FiniteGroupoid g;
  g.n_obj = n;
  // morphism x*n + y : x -> y
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      g.mor_src.push_back(x);
      g.mor_dst.push_back(y);
    }
  int m = n * n;
  g.comp.assign(m, std::vector<int>(m, -1));
  for (int f = 0; f < m; ++f)
    for (int gm = 0; gm < m; ++gm)
      if (g.mor_src[gm] == g.mor_dst[f]) g.comp[gm][f] = g.mor_src[f] * n + g.mor_dst[gm];
  derive_structure(g);
  return g;
}

FiniteGroupoid cyclic_group_groupoid(int k) {
  FiniteGroupoid g;
  g.n_obj = 1;
  g.mor_src.assign(k, 0);
  g.mor_dst.assign(k, 0);
  g.comp.assign(k, std::vector<int>(k));
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) g.comp[a][b] = (a + b) % k;
  derive_structure(g);
  return g;
}

FiniteGroupoid groupoid_from_parts(int n_obj, std::vector<std::pair<int, int>> morphisms,
                                   const std::vector<std::vector<int>>& compose_table) {
  FiniteGroupoid g;
  g.n_obj = n_obj;
  for (auto [s, d] : morphisms) {
    g.mor_src.push_back(s);
    g.mor_dst.push_back(d);
  }
  g.comp = compose_table;
  derive_structure(g);
  auto report = validate_groupoid(g);
  if (!report.ok) throw std::logic_error("groupoid_from_parts: " + report.violation);
  return g;
}

ValidationReport validate_groupoid(const FiniteGroupoid& g) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  int m = g.n_mor();
  if (static_cast<int>(g.mor_dst.size()) != m || static_cast<int>(g.comp.size()) != m)
    return fail("table sizes disagree");
  for (int f = 0; f < m; ++f) {
    if (static_cast<int>(g.comp[f].size()) != m) return fail("composition table not square");
    if (g.mor_src[f] < 0 || g.mor_src[f] >= g.n_obj || g.mor_dst[f] < 0 || g.mor_dst[f] >= g.n_obj)
      return fail("morphism endpoints out of range");
  }
  // totality and endpoint compatibility of composition
  for (int f = 0; f < m; ++f)
    for (int h = 0; h < m; ++h) {
      bool composable = g.mor_dst[f] == g.mor_src[h];
      int r = g.comp[h][f];
      if (composable) {
        if (r < 0) return fail("composition not total at (" + std::to_string(h) + "," + std::to_string(f) + ")");
        if (g.mor_src[r] != g.mor_src[f] || g.mor_dst[r] != g.mor_dst[h])
          return fail("composite has wrong endpoints");
      } else if (r >= 0) {
        return fail("composite defined for non-composable pair");
      }
    }
  // identities
  for (int x = 0; x < g.n_obj; ++x) {
    int i = g.id_mor[x];
    if (i < 0 || g.mor_src[i] != x || g.mor_dst[i] != x) return fail("bad identity table");
    for (int f = 0; f < m; ++f) {
      if (g.mor_src[f] == x && g.comp[f][i] != f) return fail("right identity law fails");
      if (g.mor_dst[f] == x && g.comp[i][f] != f) return fail("left identity law fails");
    }
  }
  // associativity, exhaustively
  for (int f = 0; f < m; ++f)
    for (int h = 0; h < m; ++h) {
      if (g.mor_dst[f] != g.mor_src[h]) continue;
      for (int k = 0; k < m; ++k) {
        if (g.mor_dst[h] != g.mor_src[k]) continue;
        if (g.comp[k][g.comp[h][f]] != g.comp[g.comp[k][h]][f])
          return fail("associativity fails at (" + std::to_string(k) + "," + std::to_string(h) + "," +
                      std::to_string(f) + ")");
      }
    }
  // inverses
  for (int f = 0; f < m; ++f) {
    int w = g.inv[f];
    if (w < 0 || g.mor_src[w] != g.mor_dst[f] || g.mor_dst[w] != g.mor_src[f])
      return fail("inverse table malformed at " + std::to_string(f));
    if (g.comp[w][f] != g.id_mor[g.mor_src[f]] || g.comp[f][w] != g.id_mor[g.mor_dst[f]])
      return fail("morphism " + std::to_string(f) + " lacks a two-sided inverse");
  }
  return {};
}

bool is_prop_groupoid(const FiniteGroupoid& g) {
  for (int x = 0; x < g.n_obj; ++x)
    for (int y = 0; y < g.n_obj; ++y)
      if (g.hom[x][y].size() != 1) return false;
  return true;
}

Functor identity_functor(const FiniteGroupoid& g) {
  Functor f;
  f.obj.resize(g.n_obj);
  f.mor.resize(g.n_mor());
  std::iota(f.obj.begin(), f.obj.end(), 0);
  std::iota(f.mor.begin(), f.mor.end(), 0);
  return f;
}

Functor compose_functor(const Functor& g, const Functor& f) {
  Functor r;
  r.obj.reserve(f.obj.size());
  r.mor.reserve(f.mor.size());
  for (int o : f.obj) r.obj.push_back(g.obj[o]);
  for (int m : f.mor) r.mor.push_back(g.mor[m]);
  return r;
}

bool is_functor(const FiniteGroupoid& dom, const FiniteGroupoid& cod, const Functor& f) {
  if (static_cast<int>(f.obj.size()) != dom.n_obj || static_cast<int>(f.mor.size()) != dom.n_mor())
    return false;
  for (int m = 0; m < dom.n_mor(); ++m) {
    int fm = f.mor[m];
    if (fm < 0 || fm >= cod.n_mor()) return false;
    if (cod.mor_src[fm] != f.obj[dom.mor_src[m]] || cod.mor_dst[fm] != f.obj[dom.mor_dst[m]])
      return false;
  }
  for (int x = 0; x < dom.n_obj; ++x)
    if (f.mor[dom.id_mor[x]] != cod.id_mor[f.obj[x]]) return false;
  for (int a = 0; a < dom.n_mor(); ++a)
    for (int b = 0; b < dom.n_mor(); ++b)
      if (dom.comp[b][a] >= 0 && f.mor[dom.comp[b][a]] != cod.comp[f.mor[b]][f.mor[a]]) return false;
  return true;
}

Family constant_family(const FiniteGroupoid& base, const FiniteGroupoid& fiber) {
  Family fam;
  fam.fib.assign(base.n_obj, fiber);
  fam.tr.assign(base.n_mor(), identity_functor(fiber));
  return fam;
}

ValidationReport validate_family(const FiniteGroupoid& base, const Family& fam) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  if (static_cast<int>(fam.fib.size()) != base.n_obj || static_cast<int>(fam.tr.size()) != base.n_mor())
    return fail("family tables sized wrong");
  for (int m = 0; m < base.n_mor(); ++m)
    if (!is_functor(fam.fib[base.mor_src[m]], fam.fib[base.mor_dst[m]], fam.tr[m]))
      return fail("transport " + std::to_string(m) + " is not a functor");
  for (int x = 0; x < base.n_obj; ++x)
    if (fam.tr[base.id_mor[x]] != identity_functor(fam.fib[x]))
      return fail("transport of identity is not the identity functor");
  for (int f = 0; f < base.n_mor(); ++f)
    for (int g = 0; g < base.n_mor(); ++g) {
      if (base.comp[g][f] < 0) continue;
      if (fam.tr[base.comp[g][f]] != compose_functor(fam.tr[g], fam.tr[f]))
        return fail("transport not strictly functorial at (" + std::to_string(g) + "," +
                    std::to_string(f) + ")");
    }
  return {};
}

ValidationReport validate_section(const FiniteGroupoid& base, const Family& fam, const Section& s) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  if (static_cast<int>(s.obj.size()) != base.n_obj || static_cast<int>(s.mor.size()) != base.n_mor())
    return fail("section tables sized wrong");
  for (int h = 0; h < base.n_mor(); ++h) {
    const FiniteGroupoid& fib = fam.fib[base.mor_dst[h]];
    int m = s.mor[h];
    if (m < 0 || m >= fib.n_mor()) return fail("section morphism out of range");
    if (fib.mor_src[m] != fam.tr[h].obj[s.obj[base.mor_src[h]]] || fib.mor_dst[m] != s.obj[base.mor_dst[h]])
      return fail("naturality endpoints violated at base morphism " + std::to_string(h));
  }
  for (int x = 0; x < base.n_obj; ++x)
    if (s.mor[base.id_mor[x]] != fam.fib[x].id_mor[s.obj[x]]) return fail("section of identity not identity");
  for (int f = 0; f < base.n_mor(); ++f)
    for (int g = 0; g < base.n_mor(); ++g) {
      int gf = base.comp[g][f];
      if (gf < 0) continue;
      const FiniteGroupoid& fib = fam.fib[base.mor_dst[g]];
      int expected = fib.compose(s.mor[g], fam.tr[g].mor[s.mor[f]]);
      if (s.mor[gf] != expected)
        return fail("section composition law fails at (" + std::to_string(g) + "," + std::to_string(f) + ")");
    }
  return {};
}

std::vector<Section> enumerate_sections(const FiniteGroupoid& base, const Family& fam, Budget& budget) {
  std::vector<Section> out;
  if (base.n_obj == 0) {
    out.push_back(Section{});
    return out;
  }
  Section cur;
  cur.obj.assign(base.n_obj, -1);
  cur.mor.assign(base.n_mor(), -1);

  // assign objects first, then morphisms, validating at the leaves
  std::function<void(int)> assign_mor = [&](int h) {
    if (h == base.n_mor()) {
      if (validate_section(base, fam, cur).ok) out.push_back(cur);
      return;
    }
    budget.spend();
    const FiniteGroupoid& fib = fam.fib[base.mor_dst[h]];
    int from = fam.tr[h].obj[cur.obj[base.mor_src[h]]];
    int to = cur.obj[base.mor_dst[h]];
    for (int m : fib.homset(from, to)) {
      cur.mor[h] = m;
      assign_mor(h + 1);
    }
    cur.mor[h] = -1;
  };
  std::function<void(int)> assign_obj = [&](int x) {
    if (x == base.n_obj) {
      assign_mor(0);
      return;
    }
    budget.spend();
    for (int o = 0; o < fam.fib[x].n_obj; ++o) {
      cur.obj[x] = o;
      assign_obj(x + 1);
    }
    cur.obj[x] = -1;
  };
  assign_obj(0);
  return out;
}

namespace {

std::vector<NatFam> enumerate_natfams(const FiniteGroupoid& base, const Family& fam,
                                      const std::vector<Section>& sections, Budget& budget) {
  std::vector<NatFam> out;
  for (int si = 0; si < static_cast<int>(sections.size()); ++si) {
    for (int ti = 0; ti < static_cast<int>(sections.size()); ++ti) {
      const Section& s = sections[si];
      const Section& t = sections[ti];
      std::vector<int> comp(base.n_obj, -1);
      std::function<void(int)> go = [&](int x) {
        if (x == base.n_obj) {
          // check naturality against every base morphism
          for (int h = 0; h < base.n_mor(); ++h) {
            const FiniteGroupoid& fib = fam.fib[base.mor_dst[h]];
            int lhs = fib.compose(comp[base.mor_dst[h]], s.mor[h]);
            int rhs = fib.compose(t.mor[h], fam.tr[h].mor[comp[base.mor_src[h]]]);
            if (lhs != rhs) return;
          }
          out.push_back(NatFam{si, ti, comp});
          return;
        }
        budget.spend();
        for (int m : fam.fib[x].homset(s.obj[x], t.obj[x])) {
          comp[x] = m;
          go(x + 1);
        }
        comp[x] = -1;
      };
      go(0);
    }
  }
  return out;
}

}  // namespace

SectionGroupoid section_groupoid(const FiniteGroupoid& base, const Family& fam, Budget& budget) {
  SectionGroupoid sg;
  sg.sections = enumerate_sections(base, fam, budget);
  sg.mors = enumerate_natfams(base, fam, sg.sections, budget);
  FiniteGroupoid& g = sg.gpd;
  g.n_obj = static_cast<int>(sg.sections.size());
  for (const NatFam& nf : sg.mors) {
    g.mor_src.push_back(nf.src);
    g.mor_dst.push_back(nf.dst);
  }
  int m = g.n_mor();
  g.comp.assign(m, std::vector<int>(m, -1));
  auto find_nat = [&](int src, int dst, const std::vector<int>& comp) {
    for (int i = 0; i < m; ++i)
      if (sg.mors[i].src == src && sg.mors[i].dst == dst && sg.mors[i].comp == comp) return i;
    throw std::logic_error("section groupoid: composite natural family missing");
  };
  for (int f = 0; f < m; ++f)
    for (int h = 0; h < m; ++h) {
      if (sg.mors[f].dst != sg.mors[h].src) continue;
      budget.spend();
      std::vector<int> comp(base.n_obj);
      for (int x = 0; x < base.n_obj; ++x)
        comp[x] = fam.fib[x].compose(sg.mors[h].comp[x], sg.mors[f].comp[x]);
      g.comp[h][f] = find_nat(sg.mors[f].src, sg.mors[h].dst, comp);
    }
  derive_structure(g);
  return sg;
}

int Total::obj_id(int base_obj, int fib_obj) const {
  for (int i = 0; i < static_cast<int>(obj_pair.size()); ++i)
    if (obj_pair[i] == std::make_pair(base_obj, fib_obj)) return i;
  throw std::logic_error("total: unknown object pair");
}

int Total::mor_id(int base_mor, int fib_mor) const {
  for (int i = 0; i < static_cast<int>(mor_pair.size()); ++i)
    if (mor_pair[i] == std::make_pair(base_mor, fib_mor)) return i;
  throw std::logic_error("total: unknown morphism pair");
}

Total total_groupoid(const FiniteGroupoid& base, const Family& fam, Budget& budget) {
  Total t;
  FiniteGroupoid& g = t.gpd;
  std::vector<std::vector<int>> obj_of(base.n_obj);
  for (int x = 0; x < base.n_obj; ++x) {
    obj_of[x].resize(fam.fib[x].n_obj);
    for (int a = 0; a < fam.fib[x].n_obj; ++a) {
      budget.spend();
      obj_of[x][a] = g.n_obj++;
      t.obj_pair.emplace_back(x, a);
    }
  }
  // morphism (h, phi): (x,a) -> (y,b) with phi : tr[h](a) -> b
  for (int h = 0; h < base.n_mor(); ++h) {
    int y = base.mor_dst[h];
    for (int a = 0; a < fam.fib[base.mor_src[h]].n_obj; ++a) {
      int ta = fam.tr[h].obj[a];
      for (int b = 0; b < fam.fib[y].n_obj; ++b)
        for (int phi : fam.fib[y].homset(ta, b)) {
          budget.spend();
          g.mor_src.push_back(obj_of[base.mor_src[h]][a]);
          g.mor_dst.push_back(obj_of[y][b]);
          t.mor_pair.emplace_back(h, phi);
        }
    }
  }
  int m = g.n_mor();
  g.comp.assign(m, std::vector<int>(m, -1));
  std::map<std::pair<std::pair<int, int>, int>, int> lookup;  // ((basemor, fibmor), src) -> id
  for (int i = 0; i < m; ++i) lookup[{t.mor_pair[i], g.mor_src[i]}] = i;
  for (int f = 0; f < m; ++f)
    for (int h = 0; h < m; ++h) {
      if (g.mor_dst[f] != g.mor_src[h]) continue;
      budget.spend();
      auto [bf, pf] = t.mor_pair[f];
      auto [bh, ph] = t.mor_pair[h];
      int bc = base.comp[bh][bf];
      const FiniteGroupoid& fib = fam.fib[base.mor_dst[bh]];
      int pc = fib.compose(ph, fam.tr[bh].mor[pf]);
      g.comp[h][f] = lookup.at({{bc, pc}, g.mor_src[f]});
    }
  derive_structure(g);
  return t;
}

// ---------------------------------------------------------------------------
// Equivalences

ValidationReport validate_equivalence(const FiniteGroupoid& g, const FiniteGroupoid& h,
                                      const Equivalence& e) {
  auto fail = [](std::string msg) { return ValidationReport{false, std::move(msg)}; };
  if (!is_functor(g, h, e.fwd)) return fail("forward map is not a functor");
  if (!is_functor(h, g, e.bwd)) return fail("backward map is not a functor");
  // unit: id_G => bwd . fwd natural iso; counit: fwd . bwd => id_H
  for (int x = 0; x < g.n_obj; ++x) {
    int u = e.unit[x];
    if (g.mor_src[u] != x || g.mor_dst[u] != e.bwd.obj[e.fwd.obj[x]]) return fail("unit endpoints wrong");
  }
  for (int y = 0; y < h.n_obj; ++y) {
    int c = e.counit[y];
    if (h.mor_src[c] != e.fwd.obj[e.bwd.obj[y]] || h.mor_dst[c] != y) return fail("counit endpoints wrong");
  }
  for (int m = 0; m < g.n_mor(); ++m) {
    int x = g.mor_src[m], y = g.mor_dst[m];
    if (g.compose(e.unit[y], m) != g.compose(e.bwd.mor[e.fwd.mor[m]], e.unit[x]))
      return fail("unit not natural at " + std::to_string(m));
  }
  for (int m = 0; m < h.n_mor(); ++m) {
    int x = h.mor_src[m], y = h.mor_dst[m];
    if (h.compose(m, e.counit[x]) != h.compose(e.counit[y], e.fwd.mor[e.bwd.mor[m]]))
      return fail("counit not natural at " + std::to_string(m));
  }
  // triangle identities
  for (int x = 0; x < g.n_obj; ++x) {
    int fx = e.fwd.obj[x];
    if (h.compose(e.counit[fx], e.fwd.mor[e.unit[x]]) != h.id_mor[fx])
      return fail("triangle (fwd) fails at object " + std::to_string(x));
  }
  for (int y = 0; y < h.n_obj; ++y) {
    int by = e.bwd.obj[y];
    if (g.compose(e.bwd.mor[e.counit[y]], e.unit[by]) != g.id_mor[by])
      return fail("triangle (bwd) fails at object " + std::to_string(y));
  }
  return {};
}

namespace {

// Connected components (iso classes) of a groupoid.
std::vector<int> components(const FiniteGroupoid& g, int* count) {
  std::vector<int> comp(g.n_obj, -1);
  int c = 0;
  for (int x = 0; x < g.n_obj; ++x) {
    if (comp[x] >= 0) continue;
    comp[x] = c;
    std::vector<int> stack{x};
    while (!stack.empty()) {
      int y = stack.back();
      stack.pop_back();
      for (int z = 0; z < g.n_obj; ++z)
        if (comp[z] < 0 && (!g.hom[y][z].empty() || !g.hom[z][y].empty())) {
          comp[z] = c;
          stack.push_back(z);
        }
    }
    ++c;
  }
  *count = c;
  return comp;
}

// Automorphism group of an object as a composition table over hom(x,x).
struct AutGroup {
  std::vector<int> elems;           // morphism ids
  std::vector<std::vector<int>> mul;  // indices into elems
  int identity_index = 0;
};

AutGroup aut_group(const FiniteGroupoid& g, int x) {
  AutGroup a;
  a.elems = g.hom[x][x];
  int n = static_cast<int>(a.elems.size());
  a.mul.assign(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int c = g.compose(a.elems[i], a.elems[j]);
      a.mul[i][j] = static_cast<int>(std::find(a.elems.begin(), a.elems.end(), c) - a.elems.begin());
    }
    if (a.elems[i] == g.id_mor[x]) a.identity_index = i;
  }
  return a;
}

// Group isomorphism by brute-force bijection search; adequate for the small
// automorphism groups that arise here.
std::optional<std::vector<int>> group_iso(const AutGroup& a, const AutGroup& b, Budget& budget) {
  int n = static_cast<int>(a.elems.size());
  if (static_cast<int>(b.elems.size()) != n) return std::nullopt;
  if (n > 8) throw BudgetExceeded("automorphism group too large for brute-force isomorphism");
  std::vector<int> perm(n, -1), used(n, 0);
  std::function<bool(int)> go = [&](int i) -> bool {
    if (i == n) return true;
    budget.spend();
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (i == a.identity_index && j != b.identity_index) continue;
      perm[i] = j;
      used[j] = 1;
      bool consistent = true;
      for (int k = 0; k <= i && consistent; ++k) {
        if (perm[k] < 0) continue;
        int ik = a.mul[i][k], ki = a.mul[k][i];
        if (ik <= i && perm[ik] >= 0 && b.mul[j][perm[k]] != perm[ik]) consistent = false;
        if (ki <= i && perm[ki] >= 0 && b.mul[perm[k]][j] != perm[ki]) consistent = false;
      }
      if (consistent && go(i + 1)) return true;
      used[j] = 0;
      perm[i] = -1;
    }
    return false;
  };
  if (!go(0)) return std::nullopt;
  return perm;
}

}  // namespace

std::optional<Equivalence> find_equivalence(const FiniteGroupoid& g, const FiniteGroupoid& h,
                                            Budget& budget) {
  int gc = 0, hc = 0;
  auto gcomp = components(g, &gc);
  auto hcomp = components(h, &hc);
  if (gc != hc) return std::nullopt;

  // representatives and connecting isos rep -> x
  std::vector<int> grep(gc, -1), hrep(hc, -1);
  for (int x = 0; x < g.n_obj; ++x)
    if (grep[gcomp[x]] < 0) grep[gcomp[x]] = x;
  for (int y = 0; y < h.n_obj; ++y)
    if (hrep[hcomp[y]] < 0) hrep[hcomp[y]] = y;

  auto connector = [](const FiniteGroupoid& k, int rep, int x) {
    if (x == rep) return k.id_mor[rep];
    return k.hom[rep][x].at(0);
  };

  // match components by automorphism-group isomorphism (first-fit)
  std::vector<int> match(gc, -1), taken(hc, 0);
  std::vector<AutGroup> gauts(gc), hauts(hc);
  std::vector<std::vector<int>> isos(gc);
  for (int c = 0; c < gc; ++c) gauts[c] = aut_group(g, grep[c]);
  for (int c = 0; c < hc; ++c) hauts[c] = aut_group(h, hrep[c]);
  // also insist component SIZES... not needed: equivalence ignores object counts
  for (int c = 0; c < gc; ++c) {
    for (int d = 0; d < hc; ++d) {
      if (taken[d]) continue;
      auto iso = group_iso(gauts[c], hauts[d], budget);
      if (iso) {
        match[c] = d;
        taken[d] = 1;
        isos[c] = *iso;
        break;
      }
    }
    if (match[c] < 0) return std::nullopt;
  }

  auto index_in = [](const std::vector<int>& v, int x) {
    return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin());
  };

  // fwd collapses each component onto the matched representative
  Equivalence e;
  e.fwd.obj.resize(g.n_obj);
  e.fwd.mor.resize(g.n_mor());
  for (int x = 0; x < g.n_obj; ++x) e.fwd.obj[x] = hrep[match[gcomp[x]]];
  for (int m = 0; m < g.n_mor(); ++m) {
    int c = gcomp[g.mor_src[m]];
    int cx = connector(g, grep[c], g.mor_src[m]);
    int cy = connector(g, grep[c], g.mor_dst[m]);
    int loop = g.compose(g.inv[cy], g.compose(m, cx));  // rep -> rep
    int li = index_in(gauts[c].elems, loop);
    e.fwd.mor[m] = hauts[match[c]].elems[isos[c][li]];
  }
  // bwd collapses back using the inverse group iso
  std::vector<std::vector<int>> inv_iso(gc);
  for (int c = 0; c < gc; ++c) {
    inv_iso[c].resize(isos[c].size());
    for (int i = 0; i < static_cast<int>(isos[c].size()); ++i) inv_iso[c][isos[c][i]] = i;
  }
  std::vector<int> hmatch(hc);  // h component -> g component
  for (int c = 0; c < gc; ++c) hmatch[match[c]] = c;
  e.bwd.obj.resize(h.n_obj);
  e.bwd.mor.resize(h.n_mor());
  for (int y = 0; y < h.n_obj; ++y) e.bwd.obj[y] = grep[hmatch[hcomp[y]]];
  for (int m = 0; m < h.n_mor(); ++m) {
    int d = hcomp[h.mor_src[m]];
    int c = hmatch[d];
    int cx = connector(h, hrep[d], h.mor_src[m]);
    int cy = connector(h, hrep[d], h.mor_dst[m]);
    int loop = h.compose(h.inv[cy], h.compose(m, cx));
    int li = index_in(hauts[d].elems, loop);
    e.bwd.mor[m] = gauts[c].elems[inv_iso[c][li]];
  }
  // unit x : x -> bwd(fwd x) = grep[comp x]; use the inverse connector
  e.unit.resize(g.n_obj);
  for (int x = 0; x < g.n_obj; ++x) e.unit[x] = g.inv[connector(g, grep[gcomp[x]], x)];
  e.counit.resize(h.n_obj);
  for (int y = 0; y < h.n_obj; ++y) e.counit[y] = connector(h, hrep[hcomp[y]], y);

  auto report = validate_equivalence(g, h, e);
  if (!report.ok) throw std::logic_error("find_equivalence constructed invalid data: " + report.violation);
  return e;
}

bool are_equivalent(const FiniteGroupoid& g, const FiniteGroupoid& h, Budget& budget) {
  if (is_prop_groupoid(g) && is_prop_groupoid(h)) return (g.n_obj == 0) == (h.n_obj == 0);
  return find_equivalence(g, h, budget).has_value();
}

// ---------------------------------------------------------------------------
// The universe of finite sets

namespace {

std::vector<std::vector<int>> all_perms(int n) {
  std::vector<int> base(n);
  std::iota(base.begin(), base.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));
  return out;
}

}  // namespace

FiniteGroupoid set_universe(int max_card) {
  FiniteGroupoid g;
  g.n_obj = max_card + 1;
  std::vector<std::vector<std::vector<int>>> perms(g.n_obj);
  for (int k = 0; k <= max_card; ++k) {
    perms[k] = all_perms(k);
    for (std::size_t i = 0; i < perms[k].size(); ++i) {
      g.mor_src.push_back(k);
      g.mor_dst.push_back(k);
    }
  }
  int m = g.n_mor();
  // morphism id -> (card, perm index) in enumeration order
  std::vector<std::pair<int, int>> decode;
  for (int k = 0; k <= max_card; ++k)
    for (std::size_t i = 0; i < perms[k].size(); ++i) decode.emplace_back(k, static_cast<int>(i));
  auto encode = [&](int k, const std::vector<int>& p) {
    int off = 0;
    for (int j = 0; j < k; ++j) off += static_cast<int>(perms[j].size());
    for (std::size_t i = 0; i < perms[k].size(); ++i)
      if (perms[k][i] == p) return off + static_cast<int>(i);
    throw std::logic_error("set_universe: permutation not found");
  };
  g.comp.assign(m, std::vector<int>(m, -1));
  for (int f = 0; f < m; ++f)
    for (int h = 0; h < m; ++h) {
      if (decode[f].first != decode[h].first) continue;
      int k = decode[f].first;
      const auto& pf = perms[k][decode[f].second];
      const auto& ph = perms[k][decode[h].second];
      std::vector<int> c(k);
      for (int i = 0; i < k; ++i) c[i] = ph[pf[i]];
      g.comp[h][f] = encode(k, c);
    }
  derive_structure(g);
  return g;
}

std::vector<int> universe_mor_perm(int max_card, int mor_id) {
  for (int k = 0; k <= max_card; ++k) {
    auto perms = all_perms(k);
    if (mor_id < static_cast<int>(perms.size())) return perms[mor_id];
    mor_id -= static_cast<int>(perms.size());
  }
  throw std::logic_error("universe_mor_perm: id out of range");
}

std::optional<int> universe_perm_mor(const FiniteGroupoid& u, int card, const std::vector<int>& perm) {
  for (int m : u.homset(card, card)) {
    // recompute the decode lazily; universes are small
    int max_card = u.n_obj - 1;
    if (universe_mor_perm(max_card, m) == perm) return m;
  }
  return std::nullopt;
}

UnivalenceReport check_univalence_set_universe(int max_card) {
  UnivalenceReport rep;
  rep.max_card = max_card;
  rep.ok = true;
  FiniteGroupoid u = set_universe(max_card);
  Budget budget;
  for (int m = 0; m <= max_card; ++m) {
    for (int n = 0; n <= max_card; ++n) {
      UnivalenceCell cell;
      cell.card_l = m;
      cell.card_r = n;
      cell.hom_count = static_cast<long>(u.homset(m, n).size());
      // enumerate equivalence data between the decoded discrete groupoids
      FiniteGroupoid em = discrete_groupoid(m), en = discrete_groupoid(n);
      std::vector<std::vector<int>> equiv_functors;
      std::vector<int> obj_map(m, 0);
      std::function<void(int)> go = [&](int i) {
        if (i == m) {
          // a functor between discrete groupoids is an equivalence iff the
          // object map is a bijection; confirm by building the data
          std::vector<int> seen(n, 0);
          bool bij = (m == n);
          for (int x = 0; x < m && bij; ++x) {
            if (seen[obj_map[x]]) bij = false;
            seen[obj_map[x]] = 1;
          }
          if (!bij) return;
          Equivalence e;
          e.fwd.obj = obj_map;
          e.fwd.mor = obj_map;  // identity morphisms map along objects
          e.bwd.obj.assign(n, 0);
          for (int x = 0; x < m; ++x) e.bwd.obj[obj_map[x]] = x;
          e.bwd.mor = e.bwd.obj;
          e.unit.resize(m);
          e.counit.resize(n);
          for (int x = 0; x < m; ++x) e.unit[x] = em.id_mor[x];
          for (int y = 0; y < n; ++y) e.counit[y] = en.id_mor[y];
          if (validate_equivalence(em, en, e).ok) equiv_functors.push_back(obj_map);
          return;
        }
        budget.spend();
        for (int y = 0; y < n; ++y) {
          obj_map[i] = y;
          go(i + 1);
        }
        if (n == 0) return;  // no assignments possible
      };
      if (m == 0) {
        go(0);
      } else if (n > 0) {
        go(0);
      }
      cell.equiv_count = static_cast<long>(equiv_functors.size());
      // the canonical decoding of universe morphisms into equivalences
      std::vector<std::vector<int>> decoded;
      for (int mor : u.homset(m, n)) decoded.push_back(universe_mor_perm(max_card, mor));
      std::sort(decoded.begin(), decoded.end());
      auto uniq = std::unique(decoded.begin(), decoded.end());
      bool injective = uniq == decoded.end();
      std::sort(equiv_functors.begin(), equiv_functors.end());
      cell.id_to_equiv_bijective = injective && decoded == equiv_functors;
      if (cell.hom_count != cell.equiv_count || !cell.id_to_equiv_bijective) rep.ok = false;
      rep.cells.push_back(cell);
    }
  }
  return rep;
}

}  // namespace stacklab::groupoid
