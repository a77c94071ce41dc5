#include "stacklab/interp.hpp"

#include <algorithm>
#include <functional>

namespace stacklab::groupoid {

namespace syn = stacklab::syntax;
using syn::Term;
using syn::TermKind;

namespace {

int hom_index(const FiniteGroupoid& g, int src, int dst, int mor) {
  const auto& hs = g.homset(src, dst);
  auto it = std::find(hs.begin(), hs.end(), mor);
  if (it == hs.end()) throw std::logic_error("hom_index: morphism not in hom set");
  return static_cast<int>(it - hs.begin());
}

bool is_discrete(const FiniteGroupoid& g) {
  for (int x = 0; x < g.n_obj; ++x)
    for (int y = 0; y < g.n_obj; ++y) {
      if (x == y && g.hom[x][y].size() != 1) return false;
      if (x != y && !g.hom[x][y].empty()) return false;
    }
  return true;
}

// Kernel services over the environment's telescope.
TermPtr normalize_type(const SemEnv& env, const TermPtr& t) {
  kernel::Checker c(env.kctx);
  c.ensure_type(*t);
  return c.quote_type(c.eval_here(*t));
}

TermPtr infer_type(const SemEnv& env, const TermPtr& t) { return kernel::infer(env.kctx, t); }

Family pullback_family(const Total& link, const Family& fam) {
  Family out;
  out.fib.reserve(link.obj_pair.size());
  for (auto [b, f] : link.obj_pair) {
    (void)f;
    out.fib.push_back(fam.fib[b]);
  }
  out.tr.reserve(link.mor_pair.size());
  for (auto [bm, fm] : link.mor_pair) {
    (void)fm;
    out.tr.push_back(fam.tr[bm]);
  }
  return out;
}

Section pullback_section(const Total& link, const Section& s) {
  Section out;
  out.obj.reserve(link.obj_pair.size());
  for (auto [b, f] : link.obj_pair) {
    (void)f;
    out.obj.push_back(s.obj[b]);
  }
  out.mor.reserve(link.mor_pair.size());
  for (auto [bm, fm] : link.mor_pair) {
    (void)fm;
    out.mor.push_back(s.mor[bm]);
  }
  return out;
}

struct Extension {
  SemEnv env;    // extended environment
  Total link;    // total groupoid over the parent context
  Family fam;    // the interpreted type over the parent context
};

Extension extend_full(const SemEnv& env, const TermPtr& type);

// Family over fam_a.fib[gamma] slicing fam_b (over the extended context)
// along the fiber at gamma.
Family sub_family_at(const Extension& ext, const Family& fam_a, const Family& fam_b,
                     const FiniteGroupoid& ctx, int gamma) {
  Family out;
  const FiniteGroupoid& afib = fam_a.fib[gamma];
  out.fib.reserve(afib.n_obj);
  for (int b = 0; b < afib.n_obj; ++b) out.fib.push_back(fam_b.fib[ext.link.obj_id(gamma, b)]);
  out.tr.reserve(afib.n_mor());
  for (int phi = 0; phi < afib.n_mor(); ++phi)
    out.tr.push_back(fam_b.tr[ext.link.mor_id(ctx.id_mor[gamma], phi)]);
  return out;
}

}  // namespace

SemEnv empty_env(InterpOptions opts) {
  SemEnv env;
  env.ctx = discrete_groupoid(1);
  env.opts = opts;
  env.budget = std::make_shared<Budget>();
  return env;
}

namespace {

Extension extend_full(const SemEnv& env, const TermPtr& type) {
  Extension ext;
  ext.fam = interp_type(env, type);
  ext.link = total_groupoid(env.ctx, ext.fam, *env.budget);

  SemEnv& out = ext.env;
  out.opts = env.opts;
  out.budget = env.budget;
  out.ctx = ext.link.gpd;
  out.kctx = env.kctx;
  out.kctx.telescope.push_back(type);

  // weaken existing variables and families along the projection
  out.var_fams.clear();
  out.vars.clear();
  Family var0_fam = pullback_family(ext.link, ext.fam);
  Section var0;
  var0.obj.reserve(ext.link.obj_pair.size());
  for (auto [b, f] : ext.link.obj_pair) {
    (void)b;
    var0.obj.push_back(f);
  }
  var0.mor.reserve(ext.link.mor_pair.size());
  for (auto [bm, fm] : ext.link.mor_pair) {
    (void)bm;
    var0.mor.push_back(fm);
  }
  out.var_fams.push_back(std::move(var0_fam));
  out.vars.push_back(std::move(var0));
  out.var_types.push_back(syn::shift(type, 0, 1));
  for (std::size_t i = 0; i < env.vars.size(); ++i) {
    out.var_fams.push_back(pullback_family(ext.link, env.var_fams[i]));
    out.vars.push_back(pullback_section(ext.link, env.vars[i]));
    out.var_types.push_back(syn::shift(env.var_types[i], 0, 1));
  }
  return ext;
}

// Deterministic per-fiber data for a Pi type: recomputed wherever section or
// natural-family ids must be decoded.
struct PiFibers {
  std::vector<SectionGroupoid> at;  // per base object
};

PiFibers pi_fibers(const SemEnv& env, const Family& fam_a, const Extension& ext,
                   const Family& fam_b) {
  PiFibers out;
  out.at.reserve(env.ctx.n_obj);
  for (int gamma = 0; gamma < env.ctx.n_obj; ++gamma) {
    Family sub = sub_family_at(ext, fam_a, fam_b, env.ctx, gamma);
    out.at.push_back(section_groupoid(fam_a.fib[gamma], sub, *env.budget));
  }
  return out;
}

// Transport of a section of the gamma-fiber along h : gamma -> delta.
Section transport_pi_section(const SemEnv& env, const Family& fam_a, const Extension& ext,
                             const Family& fam_b, int h, const Section& s) {
  const FiniteGroupoid& ctx = env.ctx;
  int delta = ctx.mor_dst[h];
  int hinv = ctx.inv[h];
  const FiniteGroupoid& afib_d = fam_a.fib[delta];
  Section out;
  out.obj.resize(afib_d.n_obj);
  out.mor.resize(afib_d.n_mor());
  for (int b = 0; b < afib_d.n_obj; ++b) {
    int a = fam_a.tr[hinv].obj[b];
    int lift = ext.link.mor_id(h, afib_d.id_mor[b]);
    out.obj[b] = fam_b.tr[lift].obj[s.obj[a]];
  }
  for (int phi = 0; phi < afib_d.n_mor(); ++phi) {
    int psi = fam_a.tr[hinv].mor[phi];
    int lift = ext.link.mor_id(h, afib_d.id_mor[afib_d.mor_dst[phi]]);
    out.mor[phi] = fam_b.tr[lift].mor[s.mor[psi]];
  }
  return out;
}

std::vector<int> transport_pi_natfam(const SemEnv& env, const Family& fam_a, const Extension& ext,
                                     const Family& fam_b, int h, const NatFam& nf) {
  const FiniteGroupoid& ctx = env.ctx;
  int delta = ctx.mor_dst[h];
  int hinv = ctx.inv[h];
  const FiniteGroupoid& afib_d = fam_a.fib[delta];
  std::vector<int> comp(afib_d.n_obj);
  for (int b = 0; b < afib_d.n_obj; ++b) {
    int a = fam_a.tr[hinv].obj[b];
    int lift = ext.link.mor_id(h, afib_d.id_mor[b]);
    comp[b] = fam_b.tr[lift].mor[nf.comp[a]];
  }
  return comp;
}

int find_section(const std::vector<Section>& sections, const Section& s) {
  auto it = std::find(sections.begin(), sections.end(), s);
  if (it == sections.end()) throw std::logic_error("interp: section not found in enumeration");
  return static_cast<int>(it - sections.begin());
}

int find_natfam(const std::vector<NatFam>& mors, int src, int dst, const std::vector<int>& comp) {
  for (std::size_t i = 0; i < mors.size(); ++i)
    if (mors[i].src == src && mors[i].dst == dst && mors[i].comp == comp) return static_cast<int>(i);
  throw std::logic_error("interp: natural family not found in enumeration");
}

// Per-fiber totals for a Sigma type.
struct SigmaFibers {
  std::vector<Total> at;
};

SigmaFibers sigma_fibers(const SemEnv& env, const Family& fam_a, const Extension& ext,
                         const Family& fam_b) {
  SigmaFibers out;
  out.at.reserve(env.ctx.n_obj);
  for (int gamma = 0; gamma < env.ctx.n_obj; ++gamma) {
    Family sub = sub_family_at(ext, fam_a, fam_b, env.ctx, gamma);
    out.at.push_back(total_groupoid(fam_a.fib[gamma], sub, *env.budget));
  }
  return out;
}

}  // namespace

Family interp_type(const SemEnv& env, const TermPtr& type) {
  TermPtr nf = normalize_type(env, type);
  const Term& t = *nf;
  switch (t.kind) {
    case TermKind::Enum:
      return constant_family(env.ctx, discrete_groupoid(static_cast<int>(t.a)));
    case TermKind::Nat:
      return constant_family(env.ctx, discrete_groupoid(env.opts.nat_cutoff));
    case TermKind::Universe:
      return constant_family(env.ctx, set_universe(env.opts.max_card));
    case TermKind::Trunc: {
      Family inner = interp_type(env, t.subs[0]);
      Family out;
      out.fib.reserve(inner.fib.size());
      for (const auto& f : inner.fib) out.fib.push_back(codiscrete_groupoid(f.n_obj));
      out.tr.reserve(inner.tr.size());
      for (int h = 0; h < env.ctx.n_mor(); ++h) {
        const Functor& f = inner.tr[h];
        int n_dst = inner.fib[env.ctx.mor_dst[h]].n_obj;
        int n_src = inner.fib[env.ctx.mor_src[h]].n_obj;
        Functor g;
        g.obj = f.obj;
        g.mor.resize(n_src * n_src);
        for (int x = 0; x < n_src; ++x)
          for (int y = 0; y < n_src; ++y) g.mor[x * n_src + y] = f.obj[x] * n_dst + f.obj[y];
        out.tr.push_back(std::move(g));
      }
      return out;
    }
    case TermKind::Id: {
      Family fam = interp_type(env, t.subs[0]);
      Section sl = interp_term(env, t.subs[1], t.subs[0]);
      Section sr = interp_term(env, t.subs[2], t.subs[0]);
      Family out;
      out.fib.reserve(env.ctx.n_obj);
      for (int g = 0; g < env.ctx.n_obj; ++g)
        out.fib.push_back(discrete_groupoid(
            static_cast<int>(fam.fib[g].homset(sl.obj[g], sr.obj[g]).size())));
      out.tr.reserve(env.ctx.n_mor());
      for (int h = 0; h < env.ctx.n_mor(); ++h) {
        int src = env.ctx.mor_src[h], dst = env.ctx.mor_dst[h];
        const FiniteGroupoid& fs = fam.fib[src];
        const FiniteGroupoid& fd = fam.fib[dst];
        const auto& hs = fs.homset(sl.obj[src], sr.obj[src]);
        Functor g;
        g.obj.resize(hs.size());
        for (std::size_t i = 0; i < hs.size(); ++i) {
          int conj = fd.compose(sr.mor[h], fd.compose(fam.tr[h].mor[hs[i]], fd.inv[sl.mor[h]]));
          g.obj[i] = hom_index(fd, sl.obj[dst], sr.obj[dst], conj);
        }
        g.mor = g.obj;
        out.tr.push_back(std::move(g));
      }
      return out;
    }
    case TermKind::Pi: {
      Family fam_a = interp_type(env, t.subs[0]);
      Extension ext = extend_full(env, t.subs[0]);
      Family fam_b = interp_type(ext.env, t.subs[1]);
      PiFibers fibers = pi_fibers(env, fam_a, ext, fam_b);
      Family out;
      out.fib.reserve(env.ctx.n_obj);
      for (auto& sg : fibers.at) out.fib.push_back(sg.gpd);
      out.tr.reserve(env.ctx.n_mor());
      for (int h = 0; h < env.ctx.n_mor(); ++h) {
        int src = env.ctx.mor_src[h], dst = env.ctx.mor_dst[h];
        Functor g;
        g.obj.resize(fibers.at[src].sections.size());
        for (std::size_t i = 0; i < fibers.at[src].sections.size(); ++i)
          g.obj[i] = find_section(fibers.at[dst].sections,
                                  transport_pi_section(env, fam_a, ext, fam_b, h,
                                                       fibers.at[src].sections[i]));
        g.mor.resize(fibers.at[src].mors.size());
        for (std::size_t i = 0; i < fibers.at[src].mors.size(); ++i) {
          const NatFam& nf = fibers.at[src].mors[i];
          g.mor[i] = find_natfam(fibers.at[dst].mors, g.obj[nf.src], g.obj[nf.dst],
                                 transport_pi_natfam(env, fam_a, ext, fam_b, h, nf));
        }
        out.tr.push_back(std::move(g));
      }
      return out;
    }
    case TermKind::Sigma: {
      Family fam_a = interp_type(env, t.subs[0]);
      Extension ext = extend_full(env, t.subs[0]);
      Family fam_b = interp_type(ext.env, t.subs[1]);
      SigmaFibers fibers = sigma_fibers(env, fam_a, ext, fam_b);
      Family out;
      out.fib.reserve(env.ctx.n_obj);
      for (auto& tt : fibers.at) out.fib.push_back(tt.gpd);
      out.tr.reserve(env.ctx.n_mor());
      for (int h = 0; h < env.ctx.n_mor(); ++h) {
        int src = env.ctx.mor_src[h], dst = env.ctx.mor_dst[h];
        const Total& ts = fibers.at[src];
        const Total& td = fibers.at[dst];
        const FiniteGroupoid& afib_d = fam_a.fib[dst];
        Functor g;
        g.obj.resize(ts.obj_pair.size());
        for (std::size_t i = 0; i < ts.obj_pair.size(); ++i) {
          auto [a, b] = ts.obj_pair[i];
          int a2 = fam_a.tr[h].obj[a];
          int lift = ext.link.mor_id(h, afib_d.id_mor[a2]);
          g.obj[i] = td.obj_id(a2, fam_b.tr[lift].obj[b]);
        }
        g.mor.resize(ts.mor_pair.size());
        for (std::size_t i = 0; i < ts.mor_pair.size(); ++i) {
          auto [phi, chi] = ts.mor_pair[i];
          int phi2 = fam_a.tr[h].mor[phi];
          int a2 = afib_d.mor_dst[phi2];
          int lift = ext.link.mor_id(h, afib_d.id_mor[a2]);
          g.mor[i] = td.mor_id(phi2, fam_b.tr[lift].mor[chi]);
        }
        out.tr.push_back(std::move(g));
      }
      return out;
    }
    case TermKind::Var: {
      // a type variable: must be a universe element, interpreted as El
      if (t.a >= env.var_types.size()) throw FragmentUnsupported("type variable out of scope");
      TermPtr vt = normalize_type(env, env.var_types[t.a]);
      if (vt->kind != TermKind::Universe)
        throw FragmentUnsupported("only universe variables act as types");
      const Section& s = env.vars[t.a];
      Family out;
      out.fib.reserve(env.ctx.n_obj);
      for (int g = 0; g < env.ctx.n_obj; ++g) out.fib.push_back(discrete_groupoid(s.obj[g]));
      out.tr.reserve(env.ctx.n_mor());
      for (int h = 0; h < env.ctx.n_mor(); ++h) {
        auto perm = universe_mor_perm(env.opts.max_card, s.mor[h]);
        Functor g;
        g.obj = perm;
        g.mor = perm;
        out.tr.push_back(std::move(g));
      }
      return out;
    }
    default:
      throw FragmentUnsupported("type former outside the interpretable fragment: " +
                                syn::pretty(*nf));
  }
}

Section interp_term(const SemEnv& env, const TermPtr& term, const TermPtr& type) {
  TermPtr nf_ty = normalize_type(env, type);
  const Term& t = *term;
  const FiniteGroupoid& ctx = env.ctx;

  switch (t.kind) {
    case TermKind::Var: {
      if (t.a >= env.vars.size()) throw FragmentUnsupported("variable out of scope");
      return env.vars[t.a];
    }
    case TermKind::Lambda: {
      if (nf_ty->kind != TermKind::Pi) throw FragmentUnsupported("lambda at a non-function type");
      Family fam_a = interp_type(env, nf_ty->subs[0]);
      Extension ext = extend_full(env, nf_ty->subs[0]);
      Family fam_b = interp_type(ext.env, nf_ty->subs[1]);
      Section body = interp_term(ext.env, t.subs[0], nf_ty->subs[1]);
      PiFibers fibers = pi_fibers(env, fam_a, ext, fam_b);
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      for (int g = 0; g < ctx.n_obj; ++g) {
        const FiniteGroupoid& afib = fam_a.fib[g];
        Section sg;
        sg.obj.resize(afib.n_obj);
        sg.mor.resize(afib.n_mor());
        for (int b = 0; b < afib.n_obj; ++b) sg.obj[b] = body.obj[ext.link.obj_id(g, b)];
        for (int phi = 0; phi < afib.n_mor(); ++phi)
          sg.mor[phi] = body.mor[ext.link.mor_id(ctx.id_mor[g], phi)];
        out.obj[g] = find_section(fibers.at[g].sections, sg);
      }
      for (int h = 0; h < ctx.n_mor(); ++h) {
        int src = ctx.mor_src[h], dst = ctx.mor_dst[h];
        const FiniteGroupoid& afib_d = fam_a.fib[dst];
        std::vector<int> comp(afib_d.n_obj);
        for (int b = 0; b < afib_d.n_obj; ++b) comp[b] = body.mor[ext.link.mor_id(h, afib_d.id_mor[b])];
        int tsrc = find_section(fibers.at[dst].sections,
                                transport_pi_section(env, fam_a, ext, fam_b, h,
                                                     fibers.at[src].sections[out.obj[src]]));
        out.mor[h] = find_natfam(fibers.at[dst].mors, tsrc, out.obj[dst], comp);
      }
      return out;
    }
    case TermKind::App: {
      TermPtr fn_ty = infer_type(env, t.subs[0]);
      if (fn_ty->kind != TermKind::Pi) throw FragmentUnsupported("application of a non-function");
      Family fam_a = interp_type(env, fn_ty->subs[0]);
      Extension ext = extend_full(env, fn_ty->subs[0]);
      Family fam_b = interp_type(ext.env, fn_ty->subs[1]);
      PiFibers fibers = pi_fibers(env, fam_a, ext, fam_b);
      Section sf = interp_term(env, t.subs[0], fn_ty);
      Section sa = interp_term(env, t.subs[1], fn_ty->subs[0]);
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      for (int g = 0; g < ctx.n_obj; ++g)
        out.obj[g] = fibers.at[g].sections[sf.obj[g]].obj[sa.obj[g]];
      for (int h = 0; h < ctx.n_mor(); ++h) {
        int src = ctx.mor_src[h], dst = ctx.mor_dst[h];
        const FiniteGroupoid& afib_d = fam_a.fib[dst];
        const NatFam& mu = fibers.at[dst].mors[sf.mor[h]];
        int c1 = mu.comp[sa.obj[dst]];
        int psi = fam_a.tr[ctx.inv[h]].mor[sa.mor[h]];
        const Section& fsrc = fibers.at[src].sections[sf.obj[src]];
        int lift = ext.link.mor_id(h, afib_d.id_mor[sa.obj[dst]]);
        int c2 = fam_b.tr[lift].mor[fsrc.mor[psi]];
        const FiniteGroupoid& result_fib = fam_b.fib[ext.link.obj_id(dst, sa.obj[dst])];
        out.mor[h] = result_fib.compose(c1, c2);
      }
      return out;
    }
    case TermKind::Pair: {
      if (nf_ty->kind != TermKind::Sigma) throw FragmentUnsupported("pair at a non-pair type");
      Family fam_a = interp_type(env, nf_ty->subs[0]);
      Extension ext = extend_full(env, nf_ty->subs[0]);
      Family fam_b = interp_type(ext.env, nf_ty->subs[1]);
      SigmaFibers fibers = sigma_fibers(env, fam_a, ext, fam_b);
      Section su = interp_term(env, t.subs[0], nf_ty->subs[0]);
      Section sv = interp_term(env, t.subs[1], syn::subst(nf_ty->subs[1], 0, t.subs[0]));
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      for (int g = 0; g < ctx.n_obj; ++g) out.obj[g] = fibers.at[g].obj_id(su.obj[g], sv.obj[g]);
      for (int h = 0; h < ctx.n_mor(); ++h)
        out.mor[h] = fibers.at[ctx.mor_dst[h]].mor_id(su.mor[h], sv.mor[h]);
      return out;
    }
    case TermKind::ProjL:
    case TermKind::ProjR: {
      TermPtr p_ty = infer_type(env, t.subs[0]);
      if (p_ty->kind != TermKind::Sigma) throw FragmentUnsupported("projection of a non-pair");
      Family fam_a = interp_type(env, p_ty->subs[0]);
      Extension ext = extend_full(env, p_ty->subs[0]);
      Family fam_b = interp_type(ext.env, p_ty->subs[1]);
      SigmaFibers fibers = sigma_fibers(env, fam_a, ext, fam_b);
      Section sp = interp_term(env, t.subs[0], p_ty);
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      bool left = t.kind == TermKind::ProjL;
      for (int g = 0; g < ctx.n_obj; ++g) {
        auto [a, b] = fibers.at[g].obj_pair[sp.obj[g]];
        out.obj[g] = left ? a : b;
      }
      for (int h = 0; h < ctx.n_mor(); ++h) {
        auto [phi, chi] = fibers.at[ctx.mor_dst[h]].mor_pair[sp.mor[h]];
        out.mor[h] = left ? phi : chi;
      }
      return out;
    }
    case TermKind::Refl: {
      if (nf_ty->kind != TermKind::Id) throw FragmentUnsupported("refl at a non-identity type");
      Family fam = interp_type(env, nf_ty->subs[0]);
      Section sl = interp_term(env, nf_ty->subs[1], nf_ty->subs[0]);
      Section sr = interp_term(env, nf_ty->subs[2], nf_ty->subs[0]);
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      for (int g = 0; g < ctx.n_obj; ++g) {
        if (sl.obj[g] != sr.obj[g])
          throw FragmentUnsupported("refl endpoints interpret to distinct objects");
        out.obj[g] = hom_index(fam.fib[g], sl.obj[g], sr.obj[g], fam.fib[g].id_mor[sl.obj[g]]);
      }
      for (int h = 0; h < ctx.n_mor(); ++h) out.mor[h] = out.obj[ctx.mor_dst[h]];
      return out;
    }
    case TermKind::Zero:
    case TermKind::Succ:
    case TermKind::EnumLit: {
      int value = 0;
      if (t.kind == TermKind::EnumLit) {
        value = static_cast<int>(t.b);
      } else {
        const Term* cur = &t;
        while (cur->kind == TermKind::Succ) {
          ++value;
          cur = cur->subs[0].get();
        }
        if (cur->kind != TermKind::Zero) throw FragmentUnsupported("non-literal numeral");
        if (value >= env.opts.nat_cutoff)
          throw BoundExceeded("numeral " + std::to_string(value) + " exceeds the cutoff " +
                              std::to_string(env.opts.nat_cutoff));
      }
      Family fam = interp_type(env, nf_ty);
      Section out;
      out.obj.assign(ctx.n_obj, value);
      out.mor.resize(ctx.n_mor());
      for (int h = 0; h < ctx.n_mor(); ++h) out.mor[h] = fam.fib[ctx.mor_dst[h]].id_mor[value];
      return out;
    }
    case TermKind::TruncIn: {
      if (nf_ty->kind != TermKind::Trunc) throw FragmentUnsupported("tin at a non-truncation type");
      Family fam = interp_type(env, nf_ty);
      Section sa = interp_term(env, t.subs[0], nf_ty->subs[0]);
      Section out;
      out.obj = sa.obj;
      out.mor.resize(ctx.n_mor());
      for (int h = 0; h < ctx.n_mor(); ++h) {
        const FiniteGroupoid& fib = fam.fib[ctx.mor_dst[h]];
        int from = fam.tr[h].obj[out.obj[ctx.mor_src[h]]];
        out.mor[h] = fib.homset(from, out.obj[ctx.mor_dst[h]]).at(0);
      }
      return out;
    }
    case TermKind::UnivalenceAx: {
      if (nf_ty->kind != TermKind::Id || nf_ty->subs[0]->kind != TermKind::Universe)
        throw FragmentUnsupported("ua at a non-universe identity type");
      Family fam_u = interp_type(env, syn::universe());
      Section sl = interp_term(env, nf_ty->subs[1], syn::universe());
      Section sr = interp_term(env, nf_ty->subs[2], syn::universe());
      // extract the forward map and read off its underlying bijection
      kernel::Context kctx = env.kctx;
      TermPtr fwd = kernel::normalize(kctx, syn::proj_l(t.subs[2])).term;
      Section sf = interp_term(env, fwd, syn::pi(t.subs[0], syn::shift(t.subs[1], 0, 1)));
      Family fam_a = interp_type(env, t.subs[0]);
      Extension ext = extend_full(env, t.subs[0]);
      Family fam_b = interp_type(ext.env, syn::shift(t.subs[1], 0, 1));
      PiFibers fibers = pi_fibers(env, fam_a, ext, fam_b);
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      for (int g = 0; g < ctx.n_obj; ++g) {
        const Section& fg = fibers.at[g].sections[sf.obj[g]];
        std::vector<int> perm = fg.obj;
        auto mor = universe_perm_mor(fam_u.fib[g], sl.obj[g], perm);
        if (!mor) throw FragmentUnsupported("equivalence forward map is not a bijection");
        out.obj[g] = hom_index(fam_u.fib[g], sl.obj[g], sr.obj[g], *mor);
      }
      for (int h = 0; h < ctx.n_mor(); ++h) out.mor[h] = out.obj[ctx.mor_dst[h]];
      return out;
    }
    case TermKind::EnumElim: {
      // Supported for non-dependent motives: the selected case is constant
      // along every context morphism because enum fibers are discrete.
      const TermPtr& target = syn::enum_elim_target(t);
      auto card = t.a;
      Section se = interp_term(env, target, syn::enum_type(card));
      std::vector<Section> case_sections;
      case_sections.reserve(card);
      for (std::uint32_t i = 0; i < card; ++i) {
        try {
          kernel::check(env.kctx, syn::enum_elim_case(t, i), nf_ty);
        } catch (const kernel::TypingError&) {
          throw FragmentUnsupported("dependent enum elimination is outside the fragment");
        }
        case_sections.push_back(interp_term(env, syn::enum_elim_case(t, i), nf_ty));
      }
      Section out;
      out.obj.resize(ctx.n_obj);
      out.mor.resize(ctx.n_mor());
      for (int g = 0; g < ctx.n_obj; ++g) out.obj[g] = case_sections.at(se.obj[g]).obj[g];
      for (int h = 0; h < ctx.n_mor(); ++h) {
        int src = ctx.mor_src[h], dst = ctx.mor_dst[h];
        if (se.obj[src] != se.obj[dst])
          throw FragmentUnsupported("enum scrutinee varies along a context morphism");
        out.mor[h] = case_sections.at(se.obj[src]).mor[h];
      }
      return out;
    }
    default:
      break;
  }

  // types as universe elements
  if (nf_ty->kind == TermKind::Universe) {
    Family fam = interp_type(env, term);
    Section out;
    out.obj.resize(ctx.n_obj);
    out.mor.resize(ctx.n_mor());
    FiniteGroupoid universe = set_universe(env.opts.max_card);
    for (int g = 0; g < ctx.n_obj; ++g) {
      if (!is_discrete(fam.fib[g]))
        throw FragmentUnsupported("only discrete-fiber types decode as universe elements");
      if (fam.fib[g].n_obj > env.opts.max_card)
        throw BoundExceeded("type cardinality exceeds the universe bound");
      out.obj[g] = fam.fib[g].n_obj;
    }
    for (int h = 0; h < ctx.n_mor(); ++h) {
      auto mor = universe_perm_mor(universe, out.obj[ctx.mor_src[h]], fam.tr[h].obj);
      if (!mor) throw FragmentUnsupported("type transport is not a bijection");
      out.mor[h] = *mor;
    }
    return out;
  }

  throw FragmentUnsupported("term former outside the interpretable fragment: " + syn::pretty(t));
}

SemEnv extend(const SemEnv& env, const TermPtr& type) { return extend_full(env, type).env; }

SemEnv interp_context(const std::vector<TermPtr>& telescope, InterpOptions opts) {
  SemEnv env = empty_env(opts);
  for (const auto& ty : telescope) env = extend(env, ty);
  return env;
}

}  // namespace stacklab::groupoid
