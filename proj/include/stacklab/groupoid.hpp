#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace stacklab::groupoid {

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration budget shared by the heavy constructions.
struct Budget {
  long remaining = 200'000'000;
  void spend(long n = 1) {
    remaining -= n;
    if (remaining < 0) throw BudgetExceeded("enumeration budget exhausted");
  }
};

// A finite groupoid as explicit tables. Morphisms have global ids; hom[s][d]
// lists them per ordered pair. compose(g, f) is "g after f".
struct FiniteGroupoid {
  int n_obj = 0;
  std::vector<int> mor_src;
  std::vector<int> mor_dst;
  std::vector<std::vector<std::vector<int>>> hom;
  std::vector<int> id_mor;
  std::vector<std::vector<int>> comp;  // comp[g][f], -1 when not composable
  std::vector<int> inv;

  int n_mor() const { return static_cast<int>(mor_src.size()); }

  int compose(int g, int f) const {
    int r = comp[g][f];
    if (r < 0) throw std::logic_error("compose: morphisms not composable");
    return r;
  }

  const std::vector<int>& homset(int src, int dst) const { return hom[src][dst]; }

  bool operator==(const FiniteGroupoid&) const = default;
};

FiniteGroupoid discrete_groupoid(int n);
FiniteGroupoid codiscrete_groupoid(int n);
// One object, morphisms the integers mod k under addition.
FiniteGroupoid cyclic_group_groupoid(int k);

// Builds the tables from object count and a hom generator; computes
// identities/inverses and checks the axioms.
FiniteGroupoid groupoid_from_parts(int n_obj, std::vector<std::pair<int, int>> morphisms,
                                   const std::vector<std::vector<int>>& compose_table);

struct ValidationReport {
  bool ok = true;
  std::string violation;  // first failure, human readable
};

ValidationReport validate_groupoid(const FiniteGroupoid& g);

bool is_prop_groupoid(const FiniteGroupoid& g);

struct Functor {
  std::vector<int> obj;
  std::vector<int> mor;
  bool operator==(const Functor&) const = default;
};

Functor identity_functor(const FiniteGroupoid& g);
Functor compose_functor(const Functor& g, const Functor& f);
bool is_functor(const FiniteGroupoid& dom, const FiniteGroupoid& cod, const Functor& f);

// A strict groupoid-valued family over a base groupoid.
struct Family {
  std::vector<FiniteGroupoid> fib;  // per base object
  std::vector<Functor> tr;          // per base morphism

  bool operator==(const Family&) const = default;
};

// Constant family.
Family constant_family(const FiniteGroupoid& base, const FiniteGroupoid& fiber);
ValidationReport validate_family(const FiniteGroupoid& base, const Family& fam);

// A section of a family: object and morphism choices satisfying naturality
// (mor[h] goes from tr[h](obj[src]) to obj[dst]) and the composition law.
struct Section {
  std::vector<int> obj;
  std::vector<int> mor;
  bool operator==(const Section&) const = default;
};

ValidationReport validate_section(const FiniteGroupoid& base, const Family& fam, const Section& s);
std::vector<Section> enumerate_sections(const FiniteGroupoid& base, const Family& fam, Budget& budget);

// Natural families between sections: the morphisms of a section groupoid.
struct NatFam {
  int src = 0;  // section index
  int dst = 0;
  std::vector<int> comp;  // per base object
  bool operator==(const NatFam&) const = default;
};

struct SectionGroupoid {
  FiniteGroupoid gpd;
  std::vector<Section> sections;  // object i of gpd
  std::vector<NatFam> mors;       // morphism i of gpd
};

SectionGroupoid section_groupoid(const FiniteGroupoid& base, const Family& fam, Budget& budget);

// Grothendieck construction with decomposition tables.
struct Total {
  FiniteGroupoid gpd;
  std::vector<std::pair<int, int>> obj_pair;  // total object -> (base, fiber)
  std::vector<std::pair<int, int>> mor_pair;  // total morphism -> (base mor, fiber mor)

  int obj_id(int base_obj, int fib_obj) const;
  int mor_id(int base_mor, int fib_mor) const;
};

Total total_groupoid(const FiniteGroupoid& base, const Family& fam, Budget& budget);

// An adjoint equivalence between finite groupoids.
struct Equivalence {
  Functor fwd;                // G -> H
  Functor bwd;                // H -> G
  std::vector<int> unit;      // per G-object: x -> bwd(fwd(x))
  std::vector<int> counit;    // per H-object: fwd(bwd(y)) -> y
};

ValidationReport validate_equivalence(const FiniteGroupoid& g, const FiniteGroupoid& h,
                                      const Equivalence& e);

std::optional<Equivalence> find_equivalence(const FiniteGroupoid& g, const FiniteGroupoid& h,
                                            Budget& budget);
bool are_equivalent(const FiniteGroupoid& g, const FiniteGroupoid& h, Budget& budget);

// The univalent universe of finite sets: object k is the canonical k-element
// set, morphisms are bijections.
FiniteGroupoid set_universe(int max_card);
std::vector<int> universe_mor_perm(int max_card, int mor_id);       // decode
std::optional<int> universe_perm_mor(const FiniteGroupoid& u, int card, const std::vector<int>& perm);

struct UnivalenceCell {
  int card_l = 0;
  int card_r = 0;
  long hom_count = 0;
  long equiv_count = 0;
  bool id_to_equiv_bijective = false;
};

struct UnivalenceReport {
  int max_card = 0;
  std::vector<UnivalenceCell> cells;  // row-major over (m, n), 0..max_card
  bool ok = false;
};

UnivalenceReport check_univalence_set_universe(int max_card);

}  // namespace stacklab::groupoid
