#pragma once

#include "stacklab/stack.hpp"

namespace stacklab::stack {

// Witness denominators for the interval witness families.
constexpr int kWithinDenBound = 64;

// All rationals p/q in [0,1] with q <= max_den, ascending, deduplicated.
std::vector<site::Rat> rationals_up_to_den(int max_den);

// Constant rationals witnessing |r - q| < 1/n on the whole of u.
std::vector<site::Rat> within_witnesses(const site::IntervalOpen& u, int n, int max_den);

// Named built-in prestacks. Interval: const1/const2/const3, codisc2/codisc3,
// withinN and withinN-disc for 2 <= N <= 16. Cantor: const1/const2/const3,
// codisc2/codisc3, hitone, hitone-disc.
Prestack<site::IntervalSite> interval_prestack(const std::string& name);
Prestack<site::CantorSite> cantor_prestack(const std::string& name);
std::vector<std::string> interval_catalog_names();
std::vector<std::string> cantor_catalog_names();

}  // namespace stacklab::stack
