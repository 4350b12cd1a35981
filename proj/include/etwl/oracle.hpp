// Copyright 2026 The etwl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Exact rational model of how an ET layer can carry 2-FWL refinement.
//
// Pair colors are stored as m-ary numbers T = m^-f with f a color index in
// [1, S] (S = number of pair slots). One round computes
//
//   agg_ij = T_ij + m^-S * sum_l T_il * (T_lj)^S
//
// which is the ET update with uniform attention and fused values
// [T, T^S]. The product T_il (T_lj)^S = m^-(f_il + S f_lj) encodes the
// ordered color pair as a single digit position, and the sum over l packs
// the multiset of those positions into base-m digits. Re-canonicalizing the
// distinct aggregates to fresh indices stands in for the FFN.

#ifndef ETWL_ORACLE_HPP_
#define ETWL_ORACLE_HPP_

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <vector>

#include "etwl/graph.hpp"
#include "etwl/wl.hpp"
#include "json.hpp"

namespace etwl {

/// Exact rational in [0, 1) with its base-m digit expansion.
struct MaryCode {
  mpq_class value;
  int base = 2;
  /// position i >= 1 -> digit in [1, base-1]; zero digits are omitted.
  std::map<int, int> digits;
};

/// sum over items of base^-item. Items are positions >= 1 (<= alphabet_size
/// when that is positive); the multiset may hold at most base-1 items.
MaryCode encode_multiset(std::span<const int> items, int base, int alphabet_size = 0);

/// Builds a code from explicit digits; every digit must lie in [0, base).
MaryCode mary_from_digits(const std::map<int, int>& digits, int base);

struct NonOverlapReport {
  /// Every digit position used in A precedes every position used in B.
  bool hypothesis_met = false;
  /// min(A) > max(B), the weaker ordering condition (vacuous if either is empty).
  bool ordered = false;
  /// x1 + y1 = x2 + y2 implies x1 = x2 and y1 = y2 over A x B.
  bool unique_sums = false;
  std::size_t distinct_sums = 0;

  /// True when the separation hypothesis fails or the sums are unique.
  bool holds() const { return !hypothesis_met || unique_sums; }
};

/// Exhaustive check over A x B. A and B are treated as sets.
NonOverlapReport check_nonoverlap_addition(std::span<const MaryCode> a, std::span<const MaryCode> b);

/// Thrown if the exact run and 2-FWL disagree on a partition. The
/// construction says this cannot happen.
class PartitionMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::size_t kDefaultDigitBudget = 4000;

/// Pair codes of one graph at one round; vectors indexed i*n + j.
struct ExactPairState {
  int round = 0;
  std::vector<int> index;   // f_t in [1, slots]
  std::vector<mpq_class> t;  // base^-f_t
  std::vector<mpq_class> tpow;  // t^slots
  /// Aggregates that produced this round; empty at round 0.
  std::vector<mpq_class> aggregate;
  std::size_t num_classes = 0;
};

struct ExactSimulation {
  int n = 0;
  int base = 2;
  int slots = 0;
  std::vector<ExactPairState> rounds;
  std::size_t max_denominator_digits = 0;
};

/// Runs `rounds` exact rounds and checks each partition against fwl2.
/// Throws BudgetError if the largest denominator would exceed
/// `digit_budget` decimal digits, PartitionMismatch on disagreement.
ExactSimulation exact_simulate(const LabeledGraph& g, int rounds,
                               std::size_t digit_budget = kDefaultDigitBudget);

struct ExactParallel {
  ExactSimulation g, h;
  /// First round whose multisets of aggregates (T at round 0) differ, -1 if none.
  int first_difference = -1;
};

/// Both graphs share slots and color indices, as in a parallel 2-FWL run;
/// the joint partition is checked against run_parallel.
ExactParallel exact_simulate_pair(const LabeledGraph& g, const LabeledGraph& h, int rounds,
                                  std::size_t digit_budget = kDefaultDigitBudget);

/// Decimal digits the simulation of an order-n graph (or pair) needs.
std::size_t exact_digit_estimate(int n, bool pair);

std::string to_fraction_string(const mpq_class& q);

/// {"n","base","slots","max_denominator_digits","rounds":[{"round","classes",
///   "pairs":[{"pair":[i,j],"color":f,"T":"num/den"},...]},...]}
nlohmann::json simulation_to_json(const ExactSimulation& sim);

}  // namespace etwl

#endif  // ETWL_ORACLE_HPP_
