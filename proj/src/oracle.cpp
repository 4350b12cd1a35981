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

#include "etwl/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace etwl {

namespace {

/// base^-e as an exact rational.
mpq_class inverse_power(int base, unsigned long e) {
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(base), e);
  return mpq_class(mpz_class(1), den);
}

std::size_t denominator_digits(const mpq_class& q) {
  return mpz_sizeinbase(q.get_den_mpz_t(), 10);
}

}  // namespace

MaryCode mary_from_digits(const std::map<int, int>& digits, int base) {
  if (base < 2) throw std::invalid_argument("mary code: base must be >= 2");
  MaryCode code;
  code.base = base;
  code.value = 0;
  for (auto [pos, d] : digits) {
    if (pos < 1) throw std::invalid_argument("mary code: digit positions start at 1");
    if (d < 0 || d >= base) throw std::invalid_argument("mary code: digit outside [0, base)");
    if (d == 0) continue;
    code.digits[pos] = d;
    code.value += d * inverse_power(base, static_cast<unsigned long>(pos));
  }
  return code;
}

MaryCode encode_multiset(std::span<const int> items, int base, int alphabet_size) {
  if (base < 2) throw std::invalid_argument("encode_multiset: base must be >= 2");
  if (static_cast<long>(items.size()) > base - 1) {
    throw std::invalid_argument("encode_multiset: multiset of order " + std::to_string(items.size()) +
                                " exceeds base - 1 = " + std::to_string(base - 1));
  }
  std::map<int, int> digits;
  for (int i : items) {
    if (i < 1 || (alphabet_size > 0 && i > alphabet_size)) {
      throw std::invalid_argument("encode_multiset: index " + std::to_string(i) + " outside the alphabet");
    }
    ++digits[i];
  }
  return mary_from_digits(digits, base);
}

NonOverlapReport check_nonoverlap_addition(std::span<const MaryCode> a, std::span<const MaryCode> b) {
  auto dedup = [](std::span<const MaryCode> s) {
    std::vector<mpq_class> v;
    for (const auto& c : s) v.push_back(c.value);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const std::vector<mpq_class> xa = dedup(a);
  const std::vector<mpq_class> xb = dedup(b);

  NonOverlapReport r;
  r.ordered = xa.empty() || xb.empty() || xa.front() > xb.back();
  int last_a = 0;
  int first_b = std::numeric_limits<int>::max();
  for (const auto& c : a)
    if (!c.digits.empty()) last_a = std::max(last_a, c.digits.rbegin()->first);
  for (const auto& c : b)
    if (!c.digits.empty()) first_b = std::min(first_b, c.digits.begin()->first);
  r.hypothesis_met = last_a < first_b;

  std::set<mpq_class> sums;
  for (const auto& x : xa)
    for (const auto& y : xb) sums.insert(x + y);
  r.distinct_sums = sums.size();
  r.unique_sums = sums.size() == xa.size() * xb.size();
  return r;
}

std::size_t exact_digit_estimate(int n, bool pair) {
  const double slots = (pair ? 2.0 : 1.0) * n * n;
  const double base = std::max(n, 2);
  // Largest exponent: S for the scale plus S + S^2 for T_il (T_lj)^S.
  return static_cast<std::size_t>((slots * slots + 2 * slots) * std::log10(base)) + 1;
}

std::string to_fraction_string(const mpq_class& q) {
  mpq_class c(q);
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

namespace {

using TypeKey = std::vector<std::int64_t>;

TypeKey type_key(const LabeledGraph& g, Node i, Node j) {
  const Node tuple[] = {i, j};
  const AtomicType t = atomic_type(g, tuple);
  TypeKey key;
  for (PairRelation r : t.matrix) key.push_back(static_cast<std::int64_t>(r));
  for (Label l : t.labels) key.push_back(l);
  for (const auto& f : t.features) {
    key.push_back(static_cast<std::int64_t>(f.size()));
    for (double x : f) key.push_back(std::bit_cast<std::int64_t>(x));
  }
  return key;
}

struct Sim {
  const LabeledGraph* graph;
  ExactSimulation out;
};

void set_codes(ExactPairState& st, int base, int slots) {
  st.t.resize(st.index.size());
  st.tpow.resize(st.index.size());
  std::set<int> distinct(st.index.begin(), st.index.end());
  st.num_classes = distinct.size();
  for (std::size_t r = 0; r < st.index.size(); ++r) {
    const auto f = static_cast<unsigned long>(st.index[r]);
    st.t[r] = inverse_power(base, f);
    st.tpow[r] = inverse_power(base, f * static_cast<unsigned long>(slots));
  }
}

void track_digits(ExactSimulation& sim, const ExactPairState& st) {
  for (const auto& q : st.t) sim.max_denominator_digits = std::max(sim.max_denominator_digits, denominator_digits(q));
  for (const auto& q : st.tpow) sim.max_denominator_digits = std::max(sim.max_denominator_digits, denominator_digits(q));
  for (const auto& q : st.aggregate) sim.max_denominator_digits = std::max(sim.max_denominator_digits, denominator_digits(q));
}

/// Runs the exact rounds for all graphs jointly and checks each round
/// against the matching 2-FWL colors (concatenated over graphs).
void simulate(std::vector<Sim>& sims, int rounds, std::size_t budget,
              const std::vector<std::vector<ColorId>>& fwl_by_round_joint) {
  const int n = sims.front().graph->num_nodes();
  const auto un = static_cast<std::size_t>(n);
  const int base = std::max(n, 2);
  const int slots = static_cast<int>(sims.size()) * n * n;
  const std::size_t estimate = exact_digit_estimate(n, sims.size() > 1);
  if (estimate > budget) {
    throw BudgetError("exact simulation of order " + std::to_string(n) + " needs about " +
                      std::to_string(estimate) + " denominator digits, budget is " + std::to_string(budget));
  }
  for (auto& s : sims) {
    s.out.n = n;
    s.out.base = base;
    s.out.slots = slots;
  }

  auto check = [&](int t) {
    std::vector<ColorId> exact;
    for (const auto& s : sims)
      for (int f : s.out.rounds.back().index) exact.push_back(static_cast<ColorId>(f));
    const auto& fwl = fwl_by_round_joint[std::min<std::size_t>(static_cast<std::size_t>(t), fwl_by_round_joint.size() - 1)];
    if (!same_partition(exact, fwl)) {
      throw PartitionMismatch("exact simulation and 2-FWL partitions differ at round " + std::to_string(t));
    }
  };

  // Round 0: canonical index of the atomic type, first-seen order.
  std::map<TypeKey, int> types;
  for (auto& s : sims) {
    ExactPairState st;
    st.index.resize(un * un);
    for (Node i = 0; i < n; ++i)
      for (Node j = 0; j < n; ++j) {
        auto [it, fresh] = types.try_emplace(type_key(*s.graph, i, j), static_cast<int>(types.size()) + 1);
        st.index[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)] = it->second;
      }
    set_codes(st, base, slots);
    track_digits(s.out, st);
    s.out.rounds.push_back(std::move(st));
  }
  check(0);

  const mpq_class scale = inverse_power(base, static_cast<unsigned long>(slots));
  for (int t = 1; t <= rounds; ++t) {
    std::map<mpq_class, int> fresh_ids;
    for (auto& s : sims) {
      const ExactPairState& prev = s.out.rounds.back();
      ExactPairState st;
      st.round = t;
      st.aggregate.resize(un * un);
      st.index.resize(un * un);
      for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = 0; j < un; ++j) {
          mpq_class acc = 0;
          for (std::size_t l = 0; l < un; ++l) acc += prev.t[i * un + l] * prev.tpow[l * un + j];
          mpq_class agg = prev.t[i * un + j] + scale * acc;
          auto [it, ins] = fresh_ids.try_emplace(agg, static_cast<int>(fresh_ids.size()) + 1);
          st.index[i * un + j] = it->second;
          st.aggregate[i * un + j] = std::move(agg);
        }
      }
      set_codes(st, base, slots);
      track_digits(s.out, st);
      s.out.rounds.push_back(std::move(st));
    }
    check(t);
  }
}

}  // namespace

ExactSimulation exact_simulate(const LabeledGraph& g, int rounds, std::size_t digit_budget) {
  if (rounds < 0) throw std::invalid_argument("exact_simulate: rounds must be >= 0");
  if (g.num_nodes() == 0) throw std::invalid_argument("exact_simulate: empty graph");
  const Coloring c = fwl2(g, rounds);
  std::vector<Sim> sims{{&g, {}}};
  simulate(sims, rounds, digit_budget, c.history);
  return std::move(sims.front().out);
}

ExactParallel exact_simulate_pair(const LabeledGraph& g, const LabeledGraph& h, int rounds,
                                  std::size_t digit_budget) {
  if (rounds < 0) throw std::invalid_argument("exact_simulate: rounds must be >= 0");
  if (g.num_nodes() != h.num_nodes()) throw std::invalid_argument("exact_simulate: graph orders differ");
  if (g.num_nodes() == 0) throw std::invalid_argument("exact_simulate: empty graphs");
  WlOptions opts;
  opts.max_rounds = rounds;
  const ParallelRun run = run_parallel(WlMethod::kFwl2, g, h, opts);
  std::vector<std::vector<ColorId>> joint;
  for (std::size_t t = 0; t < run.g.history.size(); ++t) {
    std::vector<ColorId> both = run.g.history[t];
    const auto& other = run.h.history[std::min(t, run.h.history.size() - 1)];
    both.insert(both.end(), other.begin(), other.end());
    joint.push_back(std::move(both));
  }
  std::vector<Sim> sims{{&g, {}}, {&h, {}}};
  simulate(sims, rounds, digit_budget, joint);

  ExactParallel out{std::move(sims[0].out), std::move(sims[1].out), -1};
  for (std::size_t t = 0; t < out.g.rounds.size(); ++t) {
    auto values = [&](const ExactPairState& st) {
      std::vector<mpq_class> v = t == 0 ? st.t : st.aggregate;
      std::sort(v.begin(), v.end());
      return v;
    };
    if (values(out.g.rounds[t]) != values(out.h.rounds[t])) {
      out.first_difference = static_cast<int>(t);
      break;
    }
  }
  return out;
}

nlohmann::json simulation_to_json(const ExactSimulation& sim) {
  nlohmann::json rounds = nlohmann::json::array();
  const auto un = static_cast<std::size_t>(sim.n);
  for (const auto& st : sim.rounds) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t r = 0; r < st.index.size(); ++r) {
      pairs.push_back({{"pair", {r / un, r % un}}, {"color", st.index[r]}, {"T", to_fraction_string(st.t[r])}});
    }
    rounds.push_back({{"round", st.round}, {"classes", st.num_classes}, {"pairs", std::move(pairs)}});
  }
  return {{"n", sim.n},
          {"base", sim.base},
          {"slots", sim.slots},
          {"max_denominator_digits", sim.max_denominator_digits},
          {"rounds", std::move(rounds)}};
}

}  // namespace etwl
