#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>

#include "rtqw/walk.hpp"

namespace rtqw {

// Finite-support distribution of i.i.d. coins.
class FiniteCoinEnsemble {
 public:
  FiniteCoinEnsemble(std::vector<Coin> coins, std::vector<double> probs);

  const std::vector<Coin>& coins() const { return coins_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return coins_.size(); }
  int coin_dim() const { return coins_.front().coin_dim(); }

 private:
  std::vector<Coin> coins_;
  std::vector<double> probs_;
};

// C_{sigma tau} = e^{i theta_sigma} delta_{sigma, pi(tau)}, indices in the fixed basis order.
struct PermutationCoinSpec {
  std::vector<int> images;   // images[i] = index of pi(label i)
  std::vector<double> phases;  // theta per basis index; empty means all zero

  bool is_bijection() const;
};

Coin make_permutation_coin(const PermutationCoinSpec& spec);

// Recovers (pi, Theta) when every column has exactly one unimodular entry.
std::optional<PermutationCoinSpec> as_permutation_coin(const Coin& coin, double tol = 1e-12);

// Coins driven by a finite Markov chain: first coin drawn from `initial`,
// then P(j, k) is the probability that coin k follows coin j.
class MarkovCoinProcess {
 public:
  MarkovCoinProcess(std::vector<Coin> coins, RMatrix transition, RVector initial);

  const std::vector<Coin>& coins() const { return coins_; }
  const RMatrix& transition() const { return p_; }
  const RVector& initial() const { return p0_; }
  std::size_t size() const { return coins_.size(); }
  int coin_dim() const { return coins_.front().coin_dim(); }

  // Rows of P all equal to the ensemble weights, started from them.
  static MarkovCoinProcess iid(const FiniteCoinEnsemble& ensemble);

 private:
  std::vector<Coin> coins_;
  RMatrix p_;
  RVector p0_;
};

// Reproducible random source keyed by (seed, stream index); each sub-index
// yields an independent engine, so results do not depend on scheduling.
class SeededStream {
 public:
  SeededStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  std::mt19937_64 engine(std::uint64_t sub = 0) const;
  SeededStream child(std::uint64_t i) const;

 private:
  std::uint64_t seed_, index_;
};

// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

std::vector<int> sample_sequence(const FiniteCoinEnsemble& ensemble, int n, const SeededStream& stream);
std::vector<int> sample_sequence(const MarkovCoinProcess& process, int n, const SeededStream& stream);

struct WeightedSequence {
  std::vector<int> indices;
  double probability;
};

// All |coins|^n sequences; refuses more than `guard` of them.
std::vector<WeightedSequence> enumerate_sequences(const FiniteCoinEnsemble& ensemble, int n,
                                                  std::size_t guard = 10'000'000);
// All coin paths of a Markov process with their probabilities.
std::vector<WeightedSequence> enumerate_paths(const MarkovCoinProcess& process, int n,
                                              std::size_t guard = 10'000'000);

// Probability measure on permutations, keyed by the image vector.
using PermutationMeasure = std::map<std::vector<int>, double>;

struct PermutationAtom {
  PermutationCoinSpec spec;
  double prob;
};

PermutationMeasure marginal_permutation_measure(const std::vector<PermutationAtom>& atoms);
PermutationMeasure marginal_permutation_measure(const FiniteCoinEnsemble& ensemble, double tol = 1e-12);

}  // namespace rtqw
