#include "rtqw/ensembles.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace rtqw {

namespace {

void check_probability_vector(const std::vector<double>& p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative or NaN probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
}

int draw(const std::vector<double>& cumulative, double u) {
  for (std::size_t i = 0; i < cumulative.size(); ++i)
    if (u < cumulative[i]) return static_cast<int>(i);
  // rounding left u above the last partial sum: take the last atom with mass
  for (std::size_t i = cumulative.size(); i-- > 0;)
    if (i == 0 || cumulative[i] > cumulative[i - 1]) return static_cast<int>(i);
  return 0;
}

std::vector<double> cumulate(const double* p, std::size_t n) {
  std::vector<double> c(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) c[i] = acc += p[i];
  return c;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

FiniteCoinEnsemble::FiniteCoinEnsemble(std::vector<Coin> coins, std::vector<double> probs)
    : coins_(std::move(coins)), probs_(std::move(probs)) {
  if (coins_.empty()) throw std::invalid_argument("ensemble: no coins");
  if (coins_.size() != probs_.size()) throw std::invalid_argument("ensemble: coins and probabilities differ in length");
  for (const auto& c : coins_)
    if (c.coin_dim() != coins_.front().coin_dim()) throw std::invalid_argument("ensemble: coins of different sizes");
  check_probability_vector(probs_, "ensemble");
}

bool PermutationCoinSpec::is_bijection() const {
  std::vector<bool> hit(images.size(), false);
  for (int i : images) {
    if (i < 0 || i >= static_cast<int>(images.size()) || hit[i]) return false;
    hit[i] = true;
  }
  return true;
}

Coin make_permutation_coin(const PermutationCoinSpec& spec) {
  if (spec.images.empty() || spec.images.size() % 2 != 0)
    throw std::invalid_argument("permutation coin: needs 2d images");
  if (!spec.is_bijection()) throw std::invalid_argument("permutation coin: map is not a bijection");
  if (!spec.phases.empty() && spec.phases.size() != spec.images.size())
    throw std::invalid_argument("permutation coin: phase vector of wrong size");
  const int n = static_cast<int>(spec.images.size());
  CMatrix c = CMatrix::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    const int s = spec.images[t];
    c(s, t) = spec.phases.empty() ? cplx(1.0, 0.0) : std::polar(1.0, spec.phases[s]);
  }
  return Coin(c);
}

std::optional<PermutationCoinSpec> as_permutation_coin(const Coin& coin, double tol) {
  const CMatrix& m = coin.matrix();
  const int n = coin.coin_dim();
  PermutationCoinSpec spec;
  spec.images.assign(n, -1);
  spec.phases.assign(n, 0.0);
  for (int t = 0; t < n; ++t) {
    for (int s = 0; s < n; ++s) {
      const double a = std::abs(m(s, t));
      if (std::abs(a - 1.0) <= tol) {
        if (spec.images[t] != -1) return std::nullopt;
        spec.images[t] = s;
        spec.phases[s] = std::arg(m(s, t));
      } else if (a > tol) {
        return std::nullopt;
      }
    }
    if (spec.images[t] == -1) return std::nullopt;
  }
  if (!spec.is_bijection()) return std::nullopt;
  return spec;
}

MarkovCoinProcess::MarkovCoinProcess(std::vector<Coin> coins, RMatrix transition, RVector initial)
    : coins_(std::move(coins)), p_(std::move(transition)), p0_(std::move(initial)) {
  const auto f = static_cast<Eigen::Index>(coins_.size());
  if (f == 0) throw std::invalid_argument("markov process: no coins");
  if (p_.rows() != f || p_.cols() != f) throw std::invalid_argument("markov process: transition matrix must be F x F");
  if (p0_.size() != f) throw std::invalid_argument("markov process: initial distribution must have F entries");
  for (const auto& c : coins_)
    if (c.coin_dim() != coins_.front().coin_dim())
      throw std::invalid_argument("markov process: coins of different sizes");
  for (Eigen::Index j = 0; j < f; ++j)
    check_probability_vector(std::vector<double>(p_.row(j).begin(), p_.row(j).end()), "markov process: transition row");
  check_probability_vector(std::vector<double>(p0_.begin(), p0_.end()), "markov process: initial distribution");
}

MarkovCoinProcess MarkovCoinProcess::iid(const FiniteCoinEnsemble& ensemble) {
  const auto f = static_cast<Eigen::Index>(ensemble.size());
  RVector mu = Eigen::Map<const RVector>(ensemble.probs().data(), f);
  RMatrix p = mu.transpose().replicate(f, 1);
  return MarkovCoinProcess(ensemble.coins(), p, mu);
}

std::mt19937_64 SeededStream::engine(std::uint64_t sub) const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                    static_cast<std::uint32_t>(sub), static_cast<std::uint32_t>(sub >> 32)};
  return std::mt19937_64(seq);
}

SeededStream SeededStream::child(std::uint64_t i) const { return SeededStream(seed_, mix64(index_ ^ mix64(i))); }

std::vector<int> sample_sequence(const FiniteCoinEnsemble& ensemble, int n, const SeededStream& stream) {
  if (n < 0) throw std::invalid_argument("sample_sequence: negative length");
  auto g = stream.engine();
  const auto cum = cumulate(ensemble.probs().data(), ensemble.size());
  std::vector<int> seq(n);
  for (int s = 0; s < n; ++s) seq[s] = draw(cum, uniform01(g));
  return seq;
}

std::vector<int> sample_sequence(const MarkovCoinProcess& process, int n, const SeededStream& stream) {
  if (n < 0) throw std::invalid_argument("sample_sequence: negative length");
  auto g = stream.engine();
  const auto f = process.size();
  std::vector<std::vector<double>> rows(f);
  for (std::size_t j = 0; j < f; ++j) {
    RVector r = process.transition().row(static_cast<Eigen::Index>(j)).transpose();
    rows[j] = cumulate(r.data(), f);
  }
  const auto start = cumulate(process.initial().data(), f);
  std::vector<int> seq(n);
  for (int s = 0; s < n; ++s) seq[s] = draw(s == 0 ? start : rows[seq[s - 1]], uniform01(g));
  return seq;
}

std::vector<WeightedSequence> enumerate_sequences(const FiniteCoinEnsemble& ensemble, int n, std::size_t guard) {
  const auto m = ensemble.size();
  double count = std::pow(static_cast<double>(m), n);
  if (count > static_cast<double>(guard)) throw std::length_error("enumerate_sequences: guard exceeded");
  std::vector<WeightedSequence> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<int> idx(n, 0);
  while (true) {
    double p = 1.0;
    for (int i : idx) p *= ensemble.probs()[i];
    out.push_back({idx, p});
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == static_cast<int>(m) - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return out;
}

std::vector<WeightedSequence> enumerate_paths(const MarkovCoinProcess& process, int n, std::size_t guard) {
  const auto f = process.size();
  if (std::pow(static_cast<double>(f), n) > static_cast<double>(guard))
    throw std::length_error("enumerate_paths: guard exceeded");
  std::vector<WeightedSequence> out;
  std::vector<int> idx(n, 0);
  if (n == 0) return {{{}, 1.0}};
  while (true) {
    double p = process.initial()[idx[0]];
    for (int s = 1; s < n; ++s) p *= process.transition()(idx[s - 1], idx[s]);
    out.push_back({idx, p});
    int pos = n - 1;
    while (pos >= 0 && idx[pos] == static_cast<int>(f) - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
  return out;
}

PermutationMeasure marginal_permutation_measure(const std::vector<PermutationAtom>& atoms) {
  PermutationMeasure mu;
  std::vector<double> probs;
  for (const auto& a : atoms) {
    if (!a.spec.is_bijection()) throw std::invalid_argument("permutation measure: atom is not a bijection");
    mu[a.spec.images] += a.prob;
    probs.push_back(a.prob);
  }
  check_probability_vector(probs, "permutation measure");
  return mu;
}

PermutationMeasure marginal_permutation_measure(const FiniteCoinEnsemble& ensemble, double tol) {
  std::vector<PermutationAtom> atoms;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    auto spec = as_permutation_coin(ensemble.coins()[i], tol);
    if (!spec) throw std::invalid_argument("permutation measure: coin " + std::to_string(i) + " is not a permutation-phase coin");
    atoms.push_back({*spec, ensemble.probs()[i]});
  }
  return marginal_permutation_measure(atoms);
}

}  // namespace rtqw
