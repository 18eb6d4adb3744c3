#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "oracles.hpp"
#include "rtqw/markov.hpp"
#include "rtqw/mc.hpp"

using namespace rtqw;

namespace {

struct ThreadsEnv {
  explicit ThreadsEnv(const char* value) { setenv("RTQW_THREADS", value, 1); }
  ~ThreadsEnv() { unsetenv("RTQW_THREADS"); }
};

FiniteCoinEnsemble mixed_ensemble() {
  const double p = 1.0 / std::sqrt(2.0);
  return FiniteCoinEnsemble({Coin::identity(2), Coin(oracle::swap2()), Coin::hadamard()}, {p / 2, p / 2, 1 - p});
}

CVector phi_plus() { return (CVector(2) << 1.0, cplx(0, 1)).finished() / std::sqrt(2.0); }

// every site within k standard errors, up to roundoff
void check_against(const McDistribution& mc, const LatticeDistribution& exact, double k) {
  double total = 0.0;
  for (std::size_t i = 0; i < mc.box.size(); ++i) {
    const Site s = mc.box.site(i);
    const double ref = exact.box().contains(s) ? exact.at(s) : 0.0;
    total += mc.mean[i];
    CAPTURE(i);
    CHECK(std::abs(mc.mean[i] - ref) < k * mc.standard_error[i] + 1e-12);
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
  exact.for_each([&](const Site& s, double w) {
    if (w > 1e-12) CHECK(mc.box.contains(s));
  });
}

}  // namespace

TEST_CASE("Monte Carlo distribution agrees with the exact averaged law") {
  const auto ens = mixed_ensemble();
  const auto jump = JumpFunction::nearest_neighbour(1);
  const int n = 6;
  const auto mc = mc_averaged_distribution(ens, phi_plus(), jump, n, 20000, SeededStream(7, 0));
  check_against(mc, averaged_distribution(expected_doubled(ens), jump, n, phi_plus()), 4.0);
  CHECK(mc.provenance.seed == 7);
  CHECK(mc.provenance.stream == 0);
  CHECK(mc.provenance.samples == 20000);
}

TEST_CASE("Monte Carlo in two dimensions and for Markov coins") {
  oracle::Gen gen(71);
  const auto corpus = oracle::two_coin_corpus();
  for (const auto& m : corpus) {
    CAPTURE(m.name);
    std::vector<Coin> coins;
    for (const auto& c : m.coins) coins.emplace_back(c);
    const int d = static_cast<int>(m.jumps.front().size());
    const JumpFunction jump(d, m.jumps);
    const FiniteCoinEnsemble ens(coins, m.probs);
    const auto mc = mc_averaged_distribution(ens, m.phi0, jump, 4, 4000, SeededStream(11, 3));
    check_against(mc, averaged_distribution(expected_doubled(ens), jump, 4, m.phi0), 4.0);

    RMatrix p(2, 2);
    const double a = gen.uniform(0.1, 0.9), b = gen.uniform(0.1, 0.9);
    p << a, 1 - a, 1 - b, b;
    const MarkovCoinProcess proc(coins, p, RVector::Constant(2, 0.5));
    const auto mk = mc_averaged_distribution(proc, m.phi0, jump, 4, 4000, SeededStream(11, 4));
    check_against(mk, averaged_distribution_markov(proc, jump, 4, m.phi0), 4.0);
  }
}

TEST_CASE("Monte Carlo is bit-reproducible across thread counts and repeated calls") {
  const auto ens = mixed_ensemble();
  const auto jump = JumpFunction::nearest_neighbour(1);
  const SeededStream stream(2024, 5);
  McDistribution one, four, again;
  {
    ThreadsEnv env("1");
    CHECK(worker_count() == 1);
    one = mc_averaged_distribution(ens, phi_plus(), jump, 12, 1000, stream);
  }
  {
    ThreadsEnv env("4");
    CHECK(worker_count() == 4);
    four = mc_averaged_distribution(ens, phi_plus(), jump, 12, 1000, stream);
    again = mc_averaged_distribution(ens, phi_plus(), jump, 12, 1000, stream);
  }
  CHECK(one.box == four.box);
  CHECK(one.mean == four.mean);
  CHECK(one.standard_error == four.standard_error);
  CHECK(four.mean == again.mean);

  std::vector<McMomentRow> r1, r3;
  {
    ThreadsEnv env("1");
    r1 = mc_moment_scaling(ens, phi_plus(), jump, {5, 10}, 300, stream);
  }
  {
    ThreadsEnv env("3");
    r3 = mc_moment_scaling(ens, phi_plus(), jump, {5, 10}, 300, stream);
  }
  REQUIRE(r1.size() == r3.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].first == r3[i].first);
    CHECK(r1[i].second == r3[i].second);
    CHECK(r1[i].second_se == r3[i].second_se);
  }

  const auto other_seed = mc_averaged_distribution(ens, phi_plus(), jump, 12, 1000, SeededStream(2025, 5));
  const auto other_stream = mc_averaged_distribution(ens, phi_plus(), jump, 12, 1000, SeededStream(2024, 6));
  CHECK(other_seed.mean != one.mean);
  CHECK(other_stream.mean != one.mean);

  ThreadsEnv bad("zero");
  CHECK(worker_count() >= 1);
}

TEST_CASE("Monte Carlo moment scaling agrees with exact moments") {
  const auto ens = mixed_ensemble();
  const JumpFunction jump(1, {{2}, {-1}});
  const auto e = expected_doubled(ens);
  const double rbar = jump.mean()[0];
  const std::vector<int> ns{1, 4, 9, 16};
  const auto rows = mc_moment_scaling(ens, phi_plus(), jump, ns, 6000, SeededStream(3, 1));
  REQUIRE(rows.size() == ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const int n = ns[i];
    CHECK(rows[i].n == n);
    const auto mom = averaged_moments(e, jump, n, phi_plus());
    const double first = (mom.mean[0] - n * rbar) / n;
    const double second = (mom.second(0, 0) - 2 * n * rbar * mom.mean[0] + n * n * rbar * rbar) / n;
    CHECK(std::abs(rows[i].first[0] - first) < 4 * rows[i].first_se[0] + 1e-12);
    CHECK(std::abs(rows[i].second(0, 0) - second) < 4 * rows[i].second_se(0, 0) + 1e-12);
  }

  // Markov version against the enumerated law
  RMatrix p(3, 3);
  p << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.3, 0.3, 0.4;
  const MarkovCoinProcess proc(ens.coins(), p, RVector::Constant(3, 1.0 / 3));
  const auto mrows = mc_moment_scaling(proc, phi_plus(), jump, {6}, 6000, SeededStream(3, 2));
  const auto law = averaged_distribution_markov(proc, jump, 6, phi_plus());
  double m2 = 0.0;
  law.for_each([&](const Site& s, double w) { m2 += w * (s[0] - 6 * rbar) * (s[0] - 6 * rbar); });
  CHECK(std::abs(mrows[0].second(0, 0) - m2 / 6) < 4 * mrows[0].second_se(0, 0));
}

TEST_CASE("Monte Carlo characteristic function") {
  const auto ens = mixed_ensemble();
  const auto jump = JumpFunction::nearest_neighbour(1);
  const auto e = expected_doubled(ens);
  for (double y : {0.3, 1.2, 2.8}) {
    const RVector yy = RVector::Constant(1, y);
    const auto mc = mc_char_function(ens, phi_plus(), jump, yy, 8, 5000, SeededStream(9, 0));
    CHECK(std::abs(mc.mean - averaged_char_function(e, jump, yy, 8, phi_plus())) < 4 * mc.standard_error);
    CHECK(mc.provenance.samples == 5000);
  }
  const auto zero = mc_char_function(ens, phi_plus(), jump, RVector::Zero(1), 8, 100, SeededStream(9, 0));
  CHECK(std::abs(zero.mean - 1.0) < 1e-12);
  CHECK(zero.standard_error < 1e-12);
}

TEST_CASE("Monte Carlo input validation") {
  const auto ens = mixed_ensemble();
  const auto jump = JumpFunction::nearest_neighbour(1);
  CHECK_THROWS_AS(mc_averaged_distribution(ens, phi_plus(), jump, 3, 1, SeededStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(mc_averaged_distribution(ens, phi_plus(), jump, -1, 10, SeededStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(mc_averaged_distribution(ens, CVector::Ones(2), jump, 3, 10, SeededStream(1, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_averaged_distribution(ens, phi_plus(), JumpFunction::nearest_neighbour(2), 3, 10,
                                           SeededStream(1, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(mc_moment_scaling(ens, phi_plus(), jump, {0, 3}, 10, SeededStream(1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(mc_char_function(ens, phi_plus(), jump, RVector::Zero(2), 3, 10, SeededStream(1, 0)),
                  std::invalid_argument);
}
