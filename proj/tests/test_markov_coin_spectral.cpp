#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rtqw/chain.hpp"
#include "rtqw/markov.hpp"

using namespace rtqw;

namespace {

RMatrix random_stochastic(oracle::Gen& gen, int f, double floor = 0.1) {
  RMatrix p(f, f);
  for (int j = 0; j < f; ++j) {
    const auto row = gen.simplex(f);
    for (int k = 0; k < f; ++k) p(j, k) = (1 - floor) * row[k] + floor / f;
  }
  return p;
}

RVector random_initial(oracle::Gen& gen, int f) {
  const auto w = gen.simplex(f);
  return Eigen::Map<const RVector>(w.data(), f);
}

std::vector<Coin> to_coins(const std::vector<CMatrix>& ms) {
  std::vector<Coin> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

MarkovCoinProcess mixed_hadamard_markov(double stay) {
  const std::vector<Coin> coins{Coin::identity(2), Coin(oracle::swap2()), Coin::hadamard()};
  RMatrix p = RMatrix::Constant(3, 3, (1 - stay) / 2);
  p.diagonal().setConstant(stay);
  return MarkovCoinProcess(coins, p, RVector::Constant(3, 1.0 / 3));
}

}  // namespace

TEST_CASE("left Perron vector chi_P") {
  oracle::Gen gen(61);
  const RMatrix ds = gen.doubly_stochastic(4, 3);
  CHECK((chi_p(ds) - RVector::Constant(4, 0.25)).cwiseAbs().maxCoeff() < 1e-12);

  const RVector mu = (RVector(3) << 0.2, 0.5, 0.3).finished();
  const RMatrix rows = RVector::Ones(3) * mu.transpose();
  CHECK((chi_p(rows) - mu).cwiseAbs().maxCoeff() < 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const int f = gen.integer(2, 6);
    const RMatrix p = random_stochastic(gen, f);
    const RVector chi = chi_p(p);
    CHECK(std::abs(chi.sum() - 1.0) < 1e-12);
    CHECK(chi.minCoeff() > 0.0);
    CHECK((p.transpose() * chi - chi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("the i.i.d. embedding reproduces the i.i.d. characteristic function and D(v)") {
  const double p = 1.0 / std::sqrt(2.0);
  const FiniteCoinEnsemble ens({Coin::identity(2), Coin(oracle::swap2()), Coin::hadamard()}, {p / 2, p / 2, 1 - p});
  const auto proc = MarkovCoinProcess::iid(ens);
  const auto jump = JumpFunction::nearest_neighbour(1);
  const auto e = expected_doubled(ens);
  const CVector phi0 = (CVector(2) << 1.0, cplx(0, 1)).finished() / std::sqrt(2.0);
  for (int n : {1, 2, 5, 11, 20})
    for (double y : {-2.5, -0.7, 0.0, 0.4, 3.0}) {
      const RVector yy = RVector::Constant(1, y);
      CHECK(std::abs(averaged_char_markov(proc, jump, yy, n, phi0) - averaged_char_function(e, jump, yy, n, phi0)) <
            1e-12);
    }

  const auto ms = markov_spectral(proc, jump);
  const auto iid = iid_model(ens, jump);
  const auto sub = cyclic_subspace(iid);
  for (double v : {0.0, 0.6, 1.9, -2.4}) {
    const RVector vv = RVector::Constant(1, v);
    CHECK(std::abs(markov_diffusion(ms, vv)(0, 0) - diffusion_matrix(iid, sub, vv)(0, 0)) < 1e-9);
    CHECK(std::abs(markov_diffusion(ms, vv)(0, 0) - oracle::mixed_hadamard_diffusion(v)) < 1e-9);
  }
  CHECK(check_assumption_s2(proc, jump).holds);
}

TEST_CASE("property: Markov averaged law matches path enumeration") {
  oracle::Gen gen(62);
  for (const auto& m : oracle::two_coin_corpus()) {
    CAPTURE(m.name);
    const int d = static_cast<int>(m.jumps.front().size());
    const JumpFunction jump(d, m.jumps);
    const RMatrix p = random_stochastic(gen, 2, 0.0);
    const RVector p0 = random_initial(gen, 2);
    const MarkovCoinProcess proc(to_coins(m.coins), p, p0);
    for (int n = 1; n <= 5; ++n) {
      const auto ref = oracle::enumerated_markov_average(m.phi0, m.coins, p, p0, m.jumps, n);
      const auto got = averaged_distribution_markov(proc, jump, n, m.phi0);
      for (const auto& [k, w] : ref) CHECK(std::abs(got.at(k) - w) < 1e-10);
      CHECK(std::abs(got.total() - 1.0) < 1e-10);
      RVector y(d);
      for (int j = 0; j < d; ++j) y[j] = 1.1 - 0.8 * j;
      CHECK(std::abs(averaged_char_markov(proc, jump, y, n, m.phi0) - oracle::naive_char(ref, y)) < 1e-12);
    }
  }
}

TEST_CASE("block operator fixed points, spectral radius and block-max contraction") {
  oracle::Gen gen(63);
  for (int trial = 0; trial < 12; ++trial) {
    const int d = gen.integer(1, 2), cd = 2 * d, f = gen.integer(2, 3);
    std::vector<Coin> coins;
    for (int j = 0; j < f; ++j) coins.emplace_back(gen.unitary(cd));
    const MarkovCoinProcess proc(coins, random_stochastic(gen, f, 0.05), random_initial(gen, f));
    const JumpFunction jump(d, gen.jumps(d, 2));
    const auto model = markov_spectral_model(proc, jump);
    REQUIRE(model.ambient() == f * cd * cd);

    const auto pc = projector_check(model, cd);
    CHECK(std::abs(pc.pairing - cplx(cd, 0)) < 1e-12);
    CHECK(pc.residual_half_d < 1e-12);
    CHECK(pc.residual_d > 0.1);
    CHECK(pc.fixed_point < 1e-12);

    RVector y(d), y2(d);
    for (int j = 0; j < d; ++j) y[j] = gen.uniform(-3, 3), y2[j] = gen.uniform(-3, 3);
    const CMatrix m = block_operator(proc, jump, y, y2);
    const auto ev = Eigen::ComplexEigenSolver<CMatrix>(m, false).eigenvalues();
    CHECK(ev.cwiseAbs().maxCoeff() <= 1 + 1e-10);

    for (int k = 0; k < 5; ++k) {
      const CVector x = gen.state(m.rows());
      CHECK(blockmax_norm(m.adjoint() * x, f) <= blockmax_norm(x, f) + 1e-12);
    }
  }
  CHECK_THROWS_AS(blockmax_norm(CVector::Ones(5), 2), std::invalid_argument);
}

TEST_CASE("assumption check on Markov processes") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const auto mixed = mixed_hadamard_markov(0.6);
  AssumptionOptions o64, o128;
  o64.grid = 64;
  o128.grid = 128;
  const auto r64 = check_assumption_s2(mixed, jump, o64);
  const auto r128 = check_assumption_s2(mixed, jump, o128);
  CHECK(r64.holds);
  CHECK(r128.holds);
  CHECK(r64.gap > 0.01);
  CHECK(std::abs(r64.gap - r128.gap) < 0.05 * r64.gap);

  // frozen coins: no unique stationary law
  const MarkovCoinProcess frozen({Coin::hadamard(), Coin(oracle::swap2())}, RMatrix::Identity(2, 2),
                                 RVector::Constant(2, 0.5));
  CHECK_THROWS_AS(check_assumption_s2(frozen, jump), AssumptionError);

  // strictly alternating coins: the sign-alternating block vector has eigenvalue -1
  const RMatrix flip = (RMatrix(2, 2) << 0.0, 1.0, 1.0, 0.0).finished();
  const MarkovCoinProcess alternating({Coin::hadamard(), Coin(oracle::hadamard2().transpose())}, flip,
                                      RVector::Constant(2, 0.5));
  const auto ra = check_assumption_s2(alternating, jump);
  CHECK_FALSE(ra.holds);
  CHECK(ra.gap < 1e-8);
}

TEST_CASE("drift of the Markov model does not depend on P") {
  oracle::Gen gen(64);
  const JumpFunction jump(1, {{2}, {-1}});
  for (int trial = 0; trial < 5; ++trial) {
    const MarkovCoinProcess proc({Coin(gen.unitary(2)), Coin(gen.unitary(2))}, random_stochastic(gen, 2),
                                 random_initial(gen, 2));
    const auto model = markov_spectral_model(proc, jump);
    CHECK((model.drift - jump.mean()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("property: Markov permutation walks diffuse like the joint classical chain") {
  oracle::Gen gen(65);
  int done = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const JumpFunction jump(1, gen.jumps(1, 2));
    if (jump[0] == jump[1]) continue;
    std::vector<Coin> coins;
    for (int j = 0; j < 2; ++j) {
      const auto perm = gen.permutation(2);
      coins.emplace_back(gen.permutation_matrix(perm, {gen.uniform(0, 6.3), gen.uniform(0, 6.3)}));
    }
    // equal images make the joint chain reducible (identity) or periodic (swap)
    if (as_permutation_coin(coins[0])->images == as_permutation_coin(coins[1])->images) continue;
    const MarkovCoinProcess proc(coins, random_stochastic(gen, 2, 0.2), random_initial(gen, 2));
    const RMatrix sigma = permutation_markov_covariance(proc, jump);
    const auto ms = markov_spectral(proc, jump);
    const RMatrix avg = averaged_diffusion(ms.model, ms.subspace, 32);
    CHECK(std::abs(avg(0, 0) - sigma(0, 0)) < 1e-9 * std::max(1.0, sigma(0, 0)));
    ++done;
  }
  CHECK(done >= 8);

  const MarkovCoinProcess quantum({Coin::hadamard(), Coin(oracle::swap2())}, RMatrix::Constant(2, 2, 0.5),
                                  RVector::Constant(2, 0.5));
  CHECK_THROWS_AS(permutation_markov_covariance(quantum, JumpFunction::nearest_neighbour(1)), std::invalid_argument);
}
