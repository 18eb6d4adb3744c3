#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rtqw/walk.hpp"

using namespace rtqw;

namespace {

CVector e_plus(int coin_dim = 2) {
  CVector v = CVector::Zero(coin_dim);
  v[0] = 1.0;
  return v;
}

std::vector<Coin> as_coins(const std::vector<CMatrix>& ms) {
  std::vector<Coin> out;
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<CMatrix> matrices(const std::vector<Coin>& coins) {
  std::vector<CMatrix> out;
  for (const auto& c : coins) out.push_back(c.matrix());
  return out;
}

void check_same(const LatticeDistribution& dist, const oracle::Weights& ref, double tol) {
  double mass = 0.0;
  for (const auto& [k, w] : ref) {
    CHECK(std::abs(dist.at(k) - w) <= tol);
    mass += w;
  }
  CHECK(std::abs(dist.total() - mass) <= tol);
}

}  // namespace

TEST_CASE("identity coin shifts the walker") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const WalkState s = apply_step(WalkState::localized(e_plus(), {0}), Coin::identity(2), jump);
  CHECK(std::abs(s.amplitude({1})[0] - 1.0) < 1e-15);
  CHECK(s.amplitude({1}).norm() == doctest::Approx(1.0));
  CHECK(s.amplitude({-1}).norm() == 0.0);
}

TEST_CASE("one Hadamard step splits the walker") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const WalkState s = apply_step(WalkState::localized(e_plus(), {0}), Coin::hadamard(), jump);
  const double h = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.amplitude({1})[0] - h) < 1e-15);
  CHECK(std::abs(std::abs(s.amplitude({-1})[1]) - h) < 1e-15);
  const auto dist = position_distribution(s);
  CHECK(dist.at({1}) == doctest::Approx(0.5));
  CHECK(dist.at({-1}) == doctest::Approx(0.5));
}

TEST_CASE("swap coin relabels then shifts") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const WalkState s = apply_step(WalkState::localized(e_plus(), {0}), Coin(oracle::swap2()), jump);
  CHECK(std::abs(s.amplitude({-1})[1] - 1.0) < 1e-15);
  CHECK(position_distribution(s).at({-1}) == doctest::Approx(1.0));
}

TEST_CASE("identity coins move ballistically") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const std::vector<Coin> coins(7, Coin::identity(2));
  const auto dist = position_distribution(evolve(WalkState::localized(e_plus(), {0}), coins, jump));
  CHECK(dist.at({7}) == 1.0);
}

TEST_CASE("empty sequence leaves the state unchanged") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const WalkState s0 = WalkState::localized(e_plus(), {4});
  const WalkState s = evolve(s0, std::span<const Coin>{}, jump);
  CHECK((s.amplitude({4}) - s0.amplitude({4})).norm() == 0.0);
  CHECK(position_distribution(s).at({4}) == 1.0);
}

TEST_CASE("two Hadamard steps") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const std::vector<Coin> coins(2, Coin::hadamard());
  const auto dist = position_distribution(evolve(WalkState::localized(e_plus(), {0}), coins, jump));
  // hand multiplication, confirmed by the naive site-map oracle
  const oracle::Weights ref = oracle::naive_distribution(e_plus(), matrices(coins), oracle::nn1());
  CHECK(ref.at({-2}) == doctest::Approx(0.25));
  CHECK(ref.at({0}) == doctest::Approx(0.5));
  CHECK(ref.at({2}) == doctest::Approx(0.25));
  CHECK(dist.at({-2}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(dist.at({0}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dist.at({2}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(moment(dist, {2}) == doctest::Approx(2.0).epsilon(1e-14));
  for (double y : {0.0, 0.3, 1.7, -2.5}) {
    const cplx phi = characteristic_function(dist, RVector::Constant(1, y));
    CHECK(std::abs(phi - 0.5 * (1.0 + std::cos(2.0 * y))) < 1e-14);
  }
}

TEST_CASE("position distribution of simple states") {
  LatticeBox box({0}, {3});
  WalkState s(box, 2);
  s.set_amplitude({3}, e_plus());
  CHECK(position_distribution(s).at({3}) == 1.0);

  WalkState t(box, 2);
  CVector a = e_plus() / std::sqrt(2.0);
  t.set_amplitude({0}, a);
  t.set_amplitude({2}, a);
  const auto dist = position_distribution(t);
  CHECK(dist.at({0}) == doctest::Approx(0.5));
  CHECK(dist.at({2}) == doctest::Approx(0.5));
  CHECK(dist.total() == doctest::Approx(1.0));
}

TEST_CASE("J_k for one step and for identity coins") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const Coin h = Coin::hadamard();
  const auto j1 = jk_matrices(std::vector<Coin>{h}, jump);
  REQUIRE(j1.size() == 2);
  CMatrix p_plus = CMatrix::Zero(2, 2), p_minus = CMatrix::Zero(2, 2);
  p_plus(0, 0) = 1.0;
  p_minus(1, 1) = 1.0;
  CHECK((j1.at({1}) - p_plus * h.matrix()).norm() < 1e-15);
  CHECK((j1.at({-1}) - p_minus * h.matrix()).norm() < 1e-15);

  const auto j3 = jk_matrices(std::vector<Coin>(3, Coin::identity(2)), jump);
  CHECK((j3.at({3}) - p_plus).norm() < 1e-15);
  CHECK((j3.at({-3}) - p_minus).norm() < 1e-15);
  for (const auto& [k, m] : j3)
    if (k != Site{3} && k != Site{-3}) CHECK(m.norm() < 1e-15);
}

TEST_CASE("J_k completeness for two Hadamard steps") {
  const auto jump = JumpFunction::nearest_neighbour(1);
  const auto jk = jk_matrices(std::vector<Coin>(2, Coin::hadamard()), jump);
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& [k, m] : jk) sum += m.adjoint() * m;
  CHECK((sum - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("fourier_jn special cases and agreement with J_k") {
  oracle::Gen gen(11);
  for (int d : {1, 2}) {
    const JumpFunction jump(d, gen.jumps(d, 2));
    const int cd = 2 * d;
    std::vector<Coin> coins;
    for (int i = 0; i < 3; ++i) coins.emplace_back(gen.unitary(cd));

    const CMatrix at0 = fourier_jn(coins, jump, RVector::Zero(d));
    CHECK((at0 - coins[2].matrix() * coins[1].matrix() * coins[0].matrix()).norm() < 1e-13);

    RVector y(d);
    for (int j = 0; j < d; ++j) y[j] = 0.7 - 0.3 * j;
    CVector phase(cd);
    for (int t = 0; t < cd; ++t) {
      double a = 0.0;
      for (int j = 0; j < d; ++j) a += y[j] * jump[t][j];
      phase[t] = std::polar(1.0, a);
    }
    const CMatrix one = fourier_jn(std::span<const Coin>(coins.data(), 1), jump, y);
    CHECK((one - phase.asDiagonal() * coins[0].matrix()).norm() < 1e-14);

    CMatrix sum = CMatrix::Zero(cd, cd);
    for (const auto& [k, m] : jk_matrices(coins, jump)) {
      double a = 0.0;
      for (int j = 0; j < d; ++j) a += y[j] * k[j];
      sum += std::polar(1.0, a) * m;
    }
    CHECK((fourier_jn(coins, jump, y) - sum).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("characteristic function and moments of simple laws") {
  const auto point = LatticeDistribution::from_map(1, {{{5}, 1.0}});
  CHECK(std::abs(characteristic_function(point, RVector::Constant(1, 0.4)) - std::polar(1.0, 2.0)) < 1e-15);
  CHECK(moment(point, {3}) == 125.0);
  const auto coin = LatticeDistribution::from_map(1, {{{-1}, 0.5}, {{1}, 0.5}});
  CHECK(std::abs(characteristic_function(coin, RVector::Constant(1, 0.9)) - std::cos(0.9)) < 1e-15);
  CHECK(moment(coin, {1}) == 0.0);
  const RVector c = RVector::Constant(1, 1.0);
  CHECK(moment(coin, {2}, &c) == doctest::Approx(2.0));
}

TEST_CASE("density kernel paths") {
  oracle::Gen gen(5);
  for (int d : {1, 2}) {
    const JumpFunction jump(d, gen.jumps(d, 1));
    const int cd = 2 * d;
    std::vector<Coin> coins;
    for (int i = 0; i < 6; ++i) coins.emplace_back(gen.unitary(cd));
    const CVector phi = gen.state(cd), chi = gen.state(cd);
    const Site origin(d, 0);

    const auto pure = density_distribution(DensityKernel::pure(phi, origin), coins, jump);
    const auto vec = position_distribution(evolve(WalkState::localized(phi, origin), coins, jump));
    const auto vec2 = position_distribution(evolve(WalkState::localized(chi, origin), coins, jump));
    vec.for_each([&](const Site& k, double w) { CHECK(std::abs(pure.at(k) - w) < 1e-12); });

    DensityKernel mix;
    mix.dim = d;
    mix.entries.push_back({origin, origin, 0.5 * (phi * phi.adjoint() + chi * chi.adjoint())});
    mix.validate();
    const auto mixed = density_distribution(mix, coins, jump);
    vec.for_each([&](const Site& k, double w) { CHECK(std::abs(mixed.at(k) - 0.5 * (w + vec2.at(k))) < 1e-12); });

    Site x0(d, 0);
    x0[0] = 3;
    const auto shifted = density_distribution(DensityKernel::pure(phi, x0), coins, jump);
    vec.for_each([&](const Site& k, double w) {
      Site kk = k;
      kk[0] += 3;
      CHECK(std::abs(shifted.at(kk) - w) < 1e-12);
    });
  }
}

TEST_CASE("invalid density kernels are rejected") {
  DensityKernel k;
  k.dim = 1;
  CMatrix half = CMatrix::Identity(2, 2) * 0.25;
  k.entries.push_back({{0}, {0}, half});
  CHECK_THROWS_AS(k.validate(), std::invalid_argument);  // trace 1/2

  DensityKernel h;
  h.dim = 1;
  h.entries.push_back({{0}, {0}, CMatrix::Identity(2, 2) * 0.5});
  CMatrix off = CMatrix::Zero(2, 2);
  off(0, 1) = 0.1;
  h.entries.push_back({{0}, {1}, off});
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);  // missing adjoint block
}

TEST_CASE("non-unitary coins and mismatched dimensions are rejected") {
  CMatrix m = CMatrix::Identity(2, 2);
  m(0, 1) = 1e-6;
  CHECK_THROWS(Coin(m));
  const auto jump2 = JumpFunction::nearest_neighbour(2);
  CHECK_THROWS(apply_step(WalkState::localized(e_plus(), {0}), Coin::hadamard(), jump2));
}

TEST_CASE("property: norm, support and agreement with the site-map oracle") {
  oracle::Gen gen(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + trial % 2;
    const int cd = 2 * d;
    const int range = gen.integer(1, 2);
    const JumpFunction jump(d, gen.jumps(d, range));
    const int n = gen.integer(0, 6);
    std::vector<CMatrix> ms;
    for (int i = 0; i < n; ++i) ms.push_back(gen.unitary(cd));
    const CVector phi = gen.state(cd);
    const auto coins = as_coins(ms);
    const auto dist = position_distribution(evolve(WalkState::localized(phi, Site(d, 0)), coins, jump));
    CHECK(std::abs(dist.total() - 1.0) <= 1e-12);
    dist.for_each([&](const Site& k, double w) {
      for (int c : k)
        if (std::abs(c) > jump.range() * n) CHECK(w == 0.0);
    });
    check_same(dist, oracle::naive_distribution(phi, ms, jump.jumps()), 1e-12);

    if (n >= 1) {
      // W_k = |J_k phi|^2
      const auto jk = jk_matrices(coins, jump);
      for (const auto& [k, m] : jk) CHECK(std::abs(dist.at(k) - (m * phi).squaredNorm()) < 1e-12);
    }
  }
}

TEST_CASE("property: inverse transform of the Fourier matrices recovers W_k") {
  oracle::Gen gen(77);
  for (int trial = 0; trial < 10; ++trial) {
    const JumpFunction jump(1, gen.jumps(1, 2));
    const int n = gen.integer(1, 5);
    std::vector<Coin> coins;
    for (int i = 0; i < n; ++i) coins.emplace_back(gen.unitary(2));
    const CVector phi = gen.state(2);
    const auto dist = position_distribution(evolve(WalkState::localized(phi, {0}), coins, jump));
    const int rn = jump.range() * n;
    const int pts = 2 * rn + 1;
    // psi(k) = (1/N) sum_y e^{-iyk} J_n(y) phi on N = 2 rho n + 1 points
    for (int k = -rn; k <= rn; ++k) {
      CVector amp = CVector::Zero(2);
      for (int s = 0; s < pts; ++s) {
        const double y = 2.0 * oracle::kPi * s / pts;
        amp += std::polar(1.0, -y * k) * (fourier_jn(coins, jump, RVector::Constant(1, y)) * phi);
      }
      amp /= double(pts);
      CHECK(std::abs(amp.squaredNorm() - dist.at({k})) < 1e-10);
    }
  }
}

TEST_CASE("property: long sequences keep the norm") {
  oracle::Gen gen(9);
  for (int trial = 0; trial < 6; ++trial) {
    const int d = 1 + trial % 2;
    const JumpFunction jump(d, gen.jumps(d, 1));
    std::vector<Coin> palette;
    for (int i = 0; i < 3; ++i) palette.emplace_back(gen.unitary(2 * d));
    std::vector<int> seq(200);
    for (auto& s : seq) s = gen.integer(0, 2);
    const WalkState s = evolve(WalkState::localized(gen.state(2 * d), Site(d, 0)), palette, seq, jump);
    CHECK(std::abs(s.norm_squared() - 1.0) <= 1e-12);
  }
}
