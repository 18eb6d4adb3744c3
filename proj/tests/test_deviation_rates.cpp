#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "rtqw/rates.hpp"
#include "rtqw/spectral.hpp"

using namespace rtqw;

namespace {

ChainModel bernoulli_chain(double p) {
  return build_chain({{{0, 1}, p}, {{1, 0}, 1.0 - p}}, JumpFunction::nearest_neighbour(1), RVector::Constant(2, 0.5));
}

RVector vec(std::initializer_list<double> xs) {
  RVector v(xs.size());
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// sup over lambda of lambda x - ln rho(lambda) for d = 1, by golden section
// on a bracket found by doubling; rho from a plain eigen solve.
double brute_ld_1d(const RMatrix& p, const std::vector<Site>& jumps, double x) {
  auto f = [&](double lam) {
    RMatrix t = p;
    for (int c = 0; c < t.cols(); ++c) t.col(c) *= std::exp(lam * jumps[c][0]);
    const auto ev = Eigen::EigenSolver<RMatrix>(t, false).eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < ev.size(); ++i) rho = std::max(rho, ev[i].real());
    return lam * x - std::log(rho);
  };
  double lo = -1.0, hi = 1.0;
  while (f(lo) > f(lo / 2)) lo *= 2;
  while (f(hi) > f(hi / 2)) hi *= 2;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) > f(d))
      b = d;
    else
      a = c;
  }
  return f(0.5 * (a + b));
}

DiffusionFamily constant_family(const RMatrix& d) {
  return {static_cast<int>(d.rows()), [d](const RVector&) { return d; }};
}

// D(v) = A + B cos v1 + C cos 2 v1 + E cos v2 with C, E positive definite and
// C large enough that v1 in {0, pi} are the only maxima, so that
// max_v <u, D u> = <u, (A + C + E) u> + |<u, B u>| and the maximizer jumps
// between v1 = 0 and v1 = pi where <u, B u> changes sign.
struct SwitchingFamily {
  RMatrix a, b, c, e;
  DiffusionFamily family() const {
    return {2, [*this](const RVector& v) {
              return RMatrix(a + b * std::cos(v[0]) + c * std::cos(2 * v[0]) + e * std::cos(v[1]));
            }};
  }
  double max_quad(const RVector& u) const { return u.dot((a + c + e) * u) + std::abs(u.dot(b * u)); }
  // sup over the unit circle of <u, x>_+^2 / (2 max_quad(u))
  double rate(const RVector& x) const {
    auto g = [&](double t) {
      const RVector u = vec({std::cos(t), std::sin(t)});
      const double s = std::max(0.0, u.dot(x));
      return s * s / (2.0 * max_quad(u));
    };
    const int n = 200000;
    int best = 0;
    double bv = -1;
    for (int i = 0; i < n; ++i) {
      const double val = g(2 * oracle::kPi * i / n);
      if (val > bv) bv = val, best = i;
    }
    const double gr = (std::sqrt(5.0) - 1) / 2;
    double lo = 2 * oracle::kPi * (best - 1) / n, hi = 2 * oracle::kPi * (best + 1) / n;
    for (int it = 0; it < 100; ++it) {
      const double c1 = hi - gr * (hi - lo), c2 = lo + gr * (hi - lo);
      if (g(c1) > g(c2))
        hi = c2;
      else
        lo = c1;
    }
    return std::max(bv, g(0.5 * (lo + hi)));
  }
};

SwitchingFamily switching() {
  SwitchingFamily s;
  s.a = (RMatrix(2, 2) << 3.0, 0.4, 0.4, 2.0).finished();
  s.b = (RMatrix(2, 2) << 0.8, 0.1, 0.1, -0.6).finished();  // indefinite
  s.c = (RMatrix(2, 2) << 1.0, 0.2, 0.2, 0.9).finished();
  s.e = (RMatrix(2, 2) << 0.5, -0.1, -0.1, 0.7).finished();
  return s;
}

}  // namespace

TEST_CASE("tilted matrix and Perron root") {
  const auto m = bernoulli_chain(0.7);
  CHECK(std::abs(perron_root(tilted_matrix(m.transition, m.jump, vec({0.0}))) - 1.0) < 1e-14);
  for (double lam : {-3.0, -0.5, 0.0, 0.2, 1.7, 5.0}) {
    const RMatrix t = tilted_matrix(m.transition, m.jump, vec({lam}));
    CHECK(std::abs(t(0, 0) - 0.7 * std::exp(lam)) < 1e-12 * std::exp(std::abs(lam)));
    CHECK(std::abs(t(0, 1) - 0.3 * std::exp(-lam)) < 1e-12 * std::exp(std::abs(lam)));
    CHECK(std::abs(perron_root(t) - oracle::bernoulli_perron(0.7, lam)) < 1e-12 * oracle::bernoulli_perron(0.7, lam));
    CHECK(std::abs(log_perron_root(m.transition, m.jump, vec({lam})) - std::log(oracle::bernoulli_perron(0.7, lam))) <
          1e-12);
  }
  // large tilts stay finite: ln rho(lambda) - lambda -> ln p
  CHECK(std::abs(log_perron_root(m.transition, m.jump, vec({800.0})) - (800.0 + std::log(0.7))) < 1e-10);
}

TEST_CASE("property: log Perron root is midpoint convex and strictly dominant") {
  oracle::Gen gen(51);
  for (int trial = 0; trial < 30; ++trial) {
    const int d = gen.integer(1, 2), cd = 2 * d;
    RMatrix p = 0.5 * gen.doubly_stochastic(cd, 3) + 0.5 * RMatrix::Constant(cd, cd, 1.0 / cd);
    const JumpFunction jump(d, gen.jumps(d, 2));
    RVector a(d), b(d);
    for (int j = 0; j < d; ++j) a[j] = gen.uniform(-2, 2), b[j] = gen.uniform(-2, 2);
    const double mid = log_perron_root(p, jump, 0.5 * (a + b));
    CHECK(mid <= 0.5 * (log_perron_root(p, jump, a) + log_perron_root(p, jump, b)) + 1e-10);
    const RMatrix t = tilted_matrix(p, jump, a);
    const auto ev = Eigen::EigenSolver<RMatrix>(t, false).eigenvalues();
    const double rho = perron_root(t);
    int at_rho = 0;
    for (int i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i] - rho) < 1e-9 * rho)
        ++at_rho;
      else
        CHECK(std::abs(ev[i]) < rho * (1 - 1e-9));
    }
    CHECK(at_rho == 1);
  }
}

TEST_CASE("large-deviation rate of the Bernoulli chain") {
  const double p = 0.7;
  const auto m = bernoulli_chain(p);
  const auto zero = ld_rate(m, vec({0.0}));
  CHECK(zero.status == RateStatus::Finite);
  CHECK(std::abs(zero.value) < 1e-12);
  for (double x : {-0.9, -0.5, -0.1, 0.1, 0.5, 0.9, 0.99}) {
    const auto r = ld_rate(m, vec({x}));
    CHECK(r.status == RateStatus::Finite);
    CHECK(std::abs(r.value - oracle::bernoulli_rate(p, x)) < 1e-8);
  }
  // the closed form approaches -ln p at the edge of the range
  CHECK(std::abs(oracle::bernoulli_rate(p, 1 - 1e-12) + std::log(p)) < 1e-4);
  CHECK(ld_rate(m, vec({1.5})).status == RateStatus::Infinite);
  CHECK(std::isinf(ld_rate(m, vec({-1.2})).value));
}

TEST_CASE("property: large-deviation rates against a golden-section oracle") {
  oracle::Gen gen(52);
  for (int trial = 0; trial < 10; ++trial) {
    const RMatrix p = 0.7 * gen.doubly_stochastic(2, 2) + 0.3 * RMatrix::Constant(2, 2, 0.5);
    const auto jumps = gen.jumps(1, 2);
    const JumpFunction jump(1, jumps);
    const auto chain = chain_from_matrix(p, jump, RVector::Constant(2, 0.5));
    const double lo = std::min(jumps[0][0], jumps[1][0]), hi = std::max(jumps[0][0], jumps[1][0]);
    if (hi - lo < 1) continue;
    for (double s : {0.1, 0.3, 0.5, 0.8}) {
      const double x = lo + s * (hi - lo);
      const auto r = ld_rate(chain, vec({x}));
      REQUIRE(r.status == RateStatus::Finite);
      CHECK(std::abs(r.value - brute_ld_1d(p, jumps, x)) < 1e-8);
    }
  }
}

TEST_CASE("property: rate tables are nonnegative, vanish at the mean and are convex") {
  oracle::Gen gen(53);
  for (int trial = 0; trial < 6; ++trial) {
    const RMatrix p = 0.6 * gen.doubly_stochastic(2, 2) + 0.4 * RMatrix::Constant(2, 2, 0.5);
    const JumpFunction jump(1, {{2}, {-1}});
    const auto chain = chain_from_matrix(p, jump, RVector::Constant(2, 0.5));
    std::vector<RVector> xs;
    for (int i = 0; i <= 30; ++i) xs.push_back(vec({-0.9 + 2.7 * i / 30.0}));
    const auto t = ld_table(chain, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK(t.status[i] == RateStatus::Finite);
      CHECK(t.rate[i] >= -1e-12);
    }
    CHECK(midpoint_convex(t.rate));
    CHECK(std::abs(ld_rate(chain, jump.mean()).value) < 1e-12);
  }
  CHECK_FALSE(midpoint_convex({0.0, 1.0, 0.0}));
}

TEST_CASE("moderate-deviation rate of a constant family is the quadratic form") {
  oracle::Gen gen(54);
  for (int d : {1, 2, 3}) {
    RMatrix l = RMatrix::Random(d, d);
    const RMatrix dm = l * l.transpose() + 0.5 * RMatrix::Identity(d, d);
    const auto fam = constant_family(dm);
    const MdRate rate(fam);
    CHECK(rate.constant());
    for (int k = 0; k < 6; ++k) {
      RVector x(d);
      for (int j = 0; j < d; ++j) x[j] = gen.uniform(-1, 1);
      x *= gen.uniform(0, 3) / std::max(1e-12, x.norm());
      const auto r = rate(x);
      CHECK(std::abs(r.legendre.value - 0.5 * x.dot(dm.ldlt().solve(x))) < 1e-9);
    }
    CHECK(std::abs(rate(RVector::Zero(d)).legendre.value) < 1e-15);
  }
}

TEST_CASE("argmax over v") {
  const DiffusionFamily synth{1, [](const RVector& v) { return RMatrix::Constant(1, 1, 2.0 + std::cos(v[0])); }};
  for (double y : {-2.0, 0.3, 1.0}) {
    const auto a = argmax_v(synth, vec({y}));
    REQUIRE(a.maximizers.size() == 1);
    CHECK(std::abs(a.maximizers[0][0]) < 1e-9);
    CHECK(std::abs(a.value - 3 * y * y) < 1e-12);
    CHECK_FALSE(a.constant);
  }

  const auto flat = argmax_v(constant_family(RMatrix::Constant(1, 1, 4.0)), vec({0.5}));
  CHECK(flat.constant);
  CHECK(std::abs(flat.value - 1.0) < 1e-15);

  // maximum of fourth order at v = 0
  const DiffusionFamily quartic{
      1, [](const RVector& v) { return RMatrix::Constant(1, 1, 2.0 - std::pow(1 - std::cos(v[0]), 2)); }};
  CHECK_THROWS_AS(argmax_v(quartic, vec({1.0})), AssumptionError);

  // two equal isolated maxima
  const DiffusionFamily twin{1, [](const RVector& v) { return RMatrix::Constant(1, 1, 2.0 + std::cos(2 * v[0])); }};
  const auto tw = argmax_v(twin, vec({1.0}));
  REQUIRE(tw.maximizers.size() == 2);
  CHECK(std::abs(tw.maximizers[0][0]) < 1e-9);
  CHECK(std::abs(std::abs(tw.maximizers[1][0]) - oracle::kPi) < 1e-9);
}

TEST_CASE("moderate-deviation rate of the three-coin mixture") {
  const double p = 1.0 / std::sqrt(2.0);
  const FiniteCoinEnsemble ens({Coin::identity(2), Coin(oracle::swap2()), Coin::hadamard()}, {p / 2, p / 2, 1 - p});
  const auto model = iid_model(ens, JumpFunction::nearest_neighbour(1));
  const auto sub = cyclic_subspace(model);
  const DiffusionFamily fam{1, [&](const RVector& v) { return diffusion_matrix(model, sub, v); }};
  const MdRate rate(fam);
  const double d0 = 2 * std::sqrt(2.0) - 1;
  for (double x : {-1.0, -0.4, 0.0, 0.25, 0.8}) {
    const auto r = rate(vec({x}));
    CHECK(std::abs(r.legendre.value - x * x / (2 * d0)) < 1e-8);
    if (x != 0.0) CHECK(std::abs(r.argmax.maximizers.front()[0]) < 1e-8);
  }
  for (double y : {-1.3, 0.2, 2.0}) {
    const auto a = rate.argmax(vec({y}));
    CHECK(std::abs(a.maximizers.front()[0]) < 1e-8);
    CHECK(std::abs(a.value - d0 * y * y) < 1e-8);
  }
}

TEST_CASE("two-dimensional moderate-deviation rate with a unique maximizer") {
  const RMatrix a = (RMatrix(2, 2) << 2.0, 0.3, 0.3, 1.5).finished();
  const DiffusionFamily fam{2, [a](const RVector& v) {
                              return RMatrix(a + (1.0 + 0.5 * std::cos(v[0]) + 0.25 * std::cos(v[1])) *
                                                     RMatrix::Identity(2, 2));
                            }};
  const RMatrix top = a + 1.75 * RMatrix::Identity(2, 2);
  const MdRate rate(fam);
  for (const RVector& x : {vec({0.3, -0.2}), vec({-1.0, 0.5}), vec({0.0, 0.7})}) {
    const auto r = rate(x);
    CHECK(std::abs(r.legendre.value - 0.5 * x.dot(top.ldlt().solve(x))) < 1e-9);
    CHECK(r.argmax.maximizers.front().norm() < 1e-7);
  }
}

TEST_CASE("two-dimensional moderate-deviation rate with switching maximizers") {
  const auto s = switching();
  const MdRate rate(s.family());
  for (const RVector& x : {vec({1.0, 0.0}), vec({0.2, 0.9}), vec({-0.5, -0.5}), vec({0.7, -0.3})}) {
    const auto r = rate(x);
    CHECK(r.legendre.status == RateStatus::Finite);
    CHECK(std::abs(r.legendre.value - s.rate(x)) < 1e-8);
  }
}

TEST_CASE("moderate-deviation tables") {
  const DiffusionFamily synth{1, [](const RVector& v) { return RMatrix::Constant(1, 1, 2.0 + std::cos(v[0])); }};
  std::vector<RVector> xs;
  for (int i = 0; i <= 32; ++i) xs.push_back(vec({-1.0 + i / 16.0}));
  const auto t = md_table(synth, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(t.status[i] == RateStatus::Finite);
    CHECK(std::abs(t.rate[i] - xs[i][0] * xs[i][0] / 6.0) < 1e-9);
    CHECK(t.rate[i] >= 0.0);
  }
  CHECK(t.rate[16] == 0.0);
  CHECK(midpoint_convex(t.rate));
}
