#include "rtqw/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

#include "parallel.hpp"

namespace rtqw {

namespace {

void check_distribution(const RVector& p, Eigen::Index size, const char* what) {
  if (p.size() != size) throw std::invalid_argument(std::string(what) + ": wrong length");
  if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(what) + ": not a probability vector");
}

void require_irreducible(const RMatrix& p) {
  if (!irreducible(p)) throw AssumptionError("transition matrix is not irreducible");
}

std::vector<int> bfs_levels(const RMatrix& p, bool transpose) {
  const auto n = p.rows();
  std::vector<int> level(n, -1);
  std::queue<Eigen::Index> todo;
  level[0] = 0;
  todo.push(0);
  while (!todo.empty()) {
    const auto a = todo.front();
    todo.pop();
    for (Eigen::Index b = 0; b < n; ++b) {
      const double w = transpose ? p(b, a) : p(a, b);
      if (w > 0.0 && level[b] < 0) {
        level[b] = level[a] + 1;
        todo.push(b);
      }
    }
  }
  return level;
}

struct Moments {
  RVector mean;
  RMatrix covariance;
};

Moments moments_of(const LatticeDistribution& dist) {
  const int d = dist.dim();
  Moments m{RVector::Zero(d), RMatrix::Zero(d, d)};
  dist.for_each([&](const Site& k, double w) {
    for (int i = 0; i < d; ++i) m.mean[i] += w * k[i];
  });
  dist.for_each([&](const Site& k, double w) {
    RVector x(d);
    for (int i = 0; i < d; ++i) x[i] = k[i] - m.mean[i];
    m.covariance += w * x * x.transpose();
  });
  return m;
}

}  // namespace

RVector initial_from_state(const CVector& phi0) {
  RVector p = phi0.cwiseAbs2();
  if (std::abs(p.sum() - 1.0) > 1e-12) throw std::invalid_argument("initial state is not normalized");
  return p;
}

ChainModel build_chain(const PermutationMeasure& mu, const JumpFunction& jump, const RVector& p0) {
  const int cd = jump.coin_dim();
  if (mu.empty()) throw std::invalid_argument("build_chain: empty permutation measure");
  RMatrix p = RMatrix::Zero(cd, cd);
  double total = 0.0;
  for (const auto& [images, w] : mu) {
    if (static_cast<int>(images.size()) != cd) throw std::invalid_argument("build_chain: permutation of wrong size");
    if (!PermutationCoinSpec{images, {}}.is_bijection()) throw std::invalid_argument("build_chain: not a permutation");
    if (w < 0.0) throw std::invalid_argument("build_chain: negative weight");
    for (int s = 0; s < cd; ++s) p(s, images[s]) += w;
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("build_chain: weights do not sum to 1");
  check_distribution(p0, cd, "build_chain: initial distribution");
  return {p, jump, p0, mu};
}

ChainModel chain_from_matrix(const RMatrix& p, const JumpFunction& jump, const RVector& p0) {
  const int cd = jump.coin_dim();
  if (p.rows() != cd || p.cols() != cd) throw std::invalid_argument("chain: transition matrix must be 2d x 2d");
  if ((p.array() < 0.0).any() || !is_doubly_stochastic(p))
    throw std::invalid_argument("chain: transition matrix is not doubly stochastic");
  check_distribution(p0, cd, "chain: initial distribution");
  return {p, jump, p0, {}};
}

bool is_doubly_stochastic(const RMatrix& p, double tol) {
  if (p.rows() != p.cols()) return false;
  const RVector ones = RVector::Ones(p.rows());
  return (p * ones - ones).cwiseAbs().maxCoeff() <= tol && (p.transpose() * ones - ones).cwiseAbs().maxCoeff() <= tol;
}

bool irreducible(const RMatrix& p) {
  if (p.rows() == 0 || p.rows() != p.cols()) return false;
  for (bool transpose : {false, true})
    for (int l : bfs_levels(p, transpose))
      if (l < 0) return false;
  return true;
}

int period(const RMatrix& p) {
  require_irreducible(p);
  const auto level = bfs_levels(p, false);
  int g = 0;
  for (Eigen::Index a = 0; a < p.rows(); ++a)
    for (Eigen::Index b = 0; b < p.cols(); ++b)
      if (p(a, b) > 0.0) g = std::gcd(g, std::abs(level[a] + 1 - level[b]));
  return g;
}

RVector stationary(const RMatrix& p) {
  require_irreducible(p);
  const auto n = p.rows();
  RMatrix a = p.transpose() - RMatrix::Identity(n, n);
  a.row(n - 1).setOnes();
  RVector b = RVector::Zero(n);
  b[n - 1] = 1.0;
  return a.fullPivLu().solve(b);
}

ChainCovariance chain_covariance(const ChainModel& model) {
  const RMatrix& p = model.transition;
  require_irreducible(p);
  const int cd = model.jump.coin_dim();
  const RMatrix r = model.jump.as_matrix();
  const RVector rbar = model.jump.mean();
  const RMatrix id = RMatrix::Identity(cd, cd);
  const RMatrix pi = RMatrix::Constant(cd, cd, 1.0 / cd);

  Eigen::FullPivLU<RMatrix> lu(p - id + pi);
  if (!lu.isInvertible()) throw AssumptionError("eigenvalue 1 of the transition matrix is not simple");
  const RMatrix s = lu.inverse() - pi;

  ChainCovariance out;
  out.projection_term = -r.transpose() * r / cd + rbar * rbar.transpose();
  const RMatrix rsr = r.transpose() * s * r;
  out.resolvent_term = -(rsr + rsr.transpose()) / cd;
  out.sigma = out.projection_term + out.resolvent_term;

  const RMatrix q = id - pi;
  const RMatrix g = (id - p + pi).inverse();
  const RMatrix x = (g - pi) * (q + q * p * q);
  const RMatrix qr = q * r;
  const RMatrix alt = qr.transpose() * x * qr;
  out.alternative = (alt + alt.transpose()) / (2.0 * cd);
  out.form_agreement = (out.sigma - out.alternative).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<RMatrix> es(out.sigma);
  out.min_eigenvalue = es.eigenvalues().minCoeff();
  out.singular = out.min_eigenvalue < 1e-10 * std::max(1.0, out.sigma.cwiseAbs().maxCoeff());
  out.period = period(p);
  return out;
}

RMatrix markov_reward_covariance(const RMatrix& p, const RMatrix& rewards) {
  const auto n = p.rows();
  if (rewards.rows() != n) throw std::invalid_argument("markov_reward_covariance: one reward row per state");
  const RVector u = stationary(p);
  const RVector ones = RVector::Ones(n);
  const RMatrix centred = rewards - ones * (u.transpose() * rewards);
  const RMatrix z = (RMatrix::Identity(n, n) - p + ones * u.transpose()).inverse();
  const RMatrix c = centred.transpose() * u.asDiagonal() * (2.0 * z - RMatrix::Identity(n, n)) * centred;
  return 0.5 * (c + c.transpose());
}

LatticeDistribution exact_sn_distribution(const ChainModel& model, int n, std::size_t guard) {
  if (n < 0) throw std::invalid_argument("exact_sn_distribution: negative n");
  const int d = model.jump.dim(), cd = model.jump.coin_dim();
  Site lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = std::min(0, n * model.jump.min_component(j));
    hi[j] = std::max(0, n * model.jump.max_component(j));
  }
  const LatticeBox box(lo, hi);
  if (box.size() * cd > guard) throw std::length_error("exact_sn_distribution: support guard exceeded");
  std::vector<std::ptrdiff_t> shift(cd, 0);
  for (int t = 0; t < cd; ++t)
    for (int j = 0; j < d; ++j) shift[t] += model.jump[t][j] * box.stride(j);

  std::vector<double> cur(box.size() * cd, 0.0), next(box.size() * cd);
  const std::size_t origin = box.index(Site(d, 0));
  for (int t = 0; t < cd; ++t) cur[origin * cd + t] = model.initial[t];
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < box.size(); ++i)
      for (int a = 0; a < cd; ++a) {
        const double w = cur[i * cd + a];
        if (w == 0.0) continue;
        for (int b = 0; b < cd; ++b) {
          const double pab = model.transition(a, b);
          if (pab == 0.0) continue;
          next[(static_cast<std::ptrdiff_t>(i) + shift[b]) * cd + b] += w * pab;
        }
      }
    cur.swap(next);
  }
  std::vector<double> weights(box.size(), 0.0);
  for (std::size_t i = 0; i < box.size(); ++i)
    for (int t = 0; t < cd; ++t) weights[i] += cur[i * cd + t];
  return LatticeDistribution(box, std::move(weights));
}

std::vector<CltRow> clt_probe(const ChainModel& model, const std::vector<int>& n_list) {
  const RMatrix sigma = chain_covariance(model).sigma;
  std::vector<CltRow> rows;
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("clt_probe: n must be positive");
    const Moments m = moments_of(exact_sn_distribution(model, n));
    CltRow row;
    row.n = n;
    row.mean = m.mean / n;
    row.covariance = m.covariance / n;
    row.residual = (row.covariance - sigma).cwiseAbs().maxCoeff();
    rows.push_back(row);
  }
  return rows;
}

double chi_square1_cdf(double t) { return t <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * t)); }

double ks_threshold(std::size_t samples, double alpha) {
  if (samples == 0 || !(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ks_threshold: bad arguments");
  return std::sqrt(0.5 * std::log(2.0 / alpha)) / std::sqrt(static_cast<double>(samples));
}

double ks_distance(std::vector<double>& values, double (*cdf)(double)) {
  if (values.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    worst = std::max({worst, f - i / n, (i + 1) / n - f});
  }
  return worst;
}

DiffusionLaw random_diffusion_law(const ChainModel& model, int n, std::size_t samples, const SeededStream& stream) {
  if (model.measure.empty()) throw std::invalid_argument("random_diffusion_law: chain has no permutation measure");
  if (n < 1 || samples < 2) throw std::invalid_argument("random_diffusion_law: need n >= 1 and samples >= 2");
  const int d = model.jump.dim(), cd = model.jump.coin_dim();
  // reducible chains (e.g. a point mass on the identity) still have a
  // well-defined D^omega; they just get no Sigma to compare against
  ChainCovariance cov;
  if (irreducible(model.transition)) {
    cov = chain_covariance(model);
  } else {
    cov.sigma = RMatrix::Constant(d, d, std::numeric_limits<double>::quiet_NaN());
    cov.singular = true;
  }

  std::vector<const std::vector<int>*> perms;
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& [images, w] : model.measure) {
    perms.push_back(&images);
    cumulative.push_back(acc += w);
  }
  const RMatrix r = model.jump.as_matrix();
  const RVector nrbar = n * model.jump.mean();

  DiffusionLaw law;
  law.n = n;
  law.samples = samples;
  law.sigma = cov.sigma;
  law.singular = cov.singular;
  law.draws.resize(samples);
  detail::parallel_for(samples, [&](std::size_t i) {
    auto g = stream.engine(i);
    std::vector<int> seq(n);
    for (int j = 0; j < n; ++j) {
      const double u = uniform01(g) * acc;
      seq[j] = static_cast<int>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      seq[j] = std::min<int>(seq[j], static_cast<int>(perms.size()) - 1);
    }
    RMatrix dw = RMatrix::Zero(d, d);
    for (int t0 = 0; t0 < cd; ++t0) {
      if (model.initial[t0] == 0.0) continue;
      int t = t0;
      RVector s = RVector::Zero(d);
      for (int j = 0; j < n; ++j) {
        t = (*perms[seq[j]])[t];
        s += r.row(t).transpose();
      }
      const RVector x = s - nrbar;
      dw += model.initial[t0] * x * x.transpose();
    }
    law.draws[i] = dw / n;
  });

  law.mean = RMatrix::Zero(d, d);
  RMatrix m2 = RMatrix::Zero(d, d);
  for (std::size_t i = 0; i < samples; ++i) {
    const RMatrix delta = law.draws[i] - law.mean;
    law.mean += delta / static_cast<double>(i + 1);
    m2 += delta.cwiseProduct(law.draws[i] - law.mean);
  }
  const double ns = static_cast<double>(samples);
  law.standard_error = (m2 / (ns - 1.0)).cwiseSqrt() / std::sqrt(ns);

  if (d == 1 && !law.singular) {
    const double sig = law.sigma(0, 0);
    std::vector<double> z(samples);
    for (std::size_t i = 0; i < samples; ++i) z[i] = law.draws[i](0, 0) / sig;
    law.ks = ks_distance(z, chi_square1_cdf);
    double worst = 0.0;
    for (std::size_t i = 0; i < samples;) {
      std::size_t j = i;
      while (j < samples && z[j] == z[i]) ++j;
      const double emp = j / ns;
      const double mid = j < samples ? 0.5 * (std::sqrt(z[i]) + std::sqrt(z[j])) : std::numeric_limits<double>::infinity();
      worst = std::max(worst, std::abs(emp - (j < samples ? chi_square1_cdf(mid * mid) : 1.0)));
      i = j;
    }
    law.ks_lattice = worst;
  }
  return law;
}

}  // namespace rtqw
