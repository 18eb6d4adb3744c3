#include "rtqw/markov.hpp"

#include "rtqw/chain.hpp"
#include "torus.hpp"

namespace rtqw {

namespace {

CMatrix doubled_coin(const Coin& c) {
  const CMatrix& m = c.matrix();
  const auto n = m.rows();
  CMatrix k(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = m(i, j) * m.conjugate();
  return k;
}

void check(const MarkovCoinProcess& process, const JumpFunction& jump) {
  if (process.coin_dim() != jump.coin_dim()) throw std::invalid_argument("markov: coin dimension does not match jumps");
}

CVector doubled_state(const CVector& phi0) {
  const auto cd = phi0.size();
  CVector x(cd * cd);
  for (Eigen::Index t = 0; t < cd; ++t)
    for (Eigen::Index u = 0; u < cd; ++u) x[t * cd + u] = phi0[t] * std::conj(phi0[u]);
  return x;
}

}  // namespace

RVector chi_p(const RMatrix& p) { return stationary(p); }

SpectralModel markov_spectral_model(const MarkovCoinProcess& process, const JumpFunction& jump) {
  check(process, jump);
  const int f = static_cast<int>(process.size());
  const int cd = jump.coin_dim(), dd = cd * cd, d = jump.dim();
  const RMatrix& p = process.transition();
  SpectralModel m;
  m.base = CMatrix::Zero(f * dd, f * dd);
  for (int j = 0; j < f; ++j) {
    const CMatrix e = doubled_coin(process.coins()[j]);
    for (int k = 0; k < f; ++k)
      if (p(k, j) != 0.0) m.base.block(j * dd, k * dd, dd, dd) = p(k, j) * e;
  }
  m.first.resize(f * dd, d);
  m.second.resize(f * dd, d);
  for (int j = 0; j < f; ++j)
    for (int t = 0; t < cd; ++t)
      for (int u = 0; u < cd; ++u)
        for (int c = 0; c < d; ++c) {
          m.first(j * dd + doubled_index(t, u, cd), c) = jump[t][c];
          m.second(j * dd + doubled_index(t, u, cd), c) = jump[u][c];
        }
  const RVector chi = chi_p(p);
  const CVector ps = psi1(cd);
  m.left.resize(f * dd);
  m.right.resize(f * dd);
  for (int j = 0; j < f; ++j) {
    m.left.segment(j * dd, dd) = ps;
    m.right.segment(j * dd, dd) = chi[j] * ps;
  }
  m.dim = d;
  m.drift = jump.mean();
  return m;
}

CMatrix block_operator(const MarkovCoinProcess& process, const JumpFunction& jump, const RVector& y,
                       const RVector& y2) {
  return markov_spectral_model(process, jump).op(y, y2);
}

CVector initial_block_vector(const MarkovCoinProcess& process, const JumpFunction& jump, const RVector& y,
                             const RVector& y2, const CVector& phi0) {
  check(process, jump);
  const int f = static_cast<int>(process.size());
  const int cd = jump.coin_dim(), dd = cd * cd;
  const CMatrix ph = phase_matrix(y, y2, jump).matrix;
  const CVector x0 = doubled_state(phi0);
  CVector out(f * dd);
  for (int j = 0; j < f; ++j)
    out.segment(j * dd, dd) = process.initial()[j] * (ph * (doubled_coin(process.coins()[j]) * x0));
  return out;
}

cplx averaged_char_markov(const MarkovCoinProcess& process, const JumpFunction& jump, const RVector& y, int n,
                          const CVector& phi0, int grid) {
  check(process, jump);
  if (n < 0) throw std::invalid_argument("averaged_char_markov: negative n");
  if (phi0.size() != jump.coin_dim()) throw std::invalid_argument("averaged_char_markov: state of wrong size");
  if (n == 0) return phi0.squaredNorm();
  const int f = static_cast<int>(process.size());
  const int cd = jump.coin_dim(), dd = cd * cd;
  const RMatrix& p = process.transition();
  std::vector<CMatrix> e(f);
  for (int j = 0; j < f; ++j) e[j] = doubled_coin(process.coins()[j]);
  const CVector x0 = doubled_state(phi0);
  const int nv = grid > 0 ? grid : detail::exact_torus_grid(jump, n, 0);
  return detail::torus_average(jump.dim(), nv, [&](const RVector& v) {
    const CVector ph = phase_matrix(y - v, v, jump).matrix.diagonal();
    std::vector<CVector> x(f), nx(f);
    for (int j = 0; j < f; ++j) x[j] = process.initial()[j] * ph.cwiseProduct(e[j] * x0);
    for (int s = 1; s < n; ++s) {
      for (int j = 0; j < f; ++j) {
        CVector mix = CVector::Zero(dd);
        for (int k = 0; k < f; ++k)
          if (p(k, j) != 0.0) mix += p(k, j) * x[k];
        nx[j] = ph.cwiseProduct(e[j] * mix);
      }
      x.swap(nx);
    }
    cplx acc(0.0, 0.0);
    for (int j = 0; j < f; ++j)
      for (int t = 0; t < cd; ++t) acc += x[j][doubled_index(t, t, cd)];
    return acc;
  });
}

LatticeDistribution averaged_distribution_markov(const MarkovCoinProcess& process, const JumpFunction& jump, int n,
                                                 const CVector& phi0) {
  const int d = jump.dim();
  Site lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = n * jump.min_component(j);
    hi[j] = n * jump.max_component(j);
  }
  return detail::invert_characteristic(LatticeBox(lo, hi), [&](const RVector& y) {
    return averaged_char_markov(process, jump, y, n, phi0, 0);
  });
}

MarkovSpectral markov_spectral(const MarkovCoinProcess& process, const JumpFunction& jump) {
  MarkovSpectral ms;
  ms.model = markov_spectral_model(process, jump);
  ms.subspace = cyclic_subspace(ms.model);
  return ms;
}

RMatrix markov_diffusion(const MarkovSpectral& ms, const RVector& v, DiffusionMethod method) {
  return diffusion_matrix(ms.model, ms.subspace, v, method);
}

AssumptionReport check_assumption_s2(const MarkovCoinProcess& process, const JumpFunction& jump,
                                     const AssumptionOptions& opts) {
  const MarkovSpectral ms = markov_spectral(process, jump);
  return check_assumption(ms.model, ms.subspace, opts);
}

ProjectorCheck projector_check(const SpectralModel& model, int coin_dim) {
  ProjectorCheck pc;
  pc.pairing = model.left.dot(model.right);
  const CMatrix outer = model.right * model.left.adjoint();
  for (const auto& [c, out] : {std::pair{1.0 / coin_dim, &pc.residual_half_d},
                               std::pair{2.0 / coin_dim, &pc.residual_d}}) {
    const CMatrix pr = c * outer;
    *out = (pr * pr - pr).cwiseAbs().maxCoeff();
  }
  const RVector zero = RVector::Zero(model.dim);
  const CMatrix a = model.op(zero, zero);
  pc.fixed_point = std::max((a * model.right - model.right).cwiseAbs().maxCoeff(),
                            (a.adjoint() * model.left - model.left).cwiseAbs().maxCoeff());
  return pc;
}

double blockmax_norm(const CVector& x, int blocks) {
  if (blocks < 1 || x.size() % blocks != 0) throw std::invalid_argument("blockmax_norm: bad block count");
  const auto len = x.size() / blocks;
  double m = 0.0;
  for (int j = 0; j < blocks; ++j) m = std::max(m, x.segment(j * len, len).norm());
  return m;
}

RMatrix permutation_markov_covariance(const MarkovCoinProcess& process, const JumpFunction& jump) {
  check(process, jump);
  const int f = static_cast<int>(process.size()), cd = jump.coin_dim();
  std::vector<std::vector<int>> images(f);
  for (int j = 0; j < f; ++j) {
    const auto spec = as_permutation_coin(process.coins()[j]);
    if (!spec) throw std::invalid_argument("permutation_markov_covariance: coin " + std::to_string(j) +
                                           " is not a permutation coin");
    images[j] = spec->images;
  }
  RMatrix p = RMatrix::Zero(f * cd, f * cd);
  RMatrix rewards(f * cd, jump.dim());
  for (int j = 0; j < f; ++j)
    for (int t = 0; t < cd; ++t) {
      for (int k = 0; k < f; ++k) p(j * cd + t, k * cd + images[k][t]) += process.transition()(j, k);
      for (int c = 0; c < jump.dim(); ++c) rewards(j * cd + t, c) = jump[t][c];
    }
  return markov_reward_covariance(p, rewards);
}

}  // namespace rtqw
