#include "rtqw/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "torus.hpp"

namespace rtqw {

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

CVector doubled_phases(const JumpFunction& jump, const RVector& y, const RVector& y2) {
  const int cd = jump.coin_dim();
  std::vector<double> a(cd, 0.0), b(cd, 0.0);
  for (int t = 0; t < cd; ++t)
    for (int j = 0; j < jump.dim(); ++j) {
      a[t] += y[j] * jump[t][j];
      b[t] += y2[j] * jump[t][j];
    }
  CVector ph(cd * cd);
  for (int t = 0; t < cd; ++t)
    for (int u = 0; u < cd; ++u) ph[doubled_index(t, u, cd)] = std::polar(1.0, a[t] + b[u]);
  return ph;
}

void check_jump(const JumpFunction& jump, int coin_dim) {
  if (jump.coin_dim() != coin_dim) throw std::invalid_argument("coin dimension does not match the jump function");
}

std::vector<cplx> eigenvalues(const CMatrix& a) {
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigenvalue solver did not converge");
  return {es.eigenvalues().begin(), es.eigenvalues().end()};
}

std::size_t nearest_to_one(const std::vector<cplx>& ev) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < ev.size(); ++i)
    if (std::abs(ev[i] - 1.0) < std::abs(ev[best] - 1.0)) best = i;
  return best;
}

std::vector<RVector> adjoint_probe_points(int d, int per_axis, int random_points) {
  std::vector<RVector> pts;
  detail::for_each_torus_point(2 * d, per_axis, [&](const RVector& y) { pts.push_back(y); });
  auto g = SeededStream(0x6379636c6963ULL, 0).engine();
  for (int i = 0; i < random_points; ++i) {
    RVector y(2 * d);
    for (int j = 0; j < 2 * d; ++j) y[j] = 2.0 * kPi * uniform01(g);
    pts.push_back(y);
  }
  return pts;
}

// Subspace coordinates of the derivative data at v.
struct LocalData {
  CompressedPoint cp;
  std::vector<CMatrix> first;   // B^* (i diag a_j) Op B
  std::vector<std::vector<CMatrix>> second;  // B^* (-diag a_j a_k) Op B
};

LocalData local_data(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v) {
  LocalData ld;
  ld.cp = compress_at(model, sub, v);
  const CMatrix opb = model.op(-v, v) * sub.basis;
  const int d = model.dim;
  const cplx i(0.0, 1.0);
  ld.first.resize(d);
  ld.second.assign(d, std::vector<CMatrix>(d));
  for (int j = 0; j < d; ++j) {
    ld.first[j] = i * (sub.basis.adjoint() * (model.first.col(j).cast<cplx>().asDiagonal() * opb));
    for (int k = 0; k <= j; ++k) {
      RVector ajk = model.first.col(j).cwiseProduct(model.first.col(k));
      ld.second[j][k] = -(sub.basis.adjoint() * (ajk.cast<cplx>().asDiagonal() * opb));
      ld.second[k][j] = ld.second[j][k];
    }
  }
  return ld;
}

void require_isolated_one(const CMatrix& a0, const RVector& v) {
  const auto ev = eigenvalues(a0);
  const std::size_t k = nearest_to_one(ev);
  double second = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i)
    if (i != k) second = std::max(second, std::abs(ev[i]));
  if (std::abs(ev[k] - 1.0) > 1e-8 || second > 1.0 - 1e-9) {
    std::string where;
    for (Eigen::Index j = 0; j < v.size(); ++j) where += (j ? ", " : "") + std::to_string(v[j]);
    throw AssumptionError("eigenvalue 1 is not simple and isolated at v = (" + where + ")");
  }
}

// Complex Hessian-type matrix before symmetrization.
CMatrix diffusion_raw(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v) {
  const LocalData ld = local_data(model, sub, v);
  require_isolated_one(ld.cp.a0, v);
  const CMatrix s = reduced_resolvent(ld.cp.a0, ld.cp.left, ld.cp.right);
  const int d = model.dim;
  const auto& l = ld.cp.left;
  const auto& r = ld.cp.right;
  CVector grad(d);
  for (int j = 0; j < d; ++j) grad[j] = l.dot(ld.first[j] * r);
  CMatrix h(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      const CVector sk = s * (ld.first[k] * r);
      const CVector sj = s * (ld.first[j] * r);
      h(j, k) = l.dot(ld.second[j][k] * r) - l.dot(ld.first[j] * sk) - l.dot(ld.first[k] * sj);
    }
  // -(Hessian of log lambda_1) = -H + grad grad^T
  return -h + grad * grad.transpose();
}

RMatrix diffusion_hessian(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v) {
  const int d = model.dim;
  const double h = 1e-4;
  auto f = [&](const RVector& y) { return std::log(tracked_eigenvalue(model, sub, y, v)); };
  const RVector zero = RVector::Zero(d);
  const cplx f0 = f(zero);
  CMatrix hess(d, d);
  for (int j = 0; j < d; ++j) {
    RVector e = RVector::Zero(d);
    e[j] = h;
    hess(j, j) = (f(e) - 2.0 * f0 + f(-e)) / (h * h);
    for (int k = 0; k < j; ++k) {
      RVector a = RVector::Zero(d), b = RVector::Zero(d);
      a[j] = h;
      b[k] = h;
      hess(j, k) = (f(a + b) - f(a - b) - f(b - a) + f(-a - b)) / (4.0 * h * h);
      hess(k, j) = hess(j, k);
    }
  }
  RMatrix dm = -hess.real();
  return 0.5 * (dm + dm.transpose());
}

cplx psi1_dot(const CVector& x, int cd) {
  cplx acc(0.0, 0.0);
  for (int t = 0; t < cd; ++t) acc += x[doubled_index(t, t, cd)];
  return acc;
}

}  // namespace

CVector psi1(int coin_dim) {
  CVector p = CVector::Zero(coin_dim * coin_dim);
  for (int t = 0; t < coin_dim; ++t) p[doubled_index(t, t, coin_dim)] = 1.0;
  return p;
}

CMatrix swap_operator(int coin_dim) {
  const int n = coin_dim * coin_dim;
  CMatrix s = CMatrix::Zero(n, n);
  for (int a = 0; a < coin_dim; ++a)
    for (int b = 0; b < coin_dim; ++b) s(doubled_index(b, a, coin_dim), doubled_index(a, b, coin_dim)) = 1.0;
  return s;
}

DoubledOperator expected_doubled(const FiniteCoinEnsemble& ensemble) {
  const int cd = ensemble.coin_dim();
  CMatrix e = CMatrix::Zero(cd * cd, cd * cd);
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    const CMatrix& c = ensemble.coins()[j].matrix();
    e += ensemble.probs()[j] * kron(c, c.conjugate());
  }
  return {e, cd};
}

DoubledOperator phase_matrix(const RVector& y, const RVector& y2, const JumpFunction& jump) {
  return {doubled_phases(jump, y, y2).asDiagonal(), jump.coin_dim()};
}

DoubledOperator m_matrix(const DoubledOperator& e, const RVector& y, const RVector& y2, const JumpFunction& jump) {
  check_jump(jump, e.coin_dim);
  return {doubled_phases(jump, y, y2).asDiagonal() * e.matrix, e.coin_dim};
}

RVector drift(const JumpFunction& jump) { return jump.mean(); }

CVector SpectralModel::phases(const RVector& y, const RVector& y2) const {
  const RVector a = first * y + second * y2;
  CVector ph(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) ph[i] = std::polar(1.0, a[i]);
  return ph;
}

CMatrix SpectralModel::op(const RVector& y, const RVector& y2) const { return phases(y, y2).asDiagonal() * base; }

SpectralModel iid_model(const FiniteCoinEnsemble& ensemble, const JumpFunction& jump) {
  check_jump(jump, ensemble.coin_dim());
  const int cd = jump.coin_dim(), d = jump.dim();
  SpectralModel m;
  m.base = expected_doubled(ensemble).matrix;
  m.first.resize(cd * cd, d);
  m.second.resize(cd * cd, d);
  for (int t = 0; t < cd; ++t)
    for (int u = 0; u < cd; ++u)
      for (int j = 0; j < d; ++j) {
        m.first(doubled_index(t, u, cd), j) = jump[t][j];
        m.second(doubled_index(t, u, cd), j) = jump[u][j];
      }
  m.left = m.right = psi1(cd);
  m.dim = d;
  m.drift = drift(jump);
  return m;
}

CyclicSubspace cyclic_subspace(const SpectralModel& model, double cut, int random_points) {
  const auto pts = adjoint_probe_points(model.dim, 5, random_points);
  const int d = model.dim;
  std::vector<CMatrix> ops;
  ops.reserve(pts.size());
  for (const auto& p : pts) ops.push_back(model.op(p.head(d), p.tail(d)).adjoint());

  std::vector<CVector> basis;
  auto try_add = [&](CVector w) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b * b.dot(w);
    const double nrm = w.norm();
    if (nrm > cut) basis.push_back(w / nrm);
  };
  try_add(model.left / model.left.norm());
  for (std::size_t i = 0; i < basis.size() && static_cast<int>(basis.size()) < model.ambient(); ++i)
    for (const auto& op : ops) {
      try_add(op * basis[i]);
      if (static_cast<int>(basis.size()) == model.ambient()) break;
    }

  CyclicSubspace sub;
  sub.cut = cut;
  sub.rank = static_cast<int>(basis.size());
  sub.basis.resize(model.ambient(), sub.rank);
  for (int k = 0; k < sub.rank; ++k) sub.basis.col(k) = basis[k];
  const CVector seed = model.left / model.left.norm();
  sub.seed_residual = (seed - sub.basis * (sub.basis.adjoint() * seed)).norm();
  sub.invariance_residual = invariance_residual(model, sub, 5, random_points);
  return sub;
}

double invariance_residual(const SpectralModel& model, const CyclicSubspace& sub, int grid_per_axis,
                           int random_points) {
  const int d = model.dim;
  double worst = 0.0;
  for (const auto& p : adjoint_probe_points(d, grid_per_axis, random_points)) {
    const CMatrix img = model.op(p.head(d), p.tail(d)).adjoint() * sub.basis;
    const CMatrix out = img - sub.basis * (sub.basis.adjoint() * img);
    worst = std::max(worst, out.cwiseAbs().maxCoeff());
  }
  return worst;
}

AssumptionReport check_assumption(const SpectralModel& model, const CyclicSubspace& sub,
                                  const AssumptionOptions& opts) {
  const int d = model.dim;
  AssumptionReport rep;
  rep.grid = opts.grid > 0 ? opts.grid : (d == 1 ? 256 : d == 2 ? 64 : 16);
  rep.rank = sub.rank;
  rep.gap = std::numeric_limits<double>::infinity();
  rep.simplicity_margin = std::numeric_limits<double>::infinity();
  const int full_stride = std::max(1, rep.grid / 16);
  std::vector<int> idx(d, 0);
  detail::for_each_torus_point(d, rep.grid, [&](const RVector& v) {
    const CMatrix op = model.op(-v, v);
    const auto ev = eigenvalues(sub.basis.adjoint() * op * sub.basis);
    const std::size_t k = nearest_to_one(ev);
    int ones = 0;
    double second = 0.0, margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i] - 1.0) < opts.degeneracy_tol) ++ones;
      if (i == k) continue;
      second = std::max(second, std::abs(ev[i]));
      margin = std::min(margin, std::abs(ev[i] - 1.0));
    }
    rep.degeneracy = std::max(rep.degeneracy, ones);
    rep.gap = std::min(rep.gap, 1.0 - second);
    rep.simplicity_margin = std::min(rep.simplicity_margin, margin);
    const bool ok = std::abs(ev[k] - 1.0) < opts.one_tol && ones == 1 && 1.0 - second > opts.gap_tol;
    if (!ok) rep.offending_v.push_back(v);

    bool on_coarse = true;
    for (int j = 0; j < d; ++j) {
      const int m = static_cast<int>(std::lround(v[j] * rep.grid / (2.0 * kPi)));
      on_coarse = on_coarse && m % full_stride == 0;
    }
    if (on_coarse) {
      int full = 0;
      for (const auto& z : eigenvalues(op))
        if (std::abs(z - 1.0) < opts.degeneracy_tol) ++full;
      rep.full_space_degeneracy = std::max(rep.full_space_degeneracy, full);
    }
  });
  rep.holds = rep.offending_v.empty();
  return rep;
}

CMatrix reduced_resolvent(const CMatrix& a0, const CVector& left, const CVector& right) {
  const cplx norm = left.dot(right);
  if (std::abs(norm) < 1e-14) throw AssumptionError("reduced resolvent: left and right vectors are orthogonal");
  const CMatrix p = right * left.adjoint() / norm;
  const auto n = a0.rows();
  const CMatrix g = a0 - CMatrix::Identity(n, n) + p;
  Eigen::FullPivLU<CMatrix> lu(g);
  if (!lu.isInvertible()) throw AssumptionError("reduced resolvent: eigenvalue 1 is not isolated");
  return lu.inverse() - p;
}

CompressedPoint compress_at(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v) {
  CompressedPoint cp;
  cp.a0 = sub.basis.adjoint() * model.op(-v, v) * sub.basis;
  cp.left = sub.basis.adjoint() * model.left;
  cp.right = sub.basis.adjoint() * model.right;
  cp.right /= std::conj(cp.left.dot(cp.right));
  return cp;
}

CMatrix reduced_resolvent(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v) {
  const CompressedPoint cp = compress_at(model, sub, v);
  require_isolated_one(cp.a0, v);
  return reduced_resolvent(cp.a0, cp.left, cp.right);
}

RMatrix diffusion_matrix(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v,
                         DiffusionMethod method) {
  if (method == DiffusionMethod::Hessian) {
    require_isolated_one(compress_at(model, sub, v).a0, v);
    return diffusion_hessian(model, sub, v);
  }
  const RMatrix dm = diffusion_raw(model, sub, v).real();
  return 0.5 * (dm + dm.transpose());
}

RMatrix secord_closed_form(const CMatrix& s_full, const JumpFunction& jump) {
  const int d = jump.dim(), cd = jump.coin_dim();
  const RMatrix r = jump.as_matrix();
  const RVector rbar = jump.mean();
  const RMatrix avg_rr = r.transpose() * r / cd;
  CMatrix t = CMatrix::Zero(d, d);
  for (int a = 0; a < cd; ++a)
    for (int b = 0; b < cd; ++b)
      t += s_full(doubled_index(a, a, cd), doubled_index(b, b, cd)) *
           (r.row(a).transpose() * r.row(b)).cast<cplx>();
  RMatrix dp = 2.0 * rbar * rbar.transpose() - avg_rr - t.real() / d;
  dp = (0.5 * (dp + dp.transpose())).eval();
  return dp - rbar * rbar.transpose();
}

cplx tracked_eigenvalue(const SpectralModel& model, const CyclicSubspace& sub, const RVector& y, const RVector& v) {
  const auto ev = eigenvalues(sub.basis.adjoint() * model.op(y - v, v) * sub.basis);
  const cplx lambda = ev[nearest_to_one(ev)];
  if (std::abs(lambda - 1.0) > 0.5) throw ConvergenceError("eigenvalue tracking lost");
  return lambda;
}

DiffusionReport diffusion_report(const SpectralModel& model, const CyclicSubspace& sub, int grid, bool cross_check) {
  const int d = model.dim;
  DiffusionReport rep;
  rep.drift = model.drift;
  rep.grid = grid;
  rep.method = cross_check ? "resolvent+hessian" : "resolvent";
  rep.averaged = RMatrix::Zero(d, d);
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  detail::for_each_torus_point(d, grid, [&](const RVector& v) {
    const CMatrix raw = diffusion_raw(model, sub, v);
    rep.max_asymmetry = std::max(rep.max_asymmetry, (raw - raw.transpose()).cwiseAbs().maxCoeff());
    RMatrix dm = raw.real();
    dm = (0.5 * (dm + dm.transpose())).eval();
    if (cross_check)
      rep.method_residual =
          std::max(rep.method_residual, (dm - diffusion_hessian(model, sub, v)).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<RMatrix> es(dm);
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
    rep.v.push_back(v);
    rep.d.push_back(dm);
    rep.averaged += dm;
  });
  rep.averaged /= static_cast<double>(rep.d.size());
  for (const auto& dm : rep.d) rep.v_spread = std::max(rep.v_spread, (dm - rep.d.front()).cwiseAbs().maxCoeff());
  rep.v_independent = rep.v_spread < 1e-10;
  return rep;
}

RMatrix averaged_diffusion(const SpectralModel& model, const CyclicSubspace& sub, int grid) {
  RMatrix acc = RMatrix::Zero(model.dim, model.dim);
  double count = 0.0;
  detail::for_each_torus_point(model.dim, grid, [&](const RVector& v) {
    acc += diffusion_matrix(model, sub, v);
    count += 1.0;
  });
  return acc / count;
}

cplx averaged_char_function(const DoubledOperator& e, const JumpFunction& jump, const RVector& y, int n,
                            const CVector& phi0, int grid) {
  check_jump(jump, e.coin_dim);
  if (n < 0) throw std::invalid_argument("averaged_char_function: negative n");
  if (phi0.size() != e.coin_dim) throw std::invalid_argument("averaged_char_function: state of wrong size");
  const int cd = e.coin_dim;
  CVector phi_doubled(cd * cd);
  for (int t = 0; t < cd; ++t)
    for (int u = 0; u < cd; ++u) phi_doubled[doubled_index(t, u, cd)] = phi0[t] * std::conj(phi0[u]);
  const int nv = grid > 0 ? grid : detail::exact_torus_grid(jump, n, 0);
  return detail::torus_average(jump.dim(), nv, [&](const RVector& v) {
    const CVector ph = doubled_phases(jump, y - v, v);
    CVector x = phi_doubled;
    for (int s = 0; s < n; ++s) x = ph.cwiseProduct(e.matrix * x);
    return psi1_dot(x, cd);
  });
}

cplx averaged_char_function(const DoubledOperator& e, const JumpFunction& jump, const RVector& y, int n,
                            const DensityKernel& rho0, int grid) {
  check_jump(jump, e.coin_dim);
  rho0.validate();
  if (rho0.dim != jump.dim()) throw std::invalid_argument("averaged_char_function: kernel of wrong dimension");
  const int cd = e.coin_dim, d = jump.dim();
  int extent = 0;
  for (const auto& en : rho0.entries)
    for (int j = 0; j < d; ++j) extent = std::max(extent, std::abs(en.x[j] - en.y[j]));
  const int nv = grid > 0 ? grid : detail::exact_torus_grid(jump, n, extent);
  return detail::torus_average(d, nv, [&](const RVector& v) {
    // R_0(y - v, v) as a doubled vector
    CVector x = CVector::Zero(cd * cd);
    const RVector yv = y - v;
    for (const auto& en : rho0.entries) {
      double a = 0.0;
      for (int j = 0; j < d; ++j) a += yv[j] * en.x[j] + v[j] * en.y[j];
      const cplx w = std::polar(1.0, a);
      for (int t = 0; t < cd; ++t)
        for (int u = 0; u < cd; ++u) x[doubled_index(t, u, cd)] += w * en.block(t, u);
    }
    const CVector ph = doubled_phases(jump, yv, v);
    for (int s = 0; s < n; ++s) x = ph.cwiseProduct(e.matrix * x);
    return psi1_dot(x, cd);
  });
}

AveragedMoments averaged_moments(const DoubledOperator& e, const JumpFunction& jump, int n, const CVector& phi0) {
  check_jump(jump, e.coin_dim);
  if (n < 0) throw std::invalid_argument("averaged_moments: negative n");
  if (phi0.size() != e.coin_dim) throw std::invalid_argument("averaged_moments: state of wrong size");
  const int cd = e.coin_dim, dd = cd * cd, d = jump.dim();
  CVector x0(dd);
  for (int t = 0; t < cd; ++t)
    for (int u = 0; u < cd; ++u) x0[doubled_index(t, u, cd)] = phi0[t] * std::conj(phi0[u]);
  std::vector<CVector> a(d, CVector(dd));
  for (int j = 0; j < d; ++j)
    for (int t = 0; t < cd; ++t)
      for (int u = 0; u < cd; ++u) a[j][doubled_index(t, u, cd)] = cplx(0.0, jump[t][j]);

  CVector first_acc = CVector::Zero(d);
  CMatrix second_acc = CMatrix::Zero(d, d);
  double count = 0.0;
  detail::for_each_torus_point(d, detail::exact_torus_grid(jump, n, 0), [&](const RVector& v) {
    const CVector ph = doubled_phases(jump, -v, v);
    CVector x = x0;
    std::vector<CVector> x1(d, CVector::Zero(dd));
    std::vector<CVector> x2(d * d, CVector::Zero(dd));
    for (int s = 0; s < n; ++s) {
      const CVector z = e.matrix * x;
      std::vector<CVector> z1(d);
      for (int j = 0; j < d; ++j) z1[j] = e.matrix * x1[j];
      for (int j = 0; j < d; ++j)
        for (int k = 0; k <= j; ++k) {
          const CVector z2 = e.matrix * x2[j * d + k];
          x2[j * d + k] = ph.cwiseProduct(z2 + a[j].cwiseProduct(z1[k]) + a[k].cwiseProduct(z1[j]) +
                                          a[j].cwiseProduct(a[k]).cwiseProduct(z));
          x2[k * d + j] = x2[j * d + k];
        }
      for (int j = 0; j < d; ++j) x1[j] = ph.cwiseProduct(z1[j] + a[j].cwiseProduct(z));
      x = ph.cwiseProduct(z);
    }
    for (int j = 0; j < d; ++j) {
      first_acc[j] += psi1_dot(x1[j], cd);
      for (int k = 0; k < d; ++k) second_acc(j, k) += psi1_dot(x2[j * d + k], cd);
    }
    count += 1.0;
  });
  AveragedMoments m;
  // derivatives of the characteristic function: -i d Phi and -d^2 Phi
  m.mean = (first_acc / count * cplx(0.0, -1.0)).real();
  m.second = (-second_acc / count).real();
  return m;
}

LatticeDistribution averaged_distribution(const DoubledOperator& e, const JumpFunction& jump, int n,
                                          const CVector& phi0) {
  const int d = jump.dim();
  Site lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = n * jump.min_component(j);
    hi[j] = n * jump.max_component(j);
  }
  return detail::invert_characteristic(
      LatticeBox(lo, hi), [&](const RVector& y) { return averaged_char_function(e, jump, y, n, phi0, 0); });
}

LatticeDistribution averaged_distribution(const DoubledOperator& e, const JumpFunction& jump, int n,
                                          const DensityKernel& rho0) {
  rho0.validate();
  const int d = jump.dim();
  Site lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    int mn = rho0.entries.front().x[j], mx = mn;
    for (const auto& en : rho0.entries) {
      mn = std::min({mn, en.x[j], en.y[j]});
      mx = std::max({mx, en.x[j], en.y[j]});
    }
    lo[j] = n * jump.min_component(j) + mn;
    hi[j] = n * jump.max_component(j) + mx;
  }
  return detail::invert_characteristic(
      LatticeBox(lo, hi), [&](const RVector& y) { return averaged_char_function(e, jump, y, n, rho0, 0); });
}

std::vector<ScalingRow> scaling_limit_probe(const FiniteCoinEnsemble& ensemble, const JumpFunction& jump,
                                            const RVector& y, double t, const std::vector<int>& n_list,
                                            const CVector& phi0, int grid) {
  const DoubledOperator e = expected_doubled(ensemble);
  const SpectralModel model = iid_model(ensemble, jump);
  const CyclicSubspace sub = cyclic_subspace(model);
  const cplx limit = detail::torus_average(jump.dim(), grid, [&](const RVector& v) {
    return cplx(std::exp(-0.5 * t * y.dot(diffusion_matrix(model, sub, v) * y)), 0.0);
  });
  std::vector<ScalingRow> rows;
  for (int n : n_list) {
    ScalingRow row;
    row.n = n;
    row.steps = static_cast<int>(std::floor(t * n));
    const double sq = std::sqrt(static_cast<double>(n));
    const cplx phase = std::polar(1.0, -row.steps * model.drift.dot(y) / sq);
    row.value = phase * averaged_char_function(e, jump, y / sq, row.steps, phi0, grid);
    row.limit = limit;
    row.error = std::abs(row.value - row.limit);
    rows.push_back(row);
  }
  return rows;
}

std::vector<ScalingRow> ballistic_probe(const FiniteCoinEnsemble& ensemble, const JumpFunction& jump,
                                        const RVector& y, double t, const std::vector<int>& n_list,
                                        const CVector& phi0, int grid) {
  const DoubledOperator e = expected_doubled(ensemble);
  const RVector rbar = drift(jump);
  std::vector<ScalingRow> rows;
  for (int n : n_list) {
    ScalingRow row;
    row.n = n;
    row.steps = static_cast<int>(std::floor(t * n));
    row.value = averaged_char_function(e, jump, y / static_cast<double>(n), row.steps, phi0, grid);
    row.limit = std::polar(1.0, t * y.dot(rbar));
    row.error = std::abs(row.value - row.limit);
    rows.push_back(row);
  }
  return rows;
}

std::vector<EinsteinRow> einstein_scan(const FiniteCoinEnsemble& ensemble, const JumpFunction& r1,
                                       const JumpFunction& r0, const std::vector<int>& s_list, int grid) {
  if (r1.dim() != r0.dim()) throw std::invalid_argument("einstein_scan: jump functions of different dimension");
  if (drift(r1).cwiseAbs().maxCoeff() > 1e-14) throw std::invalid_argument("einstein_scan: r1 must have zero drift");
  const RVector rbar0 = drift(r0);
  if (rbar0.cwiseAbs().maxCoeff() == 0.0) throw std::invalid_argument("einstein_scan: r0 must have nonzero drift");
  const int d = r1.dim();
  std::vector<EinsteinRow> rows;
  for (int s : s_list) {
    if (s < 1) throw std::invalid_argument("einstein_scan: scale must be positive");
    std::vector<Site> js(2 * d, Site(d));
    for (int t = 0; t < 2 * d; ++t)
      for (int j = 0; j < d; ++j) js[t][j] = s * r1[t][j] + r0[t][j];
    const JumpFunction rs(d, js);
    const SpectralModel model = iid_model(ensemble, rs);
    const CyclicSubspace sub = cyclic_subspace(model);
    const int g = grid > 0 ? grid : std::max(64, 16 * rs.range());
    EinsteinRow row;
    row.s = s;
    row.drift = drift(rs);
    row.velocity = rbar0 / s;
    row.diffusion = averaged_diffusion(model, sub, g) / (static_cast<double>(s) * s);
    row.mobility = row.velocity * s;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rtqw
