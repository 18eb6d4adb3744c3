#include "rtqw/rates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "parallel.hpp"
#include "torus.hpp"

namespace rtqw {

namespace {

double perron_unchecked(const RMatrix& m) {
  Eigen::EigenSolver<RMatrix> es(m, false);
  if (es.info() != Eigen::Success) throw ConvergenceError("perron_root: eigenvalue solver did not converge");
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

RVector gradient(const std::function<double(const RVector&)>& f, const RVector& at, double h) {
  RVector g(at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    RVector a = at, b = at;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

RMatrix hessian(const std::function<double(const RVector&)>& f, const RVector& at, double h) {
  const auto d = at.size();
  RMatrix hm(d, d);
  const double f0 = f(at);
  for (Eigen::Index j = 0; j < d; ++j) {
    RVector a = at, b = at;
    a[j] += h;
    b[j] -= h;
    hm(j, j) = (f(a) - 2.0 * f0 + f(b)) / (h * h);
    for (Eigen::Index k = 0; k < j; ++k) {
      RVector pp = at, pm = at, mp = at, mm = at;
      pp[j] += h, pp[k] += h;
      pm[j] += h, pm[k] -= h;
      mp[j] -= h, mp[k] += h;
      mm[j] -= h, mm[k] -= h;
      hm(j, k) = hm(k, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  return hm;
}

RVector sym_solve(const Eigen::SelfAdjointEigenSolver<RMatrix>& es, const RVector& g) {
  const RMatrix& v = es.eigenvectors();
  return v * (v.transpose() * g).cwiseQuotient(es.eigenvalues());
}

double quad(const RVector& y, const RMatrix& d) { return y.dot(d * y); }

// One damped Newton ascent of <lambda, x> - f(lambda) from `start`.
LegendreResult ascend(const std::function<double(const RVector&)>& f, const RVector& x, const RVector& start,
                      const LegendreOptions& opts) {
  auto phi = [&](const RVector& l) { return l.dot(x) - f(l); };
  LegendreResult res;
  RVector lam = start;
  double cur = phi(lam);
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    const RVector g = x - gradient(f, lam, opts.grad_step);
    if (g.cwiseAbs().maxCoeff() < opts.grad_tol) {
      res.status = RateStatus::Finite;
      break;
    }
    const RMatrix h = hessian(f, lam, opts.hess_step);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (h + h.transpose()));
    const RVector step = es.eigenvalues().minCoeff() > 1e-14 ? sym_solve(es, g) : g;

    bool moved = false;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      const RVector cand = lam + t * step;
      if (cand.cwiseAbs().maxCoeff() > opts.lambda_max) {
        const RVector far = cand * (opts.lambda_max / cand.cwiseAbs().maxCoeff());
        const double pf = phi(far), ph = phi(0.5 * far);
        if (pf - ph > opts.growth_tol) {
          res.status = RateStatus::Infinite;
          res.value = std::numeric_limits<double>::infinity();
          res.argmax = far;
          return res;
        }
        if (std::max(pf, ph) >= cur) {
          // bounded along the ray: the supremum is approached at infinity
          res.status = RateStatus::Finite;
          res.value = std::max(pf, ph);
          res.argmax = far;
          return res;
        }
        continue;
      }
      const double pc = phi(cand);
      if (pc >= cur) {
        moved = (cand - lam).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + lam.cwiseAbs().maxCoeff()) ||
                g.cwiseAbs().maxCoeff() >= 1e-6;
        lam = cand;
        cur = pc;
        break;
      }
    }
    if (!moved) {
      // no further progress; accept when the gradient is at difference-noise level
      if (g.cwiseAbs().maxCoeff() < 1e-6) res.status = RateStatus::Finite;
      break;
    }
  }
  if (res.status == RateStatus::Finite) {
    res.value = cur;
    res.argmax = lam;
  }
  return res;
}


}  // namespace

std::string to_string(RateStatus s) {
  switch (s) {
    case RateStatus::Finite:
      return "finite";
    case RateStatus::Infinite:
      return "infinite";
    case RateStatus::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

RMatrix tilted_matrix(const RMatrix& p, const JumpFunction& jump, const RVector& lambda) {
  const int cd = jump.coin_dim();
  if (p.rows() != cd || p.cols() != cd || lambda.size() != jump.dim())
    throw std::invalid_argument("tilted_matrix: dimension mismatch");
  RVector w(cd);
  for (int t = 0; t < cd; ++t) {
    double a = 0.0;
    for (int j = 0; j < jump.dim(); ++j) a += lambda[j] * jump[t][j];
    w[t] = std::exp(a);
  }
  return p * w.asDiagonal();
}

double perron_root(const RMatrix& tilted) {
  if ((tilted.array() < 0.0).any()) throw std::invalid_argument("perron_root: negative entry");
  if (!irreducible(tilted)) throw AssumptionError("perron_root: matrix is reducible");
  return perron_unchecked(tilted);
}

double log_perron_root(const RMatrix& p, const JumpFunction& jump, const RVector& lambda) {
  const int cd = jump.coin_dim();
  std::vector<double> a(cd, 0.0);
  for (int t = 0; t < cd; ++t)
    for (int j = 0; j < jump.dim(); ++j) a[t] += lambda[j] * jump[t][j];
  const double c = *std::max_element(a.begin(), a.end());
  RVector w(cd);
  for (int t = 0; t < cd; ++t) w[t] = std::exp(a[t] - c);
  const double rho = perron_unchecked(p * w.asDiagonal());
  if (!(rho > 0.0)) throw ConvergenceError("log_perron_root: Perron root underflowed");
  return c + std::log(rho);
}

LegendreResult legendre_transform(const std::function<double(const RVector&)>& f, const RVector& x,
                                  const LegendreOptions& opts) {
  const auto d = x.size();
  std::vector<RVector> starts{RVector::Zero(d)};
  for (double s : {1.0, -1.0, 5.0, -5.0})
    for (Eigen::Index j = 0; j < d; ++j) {
      RVector v = RVector::Zero(d);
      v[j] = s;
      starts.push_back(v);
    }
  LegendreResult last;
  for (const auto& s : starts) {
    last = ascend(f, x, s, opts);
    if (last.status != RateStatus::Indeterminate) return last;
  }
  return last;
}

LegendreResult ld_rate(const ChainModel& model, const RVector& x, const LegendreOptions& opts) {
  if (x.size() != model.jump.dim()) throw std::invalid_argument("ld_rate: point of wrong dimension");
  if (!irreducible(model.transition)) throw AssumptionError("ld_rate: transition matrix is not irreducible");
  return legendre_transform([&](const RVector& l) { return log_perron_root(model.transition, model.jump, l); }, x,
                            opts);
}

MdRate::MdRate(DiffusionFamily family, ArgmaxOptions opts) : family_(std::move(family)), opts_(opts) {
  if (opts_.grid <= 0) opts_.grid = family_.dim == 1 ? 256 : 32;
  detail::for_each_torus_point(family_.dim, opts_.grid, [&](const RVector& v) {
    RMatrix dm = family_.eval(v);
    if (dm.rows() != family_.dim || dm.cols() != family_.dim)
      throw std::invalid_argument("diffusion family returned a matrix of wrong size");
    Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (dm + dm.transpose()));
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw AssumptionError("D(v) is not positive definite on the grid");
    grid_v_.push_back(v);
    grid_d_.push_back(std::move(dm));
  });
  double spread = 0.0;
  for (const auto& dm : grid_d_) spread = std::max(spread, (dm - grid_d_.front()).cwiseAbs().maxCoeff());
  constant_ = spread < opts_.constant_tol;
}

ArgmaxResult MdRate::argmax(const RVector& y) const {
  const int d = family_.dim;
  if (y.size() != d) throw std::invalid_argument("argmax_v: y of wrong dimension");
  ArgmaxResult res;
  if (constant_ || y.cwiseAbs().maxCoeff() == 0.0) {
    res.constant = constant_;
    res.maximizers = {RVector::Zero(d)};
    res.value = quad(y, grid_d_.front());
    return res;
  }
  const int n = opts_.grid;
  std::vector<double> q(grid_d_.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = quad(y, grid_d_[i]);

  // grid local maxima under periodic axis neighbours
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < q.size(); ++i) {
    bool peak = true;
    std::size_t stride = 1;
    for (int j = d - 1; j >= 0 && peak; --j) {
      const std::size_t coord = (i / stride) % n;
      const std::size_t up = i - coord * stride + ((coord + 1) % n) * stride;
      const std::size_t down = i - coord * stride + ((coord + n - 1) % n) * stride;
      peak = q[i] >= q[up] && q[i] >= q[down];
      stride *= n;
    }
    if (peak) peaks.push_back(i);
  }

  const auto [qmin, qmax] = std::minmax_element(q.begin(), q.end());
  const double range = *qmax - *qmin;
  auto qv = [&](const RVector& v) { return quad(y, family_.eval(v)); };
  const double h = 1e-3;
  const double spacing = 2.0 * kPi / n;
  std::vector<std::pair<double, RVector>> refined;
  auto curvature = [&](const RVector& v) {
    const RMatrix hm = hessian(qv, v, h);
    return Eigen::SelfAdjointEigenSolver<RMatrix>(0.5 * (hm + hm.transpose()));
  };
  // Refinement raises a peak by O(curvature * spacing^2), so far lower peaks cannot win.
  const double cutoff = *qmax - 0.25 * range;
  for (std::size_t i : peaks) {
    if (q[i] < cutoff) continue;
    RVector v = grid_v_[i];
    double value = q[i];
    // Newton steps once the curvature is negative definite; before that a
    // grid peak may sit on a shoulder or saddle, so climb the gradient.
    int newton = 0, climb = 0;
    while (newton < opts_.newton_steps && climb < 20) {
      const auto es = curvature(v);
      const RVector g = gradient(qv, v, h);
      RVector step;
      if (es.eigenvalues().maxCoeff() < 0.0) {
        step = -sym_solve(es, g);
        ++newton;
      } else {
        const double gmax = g.cwiseAbs().maxCoeff();
        if (gmax == 0.0) break;
        step = g * (0.25 * spacing / gmax);
        ++climb;
      }
      const double len = step.cwiseAbs().maxCoeff();
      if (len > spacing) step *= spacing / len;
      double next = qv(v + step);
      for (int halve = 0; halve < 30 && !(next > value); ++halve) {
        step *= 0.5;
        next = qv(v + step);
      }
      if (!(next > value)) break;
      v += step;
      value = next;
    }
    for (int j = 0; j < d; ++j) {
      v[j] = std::fmod(v[j], 2.0 * kPi);
      if (v[j] < 0.0) v[j] += 2.0 * kPi;
      if (2.0 * kPi - v[j] < 1e-9) v[j] = 0.0;
      if (std::abs(v[j]) < 1e-9) v[j] = 0.0;
    }
    refined.emplace_back(value, v);
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : refined) best = std::max(best, r.first);
  for (const auto& r : refined) {
    if (r.first < best - opts_.tie_tol * (1.0 + std::abs(best))) continue;
    bool dup = false;
    for (const auto& m : res.maximizers) dup = dup || (m - r.second).cwiseAbs().maxCoeff() < 1e-6;
    if (dup) continue;
    if (curvature(r.second).eigenvalues().maxCoeff() > -1e-6 * range)
      throw AssumptionError("argmax_v: degenerate maximum of <y, D(v) y>");
    res.maximizers.push_back(r.second);
  }
  std::sort(res.maximizers.begin(), res.maximizers.end(), [](const RVector& a, const RVector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  res.value = best;
  return res;
}

LegendreResult MdRate::direction_search(const RVector& x) const {
  const int d = family_.dim;
  LegendreResult res;
  res.status = RateStatus::Finite;
  res.value = 0.0;
  res.argmax = RVector::Zero(d);
  if (x.cwiseAbs().maxCoeff() == 0.0) return res;

  auto score = [&](const RVector& u, double m) {
    const double a = std::max(0.0, u.dot(x));
    return a * a / (2.0 * m);
  };
  auto coarse = [&](const RVector& u) {
    double m = 0.0;
    for (const auto& dm : grid_d_) m = std::max(m, quad(u, dm));
    return score(u, m);
  };
  auto fine = [&](const RVector& u) { return score(u, argmax(u).value); };

  // starting direction: best of x itself and a fixed spread of directions,
  // ranked by the grid maximum alone
  std::vector<RVector> starts{x.normalized()};
  if (d == 2) {
    for (int k = 0; k < 256; ++k) starts.push_back(RVector{{std::cos(k * kPi / 128), std::sin(k * kPi / 128)}});
  } else {
    std::mt19937_64 g(0x6d64);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 128 * d; ++k) {
      RVector u(d);
      for (int j = 0; j < d; ++j) u[j] = normal(g);
      starts.push_back(u.normalized());
    }
  }
  RVector u = starts.front();
  double best = coarse(u);
  for (const auto& s : starts)
    if (const double c = coarse(s); c > best) best = c, u = s;

  int evals = 0;
  if (d == 2) {
    // golden section on the angle, bracketed by the neighbouring start directions
    const double phi = std::atan2(u[1], u[0]), w = 2.0 * kPi / 256;
    auto at = [&](double t) {
      ++evals;
      return fine(RVector{{std::cos(t), std::sin(t)}});
    };
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = phi - 2.0 * w, b = phi + 2.0 * w;
    double c = b - r * (b - a), e = a + r * (b - a);
    double fc = at(c), fe = at(e);
    while (b - a > 1e-10) {
      if (fc > fe) {
        b = e, e = c, fe = fc;
        c = b - r * (b - a), fc = at(c);
      } else {
        a = c, c = e, fc = fe;
        e = a + r * (b - a), fe = at(e);
      }
    }
    const double t = fc > fe ? c : e;
    u = RVector{{std::cos(t), std::sin(t)}};
    best = std::max(fc, fe);
    res.value = best;
    res.argmax = u * (u.dot(x) / argmax(u).value);
    res.iterations = evals;
    return res;
  }
  best = fine(u);
  evals = 1;
  for (double step = 0.1; step > 1e-9; step *= 0.5) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (int j = 0; j < d && !improved; ++j)
        for (double sign : {1.0, -1.0}) {
          RVector cand = u;
          cand[j] += sign * step;
          cand.normalize();
          const double c = fine(cand);
          ++evals;
          if (c > best) {
            best = c, u = cand, improved = true;
            break;
          }
        }
    }
  }
  res.value = best;
  res.argmax = u * (u.dot(x) / argmax(u).value);
  res.iterations = evals;
  return res;
}

MdResult MdRate::operator()(const RVector& x, const LegendreOptions& lopts) const {
  if (x.size() != family_.dim) throw std::invalid_argument("md_rate: point of wrong dimension");
  MdResult res;
  if (family_.dim == 1)
    res.legendre = legendre_transform([&](const RVector& y) { return 0.5 * argmax(y).value; }, x, lopts);
  else
    res.legendre = direction_search(x);
  if (res.legendre.status == RateStatus::Finite && res.legendre.argmax.cwiseAbs().maxCoeff() > 0.0)
    res.argmax = argmax(res.legendre.argmax);
  return res;
}

ArgmaxResult argmax_v(const DiffusionFamily& family, const RVector& y, const ArgmaxOptions& opts) {
  return MdRate(family, opts).argmax(y);
}

MdResult md_rate(const DiffusionFamily& family, const RVector& x, const ArgmaxOptions& opts) {
  return MdRate(family, opts)(x);
}

namespace {

RateTable blank_table(const std::vector<RVector>& xs, bool with_v1) {
  RateTable t;
  t.x = xs;
  t.rate.assign(xs.size(), std::numeric_limits<double>::quiet_NaN());
  t.status.assign(xs.size(), RateStatus::Indeterminate);
  t.maximizer.resize(xs.size());
  if (with_v1) t.v1.resize(xs.size());
  return t;
}

void fill_row(RateTable& t, std::size_t i, const LegendreResult& r) {
  const auto d = t.x[i].size();
  t.status[i] = r.status;
  if (r.status != RateStatus::Indeterminate) t.rate[i] = r.value;
  t.maximizer[i] = r.argmax.size() ? r.argmax : RVector::Constant(d, std::nan(""));
}

}  // namespace

RateTable ld_table(const ChainModel& model, const std::vector<RVector>& xs, const LegendreOptions& opts) {
  RateTable t = blank_table(xs, false);
  detail::parallel_for(xs.size(), [&](std::size_t i) { fill_row(t, i, ld_rate(model, xs[i], opts)); });
  return t;
}

RateTable md_table(const DiffusionFamily& family, const std::vector<RVector>& xs, const ArgmaxOptions& opts) {
  const MdRate md(family, opts);
  RateTable t = blank_table(xs, true);
  detail::parallel_for(xs.size(), [&](std::size_t i) {
    const MdResult r = md(xs[i]);
    fill_row(t, i, r.legendre);
    t.v1[i] = r.argmax.maximizers.empty() ? RVector::Constant(xs[i].size(), std::nan("")) : r.argmax.maximizers.front();
  });
  return t;
}

bool midpoint_convex(const std::vector<double>& rate, double tol) {
  for (std::size_t i = 1; i + 1 < rate.size(); ++i) {
    if (!std::isfinite(rate[i - 1]) || !std::isfinite(rate[i]) || !std::isfinite(rate[i + 1])) continue;
    if (rate[i] > 0.5 * (rate[i - 1] + rate[i + 1]) + tol) return false;
  }
  return true;
}

}  // namespace rtqw
