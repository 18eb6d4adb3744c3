#pragma once

#include <functional>
#include <limits>
#include <string>

#include "rtqw/chain.hpp"

namespace rtqw {

// Pi_lambda(s, t) = P(s, t) exp(<lambda, r(t)>)
RMatrix tilted_matrix(const RMatrix& p, const JumpFunction& jump, const RVector& lambda);
// Largest real eigenvalue of a nonnegative irreducible matrix.
double perron_root(const RMatrix& tilted);
// ln rho(lambda), evaluated with the exponent shifted so large tilts do not overflow.
double log_perron_root(const RMatrix& p, const JumpFunction& jump, const RVector& lambda);

enum class RateStatus { Finite, Infinite, Indeterminate };
std::string to_string(RateStatus s);

struct LegendreOptions {
  int max_iterations = 200;
  double grad_tol = 1e-10;
  double grad_step = 1e-6;
  double hess_step = 1e-4;
  double lambda_max = 1e3;
  double growth_tol = 1e-6;
};

struct LegendreResult {
  RateStatus status = RateStatus::Indeterminate;
  double value = std::numeric_limits<double>::quiet_NaN();
  RVector argmax;
  int iterations = 0;
};

// sup_lambda <lambda, x> - f(lambda) for a smooth convex f with f(0) = 0,
// by damped Newton from a few starting points.
LegendreResult legendre_transform(const std::function<double(const RVector&)>& f, const RVector& x,
                                  const LegendreOptions& opts = {});

LegendreResult ld_rate(const ChainModel& model, const RVector& x, const LegendreOptions& opts = {});

// v -> D(v) on the d-torus; eval may be called from several threads at once.
struct DiffusionFamily {
  int dim = 1;
  std::function<RMatrix(const RVector&)> eval;
};

struct ArgmaxOptions {
  int grid = 0;  // points per axis; 0 picks 256 for d = 1, 32 otherwise
  int newton_steps = 3;
  double constant_tol = 1e-10;
  double tie_tol = 1e-9;
};

struct ArgmaxResult {
  std::vector<RVector> maximizers;  // sorted; the first is v1(y)
  double value = 0.0;               // max_v <y, D(v) y>
  bool constant = false;
};

// Grid scan plus Newton refinement; throws AssumptionError on a flat,
// non-constant maximum.
ArgmaxResult argmax_v(const DiffusionFamily& family, const RVector& y, const ArgmaxOptions& opts = {});

struct MdResult {
  LegendreResult legendre;
  ArgmaxResult argmax;  // at the optimal y; empty when x = 0
};

// Lambda*(x) = sup_y <y, x> - 1/2 max_v <y, D(v) y>. D(v) is sampled once on
// the argmax grid and must be positive definite there. For d = 1 the sup is
// found by Newton ascent in y. For d > 1 the objective has kinks where two
// maximizers in v trade places, so homogeneity is used instead:
// Lambda*(x) = sup_{|u| = 1} <u, x>_+^2 / (2 max_v <u, D(v) u>), searched by
// golden section on the angle (d = 2) or step-halving pattern moves on the
// sphere (d > 2).
class MdRate {
 public:
  explicit MdRate(DiffusionFamily family, ArgmaxOptions opts = {});
  MdResult operator()(const RVector& x, const LegendreOptions& lopts = {}) const;
  ArgmaxResult argmax(const RVector& y) const;
  bool constant() const { return constant_; }

 private:
  LegendreResult direction_search(const RVector& x) const;

  DiffusionFamily family_;
  ArgmaxOptions opts_;
  std::vector<RVector> grid_v_;
  std::vector<RMatrix> grid_d_;
  bool constant_ = false;
};

MdResult md_rate(const DiffusionFamily& family, const RVector& x, const ArgmaxOptions& opts = {});

struct RateTable {
  std::vector<RVector> x;
  std::vector<double> rate;  // +inf where infinite, NaN where indeterminate
  std::vector<RateStatus> status;
  std::vector<RVector> maximizer;  // lambda(x) or y(x)
  std::vector<RVector> v1;         // moderate deviations only
};

// Rows are computed in parallel.
RateTable ld_table(const ChainModel& model, const std::vector<RVector>& xs, const LegendreOptions& opts = {});
RateTable md_table(const DiffusionFamily& family, const std::vector<RVector>& xs, const ArgmaxOptions& opts = {});

// rate[i] <= (rate[i-1] + rate[i+1]) / 2 + tol over consecutive finite
// entries of a table on a uniform 1D grid.
bool midpoint_convex(const std::vector<double>& rate, double tol = 1e-8);

}  // namespace rtqw
