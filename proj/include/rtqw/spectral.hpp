#pragma once

#include <string>

#include "rtqw/ensembles.hpp"

namespace rtqw {

// An operator on C^{2d} (x) C^{2d}; basis |tau (x) tau'> has index tau * 2d + tau'.
struct DoubledOperator {
  CMatrix matrix;
  int coin_dim = 0;
};

inline int doubled_index(int tau, int tau2, int coin_dim) { return tau * coin_dim + tau2; }

// sum_tau |tau (x) tau>
CVector psi1(int coin_dim);
// |phi (x) psi> -> |psi (x) phi>
CMatrix swap_operator(int coin_dim);

DoubledOperator expected_doubled(const FiniteCoinEnsemble& ensemble);
DoubledOperator phase_matrix(const RVector& y, const RVector& y2, const JumpFunction& jump);
DoubledOperator m_matrix(const DoubledOperator& e, const RVector& y, const RVector& y2, const JumpFunction& jump);
RVector drift(const JumpFunction& jump);

// Operator family Op(y, y') = diag(exp(i(<y, a_row> + <y', b_row>))) * base on
// an ambient space whose rows carry a pair of displacement vectors
// (a_row, b_row). At (y, y') = (-v, v) the family fixes `right` and its
// adjoint fixes `left`.
struct SpectralModel {
  CMatrix base;
  RMatrix first;
  RMatrix second;
  CVector left;
  CVector right;
  int dim = 1;
  RVector drift;

  int ambient() const { return static_cast<int>(base.rows()); }
  CVector phases(const RVector& y, const RVector& y2) const;
  CMatrix op(const RVector& y, const RVector& y2) const;
};

SpectralModel iid_model(const FiniteCoinEnsemble& ensemble, const JumpFunction& jump);

struct CyclicSubspace {
  CMatrix basis;  // orthonormal columns
  int rank = 0;
  double cut = 1e-10;
  double invariance_residual = 0.0;
  double seed_residual = 0.0;
};

// Smallest subspace containing `left` and invariant under Op(Y)^* for Y in a
// 5^{2d}-point torus lattice plus random points.
CyclicSubspace cyclic_subspace(const SpectralModel& model, double cut = 1e-10, int random_points = 8);
double invariance_residual(const SpectralModel& model, const CyclicSubspace& sub, int grid_per_axis = 5,
                           int random_points = 8);

struct AssumptionOptions {
  int grid = 0;  // points per axis; 0 picks 256 for d = 1, 64 for d = 2, 16 otherwise
  double gap_tol = 1e-6;
  double one_tol = 1e-8;
  double degeneracy_tol = 1e-6;
};

struct AssumptionReport {
  bool holds = false;
  double gap = 0.0;                // min over v of 1 - max |lambda|, lambda != lambda_1
  double simplicity_margin = 0.0;  // min over v of the distance from 1 to the rest of the spectrum
  int degeneracy = 0;              // max over v of the multiplicity of eigenvalue 1 on the subspace
  int full_space_degeneracy = 0;   // same on the ambient space
  int rank = 0;
  int grid = 0;
  std::vector<RVector> offending_v;
};

AssumptionReport check_assumption(const SpectralModel& model, const CyclicSubspace& sub,
                                  const AssumptionOptions& opts = {});

// (A0 - I)^{-1} on the complement of the eigenvector `right`, along the
// spectral projector |right><left| / <left, right>.
CMatrix reduced_resolvent(const CMatrix& a0, const CVector& left, const CVector& right);

// Compressed operator B^* Op(-v, v) B and its fixed vectors.
struct CompressedPoint {
  CMatrix a0;
  CVector left, right;  // <left, right> = 1
};
CompressedPoint compress_at(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v);

// Reduced resolvent at v in subspace coordinates.
CMatrix reduced_resolvent(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v);

enum class DiffusionMethod { Resolvent, Hessian };

// D(v) is minus the Hessian of log lambda_1(y, v) at y = 0, so that
// E[(X - n rbar)(X - n rbar)^T] / n tends to its torus average.
RMatrix diffusion_matrix(const SpectralModel& model, const CyclicSubspace& sub, const RVector& v,
                         DiffusionMethod method = DiffusionMethod::Resolvent);

// Closed second-order formula from a reduced resolvent on the full doubled
// space: 2 rbar rbar^T - avg(r r^T) - (1/d) sum r(tau) <tau tau|S|tau' tau'> r(tau')^T,
// minus rbar rbar^T to return the covariance normalization used above.
RMatrix secord_closed_form(const CMatrix& s_full, const JumpFunction& jump);

// Eigenvalue of B^* Op(y - v, v) B nearest to 1; throws when |lambda - 1| > 0.5.
cplx tracked_eigenvalue(const SpectralModel& model, const CyclicSubspace& sub, const RVector& y, const RVector& v);

struct DiffusionReport {
  RVector drift;
  std::vector<RVector> v;
  std::vector<RMatrix> d;
  RMatrix averaged;
  int grid = 0;
  std::string method;
  double method_residual = 0.0;  // max |resolvent - hessian| when cross-checked
  double v_spread = 0.0;         // max |D(v) - D(v')| over the grid
  bool v_independent = false;
  double min_eigenvalue = 0.0;
  double max_asymmetry = 0.0;
};

DiffusionReport diffusion_report(const SpectralModel& model, const CyclicSubspace& sub, int grid = 64,
                                 bool cross_check = true);
RMatrix averaged_diffusion(const SpectralModel& model, const CyclicSubspace& sub, int grid = 64);

// Averaged characteristic function by torus quadrature over v; grid = 0
// chooses the smallest grid on which the rule is exact.
cplx averaged_char_function(const DoubledOperator& e, const JumpFunction& jump, const RVector& y, int n,
                            const CVector& phi0, int grid = 0);
cplx averaged_char_function(const DoubledOperator& e, const JumpFunction& jump, const RVector& y, int n,
                            const DensityKernel& rho0, int grid = 0);

// Exact first and second moments of the averaged distribution after n steps,
// by differentiating the characteristic function at y = 0 along the recursion.
struct AveragedMoments {
  RVector mean;    // E <X>
  RMatrix second;  // E <X X^T>
};
AveragedMoments averaged_moments(const DoubledOperator& e, const JumpFunction& jump, int n, const CVector& phi0);

// Averaged position distribution recovered by inverse transform.
LatticeDistribution averaged_distribution(const DoubledOperator& e, const JumpFunction& jump, int n,
                                          const CVector& phi0);
LatticeDistribution averaged_distribution(const DoubledOperator& e, const JumpFunction& jump, int n,
                                          const DensityKernel& rho0);

struct ScalingRow {
  int n = 0;
  int steps = 0;
  cplx value;
  cplx limit;
  double error = 0.0;
};

// Diffusive probe: e^{-i [tn] <rbar, y> / sqrt n} E Phi_[tn](y / sqrt n) against
// the torus average of exp(-t/2 <y, D(v) y>).
std::vector<ScalingRow> scaling_limit_probe(const FiniteCoinEnsemble& ensemble, const JumpFunction& jump,
                                            const RVector& y, double t, const std::vector<int>& n_list,
                                            const CVector& phi0, int grid = 256);
// Ballistic probe: E Phi_[tn](y / n) against e^{i t <y, rbar>}.
std::vector<ScalingRow> ballistic_probe(const FiniteCoinEnsemble& ensemble, const JumpFunction& jump,
                                        const RVector& y, double t, const std::vector<int>& n_list,
                                        const CVector& phi0, int grid = 256);

struct EinsteinRow {
  int s = 0;
  RVector drift;
  RVector velocity;   // rbar_0 / s
  RMatrix diffusion;  // averaged D of r_s, divided by s^2
  RVector mobility;   // velocity * s
};

// Jumps r_s = s r1 + r0 with a centred r1 and a biased r0.
std::vector<EinsteinRow> einstein_scan(const FiniteCoinEnsemble& ensemble, const JumpFunction& r1,
                                       const JumpFunction& r0, const std::vector<int>& s_list, int grid = 0);

}  // namespace rtqw
