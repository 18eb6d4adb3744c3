#pragma once

#include "rtqw/spectral.hpp"

namespace rtqw {

// Left Perron vector of P normalized so that its entries sum to 1.
RVector chi_p(const RMatrix& p);

// Block operator on C^F (x) C^{2d} (x) C^{2d}, index j * 4d^2 + tau * 2d + tau':
// block (j, k) is P(k, j) M_j(Y), so that the block-j component after n steps
// is E[1{omega_n = j} Phi_n]. left = chi_1 (x) Psi_1, right = chi_p (x) Psi_1.
SpectralModel markov_spectral_model(const MarkovCoinProcess& process, const JumpFunction& jump);

CMatrix block_operator(const MarkovCoinProcess& process, const JumpFunction& jump, const RVector& y,
                       const RVector& y2);
// sum_j p0(j) e_j (x) M_j(Y) Phi_0 for Phi_0 = phi0 (x) conj(phi0).
CVector initial_block_vector(const MarkovCoinProcess& process, const JumpFunction& jump, const RVector& y,
                             const RVector& y2, const CVector& phi0);

// <chi_1 (x) Psi_1| M(Y)^{n-1} M_0(Y) Phi_0> averaged over v; grid = 0 is exact.
cplx averaged_char_markov(const MarkovCoinProcess& process, const JumpFunction& jump, const RVector& y, int n,
                          const CVector& phi0, int grid = 0);

// Averaged position distribution by inverse transform of the above.
LatticeDistribution averaged_distribution_markov(const MarkovCoinProcess& process, const JumpFunction& jump, int n,
                                                 const CVector& phi0);

struct MarkovSpectral {
  SpectralModel model;
  CyclicSubspace subspace;
};
MarkovSpectral markov_spectral(const MarkovCoinProcess& process, const JumpFunction& jump);

RMatrix markov_diffusion(const MarkovSpectral& ms, const RVector& v,
                         DiffusionMethod method = DiffusionMethod::Resolvent);

AssumptionReport check_assumption_s2(const MarkovCoinProcess& process, const JumpFunction& jump,
                                     const AssumptionOptions& opts = {});

// Rank-one projector c |right><left| at v = 0 for c = 1/(2d) and c = 1/d.
struct ProjectorCheck {
  cplx pairing;                 // <left, right>
  double residual_half_d = 0.0;  // ||P^2 - P|| with c = 1/(2d)
  double residual_d = 0.0;       // same with c = 1/d
  double fixed_point = 0.0;      // max of ||M right - right||, ||M^* left - left|| at v = 0
};
ProjectorCheck projector_check(const SpectralModel& model, int coin_dim);

// max_j ||x_j|| over blocks of equal size.
double blockmax_norm(const CVector& x, int blocks);

// For a process whose coins are all permutation coins: asymptotic covariance
// of the displacement from the joint chain (j, tau) -> (j', pi_j'(tau)).
RMatrix permutation_markov_covariance(const MarkovCoinProcess& process, const JumpFunction& jump);

}  // namespace rtqw
