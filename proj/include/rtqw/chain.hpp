#pragma once

#include "rtqw/ensembles.hpp"

namespace rtqw {

// Markov chain on the internal labels driven by random permutation coins.
// transition(s, t) is the probability of moving from index s to index t.
struct ChainModel {
  RMatrix transition;
  JumpFunction jump;
  RVector initial;
  PermutationMeasure measure;  // empty when the chain was given directly
};

ChainModel build_chain(const PermutationMeasure& mu, const JumpFunction& jump, const RVector& p0);
// Chain given by its transition matrix; must be doubly stochastic.
ChainModel chain_from_matrix(const RMatrix& p, const JumpFunction& jump, const RVector& p0);
// |a_tau|^2 for a normalized internal state.
RVector initial_from_state(const CVector& phi0);

bool is_doubly_stochastic(const RMatrix& p, double tol = 1e-12);
bool irreducible(const RMatrix& p);
// gcd of cycle lengths in the graph of positive entries; p must be irreducible.
int period(const RMatrix& p);
// Left Perron vector: p^T u = u, sum u = 1.
RVector stationary(const RMatrix& p);

struct ChainCovariance {
  RMatrix sigma;
  RMatrix projection_term;  // -(1/2d) <r_i|r_j> + rbar_i rbar_j
  RMatrix resolvent_term;   // -(1/2d) (<r_i|S r_j> + <r_j|S r_i>)
  RMatrix alternative;      // (1/2d) <Q r_i|(I_Q - P_Q)^{-1} (I_Q + P_Q) Q r_j>, symmetrized
  double form_agreement = 0.0;
  double min_eigenvalue = 0.0;
  bool singular = false;
  int period = 1;
};

ChainCovariance chain_covariance(const ChainModel& model);

// Asymptotic covariance of sum_j f(X_j) for an irreducible chain with
// transition p and reward rows f (states x d), via the fundamental matrix.
RMatrix markov_reward_covariance(const RMatrix& p, const RMatrix& rewards);

// Exact law of S_n = sum_{j=1}^n r(tau_j).
LatticeDistribution exact_sn_distribution(const ChainModel& model, int n, std::size_t guard = 10'000'000);

struct CltRow {
  int n = 0;
  RVector mean;        // E S_n / n
  RMatrix covariance;  // Cov S_n / n
  double residual = 0.0;  // max |Cov S_n / n - Sigma|
};
std::vector<CltRow> clt_probe(const ChainModel& model, const std::vector<int>& n_list);

double chi_square1_cdf(double t);
// Asymptotic Kolmogorov-Smirnov critical value at level alpha for n samples.
double ks_threshold(std::size_t samples, double alpha);
// sup |F_emp - cdf| for the sample in `values` (sorted in place).
double ks_distance(std::vector<double>& values, double (*cdf)(double));

struct DiffusionLaw {
  int n = 0;
  std::size_t samples = 0;
  RMatrix sigma;
  RMatrix mean;            // empirical mean of D^omega
  RMatrix standard_error;  // per entry
  std::vector<RMatrix> draws;
  bool singular = false;  // also set, with a NaN sigma, for reducible chains
  // d = 1 only: D^omega / Sigma against chi-square(1)
  double ks = -1.0;
  // same, with the law of large numbers lattice atoms compared at midpoints
  // between consecutive attained values
  double ks_lattice = -1.0;
};

// D^omega_n = sum_tau0 p0(tau0) (S_n - n rbar)(S_n - n rbar)^T / n along
// sampled permutation sequences.
DiffusionLaw random_diffusion_law(const ChainModel& model, int n, std::size_t samples, const SeededStream& stream);

}  // namespace rtqw
