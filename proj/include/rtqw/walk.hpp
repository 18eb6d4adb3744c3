#pragma once

#include <functional>
#include <map>
#include <span>

#include "rtqw/common.hpp"

namespace rtqw {

constexpr double kUnitarityTol = 1e-12;

// Displacement r(tau) attached to each internal label.
class JumpFunction {
 public:
  // jumps[i] is r(label_of(i, dim)); each entry has dim components.
  JumpFunction(int dim, std::vector<Site> jumps);

  // r(+j) = e_j, r(-j) = -e_j.
  static JumpFunction nearest_neighbour(int dim);

  int dim() const { return dim_; }
  int coin_dim() const { return 2 * dim_; }
  const Site& operator[](int index) const { return jumps_[index]; }
  const Site& at_label(int label) const { return jumps_[index_of(label, dim_)]; }
  const std::vector<Site>& jumps() const { return jumps_; }

  // max over labels and coordinates of |r(tau)_j|
  int range() const;
  int min_component(int j) const;
  int max_component(int j) const;

  // r(tau)_j as a (2d x d) real matrix, one row per label.
  RMatrix as_matrix() const;
  // (1/2d) sum_tau r(tau)
  RVector mean() const;

  bool operator==(const JumpFunction&) const = default;

 private:
  int dim_;
  std::vector<Site> jumps_;
};

class Coin {
 public:
  explicit Coin(CMatrix matrix, double tol = kUnitarityTol);

  static Coin identity(int coin_dim);
  // (1/sqrt 2)[[1, 1], [1, -1]] in the (+1, -1) basis.
  static Coin hadamard();
  // (2/2d) J - I
  static Coin grover(int coin_dim);

  const CMatrix& matrix() const { return m_; }
  int coin_dim() const { return static_cast<int>(m_.rows()); }

 private:
  CMatrix m_;
};

// Axis-aligned box of lattice sites, last coordinate fastest.
class LatticeBox {
 public:
  LatticeBox() = default;
  LatticeBox(Site lo, Site hi);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Site& lo() const { return lo_; }
  const Site& hi() const { return hi_; }
  std::size_t size() const { return size_; }
  std::ptrdiff_t stride(int j) const { return stride_[j]; }
  bool contains(const Site& x) const;
  std::size_t index(const Site& x) const;
  Site site(std::size_t index) const;

  bool operator==(const LatticeBox& o) const { return lo_ == o.lo_ && hi_ == o.hi_; }

 private:
  Site lo_, hi_;
  std::vector<std::ptrdiff_t> stride_;
  std::size_t size_ = 0;
};

// Finitely supported walker state, stored densely on a bounding box.
class WalkState {
 public:
  WalkState() = default;
  WalkState(LatticeBox box, int coin_dim);

  static WalkState localized(const CVector& internal, const Site& at);

  int dim() const { return box_.dim(); }
  int coin_dim() const { return coin_dim_; }
  const LatticeBox& box() const { return box_; }

  CVector amplitude(const Site& x) const;
  void set_amplitude(const Site& x, const CVector& a);
  double norm_squared() const;

  cplx* data() { return amp_.data(); }
  const cplx* data() const { return amp_.data(); }

  // Re-shape to a new zero-filled box, keeping the allocation when possible.
  void reset(const LatticeBox& box, int coin_dim);

 private:
  LatticeBox box_;
  int coin_dim_ = 0;
  std::vector<cplx> amp_;
};

class LatticeDistribution {
 public:
  LatticeDistribution() = default;
  LatticeDistribution(LatticeBox box, std::vector<double> weights);
  static LatticeDistribution from_map(int dim, const std::map<Site, double>& w);

  int dim() const { return box_.dim(); }
  const LatticeBox& box() const { return box_; }
  const std::vector<double>& weights() const { return w_; }
  double at(const Site& k) const;
  double total() const;
  void for_each(const std::function<void(const Site&, double)>& f) const;

 private:
  LatticeBox box_;
  std::vector<double> w_;
};

// Finite-support kernel rho(x, y) of a density matrix.
struct DensityKernel {
  struct Entry {
    Site x, y;
    CMatrix block;
  };
  int dim = 1;
  std::vector<Entry> entries;

  static DensityKernel pure(const CVector& internal, const Site& at);
  // Throws std::invalid_argument on a non-Hermitian kernel, a negative
  // diagonal block or a trace different from one.
  void validate(double tol = 1e-12) const;
};

void apply_step_into(const WalkState& in, const CMatrix& coin, const JumpFunction& jump, WalkState& out);
WalkState apply_step(const WalkState& state, const Coin& coin, const JumpFunction& jump);
WalkState evolve(const WalkState& state0, std::span<const Coin> coins, const JumpFunction& jump);
WalkState evolve(const WalkState& state0, std::span<const Coin> palette, std::span<const int> sequence,
                 const JumpFunction& jump);

LatticeDistribution position_distribution(const WalkState& state);

// Nonzero J_k(n), keyed by k.
std::map<Site, CMatrix> jk_matrices(std::span<const Coin> coins, const JumpFunction& jump);

// d(y) C_n ... d(y) C_1
CMatrix fourier_jn(std::span<const Coin> coins, const JumpFunction& jump, const RVector& y);

cplx characteristic_function(const LatticeDistribution& dist, const RVector& y);

// E prod_j (X_j - c_j)^{s_j}; c defaults to the origin.
double moment(const LatticeDistribution& dist, const std::vector<int>& s, const RVector* center = nullptr);

LatticeDistribution density_distribution(const DensityKernel& rho0, std::span<const Coin> coins,
                                         const JumpFunction& jump);

}  // namespace rtqw
