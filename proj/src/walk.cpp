#include "rtqw/walk.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rtqw {

JumpFunction::JumpFunction(int dim, std::vector<Site> jumps) : dim_(dim), jumps_(std::move(jumps)) {
  if (dim < 1) throw std::invalid_argument("jump function: dimension must be >= 1");
  if (static_cast<int>(jumps_.size()) != 2 * dim)
    throw std::invalid_argument("jump function: expected " + std::to_string(2 * dim) + " entries, got " +
                                std::to_string(jumps_.size()));
  for (const auto& r : jumps_)
    if (static_cast<int>(r.size()) != dim) throw std::invalid_argument("jump function: entry of wrong dimension");
}

JumpFunction JumpFunction::nearest_neighbour(int dim) {
  std::vector<Site> jumps(2 * dim, Site(dim, 0));
  for (int j = 0; j < dim; ++j) {
    jumps[j][j] = 1;
    jumps[dim + j][j] = -1;
  }
  return JumpFunction(dim, std::move(jumps));
}

int JumpFunction::range() const {
  int rho = 0;
  for (const auto& r : jumps_)
    for (int c : r) rho = std::max(rho, std::abs(c));
  return rho;
}

int JumpFunction::min_component(int j) const {
  int m = jumps_[0][j];
  for (const auto& r : jumps_) m = std::min(m, r[j]);
  return m;
}

int JumpFunction::max_component(int j) const {
  int m = jumps_[0][j];
  for (const auto& r : jumps_) m = std::max(m, r[j]);
  return m;
}

RMatrix JumpFunction::as_matrix() const {
  RMatrix m(2 * dim_, dim_);
  for (int t = 0; t < 2 * dim_; ++t)
    for (int j = 0; j < dim_; ++j) m(t, j) = jumps_[t][j];
  return m;
}

RVector JumpFunction::mean() const { return as_matrix().colwise().mean().transpose(); }

Coin::Coin(CMatrix matrix, double tol) : m_(std::move(matrix)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0 || m_.rows() % 2 != 0)
    throw std::invalid_argument("coin: matrix must be square of even size 2d");
  const CMatrix defect = m_.adjoint() * m_ - CMatrix::Identity(m_.rows(), m_.cols());
  if (defect.cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("coin: matrix is not unitary (defect " + std::to_string(defect.cwiseAbs().maxCoeff()) +
                                ")");
}

Coin Coin::identity(int coin_dim) { return Coin(CMatrix::Identity(coin_dim, coin_dim)); }

Coin Coin::hadamard() {
  CMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return Coin(h / std::sqrt(2.0));
}

Coin Coin::grover(int coin_dim) {
  CMatrix g = CMatrix::Constant(coin_dim, coin_dim, 2.0 / coin_dim) - CMatrix::Identity(coin_dim, coin_dim);
  return Coin(g);
}

LatticeBox::LatticeBox(Site lo, Site hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size() || lo_.empty()) throw std::invalid_argument("box: bad corners");
  const int d = dim();
  stride_.assign(d, 1);
  size_ = 1;
  for (int j = d - 1; j >= 0; --j) {
    if (hi_[j] < lo_[j]) throw std::invalid_argument("box: empty extent");
    stride_[j] = static_cast<std::ptrdiff_t>(size_);
    size_ *= static_cast<std::size_t>(hi_[j] - lo_[j] + 1);
  }
}

bool LatticeBox::contains(const Site& x) const {
  if (static_cast<int>(x.size()) != dim()) return false;
  for (int j = 0; j < dim(); ++j)
    if (x[j] < lo_[j] || x[j] > hi_[j]) return false;
  return true;
}

std::size_t LatticeBox::index(const Site& x) const {
  std::ptrdiff_t i = 0;
  for (int j = 0; j < dim(); ++j) i += (x[j] - lo_[j]) * stride_[j];
  return static_cast<std::size_t>(i);
}

Site LatticeBox::site(std::size_t index) const {
  Site x(dim());
  auto rest = static_cast<std::ptrdiff_t>(index);
  for (int j = 0; j < dim(); ++j) {
    x[j] = lo_[j] + static_cast<int>(rest / stride_[j]);
    rest %= stride_[j];
  }
  return x;
}

WalkState::WalkState(LatticeBox box, int coin_dim) { reset(box, coin_dim); }

WalkState WalkState::localized(const CVector& internal, const Site& at) {
  if (internal.size() != 2 * static_cast<Eigen::Index>(at.size()))
    throw std::invalid_argument("walk state: internal vector must have 2d components");
  WalkState s(LatticeBox(at, at), static_cast<int>(internal.size()));
  s.set_amplitude(at, internal);
  return s;
}

void WalkState::reset(const LatticeBox& box, int coin_dim) {
  box_ = box;
  coin_dim_ = coin_dim;
  amp_.assign(box_.size() * static_cast<std::size_t>(coin_dim), cplx(0.0, 0.0));
}

CVector WalkState::amplitude(const Site& x) const {
  CVector a = CVector::Zero(coin_dim_);
  if (!box_.contains(x)) return a;
  const cplx* p = amp_.data() + box_.index(x) * coin_dim_;
  for (int t = 0; t < coin_dim_; ++t) a[t] = p[t];
  return a;
}

void WalkState::set_amplitude(const Site& x, const CVector& a) {
  if (!box_.contains(x)) throw std::out_of_range("walk state: site outside the stored box");
  if (a.size() != coin_dim_) throw std::invalid_argument("walk state: amplitude of wrong size");
  cplx* p = amp_.data() + box_.index(x) * coin_dim_;
  for (int t = 0; t < coin_dim_; ++t) p[t] = a[t];
}

double WalkState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amp_) s += std::norm(a);
  return s;
}

LatticeDistribution::LatticeDistribution(LatticeBox box, std::vector<double> weights)
    : box_(std::move(box)), w_(std::move(weights)) {
  if (w_.size() != box_.size()) throw std::invalid_argument("distribution: weight count does not match box");
}

LatticeDistribution LatticeDistribution::from_map(int dim, const std::map<Site, double>& w) {
  if (w.empty()) throw std::invalid_argument("distribution: empty support");
  Site lo = w.begin()->first, hi = lo;
  for (const auto& [k, _] : w) {
    if (static_cast<int>(k.size()) != dim) throw std::invalid_argument("distribution: site of wrong dimension");
    for (int j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], k[j]);
      hi[j] = std::max(hi[j], k[j]);
    }
  }
  LatticeBox box(lo, hi);
  std::vector<double> weights(box.size(), 0.0);
  for (const auto& [k, v] : w) weights[box.index(k)] += v;
  return LatticeDistribution(box, std::move(weights));
}

double LatticeDistribution::at(const Site& k) const { return box_.contains(k) ? w_[box_.index(k)] : 0.0; }

double LatticeDistribution::total() const {
  double s = 0.0;
  for (double v : w_) s += v;
  return s;
}

void LatticeDistribution::for_each(const std::function<void(const Site&, double)>& f) const {
  for (std::size_t i = 0; i < w_.size(); ++i) f(box_.site(i), w_[i]);
}

DensityKernel DensityKernel::pure(const CVector& internal, const Site& at) {
  DensityKernel k;
  k.dim = static_cast<int>(at.size());
  k.entries.push_back({at, at, internal * internal.adjoint()});
  return k;
}

void DensityKernel::validate(double tol) const {
  const int cd = 2 * dim;
  std::map<std::pair<Site, Site>, const CMatrix*> lookup;
  for (const auto& e : entries) {
    if (static_cast<int>(e.x.size()) != dim || static_cast<int>(e.y.size()) != dim)
      throw std::invalid_argument("density kernel: site of wrong dimension");
    if (e.block.rows() != cd || e.block.cols() != cd)
      throw std::invalid_argument("density kernel: block must be 2d x 2d");
    if (!lookup.emplace(std::make_pair(e.x, e.y), &e.block).second)
      throw std::invalid_argument("density kernel: duplicate entry");
  }
  cplx trace = 0.0;
  for (const auto& e : entries) {
    auto it = lookup.find({e.y, e.x});
    const double mismatch = it == lookup.end() ? e.block.cwiseAbs().maxCoeff()
                                               : (e.block - it->second->adjoint()).cwiseAbs().maxCoeff();
    if (mismatch > tol) throw std::invalid_argument("density kernel: not Hermitian");
    if (e.x == e.y) {
      trace += e.block.trace();
      Eigen::SelfAdjointEigenSolver<CMatrix> es(e.block);
      if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("density kernel: diagonal block is not positive semidefinite");
    }
  }
  if (std::abs(trace - cplx(1.0, 0.0)) > tol) throw std::invalid_argument("density kernel: trace is not one");
}

void apply_step_into(const WalkState& in, const CMatrix& coin, const JumpFunction& jump, WalkState& out) {
  const int d = in.dim();
  const int cd = in.coin_dim();
  if (jump.dim() != d || coin.rows() != cd || cd != 2 * d)
    throw std::invalid_argument("apply_step: coin, state and jump function dimensions disagree");
  const LatticeBox& ob = in.box();
  Site lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = ob.lo()[j] + jump.min_component(j);
    hi[j] = ob.hi()[j] + jump.max_component(j);
  }
  out.reset(LatticeBox(lo, hi), cd);
  const LatticeBox& nb = out.box();

  std::vector<std::ptrdiff_t> offset(cd, 0);
  for (int t = 0; t < cd; ++t)
    for (int j = 0; j < d; ++j) offset[t] += jump[t][j] * nb.stride(j);

  std::vector<cplx> c(static_cast<std::size_t>(cd) * cd);
  for (int t = 0; t < cd; ++t)
    for (int s = 0; s < cd; ++s) c[t * cd + s] = coin(t, s);

  Site x = ob.lo();
  std::ptrdiff_t base = static_cast<std::ptrdiff_t>(nb.index(x));
  const cplx* src = in.data();
  cplx* dst = out.data();
  for (std::size_t s = 0; s < ob.size(); ++s) {
    const cplx* a = src + s * cd;
    bool nonzero = false;
    for (int t = 0; t < cd; ++t)
      if (a[t] != cplx(0.0, 0.0)) {
        nonzero = true;
        break;
      }
    if (nonzero) {
      for (int t = 0; t < cd; ++t) {
        cplx acc(0.0, 0.0);
        const cplx* row = c.data() + t * cd;
        for (int u = 0; u < cd; ++u) acc += row[u] * a[u];
        dst[(base + offset[t]) * cd + t] = acc;
      }
    }
    for (int j = d - 1; j >= 0; --j) {
      if (x[j] < ob.hi()[j]) {
        ++x[j];
        base += nb.stride(j);
        break;
      }
      base -= static_cast<std::ptrdiff_t>(x[j] - ob.lo()[j]) * nb.stride(j);
      x[j] = ob.lo()[j];
    }
  }
}

WalkState apply_step(const WalkState& state, const Coin& coin, const JumpFunction& jump) {
  WalkState out;
  apply_step_into(state, coin.matrix(), jump, out);
  return out;
}

WalkState evolve(const WalkState& state0, std::span<const Coin> coins, const JumpFunction& jump) {
  WalkState cur = state0, next;
  for (const auto& c : coins) {
    apply_step_into(cur, c.matrix(), jump, next);
    std::swap(cur, next);
  }
  return cur;
}

WalkState evolve(const WalkState& state0, std::span<const Coin> palette, std::span<const int> sequence,
                 const JumpFunction& jump) {
  WalkState cur = state0, next;
  for (int i : sequence) {
    apply_step_into(cur, palette[i].matrix(), jump, next);
    std::swap(cur, next);
  }
  return cur;
}

LatticeDistribution position_distribution(const WalkState& state) {
  const int cd = state.coin_dim();
  std::vector<double> w(state.box().size(), 0.0);
  const cplx* a = state.data();
  for (std::size_t s = 0; s < w.size(); ++s) {
    double acc = 0.0;
    for (int t = 0; t < cd; ++t) acc += std::norm(a[s * cd + t]);
    w[s] = acc;
  }
  return LatticeDistribution(state.box(), std::move(w));
}

std::map<Site, CMatrix> jk_matrices(std::span<const Coin> coins, const JumpFunction& jump) {
  const int d = jump.dim(), cd = jump.coin_dim();
  const Site origin(d, 0);
  std::map<Site, CMatrix> out;
  for (int col = 0; col < cd; ++col) {
    const WalkState s = evolve(WalkState::localized(CVector::Unit(cd, col), origin), coins, jump);
    const cplx* a = s.data();
    for (std::size_t i = 0; i < s.box().size(); ++i) {
      bool nonzero = false;
      for (int t = 0; t < cd; ++t) nonzero = nonzero || a[i * cd + t] != cplx(0.0, 0.0);
      if (!nonzero) continue;
      auto [it, fresh] = out.try_emplace(s.box().site(i), CMatrix::Zero(cd, cd));
      for (int t = 0; t < cd; ++t) it->second(t, col) = a[i * cd + t];
    }
  }
  return out;
}

CMatrix fourier_jn(std::span<const Coin> coins, const JumpFunction& jump, const RVector& y) {
  const int cd = jump.coin_dim();
  CVector phase(cd);
  for (int t = 0; t < cd; ++t) {
    double a = 0.0;
    for (int j = 0; j < jump.dim(); ++j) a += y[j] * jump[t][j];
    phase[t] = std::polar(1.0, a);
  }
  CMatrix j = CMatrix::Identity(cd, cd);
  for (const auto& c : coins) j = phase.asDiagonal() * (c.matrix() * j);
  return j;
}

cplx characteristic_function(const LatticeDistribution& dist, const RVector& y) {
  cplx acc(0.0, 0.0);
  dist.for_each([&](const Site& k, double w) {
    if (w == 0.0) return;
    double a = 0.0;
    for (int j = 0; j < dist.dim(); ++j) a += y[j] * k[j];
    acc += w * std::polar(1.0, a);
  });
  return acc;
}

double moment(const LatticeDistribution& dist, const std::vector<int>& s, const RVector* center) {
  if (static_cast<int>(s.size()) != dist.dim()) throw std::invalid_argument("moment: multi-index of wrong size");
  double acc = 0.0;
  dist.for_each([&](const Site& k, double w) {
    if (w == 0.0) return;
    double term = w;
    for (int j = 0; j < dist.dim(); ++j) term *= std::pow(k[j] - (center ? (*center)[j] : 0.0), s[j]);
    acc += term;
  });
  return acc;
}

LatticeDistribution density_distribution(const DensityKernel& rho0, std::span<const Coin> coins,
                                         const JumpFunction& jump) {
  rho0.validate();
  if (rho0.dim != jump.dim()) throw std::invalid_argument("density kernel and jump function dimensions disagree");
  std::map<Site, CMatrix> jk;
  if (coins.empty())
    jk.emplace(Site(jump.dim(), 0), CMatrix::Identity(jump.coin_dim(), jump.coin_dim()));
  else
    jk = jk_matrices(coins, jump);
  std::map<Site, double> w;
  // rho_n(z, z) = sum_{k,k'} J_k rho0(z-k, z-k') J_{k'}^*
  for (const auto& e : rho0.entries) {
    for (const auto& [k, jmat] : jk) {
      Site z(k.size()), kp(k.size());
      for (std::size_t j = 0; j < k.size(); ++j) {
        z[j] = e.x[j] + k[j];
        kp[j] = z[j] - e.y[j];
      }
      auto it = jk.find(kp);
      if (it == jk.end()) continue;
      w[z] += (jmat * e.block * it->second.adjoint()).trace().real();
    }
  }
  return LatticeDistribution::from_map(jump.dim(), w);
}

}  // namespace rtqw
