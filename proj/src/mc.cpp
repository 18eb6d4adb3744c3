#include "rtqw/mc.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace rtqw {

namespace {

struct Stats {
  double count = 0.0;
  std::vector<double> mean, m2;

  explicit Stats(std::size_t dim = 0) : mean(dim, 0.0), m2(dim, 0.0) {}

  void add(const std::vector<double>& x) {
    count += 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (x[i] - mean[i]);
    }
  }

  static Stats merge(const Stats& a, const Stats& b) {
    if (a.count == 0.0) return b;
    if (b.count == 0.0) return a;
    Stats out(a.mean.size());
    out.count = a.count + b.count;
    for (std::size_t i = 0; i < a.mean.size(); ++i) {
      const double delta = b.mean[i] - a.mean[i];
      out.mean[i] = a.mean[i] + delta * b.count / out.count;
      out.m2[i] = a.m2[i] + b.m2[i] + delta * delta * a.count * b.count / out.count;
    }
    return out;
  }

  std::vector<double> standard_error() const {
    std::vector<double> se(mean.size());
    for (std::size_t i = 0; i < se.size(); ++i) se[i] = std::sqrt(m2[i] / (count - 1.0) / count);
    return se;
  }
};

// f(i, out) fills the observation vector for sample i.
template <class F>
Stats run_blocks(std::size_t samples, std::size_t dim, F&& f) {
  if (samples < 2) throw std::invalid_argument("Monte Carlo needs at least 2 samples");
  const std::size_t nblocks = (samples + kMcBlock - 1) / kMcBlock;
  std::vector<Stats> blocks(nblocks);
  detail::parallel_for(nblocks, [&](std::size_t b) {
    Stats s(dim);
    std::vector<double> buf(dim);
    for (std::size_t i = b * kMcBlock; i < std::min(samples, (b + 1) * kMcBlock); ++i) {
      std::fill(buf.begin(), buf.end(), 0.0);
      f(i, buf);
      s.add(buf);
    }
    blocks[b] = std::move(s);
  });
  while (blocks.size() > 1) {
    std::vector<Stats> next((blocks.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = 2 * i + 1 < blocks.size() ? Stats::merge(blocks[2 * i], blocks[2 * i + 1]) : blocks[2 * i];
    blocks.swap(next);
  }
  return blocks.front();
}

McProvenance provenance(const SeededStream& s, std::size_t samples) { return {s.seed(), s.index(), samples}; }

void check_inputs(const CVector& phi0, const JumpFunction& jump, int coin_dim) {
  if (jump.coin_dim() != coin_dim) throw std::invalid_argument("Monte Carlo: coin dimension does not match jumps");
  if (phi0.size() != coin_dim) throw std::invalid_argument("Monte Carlo: initial state of wrong size");
  if (std::abs(phi0.squaredNorm() - 1.0) > 1e-12) throw std::invalid_argument("Monte Carlo: initial state not normalized");
}

template <class Source>
McDistribution distribution_impl(const Source& src, const CVector& phi0, const JumpFunction& jump, int n,
                                 std::size_t samples, const SeededStream& stream) {
  check_inputs(phi0, jump, src.coin_dim());
  if (n < 0) throw std::invalid_argument("Monte Carlo: negative n");
  const int d = jump.dim();
  Site lo(d), hi(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = n * jump.min_component(j);
    hi[j] = n * jump.max_component(j);
  }
  McDistribution out;
  out.box = LatticeBox(lo, hi);
  const WalkState start = WalkState::localized(phi0, Site(d, 0));
  const Stats s = run_blocks(samples, out.box.size(), [&](std::size_t i, std::vector<double>& buf) {
    const auto seq = sample_sequence(src, n, stream.child(i));
    const LatticeDistribution w = position_distribution(evolve(start, src.coins(), seq, jump));
    w.for_each([&](const Site& k, double p) { buf[out.box.index(k)] += p; });
  });
  out.mean = s.mean;
  out.standard_error = s.standard_error();
  out.provenance = provenance(stream, samples);
  return out;
}

template <class Source>
std::vector<McMomentRow> moments_impl(const Source& src, const CVector& phi0, const JumpFunction& jump,
                                      const std::vector<int>& n_list, std::size_t samples,
                                      const SeededStream& stream) {
  check_inputs(phi0, jump, src.coin_dim());
  if (n_list.empty()) return {};
  for (int n : n_list)
    if (n < 1) throw std::invalid_argument("Monte Carlo: n must be positive");
  const int d = jump.dim();
  const int nmax = *std::max_element(n_list.begin(), n_list.end());
  const RVector rbar = jump.mean();
  const std::size_t per = static_cast<std::size_t>(d + d * d);
  const WalkState start = WalkState::localized(phi0, Site(d, 0));

  const Stats s = run_blocks(samples, per * n_list.size(), [&](std::size_t i, std::vector<double>& buf) {
    const auto seq = sample_sequence(src, nmax, stream.child(i));
    WalkState cur = start, next;
    for (int step = 1; step <= nmax; ++step) {
      apply_step_into(cur, src.coins()[seq[step - 1]].matrix(), jump, next);
      std::swap(cur, next);
      for (std::size_t c = 0; c < n_list.size(); ++c) {
        if (n_list[c] != step) continue;
        double* slot = buf.data() + c * per;
        position_distribution(cur).for_each([&](const Site& k, double p) {
          for (int a = 0; a < d; ++a) {
            const double xa = k[a] - step * rbar[a];
            slot[a] += p * xa / step;
            for (int b = 0; b < d; ++b) slot[d + a * d + b] += p * xa * (k[b] - step * rbar[b]) / step;
          }
        });
      }
    }
  });
  const auto se = s.standard_error();
  std::vector<McMomentRow> rows;
  for (std::size_t c = 0; c < n_list.size(); ++c) {
    McMomentRow row;
    row.n = n_list[c];
    row.first = Eigen::Map<const RVector>(s.mean.data() + c * per, d);
    row.first_se = Eigen::Map<const RVector>(se.data() + c * per, d);
    row.second = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        s.mean.data() + c * per + d, d, d);
    row.second_se = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        se.data() + c * per + d, d, d);
    rows.push_back(row);
  }
  return rows;
}

template <class Source>
McComplex char_impl(const Source& src, const CVector& phi0, const JumpFunction& jump, const RVector& y, int n,
                    std::size_t samples, const SeededStream& stream) {
  check_inputs(phi0, jump, src.coin_dim());
  if (y.size() != jump.dim()) throw std::invalid_argument("Monte Carlo: y of wrong dimension");
  const WalkState start = WalkState::localized(phi0, Site(jump.dim(), 0));
  const Stats s = run_blocks(samples, 2, [&](std::size_t i, std::vector<double>& buf) {
    const auto seq = sample_sequence(src, n, stream.child(i));
    const cplx phi = characteristic_function(position_distribution(evolve(start, src.coins(), seq, jump)), y);
    buf[0] = phi.real();
    buf[1] = phi.imag();
  });
  McComplex out;
  out.mean = cplx(s.mean[0], s.mean[1]);
  out.standard_error = std::sqrt((s.m2[0] + s.m2[1]) / (s.count - 1.0) / s.count);
  out.provenance = provenance(stream, samples);
  return out;
}

}  // namespace

int worker_count() { return detail::worker_count(); }

McDistribution mc_averaged_distribution(const FiniteCoinEnsemble& ensemble, const CVector& phi0,
                                        const JumpFunction& jump, int n, std::size_t samples,
                                        const SeededStream& stream) {
  return distribution_impl(ensemble, phi0, jump, n, samples, stream);
}

McDistribution mc_averaged_distribution(const MarkovCoinProcess& process, const CVector& phi0,
                                        const JumpFunction& jump, int n, std::size_t samples,
                                        const SeededStream& stream) {
  return distribution_impl(process, phi0, jump, n, samples, stream);
}

std::vector<McMomentRow> mc_moment_scaling(const FiniteCoinEnsemble& ensemble, const CVector& phi0,
                                           const JumpFunction& jump, const std::vector<int>& n_list,
                                           std::size_t samples, const SeededStream& stream) {
  return moments_impl(ensemble, phi0, jump, n_list, samples, stream);
}

std::vector<McMomentRow> mc_moment_scaling(const MarkovCoinProcess& process, const CVector& phi0,
                                           const JumpFunction& jump, const std::vector<int>& n_list,
                                           std::size_t samples, const SeededStream& stream) {
  return moments_impl(process, phi0, jump, n_list, samples, stream);
}

McComplex mc_char_function(const FiniteCoinEnsemble& ensemble, const CVector& phi0, const JumpFunction& jump,
                           const RVector& y, int n, std::size_t samples, const SeededStream& stream) {
  return char_impl(ensemble, phi0, jump, y, n, samples, stream);
}

McComplex mc_char_function(const MarkovCoinProcess& process, const CVector& phi0, const JumpFunction& jump,
                           const RVector& y, int n, std::size_t samples, const SeededStream& stream) {
  return char_impl(process, phi0, jump, y, n, samples, stream);
}

}  // namespace rtqw
