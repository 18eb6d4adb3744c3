#pragma once

#include "rtqw/ensembles.hpp"

namespace rtqw {

// Worker cap: RTQW_THREADS if set, else hardware parallelism.
int worker_count();

// Samples are processed in fixed blocks of this size; per-block statistics
// are merged pairwise in block order, so results do not depend on threads.
inline constexpr std::size_t kMcBlock = 64;

struct McProvenance {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t samples = 0;
};

struct McDistribution {
  LatticeBox box;
  std::vector<double> mean;
  std::vector<double> standard_error;
  McProvenance provenance;
};

struct McMomentRow {
  int n = 0;
  RVector first;  // E <X - n rbar> / n
  RVector first_se;
  RMatrix second;  // E <(X - n rbar)(X - n rbar)^T> / n
  RMatrix second_se;
};

struct McComplex {
  cplx mean;
  double standard_error = 0.0;  // of the complex mean, sqrt(var re + var im) / sqrt N
  McProvenance provenance;
};

McDistribution mc_averaged_distribution(const FiniteCoinEnsemble& ensemble, const CVector& phi0,
                                        const JumpFunction& jump, int n, std::size_t samples,
                                        const SeededStream& stream);
McDistribution mc_averaged_distribution(const MarkovCoinProcess& process, const CVector& phi0,
                                        const JumpFunction& jump, int n, std::size_t samples,
                                        const SeededStream& stream);

// One walk per sample evolved to max(n_list), recorded at every listed n.
std::vector<McMomentRow> mc_moment_scaling(const FiniteCoinEnsemble& ensemble, const CVector& phi0,
                                           const JumpFunction& jump, const std::vector<int>& n_list,
                                           std::size_t samples, const SeededStream& stream);
std::vector<McMomentRow> mc_moment_scaling(const MarkovCoinProcess& process, const CVector& phi0,
                                           const JumpFunction& jump, const std::vector<int>& n_list,
                                           std::size_t samples, const SeededStream& stream);

McComplex mc_char_function(const FiniteCoinEnsemble& ensemble, const CVector& phi0, const JumpFunction& jump,
                           const RVector& y, int n, std::size_t samples, const SeededStream& stream);
McComplex mc_char_function(const MarkovCoinProcess& process, const CVector& phi0, const JumpFunction& jump,
                           const RVector& y, int n, std::size_t samples, const SeededStream& stream);

}  // namespace rtqw
