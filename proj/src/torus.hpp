#pragma once

#include <algorithm>
#include <functional>

#include "rtqw/walk.hpp"

namespace rtqw::detail {

// Calls f on every point of the uniform n^d grid of [0, 2pi)^d, in
// lexicographic order (last coordinate fastest).
inline void for_each_torus_point(int d, int n, const std::function<void(const RVector&)>& f) {
  std::vector<int> idx(d, 0);
  RVector v = RVector::Zero(d);
  const double h = 2.0 * kPi / n;
  while (true) {
    for (int j = 0; j < d; ++j) v[j] = h * idx[j];
    f(v);
    int pos = d - 1;
    while (pos >= 0 && idx[pos] == n - 1) idx[pos--] = 0;
    if (pos < 0) break;
    ++idx[pos];
  }
}

// Trapezoid (uniform) rule for the normalized torus average of g.
inline cplx torus_average(int d, int n, const std::function<cplx(const RVector&)>& g) {
  cplx acc(0.0, 0.0);
  double count = 0.0;
  for_each_torus_point(d, n, [&](const RVector& v) {
    acc += g(v);
    count += 1.0;
  });
  return acc / count;
}

// Smallest uniform grid on which the n-step averaged characteristic function
// is integrated exactly: its v-Fourier modes are bounded by n * span plus the
// initial-kernel extent.
inline int exact_torus_grid(const JumpFunction& jump, int n, int kernel_extent) {
  int span = 0;
  for (int j = 0; j < jump.dim(); ++j) span = std::max(span, jump.max_component(j) - jump.min_component(j));
  return 2 * (n * span + kernel_extent) + 1;
}

// Recovers a distribution supported in `box` from its characteristic
// function, sampled on a grid matched to the box extents.
inline LatticeDistribution invert_characteristic(const LatticeBox& box, const std::function<cplx(const RVector&)>& phi) {
  const int d = box.dim();
  std::vector<int> len(d);
  for (int j = 0; j < d; ++j) len[j] = box.hi()[j] - box.lo()[j] + 1;
  std::vector<cplx> acc(box.size(), cplx(0.0, 0.0));
  std::vector<int> m(d, 0);
  RVector y(d);
  double count = 0.0;
  while (true) {
    for (int j = 0; j < d; ++j) y[j] = 2.0 * kPi * m[j] / len[j];
    const cplx value = phi(y);
    count += 1.0;
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Site k = box.site(i);
      double a = 0.0;
      for (int j = 0; j < d; ++j) a -= y[j] * k[j];
      acc[i] += value * std::polar(1.0, a);
    }
    int pos = d - 1;
    while (pos >= 0 && m[pos] == len[pos] - 1) m[pos--] = 0;
    if (pos < 0) break;
    ++m[pos];
  }
  std::vector<double> w(box.size());
  for (std::size_t i = 0; i < box.size(); ++i) w[i] = acc[i].real() / count;
  return LatticeDistribution(box, std::move(w));
}

}  // namespace rtqw::detail
