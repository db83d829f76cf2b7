#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

namespace fgb {

// Root of g on [a, b] given g(a), g(b) of opposite sign (or one of them zero).
template <class F>
inline double bracket_root(F&& g, double a, double b, double ga, double gb, double xtol = 1e-15) {
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  std::uintmax_t iters = 200;
  auto tol = [xtol](double x, double y) { return std::fabs(x - y) <= xtol * std::max(1.0, std::fabs(x)); };
  auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
  double m = 0.5 * (r.first + r.second);
  return m;
}

// 5-point Gauss-Legendre on [-1, 1]
struct Gauss5 {
  std::array<double, 5> x, w;
  Gauss5() {
    using G = boost::math::quadrature::gauss<double, 5>;
    auto ab = G::abscissa();
    auto wt = G::weights();
    // boost stores the non-negative half
    x = {-ab[2], -ab[1], ab[0], ab[1], ab[2]};
    w = {wt[2], wt[1], wt[0], wt[1], wt[2]};
  }
};

inline const Gauss5& gauss5() {
  static const Gauss5 g;
  return g;
}

// integral of h over [a, b] by 5-point Gauss
template <class F>
inline double gauss_segment(F&& h, double a, double b) {
  const auto& g = gauss5();
  double m = 0.5 * (a + b), r = 0.5 * (b - a), s = 0;
  for (int k = 0; k < 5; ++k) s += g.w[k] * h(m + r * g.x[k]);
  return s * r;
}

// fixed-shape pairwise summation
inline double pairwise_sum(const double* x, size_t n) {
  if (n <= 8) {
    double s = 0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* e = std::getenv("FGB_THREADS")) {
    int n = std::atoi(e);
    if (n >= 1) return std::min<unsigned>(unsigned(n), 256u);
  }
  return hw;
}

// body(i) for i in [0, n); results must be written to per-index slots for determinism
inline void parallel_for(size_t n, const std::function<void(size_t)>& body) {
  unsigned workers = std::min<size_t>(worker_count(), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr err;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next++;
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lk(m);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace fgb
