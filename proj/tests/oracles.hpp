#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's numeric kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qrc/network.hpp"

namespace oracle {

// Row-major dense matrix.
struct Dense {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Dense(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline Dense from_edges(std::size_t rows, std::size_t cols,
                        const std::vector<qrc::WeightedEdge>& edges) {
  Dense m(rows, cols);
  for (const auto& e : edges) m(e.left, e.right) = e.weight;
  return m;
}

inline std::vector<double> multiply(const Dense& m, const std::vector<double>& x) {
  std::vector<double> y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) y[i] += m(i, j) * x[j];
  }
  return y;
}

inline std::vector<double> multiply_transposed(const Dense& m, const std::vector<double>& x) {
  std::vector<double> y(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += m(i, j) * x[i];
  }
  return y;
}

// M^T M.
inline Dense gram(const Dense& m) {
  Dense g(m.cols, m.cols);
  for (std::size_t p = 0; p < m.cols; ++p) {
    for (std::size_t q = 0; q < m.cols; ++q) {
      double s = 0;
      for (std::size_t i = 0; i < m.rows; ++i) s += m(i, p) * m(i, q);
      g(p, q) = s;
    }
  }
  return g;
}

inline double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline void normalize(std::vector<double>& v) {
  const double n = norm(v);
  for (double& x : v) x /= n;
}

inline double cosine(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s / (norm(x) * norm(y));
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0;
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

// Principal eigenvector of a symmetric nonnegative matrix by power iteration
// on (S + I), which shares eigenvectors with S and removes the -lambda_max
// period-2 trap of bipartite spectra.
inline std::vector<double> principal_eigenvector(const Dense& s, double tol = 1e-15,
                                                 std::size_t max_iter = 1000000) {
  std::vector<double> v(s.cols, 1.0);
  normalize(v);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<double> w = multiply(s, v);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += v[k];
    normalize(w);
    const double change = max_abs_diff(w, v);
    v = std::move(w);
    if (change < tol) break;
  }
  return v;
}

// Dense form of one weighted, degree-normalized, shifted aggregation.
inline std::vector<double> dense_aggregate(const oracle::Dense& m, const std::vector<double>& x,
                                    bool toward_rows, double theta, double shift) {
  const std::size_t n_out = toward_rows ? m.rows : m.cols;
  const std::size_t n_in = toward_rows ? m.cols : m.rows;
  std::vector<double> out(n_out, 0.0);
  for (std::size_t t = 0; t < n_out; ++t) {
    double s = 0;
    std::size_t deg = 0;
    for (std::size_t k = 0; k < n_in; ++k) {
      const double w = toward_rows ? m(t, k) : m(k, t);
      if (w == 0.0) continue;
      ++deg;
      s += w * (x[k] - shift);
    }
    out[t] = deg ? s / std::pow(static_cast<double>(deg), theta) : 0.0;
  }
  return out;
}

// Iterates x <- normalize(f(x)) from `start` until the max change is below tol.
inline std::vector<double> fixed_point(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                       std::vector<double> start, double tol = 1e-14,
                                       std::size_t max_iter = 1000000) {
  normalize(start);
  for (std::size_t it = 0; it < max_iter; ++it) {
    std::vector<double> next = f(start);
    normalize(next);
    const double change = max_abs_diff(next, start);
    start = std::move(next);
    if (change < tol) break;
  }
  return start;
}

// Random connected bipartite edge list with the given side sizes: a random
// spanning tree plus extra edges of density `extra`.
inline std::vector<qrc::WeightedEdge> random_connected(std::size_t n_left, std::size_t n_right,
                                                       double extra, std::mt19937_64& rng,
                                                       bool random_weights) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::vector<bool>> has(n_left, std::vector<bool>(n_right, false));
  std::vector<qrc::WeightedEdge> edges;
  auto weight = [&] { return random_weights ? 0.05 + u(rng) : 1.0; };
  auto add = [&](std::size_t l, std::size_t r) {
    if (has[l][r]) return;
    has[l][r] = true;
    edges.push_back({static_cast<qrc::Index>(l), static_cast<qrc::Index>(r), weight()});
  };
  // Nodes 0..n_left-1 are left, n_left.. are right; attach each new node to an
  // already placed node of the other side.
  std::vector<std::size_t> placed_left, placed_right;
  placed_left.push_back(0);
  std::vector<std::size_t> order;
  for (std::size_t k = 1; k < n_left; ++k) order.push_back(k);
  for (std::size_t k = 0; k < n_right; ++k) order.push_back(n_left + k);
  std::shuffle(order.begin(), order.end(), rng);
  // Place one right node first so every left node has a partner.
  const auto first_right = std::find_if(order.begin(), order.end(),
                                        [&](std::size_t v) { return v >= n_left; });
  std::rotate(order.begin(), first_right, first_right + 1);
  for (std::size_t v : order) {
    if (v < n_left) {
      std::uniform_int_distribution<std::size_t> pick(0, placed_right.size() - 1);
      add(v, placed_right[pick(rng)]);
      placed_left.push_back(v);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, placed_left.size() - 1);
      add(placed_left[pick(rng)], v - n_left);
      placed_right.push_back(v - n_left);
    }
  }
  for (std::size_t l = 0; l < n_left; ++l) {
    for (std::size_t r = 0; r < n_right; ++r) {
      if (u(rng) < extra) add(l, r);
    }
  }
  return edges;
}

struct MwDistribution {
  double u_observed = 0;
  double p_two_sided = 0;
  double p_less = 0;
  double p_greater = 0;
};

// Mann-Whitney by enumerating every assignment of the pooled values to the
// first sample, with U counted pairwise (a > b scores 1, ties 1/2).
inline MwDistribution mann_whitney_enumerate(const std::vector<double>& a,
                                             const std::vector<double>& b) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size();
  const std::size_t na = a.size();
  auto u_of = [&](const std::vector<bool>& in_a) {
    double u = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_a[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_a[j]) continue;
        if (pooled[i] > pooled[j]) u += 1.0;
        else if (pooled[i] == pooled[j]) u += 0.5;
      }
    }
    return u;
  };
  std::vector<bool> observed(n, false);
  for (std::size_t i = 0; i < na; ++i) observed[i] = true;
  MwDistribution out;
  out.u_observed = u_of(observed);
  const double center = static_cast<double>(na * b.size()) / 2.0;
  const double dev = std::abs(out.u_observed - center);

  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(na), true);
  std::sort(mask.begin(), mask.end());
  double total = 0, two = 0, less = 0, greater = 0;
  do {
    const double u = u_of(mask);
    total += 1;
    if (std::abs(u - center) >= dev) two += 1;
    if (u <= out.u_observed) less += 1;
    if (u >= out.u_observed) greater += 1;
  } while (std::next_permutation(mask.begin(), mask.end()));
  out.p_two_sided = two / total;
  out.p_less = less / total;
  out.p_greater = greater / total;
  return out;
}

}  // namespace oracle
