#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "text.hpp"

namespace topnews {

/// Row-major dense matrix.
class dense_matrix {
 public:
  dense_matrix() = default;
  dense_matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  static dense_matrix identity(std::size_t n) {
    dense_matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const dense_matrix&, const dense_matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

inline double frobenius_norm(const dense_matrix& m) {
  double sum = 0.0;
  for (double v : m.values()) sum += v * v;
  return std::sqrt(sum);
}

/// Cosine of two TF-IDF vectors; 0 when either vector is zero.
inline double cosine(const term_vector& a, const term_vector& b) {
  if (a.dimension != b.dimension)
    throw error(errc::dimension_mismatch, "cosine of vectors with dimensions " + std::to_string(a.dimension) +
                                              " and " + std::to_string(b.dimension));
  if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
  double dot = 0.0;
  auto i = a.entries.begin();
  auto j = b.entries.begin();
  while (i != a.entries.end() && j != b.entries.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      dot += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return std::min(1.0, dot / (a.norm * b.norm));
}

/// Pairwise cosine matrix: symmetric, unit diagonal except 0 for zero vectors.
struct similarity_matrix {
  dense_matrix values;
  std::size_t order() const { return values.rows(); }
};

inline similarity_matrix pairwise_matrix(std::span<const term_vector> vectors) {
  const auto n = vectors.size();
  if (n < 2) throw error(errc::corpus_too_small, "similarity matrix needs at least 2 vectors");
  similarity_matrix d{dense_matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    d.values(i, i) = vectors[i].norm > 0.0 ? 1.0 : 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = cosine(vectors[i], vectors[j]);
      d.values(i, j) = c;
      d.values(j, i) = c;
    }
  }
  return d;
}

struct collection_score {
  double s = 0.0;
  std::size_t n = 0;
  double masked_norm = 0.0;  // ||N o D||_F
  double mask_norm = 0.0;    // ||N o O||_F
};

/// Tolerance for entries of D slightly outside [0, 1] from rounding.
inline constexpr double similarity_range_tolerance = 1e-9;

/// s = ||N o D||_F / ||N o O||_F where N is the off-diagonal mask and "o"
/// the elementwise product. `pair_mask`, when given, is an additional n*n
/// row-major mask (true keeps the pair) used to exclude further pairs.
inline collection_score score_collection(const similarity_matrix& d,
                                         std::optional<std::span<const bool>> pair_mask = {}) {
  const auto n = d.order();
  if (n < 2 || d.values.cols() != n)
    throw error(errc::corpus_too_small, "collection score needs a square matrix of order >= 2");
  if (pair_mask && pair_mask->size() != n * n)
    throw error(errc::dimension_mismatch, "pair mask size does not match matrix order");
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = d.values(i, j);
      if (!(v >= -similarity_range_tolerance && v <= 1.0 + similarity_range_tolerance))
        throw error(errc::value_out_of_range, "similarity entry (" + std::to_string(i) + "," +
                                                  std::to_string(j) + ") = " + std::to_string(v) +
                                                  " outside [0, 1]");
      if (i == j || (pair_mask && !(*pair_mask)[i * n + j])) continue;
      sum += v * v;
      ++pairs;
    }
  }
  if (pairs == 0) throw error(errc::corpus_too_small, "mask leaves no document pairs");
  collection_score out;
  out.n = n;
  out.masked_norm = std::sqrt(sum);
  out.mask_norm = std::sqrt(static_cast<double>(pairs));
  // One square root of the ratio keeps s == x exactly for n = 2.
  out.s = std::clamp(std::sqrt(sum / static_cast<double>(pairs)), 0.0, 1.0);
  return out;
}

/// Row-major JSON dump at full precision, for debugging.
inline void write_matrix_json(std::ostream& os, const dense_matrix& m) {
  char buf[32];
  os << "{\"rows\":" << m.rows() << ",\"cols\":" << m.cols() << ",\"values\":[";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << (r ? ",\n[" : "\n[");
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      os << (c ? "," : "") << buf;
    }
    os << "]";
  }
  os << "]}\n";
}

}  // namespace topnews
