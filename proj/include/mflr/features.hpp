// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_FEATURES_HPP
#define MFLR_FEATURES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>
#include "mflr/numerics.hpp"

namespace mflr
{

using Exponents = std::vector<int>;

namespace detail
{

// All exponent vectors of length d summing to total, lexicographically
// descending (x1^total first).
inline void append_degree(int d, int total, Exponents &cur, std::vector<Exponents> &out)
{
  const auto pos = static_cast<int>(cur.size());
  if (pos == d - 1)
  {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int e = total; e >= 0; --e)
  {
    cur.push_back(e);
    append_degree(d, total - e, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline std::size_t binomial(std::size_t n, std::size_t r)
{
  if (r > n)
  {
    return 0;
  }
  r = std::min(r, n - r);
  std::size_t out = 1;
  for (std::size_t i = 1; i <= r; ++i)
  {
    out = out * (n - r + i) / i;
  }
  return out;
}

//
// Total-degree polynomial features over d inputs, in graded lexicographic
// order with the constant term first. An optional affine input scaling maps
// each coordinate to [0, 1] using stored bounds before the monomials are
// formed; without bounds the raw inputs are used.
//
class FeatureMap
{
public:
  FeatureMap() = default;

  FeatureMap(int input_dim, int degree) : input_dim_(input_dim), degree_(degree)
  {
    if (input_dim < 1 || degree < 0)
    {
      throw std::invalid_argument("FeatureMap: need input_dim >= 1 and degree >= 0");
    }
    exponents_.clear();
    for (int t = 0; t <= degree; ++t)
    {
      Exponents cur;
      detail::append_degree(input_dim, t, cur, exponents_);
    }
  }

  int input_dim() const { return input_dim_; }
  int degree() const { return degree_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(exponents_.size()); }
  const std::vector<Exponents> &exponents() const { return exponents_; }

  bool scaled() const { return lower_.size() > 0; }
  const Vector &lower() const { return lower_; }
  const Vector &upper() const { return upper_; }

  // Copy of this map with min-max input scaling from the columns of x.
  FeatureMap scaled_to(const Matrix &x) const
  {
    require_dims(x.rows() == input_dim_, "input scaling expects " + std::to_string(input_dim_) +
                                             " rows, got " + std::to_string(x.rows()));
    if (x.cols() < 1)
    {
      throw DataError(DataError::Code::Empty, "input scaling needs at least one sample");
    }
    return with_bounds(x.rowwise().minCoeff(), x.rowwise().maxCoeff());
  }

  FeatureMap with_bounds(const Vector &lower, const Vector &upper) const
  {
    require_dims(lower.size() == input_dim_ && upper.size() == input_dim_,
                 "feature bounds must have one entry per input");
    FeatureMap out = *this;
    out.lower_ = lower;
    out.upper_ = upper;
    return out;
  }

  // Design matrix: one row per column of x.
  Matrix evaluate(const Matrix &x) const
  {
    require_dims(x.rows() == input_dim_, "feature map expects " + std::to_string(input_dim_) +
                                             " input rows, got " + std::to_string(x.rows()));
    const Eigen::Index j_count = x.cols();
    Matrix phi(j_count, size());
    Matrix z = x;
    if (scaled())
    {
      for (Eigen::Index i = 0; i < input_dim_; ++i)
      {
        const double range = upper_(i) - lower_(i);
        const double inv = range > 0.0 ? 1.0 / range : 1.0;
        z.row(i) = (z.row(i).array() - lower_(i)) * inv;
      }
    }
    for (Eigen::Index j = 0; j < j_count; ++j)
    {
      for (Eigen::Index f = 0; f < size(); ++f)
      {
        const Exponents &e = exponents_[static_cast<std::size_t>(f)];
        double v = 1.0;
        for (int i = 0; i < input_dim_; ++i)
        {
          for (int r = 0; r < e[static_cast<std::size_t>(i)]; ++r)
          {
            v *= z(i, j);
          }
        }
        phi(j, f) = v;
      }
    }
    return phi;
  }

private:
  int input_dim_ = 1;
  int degree_ = 0;
  std::vector<Exponents> exponents_{Exponents{0}};
  Vector lower_;
  Vector upper_;
};

}  // namespace mflr

#endif  // MFLR_FEATURES_HPP
