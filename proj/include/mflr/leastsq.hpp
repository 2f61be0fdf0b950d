// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_LEASTSQ_HPP
#define MFLR_LEASTSQ_HPP

#include <cmath>
#include <string>
#include "mflr/features.hpp"
#include "mflr/numerics.hpp"

namespace mflr
{

// Reduced-space regression f(x) = Phi(x)^T beta with beta of size p x k.
struct LinearModel
{
  FeatureMap feature_map;
  Matrix coefficients;  // p x k
  bool underdetermined = false;  // fewer effective samples than features at fit time

  Eigen::Index output_dim() const { return coefficients.cols(); }

  // Reduced states at the columns of x, k x J.
  Matrix predict(const Matrix &x) const
  {
    return (feature_map.evaluate(x) * coefficients).transpose();
  }
};

namespace detail
{

inline void check_training_shapes(const FeatureMap &fm, const Matrix &x, const Matrix &c)
{
  require_dims(x.rows() == fm.input_dim(), "training inputs have " + std::to_string(x.rows()) +
                                               " rows, feature map expects " +
                                               std::to_string(fm.input_dim()));
  require_dims(x.cols() == c.cols(), "training inputs have " + std::to_string(x.cols()) +
                                         " samples but targets have " + std::to_string(c.cols()));
  if (x.cols() < 1)
  {
    throw DataError(DataError::Code::Empty, "least-squares fit needs at least one sample");
  }
  require_finite(x, "training inputs");
  require_finite(c, "training targets");
}

}  // namespace detail

// Ordinary least squares on (x, c); minimum-norm under rank deficiency.
inline LinearModel fit_ols(const FeatureMap &fm, const Matrix &x, const Matrix &c)
{
  detail::check_training_shapes(fm, x, c);
  LinearModel out;
  out.feature_map = fm;
  const Matrix phi = fm.evaluate(x);
  out.coefficients = solve_least_squares(phi, c.transpose());
  out.underdetermined = x.cols() < fm.size();
  return out;
}

// Weighted least squares: rows of the design matrix and targets are scaled
// by sqrt(w_i) and handed to the orthogonal solver.
inline LinearModel fit_wls(const FeatureMap &fm, const Matrix &x, const Matrix &c, const Vector &w)
{
  detail::check_training_shapes(fm, x, c);
  require_dims(w.size() == x.cols(), "weight vector has " + std::to_string(w.size()) +
                                         " entries for " + std::to_string(x.cols()) + " samples");
  if (!w.allFinite() || (w.array() < 0.0).any())
  {
    throw std::invalid_argument("fit_wls: weights must be finite and non-negative");
  }
  if (!(w.array() > 0.0).any())
  {
    throw DataError(DataError::Code::NoEffectiveData, "no effective training data");
  }
  const Vector root = w.cwiseSqrt();
  const Matrix phi = root.asDiagonal() * fm.evaluate(x);
  const Matrix rhs = root.asDiagonal() * c.transpose();
  LinearModel out;
  out.feature_map = fm;
  out.coefficients = solve_least_squares(phi, rhs);
  out.underdetermined = (w.array() > 0.0).count() < fm.size();
  return out;
}

}  // namespace mflr

#endif  // MFLR_LEASTSQ_HPP
