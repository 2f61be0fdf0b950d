// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_METRICS_HPP
#define MFLR_METRICS_HPP

#include <string>
#include <vector>
#include "mflr/numerics.hpp"

namespace mflr
{

// Per-sample relative L2 errors ||y_i - y_hat_i|| / ||y_i||.
inline std::vector<double> relative_errors(const Matrix &y_true, const Matrix &y_pred)
{
  require_dims(y_true.rows() == y_pred.rows() && y_true.cols() == y_pred.cols(),
               "true outputs are " + std::to_string(y_true.rows()) + "x" + std::to_string(y_true.cols()) +
                   ", predictions are " + std::to_string(y_pred.rows()) + "x" +
                   std::to_string(y_pred.cols()));
  if (y_true.cols() < 1)
  {
    throw DataError(DataError::Code::Empty, "accuracy needs at least one test sample");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(y_true.cols()));
  for (Eigen::Index i = 0; i < y_true.cols(); ++i)
  {
    const double denom = y_true.col(i).norm();
    if (denom == 0.0)
    {
      throw DataError(DataError::Code::ZeroNorm, "zero-norm true output in test column " + std::to_string(i));
    }
    out.push_back((y_true.col(i) - y_pred.col(i)).norm() / denom);
  }
  return out;
}

// 1 - mean relative L2 error.
inline double normalized_l2_accuracy(const Matrix &y_true, const Matrix &y_pred)
{
  const std::vector<double> e = relative_errors(y_true, y_pred);
  double sum = 0.0;
  for (double v : e)
  {
    sum += v;
  }
  return 1.0 - sum / static_cast<double>(e.size());
}

struct AccuracyReport
{
  std::vector<double> per_repetition;
  double median = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  int n_hf = 0;
  int n_lf = 0;
  double equivalent_cost = 0.0;  // HF-evaluation units
};

inline double equivalent_cost(int n_hf, int n_lf, double cost_ratio)
{
  return static_cast<double>(n_hf) + static_cast<double>(n_lf) * cost_ratio;
}

inline AccuracyReport aggregate(std::vector<double> reps, int n_hf = 0, int n_lf = 0, double cost_ratio = 0.0)
{
  if (reps.empty())
  {
    throw DataError(DataError::Code::Empty, "cannot aggregate an empty list of repetitions");
  }
  AccuracyReport r;
  r.median = percentile(reps, 50.0);
  r.p25 = percentile(reps, 25.0);
  r.p75 = percentile(reps, 75.0);
  r.per_repetition = std::move(reps);
  r.n_hf = n_hf;
  r.n_lf = n_lf;
  r.equivalent_cost = equivalent_cost(n_hf, n_lf, cost_ratio);
  return r;
}

}  // namespace mflr

#endif  // MFLR_METRICS_HPP
