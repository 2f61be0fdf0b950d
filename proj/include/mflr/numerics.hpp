// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_NUMERICS_HPP
#define MFLR_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <Eigen/SVD>
#include "mflr/errors.hpp"

namespace mflr
{

// Storage order is internal (Eigen column-major); external interfaces exchange
// (rows, cols, row-major entries) through from_row_major / to_row_major.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Matrix &a)
{
  return a.allFinite();
}

inline void require_finite(const Matrix &a, const std::string &what)
{
  if (!a.allFinite())
  {
    throw DataError(DataError::Code::NonFinite, "non-finite value in " + what);
  }
}

inline Matrix from_row_major(std::size_t rows, std::size_t cols, std::span<const double> entries)
{
  if (rows * cols != entries.size())
  {
    throw DataError(DataError::Code::DimensionMismatch,
                    "dimension mismatch: " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " matrix needs " + std::to_string(rows * cols) + " entries, got " +
                        std::to_string(entries.size()));
  }
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i)
  {
    for (std::size_t j = 0; j < cols; ++j)
    {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entries[i * cols + j];
    }
  }
  require_finite(a, "matrix entries");
  return a;
}

inline std::vector<double> to_row_major(const Matrix &a)
{
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(a.size()));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
      out.push_back(a(i, j));
    }
  }
  return out;
}

struct ThinSvd
{
  Matrix U;  // m x r
  Vector s;  // r, non-increasing
  Matrix V;  // n x r
};

// Thin SVD with r = min(m, n). Rank-deficient input is fine.
inline ThinSvd thin_svd(const Matrix &a)
{
  require_finite(a, "thin_svd input");
  const Eigen::Index r = std::min(a.rows(), a.cols());
  ThinSvd out;
  if (r == 0)
  {
    out.U.resize(a.rows(), 0);
    out.s.resize(0);
    out.V.resize(a.cols(), 0);
    return out;
  }
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
  {
    throw NumericalError("thin_svd: decomposition did not converge");
  }
  out.U = svd.matrixU();
  out.s = svd.singularValues();
  out.V = svd.matrixV();
  return out;
}

// Minimum-norm minimizer of ||A X - B||_F. Singular values below
// max(n, p) * eps * s_1 are treated as zero.
inline Matrix solve_least_squares(const Matrix &a, const Matrix &b)
{
  require_dims(a.rows() == b.rows(), "least-squares system has " + std::to_string(a.rows()) +
                                         " rows but right-hand side has " +
                                         std::to_string(b.rows()));
  require_dims(a.rows() >= 1 && a.cols() >= 1, "least-squares system must be non-empty");
  require_finite(b, "least-squares right-hand side");
  const ThinSvd svd = thin_svd(a);
  Matrix x = Matrix::Zero(a.cols(), b.cols());
  if (svd.s.size() == 0 || svd.s(0) == 0.0)
  {
    return x;
  }
  const double cutoff = static_cast<double>(std::max(a.rows(), a.cols())) *
                        std::numeric_limits<double>::epsilon() * svd.s(0);
  Eigen::Index rank = 0;
  while (rank < svd.s.size() && svd.s(rank) > cutoff)
  {
    ++rank;
  }
  const Matrix utb = svd.U.leftCols(rank).transpose() * b;
  const Vector inv_s = svd.s.head(rank).cwiseInverse();
  x.noalias() = svd.V.leftCols(rank) * (inv_s.asDiagonal() * utb);
  return x;
}

// Linear-interpolation percentile between closest ranks (inclusive
// endpoints): position q/100 * (n - 1) in the sorted sample.
inline double percentile(std::vector<double> values, double q)
{
  if (values.empty())
  {
    throw DataError(DataError::Code::Empty, "percentile of an empty sample");
  }
  q = std::clamp(q, 0.0, 100.0);
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace mflr

#endif  // MFLR_NUMERICS_HPP
