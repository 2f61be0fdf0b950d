// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_PCA_HPP
#define MFLR_PCA_HPP

#include <cstdint>
#include <cstring>
#include <limits>
#include <string>
#include "mflr/numerics.hpp"

namespace mflr
{

namespace detail
{

inline std::uint64_t fnv1a(const void *data, std::size_t n, std::uint64_t h = 1469598103934665603ULL)
{
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < n; ++i)
  {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fingerprint(const Matrix &a, std::uint64_t h = 1469598103934665603ULL)
{
  const std::int64_t dims[2] = {a.rows(), a.cols()};
  h = fnv1a(dims, sizeof(dims), h);
  return fnv1a(a.data(), sizeof(double) * static_cast<std::size_t>(a.size()), h);
}

}  // namespace detail

//
// Truncated principal-component basis of a set of output snapshots: the
// leading k left singular vectors of the mean-centered snapshot matrix.
// k = 0 denotes a mean-only model.
//
struct ReducedBasis
{
  Matrix basis;            // m x k, orthonormal columns
  Vector mean;             // m
  Vector singular_values;  // all min(m, N) values of the centered data
  double energy_tolerance = 1.0;

  Eigen::Index k() const { return basis.cols(); }
  Eigen::Index output_dim() const { return mean.size(); }

  std::uint64_t id() const
  {
    return detail::fingerprint(Matrix(mean), detail::fingerprint(basis));
  }
};

struct ReducedStates
{
  Matrix states;  // k x J
  std::uint64_t basis_id = 0;
};

// Smallest k whose cumulative energy fraction strictly exceeds epsilon. If
// no prefix exceeds it (epsilon = 1), every computed value is retained.
inline Eigen::Index truncation_rank(const Vector &singular_values, double epsilon)
{
  const double total = singular_values.squaredNorm();
  if (total <= 0.0)
  {
    return 0;
  }
  double cumulative = 0.0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i)
  {
    cumulative += singular_values(i) * singular_values(i);
    if (cumulative / total > epsilon)
    {
      return i + 1;
    }
  }
  return singular_values.size();
}

inline ReducedBasis fit_basis(const Matrix &y, double epsilon)
{
  if (y.cols() < 1 || y.rows() < 1)
  {
    throw DataError(DataError::Code::Empty, "fit_basis needs at least one sample");
  }
  if (!(epsilon > 0.0 && epsilon <= 1.0))
  {
    throw std::invalid_argument("fit_basis: energy tolerance must lie in (0, 1], got " +
                                std::to_string(epsilon));
  }
  require_finite(y, "fit_basis snapshots");

  ReducedBasis out;
  out.energy_tolerance = epsilon;
  out.mean = y.rowwise().mean();
  const Matrix centered = y.colwise() - out.mean;
  const ThinSvd svd = thin_svd(centered);
  out.singular_values = svd.s;

  // Constant data: only round-off survives centering.
  const double scale = y.cwiseAbs().maxCoeff();
  const double floor = static_cast<double>(y.rows()) * static_cast<double>(y.cols()) *
                       std::numeric_limits<double>::epsilon() * scale;
  const bool degenerate = svd.s.size() == 0 || svd.s(0) <= floor;

  const Eigen::Index k = degenerate ? 0 : truncation_rank(svd.s, epsilon);
  out.basis = svd.U.leftCols(k);
  return out;
}

inline ReducedStates project(const ReducedBasis &b, const Matrix &y)
{
  require_dims(y.rows() == b.output_dim(),
               "project expects " + std::to_string(b.output_dim()) + " output rows, got " +
                   std::to_string(y.rows()));
  ReducedStates out;
  out.states = b.basis.transpose() * (y.colwise() - b.mean);
  out.basis_id = b.id();
  return out;
}

inline Matrix reconstruct(const ReducedBasis &b, const Matrix &states)
{
  require_dims(states.rows() == b.k(), "reconstruct expects " + std::to_string(b.k()) +
                                           " reduced coordinates, got " +
                                           std::to_string(states.rows()));
  Matrix out = b.basis * states;
  out.colwise() += b.mean;
  return out;
}

inline Matrix reconstruct(const ReducedBasis &b, const ReducedStates &c)
{
  if (c.basis_id != b.id())
  {
    throw std::invalid_argument("reconstruct: reduced states were produced by a different basis");
  }
  return reconstruct(b, c.states);
}

}  // namespace mflr

#endif  // MFLR_PCA_HPP
