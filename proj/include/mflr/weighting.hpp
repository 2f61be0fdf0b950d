// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_WEIGHTING_HPP
#define MFLR_WEIGHTING_HPP

#include <limits>
#include <string>
#include <vector>
#include "mflr/numerics.hpp"

namespace mflr
{

enum class WeightKind
{
  Fixed,
  Proximity
};

struct WeightScheme
{
  WeightKind kind = WeightKind::Proximity;
  double w_syn = 0.1;
  double tau_percentile = 10.0;

  void validate() const
  {
    if (!(w_syn > 0.0 && w_syn < 1.0))
    {
      throw std::invalid_argument("synthetic weight must lie in (0, 1), got " +
                                  std::to_string(w_syn));
    }
    if (!(tau_percentile >= 0.0 && tau_percentile <= 100.0))
    {
      throw std::invalid_argument("tau percentile must lie in [0, 100], got " +
                                  std::to_string(tau_percentile));
    }
  }

  WeightScheme with_weight(double w) const
  {
    WeightScheme out = *this;
    out.w_syn = w;
    return out;
  }
};

struct WeightVector
{
  Vector values;  // N_HF ones followed by N_syn synthetic weights
  Eigen::Index n_hf = 0;
  double tau = 0.0;                  // proximity threshold, 0 for fixed weights
  std::vector<int> dropped_inputs;   // coordinates with zero range, ignored by the distance
  bool degenerate_bounds() const { return !dropped_inputs.empty(); }
};

// Nearest-HF Euclidean distance of every synthetic point, measured after
// min-max normalization with bounds from the pooled inputs. Coordinates with
// zero range are skipped and reported in `dropped`.
inline Vector nearest_hf_distances(const Matrix &x_hf, const Matrix &x_syn, std::vector<int> *dropped = nullptr)
{
  require_dims(x_hf.rows() == x_syn.rows(), "HF and synthetic inputs differ in dimension");
  const Eigen::Index d = x_hf.rows();
  Vector lo(d), hi(d);
  for (Eigen::Index i = 0; i < d; ++i)
  {
    lo(i) = std::min(x_hf.row(i).minCoeff(), x_syn.row(i).minCoeff());
    hi(i) = std::max(x_hf.row(i).maxCoeff(), x_syn.row(i).maxCoeff());
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < d; ++i)
  {
    if (hi(i) > lo(i))
    {
      kept.push_back(i);
    }
    else if (dropped != nullptr)
    {
      dropped->push_back(static_cast<int>(i));
    }
  }
  Vector rho(x_syn.cols());
  for (Eigen::Index j = 0; j < x_syn.cols(); ++j)
  {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index h = 0; h < x_hf.cols(); ++h)
    {
      double sq = 0.0;
      for (Eigen::Index i : kept)
      {
        const double diff = (x_syn(i, j) - x_hf(i, h)) / (hi(i) - lo(i));
        sq += diff * diff;
      }
      best = std::min(best, sq);
    }
    rho(j) = std::sqrt(best);
  }
  return rho;
}

//
// HF samples get weight 1. Fixed: every synthetic sample gets w_syn.
// Proximity: a synthetic sample keeps w_syn when its nearest-HF distance is
// at or above the tau_percentile-th percentile of all such distances, and is
// zeroed otherwise. With a positive percentile, a sample at zero distance
// (coincident with an HF sample) is always zeroed.
//
inline WeightVector build_weights(const WeightScheme &scheme, const Matrix &x_hf, const Matrix &x_syn)
{
  scheme.validate();
  if (x_hf.cols() < 1 || x_syn.cols() < 1)
  {
    throw DataError(DataError::Code::Empty, "weighting needs at least one HF and one synthetic sample");
  }
  WeightVector out;
  out.n_hf = x_hf.cols();
  out.values.resize(x_hf.cols() + x_syn.cols());
  out.values.head(x_hf.cols()).setOnes();
  auto syn = out.values.tail(x_syn.cols());
  if (scheme.kind == WeightKind::Fixed)
  {
    syn.setConstant(scheme.w_syn);
    return out;
  }
  const Vector rho = nearest_hf_distances(x_hf, x_syn, &out.dropped_inputs);
  out.tau = percentile(std::vector<double>(rho.data(), rho.data() + rho.size()), scheme.tau_percentile);
  for (Eigen::Index j = 0; j < rho.size(); ++j)
  {
    const bool coincident = scheme.tau_percentile > 0.0 && rho(j) == 0.0;
    syn(j) = (rho(j) >= out.tau && !coincident) ? scheme.w_syn : 0.0;
  }
  return out;
}

}  // namespace mflr

#endif  // MFLR_WEIGHTING_HPP
