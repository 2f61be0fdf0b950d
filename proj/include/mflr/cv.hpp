// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_CV_HPP
#define MFLR_CV_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>
#include "mflr/mf.hpp"

namespace mflr
{

struct CVEvaluation
{
  double w_syn;
  double objective;
};

struct CVResult
{
  double w_syn_star = 0.1;
  double objective_value = 0.0;
  double init = 0.1;
  std::vector<CVEvaluation> trace;
};

inline double logistic(double u)
{
  return 1.0 / (1.0 + std::exp(-u));
}

inline double logit(double w)
{
  return std::log(w / (1.0 - w));
}

//
// Leave-one-out problem over the HF samples of a data-augmentation fit. Each
// fold refits the HF basis, the input scaling and the proximity threshold on
// the N_HF - 1 remaining samples; those pieces do not depend on w_syn and are
// built once. Evaluating the objective then only repeats the weighted solves.
//
class LoocvProblem
{
public:
  LoocvProblem(const Dataset &hf, const SyntheticData &synth, const WeightScheme &scheme, int degree,
               double epsilon)
  {
    hf.validate();
    if (hf.size() < 2)
    {
      throw DataError(DataError::Code::Empty, "LOOCV needs at least 2 HF samples, got " +
                                                  std::to_string(hf.size()));
    }
    require_dims(synth.inputs.rows() == hf.input_dim() && synth.outputs.rows() == hf.output_dim(),
                 "synthetic data differ from HF data in input or output dimension");
    for (Eigen::Index i = 0; i < hf.size(); ++i)
    {
      if (hf.outputs.col(i).norm() == 0.0)
      {
        throw DataError(DataError::Code::ZeroNorm, "zero-norm validation target");
      }
    }

    // Only the synthetic mask matters here; the weight value is substituted later.
    const WeightScheme unit = scheme.with_weight(0.5);
    folds_.reserve(static_cast<std::size_t>(hf.size()));
    for (Eigen::Index i = 0; i < hf.size(); ++i)
    {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index j = 0; j < hf.size(); ++j)
      {
        if (j != i)
        {
          keep.push_back(j);
        }
      }
      const Dataset train = hf.subset(keep);
      Fold f;
      f.basis = fit_basis(train.outputs, epsilon);
      f.x_mf = detail::hcat(train.inputs, synth.inputs);
      f.c_mf = project(f.basis, detail::hcat(train.outputs, synth.outputs)).states;
      f.feature_map = FeatureMap(static_cast<int>(hf.input_dim()), degree).scaled_to(f.x_mf);
      const WeightVector w = build_weights(unit, train.inputs, synth.inputs);
      f.synthetic_mask = (w.values.tail(synth.size()).array() > 0.0).cast<double>();
      f.n_hf = train.size();
      f.x_held = hf.inputs.col(i);
      f.y_held = hf.outputs.col(i);
      folds_.push_back(std::move(f));
    }
  }

  Eigen::Index n_folds() const { return static_cast<Eigen::Index>(folds_.size()); }

  // Relative validation error of each held-out HF sample.
  std::vector<double> fold_errors(double w_syn) const
  {
    if (!(w_syn > 0.0 && w_syn < 1.0))
    {
      throw std::invalid_argument("LOOCV weight must lie in (0, 1), got " + std::to_string(w_syn));
    }
    std::vector<double> errors;
    errors.reserve(folds_.size());
    for (const Fold &f : folds_)
    {
      Vector w(f.x_mf.cols());
      w.head(f.n_hf).setOnes();
      w.tail(f.synthetic_mask.size()) = f.synthetic_mask * w_syn;
      const LinearModel model = fit_wls(f.feature_map, f.x_mf, f.c_mf, w);
      const Matrix y_hat = reconstruct(f.basis, model.predict(f.x_held));
      errors.push_back((f.y_held - y_hat).norm() / f.y_held.norm());
    }
    return errors;
  }

  double objective(double w_syn) const
  {
    const std::vector<double> e = fold_errors(w_syn);
    return std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
  }

private:
  struct Fold
  {
    ReducedBasis basis;
    Matrix x_mf;
    Matrix c_mf;
    FeatureMap feature_map;
    Vector synthetic_mask;
    Eigen::Index n_hf = 0;
    Matrix x_held;
    Vector y_held;
  };
  std::vector<Fold> folds_;
};

// Mean relative LOOCV error over the HF samples at the given synthetic weight.
inline double loocv_objective(const Dataset &hf, const SyntheticData &synth, const WeightScheme &scheme,
                              int degree, double epsilon, double w_syn)
{
  return LoocvProblem(hf, synth, scheme, degree, epsilon).objective(w_syn);
}

struct BfgsOptions
{
  double fd_step = 1e-4;  // central difference step in logit space
  int max_iterations = 50;
  double gradient_tolerance = 1e-8;
  double bound = 30.0;  // |logit(w)| cap, keeps w strictly inside (0, 1)
  double max_step = 2.0;  // longest trial step in logit space; the logistic flattens out quickly
};

//
// Quasi-Newton minimization of an objective over w in (0, 1), carried out on
// u = logit(w) with central finite-difference gradients and an Armijo
// backtracking line search. Returns the best point evaluated; a flat
// objective returns the initial point.
//
template <typename Objective>
CVResult minimize_weight(Objective &&objective, double init, const BfgsOptions &opt = {})
{
  if (!(init > 0.0 && init < 1.0))
  {
    throw std::invalid_argument("initial weight must lie in (0, 1), got " + std::to_string(init));
  }
  CVResult out;
  out.init = init;
  auto eval = [&](double u) {
    u = std::clamp(u, -opt.bound, opt.bound);
    const double w = logistic(u);
    const double f = objective(w);
    out.trace.push_back({w, f});
    return f;
  };
  auto gradient = [&](double u) {
    return (eval(u + opt.fd_step) - eval(u - opt.fd_step)) / (2.0 * opt.fd_step);
  };

  double u = std::clamp(logit(init), -opt.bound, opt.bound);
  double f = eval(u);
  const double f_init = f;
  double g = gradient(u);
  double h_inv = 1.0 / std::max(std::abs(g), 1e-12);  // first step has unit length in u

  for (int it = 0; it < opt.max_iterations; ++it)
  {
    if (!std::isfinite(g) || std::abs(g) < opt.gradient_tolerance)
    {
      break;
    }
    const double dir = std::clamp(-h_inv * g, -opt.max_step, opt.max_step);
    double step = 1.0;
    double u_new = u;
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls)
    {
      u_new = std::clamp(u + step * dir, -opt.bound, opt.bound);
      f_new = eval(u_new);
      if (f_new <= f + 1e-4 * (u_new - u) * g)
      {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted || u_new == u)
    {
      break;
    }
    const double g_new = gradient(u_new);
    const double s = u_new - u;
    const double y = g_new - g;
    const double f_prev = f;
    u = u_new;
    f = f_new;
    g = g_new;
    if (s * y > 1e-16)
    {
      h_inv = s / y;
    }
    else
    {
      h_inv = std::abs(s) / std::max(std::abs(g), 1e-12);
    }
    if (std::abs(s) < 1e-8 || std::abs(f_prev - f) <= 1e-12 * std::max(1.0, std::abs(f)))
    {
      break;
    }
  }

  double lo = f_init;
  double hi = f_init;
  for (const CVEvaluation &e : out.trace)
  {
    lo = std::min(lo, e.objective);
    hi = std::max(hi, e.objective);
  }
  if (hi - lo <= 1e-12)
  {
    out.w_syn_star = init;
    out.objective_value = f_init;
    return out;
  }
  out.w_syn_star = init;
  out.objective_value = f_init;
  for (const CVEvaluation &e : out.trace)
  {
    if (e.objective < out.objective_value)
    {
      out.w_syn_star = e.w_syn;
      out.objective_value = e.objective;
    }
  }
  return out;
}

inline CVResult optimize_w_syn(const LoocvProblem &problem, double init = 0.1, const BfgsOptions &opt = {})
{
  return minimize_weight([&](double w) { return problem.objective(w); }, init, opt);
}

inline CVResult optimize_w_syn(const Dataset &hf, const SyntheticData &synth, const WeightScheme &scheme,
                               int degree, double epsilon, double init = 0.1, const BfgsOptions &opt = {})
{
  return optimize_w_syn(LoocvProblem(hf, synth, scheme, degree, epsilon), init, opt);
}

}  // namespace mflr

#endif  // MFLR_CV_HPP
