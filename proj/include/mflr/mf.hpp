// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_MF_HPP
#define MFLR_MF_HPP

#include <string>
#include <vector>
#include "mflr/features.hpp"
#include "mflr/leastsq.hpp"
#include "mflr/pca.hpp"
#include "mflr/weighting.hpp"

namespace mflr
{

enum class Fidelity
{
  HF,
  LF
};

struct Dataset
{
  Matrix inputs;   // d x N
  Matrix outputs;  // m x N
  Fidelity fidelity = Fidelity::HF;
  double cost_per_sample = 1.0;  // in HF-evaluation units

  Eigen::Index size() const { return inputs.cols(); }
  Eigen::Index input_dim() const { return inputs.rows(); }
  Eigen::Index output_dim() const { return outputs.rows(); }

  void validate() const
  {
    require_dims(inputs.cols() == outputs.cols(),
                 std::to_string(inputs.cols()) + " input samples but " +
                     std::to_string(outputs.cols()) + " output samples");
    require_finite(inputs, "dataset inputs");
    require_finite(outputs, "dataset outputs");
  }

  // Samples at the given column indices.
  template <typename Indices>
  Dataset subset(const Indices &idx) const
  {
    Dataset out;
    out.fidelity = fidelity;
    out.cost_per_sample = cost_per_sample;
    out.inputs.resize(inputs.rows(), static_cast<Eigen::Index>(idx.size()));
    out.outputs.resize(outputs.rows(), static_cast<Eigen::Index>(idx.size()));
    Eigen::Index j = 0;
    for (auto i : idx)
    {
      out.inputs.col(j) = inputs.col(static_cast<Eigen::Index>(i));
      out.outputs.col(j) = outputs.col(static_cast<Eigen::Index>(i));
      ++j;
    }
    return out;
  }
};

enum class Provenance
{
  Direct,
  ExplicitMap
};

struct SyntheticData
{
  Matrix inputs;   // d x N_LF, identical to the LF inputs
  Matrix outputs;  // m x N_LF
  Provenance provenance = Provenance::Direct;
  std::vector<std::string> warnings;

  Eigen::Index size() const { return inputs.cols(); }
};

enum class Variant
{
  SingleFidelity,
  DirectAug,
  ExplicitMapAug,
  Additive
};

inline const char *to_string(Variant v)
{
  switch (v)
  {
    case Variant::SingleFidelity:
      return "sf";
    case Variant::DirectAug:
      return "direct_aug";
    case Variant::ExplicitMapAug:
      return "explicit_aug";
    case Variant::Additive:
      return "additive";
  }
  return "unknown";
}

//
// A fitted surrogate predicting full-dimensional outputs. Data-augmentation
// and single-fidelity variants use hf_basis + model. The additive variant
// sums an LF reconstruction (lf_basis, lf_model) and a discrepancy
// reconstruction (delta_basis, delta_model).
//
struct MFSurrogate
{
  Variant variant = Variant::SingleFidelity;
  ReducedBasis hf_basis;
  LinearModel model;
  ReducedBasis lf_basis;
  LinearModel lf_model;
  ReducedBasis delta_basis;
  LinearModel delta_model;
  double w_syn = 0.0;  // synthetic weight used for data augmentation, 0 otherwise
  std::vector<std::string> warnings;

  Eigen::Index input_dim() const
  {
    return variant == Variant::Additive ? lf_model.feature_map.input_dim()
                                        : model.feature_map.input_dim();
  }

  Eigen::Index output_dim() const
  {
    return variant == Variant::Additive ? lf_basis.output_dim() : hf_basis.output_dim();
  }
};

inline Matrix predict(const MFSurrogate &s, const Matrix &x_star)
{
  require_dims(x_star.rows() == s.input_dim(), "prediction inputs have " +
                                                   std::to_string(x_star.rows()) +
                                                   " rows, surrogate expects " +
                                                   std::to_string(s.input_dim()));
  if (s.variant == Variant::Additive)
  {
    // LF model + discrepancy model + (LF mean + discrepancy mean)
    return reconstruct(s.lf_basis, s.lf_model.predict(x_star)) +
           reconstruct(s.delta_basis, s.delta_model.predict(x_star));
  }
  return reconstruct(s.hf_basis, s.model.predict(x_star));
}

namespace detail
{

inline Matrix hcat(const Matrix &a, const Matrix &b)
{
  require_dims(a.rows() == b.rows(), "cannot concatenate matrices with different row counts");
  Matrix out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

inline void require_min_samples(const Dataset &ds, Eigen::Index n, const char *what)
{
  if (ds.size() < n)
  {
    throw DataError(DataError::Code::Empty, std::string(what) + " needs at least " +
                                                std::to_string(n) + " HF samples, got " +
                                                std::to_string(ds.size()));
  }
}

inline LinearModel fit_reduced_ols(const Matrix &x, const Matrix &c, int degree)
{
  const FeatureMap fm = FeatureMap(static_cast<int>(x.rows()), degree).scaled_to(x);
  return fit_ols(fm, x, c);
}

}  // namespace detail

// Projection-based single-fidelity regression on HF data only.
inline MFSurrogate fit_single_fidelity(const Dataset &hf, int degree, double epsilon)
{
  hf.validate();
  detail::require_min_samples(hf, 1, "single-fidelity fit");
  MFSurrogate s;
  s.variant = Variant::SingleFidelity;
  s.hf_basis = fit_basis(hf.outputs, epsilon);
  const Matrix c = project(s.hf_basis, hf.outputs).states;
  s.model = detail::fit_reduced_ols(hf.inputs, c, degree);
  return s;
}

inline SyntheticData synth_direct(const Dataset &lf)
{
  if (lf.fidelity != Fidelity::LF)
  {
    throw std::invalid_argument("synth_direct expects an LF dataset");
  }
  lf.validate();
  SyntheticData out;
  out.inputs = lf.inputs;
  out.outputs = lf.outputs;
  out.provenance = Provenance::Direct;
  return out;
}

struct ExplicitMapResult
{
  SyntheticData synth;
  LinearModel map_model;  // affine map from LF reduced states to HF reduced states
};

namespace detail
{

// Steps shared by the surrogate and co-located paths, given LF outputs
// (predicted or observed) at the HF inputs.
inline ExplicitMapResult finish_explicit_map(const Dataset &hf, const Dataset &lf,
                                             const Matrix &lf_at_hf,
                                             const ReducedBasis &hf_basis,
                                             const ReducedBasis &lf_basis,
                                             std::vector<std::string> warnings)
{
  ExplicitMapResult out;
  out.synth.inputs = lf.inputs;
  out.synth.provenance = Provenance::ExplicitMap;

  if (hf_basis.k() == 0 || lf_basis.k() == 0)
  {
    warnings.emplace_back("explicit map: zero-dimensional reduced basis, synthetic data is the HF mean");
    out.map_model.feature_map = FeatureMap(1, 0);
    out.map_model.coefficients = Matrix::Zero(1, hf_basis.k());
    out.synth.outputs = hf_basis.mean.replicate(1, lf.size());
    out.synth.warnings = std::move(warnings);
    return out;
  }

  // LF outputs at the HF inputs and the HF outputs, both in HF coordinates.
  const Matrix c_lf_hat = project(hf_basis, lf_at_hf).states;
  const Matrix c_hf = project(hf_basis, hf.outputs).states;

  const FeatureMap affine(static_cast<int>(hf_basis.k()), 1);
  out.map_model = fit_ols(affine, c_lf_hat, c_hf);
  if (out.map_model.underdetermined)
  {
    warnings.emplace_back("explicit map: " + std::to_string(affine.size()) +
                          " affine features but only " + std::to_string(hf.size()) +
                          " HF samples; using the minimum-norm map");
  }

  // The LF samples go through the same change of coordinates: reduce in the
  // LF basis, lift back, re-project onto the HF basis.
  const Matrix lf_reduced = reconstruct(lf_basis, project(lf_basis, lf.outputs).states);
  const Matrix c_lf_in_hf = project(hf_basis, lf_reduced).states;
  out.synth.outputs = reconstruct(hf_basis, out.map_model.predict(c_lf_in_hf));
  out.synth.warnings = std::move(warnings);
  return out;
}

}  // namespace detail

// Explicit-mapping synthetic data. An LF surrogate of degree lf_degree
// supplies LF outputs at the HF inputs; an affine map g between reduced
// states is trained on those pairs and applied to every LF sample.
inline ExplicitMapResult synth_explicit_map(const Dataset &hf, const Dataset &lf, int lf_degree,
                                            const ReducedBasis &hf_basis,
                                            const ReducedBasis &lf_basis)
{
  hf.validate();
  lf.validate();
  detail::require_min_samples(hf, 2, "explicit mapping");
  require_dims(hf.input_dim() == lf.input_dim() && hf.output_dim() == lf.output_dim(),
               "HF and LF datasets differ in input or output dimension");
  require_dims(hf_basis.output_dim() == hf.output_dim() && lf_basis.output_dim() == lf.output_dim(),
               "reduced bases do not match the dataset output dimension");

  std::vector<std::string> warnings;
  Matrix lf_at_hf;
  if (lf_basis.k() == 0)
  {
    lf_at_hf = lf_basis.mean.replicate(1, hf.size());
  }
  else
  {
    const Matrix c_lf = project(lf_basis, lf.outputs).states;
    const LinearModel f_lf = detail::fit_reduced_ols(lf.inputs, c_lf, lf_degree);
    lf_at_hf = reconstruct(lf_basis, f_lf.predict(hf.inputs));
  }
  return detail::finish_explicit_map(hf, lf, lf_at_hf, hf_basis, lf_basis, std::move(warnings));
}

// Co-located variant: LF outputs observed at the HF inputs replace the LF
// surrogate.
inline ExplicitMapResult synth_explicit_map_colocated(const Dataset &hf, const Dataset &lf,
                                                      const Matrix &lf_at_hf,
                                                      const ReducedBasis &hf_basis,
                                                      const ReducedBasis &lf_basis)
{
  hf.validate();
  lf.validate();
  detail::require_min_samples(hf, 2, "explicit mapping");
  require_dims(lf_at_hf.rows() == hf.output_dim() && lf_at_hf.cols() == hf.size(),
               "co-located LF outputs must be m x N_HF");
  require_finite(lf_at_hf, "co-located LF outputs");
  return detail::finish_explicit_map(hf, lf, lf_at_hf, hf_basis, lf_basis, {});
}

// Fits both bases with the given tolerance and runs the surrogate path.
inline ExplicitMapResult synth_explicit_map(const Dataset &hf, const Dataset &lf, int lf_degree,
                                            double epsilon)
{
  hf.validate();
  lf.validate();
  return synth_explicit_map(hf, lf, lf_degree, fit_basis(hf.outputs, epsilon),
                            fit_basis(lf.outputs, epsilon));
}

// Data-augmentation surrogate: HF samples plus synthetic samples, projected
// onto the HF basis and fitted by weighted least squares.
inline MFSurrogate fit_mf_data_aug(const Dataset &hf, const SyntheticData &synth,
                                   const WeightScheme &scheme, int degree, double epsilon)
{
  hf.validate();
  detail::require_min_samples(hf, 1, "data augmentation");
  require_dims(synth.inputs.rows() == hf.input_dim() && synth.outputs.rows() == hf.output_dim(),
               "synthetic data differ from HF data in input or output dimension");
  require_dims(synth.inputs.cols() == synth.outputs.cols(), "synthetic inputs and outputs differ in sample count");

  MFSurrogate s;
  s.variant = synth.provenance == Provenance::Direct ? Variant::DirectAug : Variant::ExplicitMapAug;
  s.w_syn = scheme.w_syn;
  s.warnings = synth.warnings;
  s.hf_basis = fit_basis(hf.outputs, epsilon);

  const Matrix x_mf = detail::hcat(hf.inputs, synth.inputs);
  const Matrix c_mf = project(s.hf_basis, detail::hcat(hf.outputs, synth.outputs)).states;
  const WeightVector w = build_weights(scheme, hf.inputs, synth.inputs);
  if (w.degenerate_bounds())
  {
    s.warnings.emplace_back("proximity weighting ignored " + std::to_string(w.dropped_inputs.size()) +
                            " input coordinate(s) with zero range");
  }
  const FeatureMap fm = FeatureMap(static_cast<int>(hf.input_dim()), degree).scaled_to(x_mf);
  s.model = fit_wls(fm, x_mf, c_mf, w.values);
  return s;
}

//
// Additive (discrepancy) surrogate: an LF surrogate plus a surrogate of the
// difference between HF outputs and LF predictions at the HF inputs, each
// with its own reduced basis.
//
inline MFSurrogate fit_additive(const Dataset &hf, const Dataset &lf, int lf_degree, int delta_degree,
                                double epsilon)
{
  hf.validate();
  lf.validate();
  detail::require_min_samples(hf, 2, "additive method");
  require_dims(hf.input_dim() == lf.input_dim() && hf.output_dim() == lf.output_dim(),
               "HF and LF datasets differ in input or output dimension");

  MFSurrogate s;
  s.variant = Variant::Additive;
  s.lf_basis = fit_basis(lf.outputs, epsilon);
  s.lf_model = detail::fit_reduced_ols(lf.inputs, project(s.lf_basis, lf.outputs).states, lf_degree);

  const Matrix lf_at_hf = reconstruct(s.lf_basis, s.lf_model.predict(hf.inputs));
  const Matrix delta = hf.outputs - lf_at_hf;
  s.delta_basis = fit_basis(delta, epsilon);
  s.delta_model = detail::fit_reduced_ols(hf.inputs, project(s.delta_basis, delta).states, delta_degree);
  if (s.delta_model.underdetermined)
  {
    s.warnings.emplace_back("additive method: discrepancy fit is underdetermined; using the minimum-norm model");
  }
  return s;
}

}  // namespace mflr

#endif  // MFLR_MF_HPP
