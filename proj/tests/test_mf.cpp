// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <numeric>
#include "support.hpp"

using namespace mflr;

namespace
{

constexpr double kTight = 1.0 - 1e-10;  // keeps every non-noise direction

Dataset as_lf(Dataset ds)
{
  ds.fidelity = Fidelity::LF;
  ds.cost_per_sample = 1.0 / 127.0;
  return ds;
}

double accuracy(const MFSurrogate &s, const Dataset &test)
{
  return normalized_l2_accuracy(test.outputs, predict(s, test.inputs));
}

}  // namespace

TEST(Dataset, ValidationAndSubset)
{
  Dataset ds;
  ds.inputs = oracle::random_matrix(2, 5, 1);
  ds.outputs = oracle::random_matrix(4, 5, 2);
  EXPECT_NO_THROW(ds.validate());
  const Dataset sub = ds.subset(std::vector<int>{4, 0});
  EXPECT_EQ(sub.inputs.col(0), ds.inputs.col(4));
  EXPECT_EQ(sub.outputs.col(1), ds.outputs.col(0));
  ds.outputs = oracle::random_matrix(4, 6, 2);
  EXPECT_THROW(ds.validate(), DataError);
  ds.outputs = oracle::random_matrix(4, 5, 2);
  ds.outputs(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(ds.validate(), DataError);
}

TEST(SynthDirect, CopiesLfDataVerbatim)
{
  Dataset lf = as_lf(oracle::LowRankProcess(2, 30, 3, 1, 1).dataset(oracle::random_uniform(2, 12, 2)));
  const SyntheticData s = synth_direct(lf);
  EXPECT_EQ(s.provenance, Provenance::Direct);
  EXPECT_EQ(std::memcmp(s.outputs.data(), lf.outputs.data(), sizeof(double) * static_cast<std::size_t>(lf.outputs.size())), 0);
  EXPECT_EQ(s.inputs, lf.inputs);
}

TEST(SynthDirect, SingleSample)
{
  Dataset lf = as_lf(oracle::LowRankProcess(2, 10, 2, 1, 1).dataset(oracle::random_uniform(2, 1, 2)));
  EXPECT_EQ(synth_direct(lf).size(), 1);
}

TEST(SynthDirect, RequiresLfTag)
{
  const Dataset hf = oracle::LowRankProcess(2, 10, 2, 1, 1).dataset(oracle::random_uniform(2, 3, 2));
  EXPECT_THROW(synth_direct(hf), std::invalid_argument);
}

TEST(SynthExplicitMap, SelfMappingFixedPoint)
{
  // three inputs so the degree-1 states span all three modes
  const oracle::LowRankProcess proc(3, 80, 3, 1, 7);
  const Matrix x = oracle::random_uniform(3, 12, 8);
  const Dataset hf = proc.dataset(x);
  const Dataset lf = as_lf(hf);
  const ExplicitMapResult r = synth_explicit_map(hf, lf, 1, kTight);
  EXPECT_EQ(r.synth.provenance, Provenance::ExplicitMap);
  EXPECT_EQ(r.synth.inputs, lf.inputs);
  EXPECT_LE(oracle::rel_diff(r.synth.outputs, lf.outputs), 1e-6);
  // g is the identity map on reduced states: zero intercept, identity slope.
  const Matrix &g = r.map_model.coefficients;
  ASSERT_EQ(g.rows(), 4);
  EXPECT_LE(g.row(0).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_LE((g.bottomRows(3) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(SynthExplicitMap, ExactAffineRelationRecoversHf)
{
  // LF = a * HF + b with both driven by one degree-1 reduced-space process:
  // the affine map g is exact and synthetic data equal HF at the LF inputs.
  const oracle::LowRankProcess proc(2, 60, 3, 1, 11);
  const Matrix x_hf = oracle::random_uniform(2, 6, 12);
  const Matrix x_lf = oracle::random_uniform(2, 30, 13);
  const Dataset hf = proc.dataset(x_hf);
  Dataset lf = as_lf(proc.dataset(x_lf));
  const Vector shift = oracle::random_matrix(60, 1, 14).col(0);
  lf.outputs = (0.8 * lf.outputs).colwise() + shift;
  const ExplicitMapResult r = synth_explicit_map(hf, lf, 1, kTight);
  EXPECT_LE(oracle::rel_diff(r.synth.outputs, proc.outputs(x_lf)), 1e-6);
  EXPECT_FALSE(r.map_model.underdetermined);
}

TEST(SynthExplicitMap, ColocatedMatchesSurrogatePath)
{
  const oracle::LowRankProcess proc(3, 50, 2, 1, 21);
  const Matrix x_hf = oracle::random_uniform(3, 5, 22);
  const Matrix x_lf = oracle::random_uniform(3, 25, 23);
  Dataset hf = proc.dataset(x_hf);
  hf.outputs.array() += 0.01 * oracle::random_matrix(50, 5, 24).array();
  Dataset lf = as_lf(proc.dataset(x_lf));
  lf.outputs *= 1.1;
  const ReducedBasis hb = fit_basis(hf.outputs, kTight);
  const ReducedBasis lb = fit_basis(lf.outputs, kTight);
  const ExplicitMapResult a = synth_explicit_map(hf, lf, 1, hb, lb);
  const ExplicitMapResult b = synth_explicit_map_colocated(hf, lf, 1.1 * proc.outputs(x_hf), hb, lb);
  EXPECT_LE(oracle::rel_diff(a.synth.outputs, b.synth.outputs), 1e-8);
}

TEST(SynthExplicitMap, DegradesToMeanWhenBasisIsEmpty)
{
  const oracle::LowRankProcess proc(2, 20, 2, 1, 31);
  const Dataset hf = proc.dataset(oracle::random_uniform(2, 4, 32));
  Dataset lf = as_lf(proc.dataset(oracle::random_uniform(2, 10, 33)));
  lf.outputs = lf.outputs.col(0).replicate(1, 10);  // constant LF data
  const ExplicitMapResult r = synth_explicit_map(hf, lf, 1, 0.995);
  ASSERT_FALSE(r.synth.warnings.empty());
  const Vector mean = hf.outputs.rowwise().mean();
  for (Eigen::Index j = 0; j < 10; ++j)
  {
    EXPECT_LE((r.synth.outputs.col(j) - mean).norm(), 1e-12);
  }
}

TEST(SynthExplicitMap, MapIsDeterminedWithFewHfSamples)
{
  // k_HF <= N_HF - 1, so the affine map never has more features than samples.
  const oracle::LowRankProcess proc(2, 40, 4, 2, 41);
  for (int n_hf : {2, 3, 4})
  {
    const Dataset hf = proc.dataset(oracle::random_uniform(2, n_hf, 42));
    const Dataset lf = as_lf(proc.dataset(oracle::random_uniform(2, 30, 43)));
    const ExplicitMapResult r = synth_explicit_map(hf, lf, 1, kTight);
    EXPECT_LE(r.map_model.coefficients.rows(), n_hf);
    EXPECT_FALSE(r.map_model.underdetermined);
    EXPECT_TRUE(r.synth.outputs.allFinite());
  }
}

TEST(FitMfDataAug, ZeroSyntheticWeightsEqualSingleFidelity)
{
  const oracle::LowRankProcess proc(2, 50, 3, 2, 51);
  Dataset hf = proc.dataset(oracle::random_uniform(2, 9, 52));
  hf.outputs.array() += 0.05 * oracle::random_matrix(50, 9, 53).array();
  // Every synthetic point sits on an HF point, so proximity zeroes it.
  Dataset lf = as_lf(hf);
  lf.outputs.array() += 0.3;
  const MFSurrogate aug = fit_mf_data_aug(hf, synth_direct(lf), WeightScheme{WeightKind::Proximity, 0.5, 10.0}, 2, 0.995);
  const MFSurrogate sf = fit_single_fidelity(hf, 2, 0.995);
  const Matrix x = oracle::random_uniform(2, 20, 54);
  EXPECT_LE((predict(aug, x) - predict(sf, x)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitMfDataAug, NearUnitWeightMatchesPooledOls)
{
  const oracle::LowRankProcess proc(2, 40, 3, 2, 61);
  Dataset hf = proc.dataset(oracle::random_uniform(2, 5, 62));
  Dataset lf = as_lf(proc.dataset(oracle::random_uniform(2, 30, 63)));
  lf.outputs.array() += 0.1 * oracle::random_matrix(40, 30, 64).array();
  const double eps = 0.995;
  const MFSurrogate s = fit_mf_data_aug(hf, synth_direct(lf), WeightScheme{WeightKind::Fixed, 1.0 - 1e-9, 0.0}, 2, eps);

  // Pooled OLS in the HF basis on raw-input quadratic features.
  const ReducedBasis b = fit_basis(hf.outputs, eps);
  Matrix x(2, 35);
  x << hf.inputs, lf.inputs;
  Matrix y(40, 35);
  y << hf.outputs, lf.outputs;
  const auto ex = oracle::exponents(2, 2);
  const Matrix beta = oracle::normal_equations(oracle::design(ex, x), oracle::transpose(project(b, y).states));
  const Matrix x_star = oracle::random_uniform(2, 15, 65);
  Matrix expected = oracle::multiply(b.basis, oracle::transpose(oracle::multiply(oracle::design(ex, x_star), beta)));
  expected.colwise() += b.mean;
  EXPECT_LE(oracle::rel_diff(predict(s, x_star), expected), 1e-6);
}

TEST(FitMfDataAug, RecoversDegreeTwoProcessFromAugmentedData)
{
  const oracle::LowRankProcess proc(3, 80, 4, 2, 71);
  const Dataset hf = proc.dataset(oracle::random_uniform(3, 6, 72));
  const Dataset lf = as_lf(proc.dataset(oracle::random_uniform(3, 40, 73)));
  const Dataset test = proc.dataset(oracle::random_uniform(3, 30, 74));
  for (WeightKind kind : {WeightKind::Fixed, WeightKind::Proximity})
  {
    const MFSurrogate s = fit_mf_data_aug(hf, synth_direct(lf), WeightScheme{kind, 0.1, 10.0}, 2, kTight);
    EXPECT_GE(accuracy(s, test), 1.0 - 1e-6);
  }
}

TEST(FitMfDataAug, PermutationInvariantWithFixedWeights)
{
  const oracle::LowRankProcess proc(2, 30, 3, 2, 81);
  Dataset hf = proc.dataset(oracle::random_uniform(2, 5, 82));
  Dataset lf = as_lf(proc.dataset(oracle::random_uniform(2, 20, 83)));
  lf.outputs.array() += 0.2 * oracle::random_matrix(30, 20, 84).array();
  const WeightScheme scheme{WeightKind::Fixed, 0.3, 0.0};
  const MFSurrogate a = fit_mf_data_aug(hf, synth_direct(lf), scheme, 2, 0.995);
  std::vector<int> ph{3, 0, 4, 1, 2};
  std::vector<int> pl(20);
  std::iota(pl.begin(), pl.end(), 0);
  std::reverse(pl.begin(), pl.end());
  std::swap(pl[2], pl[11]);
  const MFSurrogate b = fit_mf_data_aug(hf.subset(ph), synth_direct(lf.subset(pl)), scheme, 2, 0.995);
  const Matrix x = oracle::random_uniform(2, 10, 85);
  EXPECT_LE((predict(a, x) - predict(b, x)).cwiseAbs().maxCoeff(), 1e-10 * predict(a, x).cwiseAbs().maxCoeff());
}

TEST(FitMfDataAug, VariantFollowsProvenance)
{
  const oracle::LowRankProcess proc(2, 30, 3, 1, 91);
  const Dataset hf = proc.dataset(oracle::random_uniform(2, 5, 92));
  const Dataset lf = as_lf(proc.dataset(oracle::random_uniform(2, 20, 93)));
  EXPECT_EQ(fit_mf_data_aug(hf, synth_direct(lf), WeightScheme{}, 2, 0.995).variant, Variant::DirectAug);
  const SyntheticData em = synth_explicit_map(hf, lf, 1, 0.995).synth;
  EXPECT_EQ(fit_mf_data_aug(hf, em, WeightScheme{}, 2, 0.995).variant, Variant::ExplicitMapAug);
}

TEST(Predict, ReplaysInterpolatingModel)
{
  const oracle::LowRankProcess proc(2, 40, 3, 1, 101);
  const Dataset hf = proc.dataset(oracle::random_uniform(2, 8, 102));
  const MFSurrogate s = fit_single_fidelity(hf, 1, kTight);
  EXPECT_LE(oracle::rel_diff(predict(s, hf.inputs), hf.outputs), 1e-6);
}

TEST(Predict, MeanOnlyModelIsConstant)
{
  Dataset hf;
  hf.inputs = oracle::random_uniform(2, 4, 1);
  hf.outputs = Vector::LinSpaced(5, 1.0, 2.0).replicate(1, 4);
  const MFSurrogate s = fit_single_fidelity(hf, 1, 0.995);
  EXPECT_EQ(s.hf_basis.k(), 0);
  const Matrix y = predict(s, oracle::random_uniform(2, 3, 2));
  for (Eigen::Index j = 0; j < 3; ++j)
  {
    EXPECT_LE((y.col(j) - hf.outputs.col(0)).norm(), 1e-15);
  }
}

TEST(Predict, OutputsLieInReconstructionSubspace)
{
  const oracle::LowRankProcess proc(2, 40, 4, 2, 111);
  Dataset hf = proc.dataset(oracle::random_uniform(2, 6, 112));
  hf.outputs.array() += 0.05 * oracle::random_matrix(40, 6, 113).array();
  Dataset lf = as_lf(proc.dataset(oracle::random_uniform(2, 30, 114)));
  lf.outputs.array() += 0.05 * oracle::random_matrix(40, 30, 115).array();
  const Matrix x = oracle::random_uniform(2, 7, 116);
  for (const MFSurrogate &s : {fit_single_fidelity(hf, 1, 0.99),
                               fit_mf_data_aug(hf, synth_direct(lf), WeightScheme{}, 2, 0.99),
                               fit_mf_data_aug(hf, synth_explicit_map(hf, lf, 1, 0.99).synth, WeightScheme{}, 2, 0.99)})
  {
    const Matrix y = predict(s, x);
    EXPECT_LE(oracle::rel_diff(reconstruct(s.hf_basis, project(s.hf_basis, y)), y), 1e-9);
    EXPECT_EQ(y.rows(), 40);
  }
  const MFSurrogate add = fit_additive(hf, lf, 1, 1, 0.99);
  const Matrix y = predict(add, x);
  const Matrix lf_part = reconstruct(add.lf_basis, add.lf_model.predict(x));
  const Matrix d_part = y - lf_part;
  EXPECT_LE(oracle::rel_diff(reconstruct(add.delta_basis, project(add.delta_basis, d_part)), d_part), 1e-9);
}

TEST(Predict, DimensionMismatch)
{
  const oracle::LowRankProcess proc(2, 10, 2, 1, 121);
  const MFSurrogate s = fit_single_fidelity(proc.dataset(oracle::random_uniform(2, 5, 122)), 1, 0.99);
  EXPECT_THROW(predict(s, Matrix::Ones(3, 2)), DataError);
}

TEST(FitAdditive, ColocatedIdenticalFidelitiesIsExact)
{
  const oracle::LowRankProcess proc(3, 60, 3, 1, 131);
  const Matrix x = oracle::random_uniform(3, 10, 132);
  const Dataset hf = proc.dataset(x);
  const Dataset lf = as_lf(proc.dataset(x));
  const MFSurrogate s = fit_additive(hf, lf, 1, 1, kTight);
  const Dataset test = proc.dataset(oracle::random_uniform(3, 40, 133));
  EXPECT_GE(accuracy(s, test), 1.0 - 1e-6);
  const Matrix delta = hf.outputs - reconstruct(s.lf_basis, s.lf_model.predict(hf.inputs));
  EXPECT_LE(project(s.delta_basis, delta).states.norm(), 1e-8);
}

TEST(FitAdditive, ZeroDiscrepancyReducesToLfModelPlusBias)
{
  const oracle::LowRankProcess proc(2, 30, 2, 1, 141);
  const Matrix x = oracle::random_uniform(2, 8, 142);
  const Dataset hf = proc.dataset(x);
  const Dataset lf = as_lf(proc.dataset(x));
  const MFSurrogate s = fit_additive(hf, lf, 1, 1, 0.995);
  const Matrix x_star = oracle::random_uniform(2, 5, 143);
  const Matrix lf_only = reconstruct(s.lf_basis, s.lf_model.predict(x_star));
  const Matrix bias = s.delta_basis.mean.replicate(1, 5);
  EXPECT_LE((predict(s, x_star) - lf_only - bias).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FitAdditive, RankDeficientDiscrepancyIsTotal)
{
  const oracle::LowRankProcess proc(3, 30, 3, 2, 151);
  const Dataset hf = proc.dataset(oracle::random_uniform(3, 2, 152));
  Dataset lf = as_lf(proc.dataset(oracle::random_uniform(3, 20, 153)));
  lf.outputs *= 0.9;
  MFSurrogate s;
  ASSERT_NO_THROW(s = fit_additive(hf, lf, 1, 1, 0.995));
  EXPECT_TRUE(predict(s, oracle::random_uniform(3, 4, 154)).allFinite());
  EXPECT_THROW(fit_additive(hf.subset(std::vector<int>{0}), lf, 1, 1, 0.995), DataError);
}

TEST(ExplicitMap, SelfConsistentWithDirectWhenFidelitiesCoincide)
{
  const oracle::LowRankProcess proc(2, 50, 3, 1, 161);
  const Matrix x = oracle::random_uniform(2, 15, 162);
  const Dataset hf = proc.dataset(x);
  const Dataset lf = as_lf(hf);
  const SyntheticData direct = synth_direct(lf);
  const SyntheticData mapped = synth_explicit_map(hf, lf, 1, kTight).synth;
  EXPECT_EQ(direct.inputs, mapped.inputs);
  EXPECT_LE(oracle::rel_diff(mapped.outputs, direct.outputs), 1e-6);
}
