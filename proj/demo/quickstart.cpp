// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// Fits single-fidelity and augmented surrogates on the built-in synthetic
// problem and prints their accuracy on a held-out set.

#include <cstdio>
#include "mflr/mflr.hpp"

int main()
{
  using namespace mflr;

  SyntheticProblem problem(GeneratorSpec{});
  const Dataset hf = problem.hf_dataset(lhs_sample(problem.bounds(), 5, 11));
  const Dataset lf = problem.lf_dataset(lhs_sample(problem.bounds(), 80, 12));
  const Dataset test = problem.hf_dataset(lhs_sample(problem.bounds(), 50, 13));

  const MFSurrogate sf = fit_single_fidelity(hf, 1, 0.995);

  const SyntheticData synth = synth_direct(lf);
  const CVResult cv = optimize_w_syn(hf, synth, WeightScheme{}, 2, 0.995);
  const MFSurrogate aug = fit_mf_data_aug(hf, synth, WeightScheme{}.with_weight(cv.w_syn_star), 2, 0.995);

  const MFSurrogate add = fit_additive(hf, lf, 1, 1, 0.995);

  std::printf("single fidelity      accuracy %.4f\n", normalized_l2_accuracy(test.outputs, predict(sf, test.inputs)));
  std::printf("additive correction  accuracy %.4f\n", normalized_l2_accuracy(test.outputs, predict(add, test.inputs)));
  std::printf("direct augmentation  accuracy %.4f (w_syn = %.4f)\n",
              normalized_l2_accuracy(test.outputs, predict(aug, test.inputs)), cv.w_syn_star);
  return 0;
}
