// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_BENCH_HPP
#define MFLR_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>
#include "mflr/cv.hpp"
#include "mflr/metrics.hpp"
#include "mflr/mf.hpp"
#include "mflr/random.hpp"

namespace mflr
{

struct Bounds
{
  Vector lower;
  Vector upper;

  Eigen::Index dim() const { return lower.size(); }

  void validate() const
  {
    if (lower.size() != upper.size() || lower.size() < 1)
    {
      throw std::invalid_argument("bounds need matching, non-empty lower and upper vectors");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i)
    {
      if (!std::isfinite(lower(i)) || !std::isfinite(upper(i)) || !(upper(i) > lower(i)))
      {
        throw std::invalid_argument("degenerate bounds in coordinate " + std::to_string(i));
      }
    }
  }
};

// Latin hypercube sample: in every coordinate the n values fall into n
// distinct equal-width strata, uniformly placed within each stratum.
inline Matrix lhs_sample(const Bounds &bounds, Eigen::Index n, std::uint64_t seed)
{
  bounds.validate();
  if (n < 1)
  {
    throw std::invalid_argument("lhs_sample needs n >= 1");
  }
  Rng rng(derive_seed(seed, {tag(Stream::Lhs)}));
  Matrix x(bounds.dim(), n);
  std::vector<Eigen::Index> strata(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < bounds.dim(); ++i)
  {
    for (Eigen::Index j = 0; j < n; ++j)
    {
      strata[static_cast<std::size_t>(j)] = j;
    }
    rng.shuffle(strata);
    const double width = (bounds.upper(i) - bounds.lower(i)) / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j)
    {
      const double pos = static_cast<double>(strata[static_cast<std::size_t>(j)]) + rng.uniform();
      x(i, j) = std::min(bounds.lower(i) + width * pos, bounds.upper(i));
    }
  }
  return x;
}

//
// Conditioned-LHS subsampling of an existing pool: greedily picks points
// that cover the most not-yet-covered (coordinate, stratum) cells, with n
// equal-width strata per coordinate over the pool's range. Ties go to the
// earliest point in a seed-keyed random order.
//
inline std::vector<Eigen::Index> subsample_conditioned(const Matrix &pool, Eigen::Index n, std::uint64_t seed)
{
  const Eigen::Index total = pool.cols();
  if (n > total)
  {
    throw std::invalid_argument("cannot select " + std::to_string(n) + " points from a pool of " +
                                std::to_string(total));
  }
  if (n < 0)
  {
    throw std::invalid_argument("subsample size must be non-negative");
  }
  std::vector<Eigen::Index> out;
  if (n == total)
  {
    for (Eigen::Index j = 0; j < total; ++j)
    {
      out.push_back(j);
    }
    return out;
  }
  if (n == 0)
  {
    return out;
  }

  const Eigen::Index d = pool.rows();
  const Vector lo = pool.rowwise().minCoeff();
  const Vector hi = pool.rowwise().maxCoeff();
  // stratum of every pool point in every coordinate
  std::vector<std::vector<Eigen::Index>> cell(static_cast<std::size_t>(total),
                                              std::vector<Eigen::Index>(static_cast<std::size_t>(d)));
  for (Eigen::Index j = 0; j < total; ++j)
  {
    for (Eigen::Index i = 0; i < d; ++i)
    {
      const double range = hi(i) - lo(i);
      Eigen::Index b = 0;
      if (range > 0.0)
      {
        b = static_cast<Eigen::Index>(std::floor((pool(i, j) - lo(i)) / range * static_cast<double>(n)));
      }
      cell[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = std::clamp<Eigen::Index>(b, 0, n - 1);
    }
  }

  Rng rng(derive_seed(seed, {tag(Stream::Subsample)}));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  for (Eigen::Index j = 0; j < total; ++j)
  {
    order[static_cast<std::size_t>(j)] = j;
  }
  rng.shuffle(order);

  std::vector<std::vector<bool>> covered(static_cast<std::size_t>(d), std::vector<bool>(static_cast<std::size_t>(n), false));
  std::vector<bool> taken(static_cast<std::size_t>(total), false);
  for (Eigen::Index pick = 0; pick < n; ++pick)
  {
    Eigen::Index best = -1;
    int best_score = -1;
    for (Eigen::Index j : order)
    {
      if (taken[static_cast<std::size_t>(j)])
      {
        continue;
      }
      int score = 0;
      for (Eigen::Index i = 0; i < d; ++i)
      {
        if (!covered[static_cast<std::size_t>(i)][static_cast<std::size_t>(cell[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])])
        {
          ++score;
        }
      }
      if (score > best_score)
      {
        best_score = score;
        best = j;
      }
    }
    taken[static_cast<std::size_t>(best)] = true;
    for (Eigen::Index i = 0; i < d; ++i)
    {
      covered[static_cast<std::size_t>(i)][static_cast<std::size_t>(cell[static_cast<std::size_t>(best)][static_cast<std::size_t>(i)])] = true;
    }
    out.push_back(best);
  }
  return out;
}

struct GeneratorSpec
{
  int d = 3;
  int m = 2000;
  int k_true = 5;
  int hf_degree = 2;
  double variation = 0.35;     // RMS size of the leading mode relative to the mean field
  double mode_decay = 0.6;     // amplitude ratio between consecutive modes
  double lf_scale = 0.9;       // a in LF = a * HF + b + bias
  double lf_shift = 0.05;      // b
  double bias_magnitude = 0.03;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  Bounds bounds{Vector::Zero(0), Vector::Zero(0)};  // empty: Mach/alpha/beta-like default for d = 3, else [0, 1]^d
};

//
// Bifidelity test problem. HF outputs are a fixed mean field plus k_true
// smooth spatial modes whose amplitudes are random polynomials of degree
// hf_degree in the normalized inputs. LF outputs are an affine corruption of
// the HF outputs plus a smooth input-dependent bias outside the HF mode span,
// plus optional noise. Everything is a deterministic function of the seed
// (noise is keyed on the input point).
//
class SyntheticProblem
{
public:
  explicit SyntheticProblem(GeneratorSpec spec) : spec_(std::move(spec))
  {
    if (spec_.d < 1 || spec_.m < 2 || spec_.k_true < 1 || spec_.k_true >= spec_.m || spec_.hf_degree < 0)
    {
      throw std::invalid_argument("invalid synthetic problem dimensions");
    }
    if (spec_.bounds.dim() == 0)
    {
      spec_.bounds = default_bounds(spec_.d);
    }
    spec_.bounds.validate();
    require_dims(spec_.bounds.dim() == spec_.d, "generator bounds do not match input dimension");

    const Eigen::Index m = spec_.m;
    Vector s(m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
      s(i) = static_cast<double>(i) / static_cast<double>(m - 1);
    }
    const double pi = std::numbers::pi;
    mean_field_ = (1.0 + 0.3 * (2.0 * pi * s.array()).sin() + 0.15 * (5.0 * pi * s.array()).cos()).matrix();

    Rng rng(derive_seed(spec_.seed, {tag(Stream::Generator)}));
    // Smooth modes, orthonormalized against each other and the mean field, then scaled to unit RMS.
    Matrix raw(m, spec_.k_true + 2);
    raw.col(0) = mean_field_;
    for (int j = 0; j < spec_.k_true + 1; ++j)
    {
      const double phase = 2.0 * pi * rng.uniform();
      const double freq = 1.0 + j + 0.5 * rng.uniform();
      raw.col(j + 1) = (freq * pi * s.array() + phase).sin().matrix() +
                       0.3 * ((2.0 * freq + 1.0) * pi * s.array()).cos().matrix();
    }
    Eigen::HouseholderQR<Matrix> qr(raw);
    const Matrix q = qr.householderQ() * Matrix::Identity(m, spec_.k_true + 2);
    const double rms = std::sqrt(static_cast<double>(m));
    modes_ = q.middleCols(1, spec_.k_true) * rms;
    bias_profile_ = q.col(spec_.k_true + 1) * rms;

    features_ = FeatureMap(spec_.d, spec_.hf_degree);
    coefficients_.resize(features_.size(), spec_.k_true);
    for (int j = 0; j < spec_.k_true; ++j)
    {
      const double amp = spec_.variation * std::pow(spec_.mode_decay, j);
      Vector g(features_.size());
      for (Eigen::Index f = 0; f < g.size(); ++f)
      {
        g(f) = rng.normal();
      }
      // keep every feature of comparable influence on [-1, 1]^d
      coefficients_.col(j) = amp * g / std::sqrt(static_cast<double>(g.size()));
    }
    for (int i = 0; i < spec_.d; ++i)
    {
      bias_direction_.push_back(rng.normal());
    }
    bias_phase_ = 2.0 * pi * rng.uniform();
  }

  static Bounds default_bounds(int d)
  {
    Bounds b{Vector::Zero(d), Vector::Ones(d)};
    if (d == 3)
    {
      b.lower << 5.0, 0.0, 0.0;
      b.upper << 7.0, 8.0, 8.0;
    }
    return b;
  }

  const GeneratorSpec &spec() const { return spec_; }
  const Bounds &bounds() const { return spec_.bounds; }
  const Matrix &modes() const { return modes_; }
  const Vector &mean_field() const { return mean_field_; }
  const Matrix &coefficients() const { return coefficients_; }

  // Normalized inputs in [-1, 1]^d.
  Matrix normalize(const Matrix &x) const
  {
    require_dims(x.rows() == spec_.d, "generator expects " + std::to_string(spec_.d) + " input rows");
    Matrix z(x.rows(), x.cols());
    for (int i = 0; i < spec_.d; ++i)
    {
      const double lo = spec_.bounds.lower(i);
      const double hi = spec_.bounds.upper(i);
      z.row(i) = (2.0 * (x.row(i).array() - lo) / (hi - lo) - 1.0).matrix();
    }
    return z;
  }

  // Reduced HF coordinates of every input column, k_true x J.
  Matrix hf_states(const Matrix &x) const
  {
    return (features_.evaluate(normalize(x)) * coefficients_).transpose();
  }

  Matrix hf(const Matrix &x) const
  {
    Matrix y = modes_ * hf_states(x);
    y.colwise() += mean_field_;
    return y;
  }

  Matrix lf(const Matrix &x) const
  {
    Matrix y = spec_.lf_scale * hf(x);
    y.array() += spec_.lf_shift;
    const Matrix z = normalize(x);
    for (Eigen::Index j = 0; j < x.cols(); ++j)
    {
      double arg = bias_phase_;
      for (int i = 0; i < spec_.d; ++i)
      {
        arg += bias_direction_[static_cast<std::size_t>(i)] * z(i, j);
      }
      y.col(j) += spec_.bias_magnitude * std::sin(arg) * bias_profile_;
      if (spec_.noise_sigma > 0.0)
      {
        Rng noise(derive_seed(spec_.seed, {tag(Stream::Noise), point_key(x.col(j))}));
        for (Eigen::Index i = 0; i < y.rows(); ++i)
        {
          y(i, j) += spec_.noise_sigma * noise.normal();
        }
      }
    }
    return y;
  }

  Dataset hf_dataset(const Matrix &x) const { return Dataset{x, hf(x), Fidelity::HF, 1.0}; }

  Dataset lf_dataset(const Matrix &x, double cost_per_sample = 1.0 / 127.0) const
  {
    return Dataset{x, lf(x), Fidelity::LF, cost_per_sample};
  }

private:
  static std::uint64_t point_key(const Vector &x)
  {
    return detail::fingerprint(Matrix(x));
  }

  GeneratorSpec spec_;
  Vector mean_field_;
  Matrix modes_;
  Vector bias_profile_;
  FeatureMap features_;
  Matrix coefficients_;
  std::vector<double> bias_direction_;
  double bias_phase_ = 0.0;
};

struct RepetitionPlan
{
  int n_reps = 50;
  std::vector<int> n_hf_grid{3, 4, 5, 6, 7, 8, 9, 10};
  int n_lf = 80;
  int n_test = 50;
  int n_pool = 100;       // HF pool for synthetic problems; test set is drawn from it first
  bool redraw_lf = true;  // fresh LF training set per repetition
  std::uint64_t seed = 0;

  void validate() const
  {
    if (n_reps < 1 || n_lf < 1 || n_test < 1 || n_pool < 1 || n_hf_grid.empty())
    {
      throw std::invalid_argument("repetition plan counts must be positive");
    }
    for (int n : n_hf_grid)
    {
      if (n < 1)
      {
        throw std::invalid_argument("HF sample counts must be positive");
      }
    }
  }
};

enum class Method
{
  SingleFidelity,
  Additive,
  DirectAug,
  ExplicitAug
};

inline const char *to_string(Method m)
{
  switch (m)
  {
    case Method::SingleFidelity:
      return "sf";
    case Method::Additive:
      return "additive";
    case Method::DirectAug:
      return "direct_aug";
    case Method::ExplicitAug:
      return "explicit_aug";
  }
  return "unknown";
}

inline Method method_from_string(const std::string &s)
{
  if (s == "sf")
  {
    return Method::SingleFidelity;
  }
  if (s == "additive")
  {
    return Method::Additive;
  }
  if (s == "direct_aug")
  {
    return Method::DirectAug;
  }
  if (s == "explicit_aug")
  {
    return Method::ExplicitAug;
  }
  throw ConfigError("unknown method '" + s + "' (expected sf, additive, direct_aug or explicit_aug)");
}

// One benchmark column: a method plus, for data augmentation, how w_syn is chosen.
struct MethodSpec
{
  Method method = Method::SingleFidelity;
  bool cross_validate = true;  // data augmentation: LOOCV-selected w_syn, else scheme.w_syn
  WeightScheme scheme{};

  bool uses_lf() const { return method != Method::SingleFidelity; }
  bool augments() const { return method == Method::DirectAug || method == Method::ExplicitAug; }

  std::string label() const
  {
    std::string out = to_string(method);
    if (augments())
    {
      if (cross_validate)
      {
        out += scheme.kind == WeightKind::Proximity ? "[loocv,proximity]" : "[loocv,fixed]";
      }
      else
      {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "[%s,w=%g]", scheme.kind == WeightKind::Proximity ? "proximity" : "fixed",
                      scheme.w_syn);
        out += buf;
      }
    }
    return out;
  }
};

struct ProtocolConfig
{
  double epsilon = 0.995;
  int sf_degree = 1;
  int additive_lf_degree = 1;
  int additive_delta_degree = 1;
  int aug_degree = 2;
  int map_lf_degree = 2;
  double cv_init = 0.1;
  double cost_ratio = 1.0 / 127.0;
  int threads = 1;
};

struct FitOutcome
{
  MFSurrogate surrogate;
  std::optional<CVResult> cv;
};

// Fits one benchmark method on a training draw.
inline FitOutcome fit_method(const MethodSpec &spec, const Dataset &hf, const Dataset &lf, const ProtocolConfig &cfg)
{
  FitOutcome out;
  switch (spec.method)
  {
    case Method::SingleFidelity:
      out.surrogate = fit_single_fidelity(hf, cfg.sf_degree, cfg.epsilon);
      return out;
    case Method::Additive:
      out.surrogate = fit_additive(hf, lf, cfg.additive_lf_degree, cfg.additive_delta_degree, cfg.epsilon);
      return out;
    case Method::DirectAug:
    case Method::ExplicitAug:
      break;
  }
  const SyntheticData synth = spec.method == Method::DirectAug
                                  ? synth_direct(lf)
                                  : synth_explicit_map(hf, lf, cfg.map_lf_degree, cfg.epsilon).synth;
  WeightScheme scheme = spec.scheme;
  if (spec.cross_validate)
  {
    out.cv = optimize_w_syn(hf, synth, scheme, cfg.aug_degree, cfg.epsilon, cfg.cv_init);
    scheme.w_syn = out.cv->w_syn_star;
  }
  out.surrogate = fit_mf_data_aug(hf, synth, scheme, cfg.aug_degree, cfg.epsilon);
  return out;
}

//
// Where training and test data come from: either a synthetic problem
// (HF pool drawn by LHS, LF evaluated at fresh LHS points) or fixed HF and
// LF datasets (LF training sets subsampled from the LF pool).
//
class DataSource
{
public:
  explicit DataSource(const SyntheticProblem &problem) : problem_(&problem) {}
  DataSource(Dataset hf_pool, Dataset lf_pool) : hf_pool_(std::move(hf_pool)), lf_pool_(std::move(lf_pool))
  {
    hf_pool_.validate();
    lf_pool_.validate();
    require_dims(hf_pool_.input_dim() == lf_pool_.input_dim() && hf_pool_.output_dim() == lf_pool_.output_dim(),
                 "HF and LF datasets differ in input or output dimension");
  }

  void prepare(const RepetitionPlan &plan)
  {
    if (problem_ != nullptr)
    {
      hf_pool_ = problem_->hf_dataset(lhs_sample(problem_->bounds(), plan.n_pool, derive_seed(plan.seed, {tag(Stream::HfPool)})));
    }
  }

  const Dataset &hf_pool() const { return hf_pool_; }

  Dataset lf_training(const RepetitionPlan &plan, int rep) const
  {
    const std::uint64_t draw = plan.redraw_lf ? static_cast<std::uint64_t>(rep) : 0;
    const std::uint64_t seed = derive_seed(plan.seed, {tag(Stream::LfDraw), draw});
    if (problem_ != nullptr)
    {
      return problem_->lf_dataset(lhs_sample(problem_->bounds(), plan.n_lf, seed));
    }
    if (plan.n_lf > lf_pool_.size())
    {
      throw DataError(DataError::Code::Empty, "LF pool has " + std::to_string(lf_pool_.size()) +
                                                  " samples, plan needs " + std::to_string(plan.n_lf));
    }
    Dataset out = lf_pool_.subset(subsample_conditioned(lf_pool_.inputs, plan.n_lf, seed));
    out.fidelity = Fidelity::LF;
    return out;
  }

private:
  const SyntheticProblem *problem_ = nullptr;
  Dataset hf_pool_;
  Dataset lf_pool_;
};

struct MethodReport
{
  MethodSpec spec;
  AccuracyReport report;
  std::vector<double> w_syn;  // selected weight per repetition (LOOCV methods)
};

struct ProtocolReport
{
  RepetitionPlan plan;
  ProtocolConfig config;
  std::vector<Eigen::Index> test_indices;
  std::vector<MethodReport> results;  // method-major, then n_hf in grid order
};

inline ProtocolReport run_protocol(DataSource source, const RepetitionPlan &plan, const std::vector<MethodSpec> &methods,
                                   const ProtocolConfig &cfg)
{
  plan.validate();
  if (methods.empty())
  {
    throw std::invalid_argument("benchmark needs at least one method");
  }
  source.prepare(plan);
  const Dataset &pool = source.hf_pool();
  const int max_hf = *std::max_element(plan.n_hf_grid.begin(), plan.n_hf_grid.end());
  if (pool.size() < plan.n_test + max_hf)
  {
    throw DataError(DataError::Code::Empty, "HF pool of " + std::to_string(pool.size()) +
                                                " samples cannot supply " + std::to_string(plan.n_test) +
                                                " test and " + std::to_string(max_hf) + " training samples");
  }

  ProtocolReport report;
  report.plan = plan;
  report.config = cfg;
  report.test_indices = subsample_conditioned(pool.inputs, plan.n_test, derive_seed(plan.seed, {tag(Stream::TestSet)}));
  std::vector<bool> is_test(static_cast<std::size_t>(pool.size()), false);
  for (Eigen::Index i : report.test_indices)
  {
    is_test[static_cast<std::size_t>(i)] = true;
  }
  std::vector<Eigen::Index> remaining;
  for (Eigen::Index i = 0; i < pool.size(); ++i)
  {
    if (!is_test[static_cast<std::size_t>(i)])
    {
      remaining.push_back(i);
    }
  }
  const Dataset test = pool.subset(report.test_indices);
  const Dataset train_pool = pool.subset(remaining);

  const std::size_t n_grid = plan.n_hf_grid.size();
  const std::size_t n_methods = methods.size();
  const std::size_t n_reps = static_cast<std::size_t>(plan.n_reps);
  // accuracy[(method * n_grid + grid) * n_reps + rep]
  std::vector<double> accuracy(n_methods * n_grid * n_reps, 0.0);
  std::vector<double> weights(n_methods * n_grid * n_reps, 0.0);

  auto work = [&](std::size_t item) {
    const std::size_t rep = item / n_grid;
    const std::size_t g = item % n_grid;
    const int n_hf = plan.n_hf_grid[g];
    const auto pick = subsample_conditioned(
        train_pool.inputs, n_hf,
        derive_seed(plan.seed, {tag(Stream::Train), static_cast<std::uint64_t>(rep), static_cast<std::uint64_t>(n_hf)}));
    const Dataset hf = train_pool.subset(pick);
    Dataset lf;
    bool need_lf = false;
    for (const MethodSpec &m : methods)
    {
      need_lf = need_lf || m.uses_lf();
    }
    if (need_lf)
    {
      lf = source.lf_training(plan, static_cast<int>(rep));
    }
    for (std::size_t mi = 0; mi < n_methods; ++mi)
    {
      const FitOutcome fit = fit_method(methods[mi], hf, lf, cfg);
      const std::size_t slot = (mi * n_grid + g) * n_reps + rep;
      accuracy[slot] = normalized_l2_accuracy(test.outputs, predict(fit.surrogate, test.inputs));
      weights[slot] = fit.cv ? fit.cv->w_syn_star : fit.surrogate.w_syn;
    }
  };

  const std::size_t n_items = n_reps * n_grid;
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_items)));
  if (threads == 1)
  {
    for (std::size_t item = 0; item < n_items; ++item)
    {
      work(item);
    }
  }
  else
  {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool_threads;
    for (int t = 0; t < threads; ++t)
    {
      pool_threads.emplace_back([&] {
        for (std::size_t item = next++; item < n_items; item = next++)
        {
          try
          {
            work(item);
          }
          catch (...)
          {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure)
            {
              failure = std::current_exception();
            }
          }
        }
      });
    }
    for (auto &t : pool_threads)
    {
      t.join();
    }
    if (failure)
    {
      std::rethrow_exception(failure);
    }
  }

  for (std::size_t mi = 0; mi < n_methods; ++mi)
  {
    for (std::size_t g = 0; g < n_grid; ++g)
    {
      const std::size_t base = (mi * n_grid + g) * n_reps;
      MethodReport r;
      r.spec = methods[mi];
      const int n_lf = methods[mi].uses_lf() ? plan.n_lf : 0;
      r.report = aggregate(std::vector<double>(accuracy.begin() + static_cast<std::ptrdiff_t>(base),
                                               accuracy.begin() + static_cast<std::ptrdiff_t>(base + n_reps)),
                           plan.n_hf_grid[g], n_lf, cfg.cost_ratio);
      if (methods[mi].augments())
      {
        r.w_syn.assign(weights.begin() + static_cast<std::ptrdiff_t>(base),
                       weights.begin() + static_cast<std::ptrdiff_t>(base + n_reps));
      }
      report.results.push_back(std::move(r));
    }
  }
  return report;
}

// Default comparison: SF, additive, and both augmentation methods with
// LOOCV-selected proximity weights.
inline std::vector<MethodSpec> default_methods()
{
  return {MethodSpec{Method::SingleFidelity, false, {}}, MethodSpec{Method::Additive, false, {}},
          MethodSpec{Method::DirectAug, true, {}}, MethodSpec{Method::ExplicitAug, true, {}}};
}

}  // namespace mflr

#endif  // MFLR_BENCH_HPP
