// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_CLI_HPP
#define MFLR_CLI_HPP

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <CLI11.hpp>
#include "mflr/io.hpp"

namespace mflr::cli
{

enum ExitCode : int
{
  Ok = 0,
  Usage = 1,
  Data = 2,
  Numerical = 3
};

namespace detail
{

struct Options
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "json";
  int threads = 0;
  std::string hf;
  std::string lf;
  std::string model;
  std::string inputs;
  std::string test;
  bool node_errors = false;
};

inline io::ExperimentConfig make_config(const Options &o)
{
  io::ExperimentConfig c = o.config.empty() ? io::parse_config(io::json::object()) : io::load_config(o.config);
  if (o.seed)
  {
    c.seed = *o.seed;
  }
  if (o.threads > 0)
  {
    c.threads = o.threads;
  }
  if (!o.hf.empty())
  {
    c.hf_path = o.hf;
  }
  if (!o.lf.empty())
  {
    c.lf_path = o.lf;
  }
  return c;
}

// Writes <out>/<name>, or to the stream when no output directory was given.
inline void emit(const Options &o, const std::string &name, const std::string &text, std::ostream &out)
{
  if (o.out.empty())
  {
    out << text;
    return;
  }
  io::write_text(io::fs::path(o.out) / name, text);
}

inline std::string matrix_text(const Matrix &rows_are_samples)
{
  std::ostringstream s;
  io::write_matrix(s, rows_are_samples);
  return s.str();
}

inline Dataset require_dataset(const std::string &path, const char *what)
{
  if (path.empty())
  {
    throw ConfigError(std::string("no ") + what + " dataset given (set data." + what + " in the config or pass --" +
                      what + ")");
  }
  return io::load_dataset(path);
}

inline MethodSpec method_spec(const io::ExperimentConfig &c)
{
  return MethodSpec{c.method, c.cv_enabled, c.weighting};
}

inline int cmd_fit(const Options &o, std::ostream &out)
{
  const io::ExperimentConfig c = make_config(o);
  const Dataset hf = require_dataset(c.hf_path, "hf");
  Dataset lf;
  if (c.method != Method::SingleFidelity)
  {
    lf = require_dataset(c.lf_path, "lf");
  }
  const FitOutcome fit = fit_method(method_spec(c), hf, lf, c.protocol());
  emit(o, "surrogate.json", io::to_json(fit.surrogate, c.hash()).dump() + "\n", out);
  return Ok;
}

inline int cmd_cv(const Options &o, std::ostream &out)
{
  const io::ExperimentConfig c = make_config(o);
  if (c.method != Method::DirectAug && c.method != Method::ExplicitAug)
  {
    throw ConfigError("cv needs a data-augmentation method (direct_aug or explicit_aug)");
  }
  const Dataset hf = require_dataset(c.hf_path, "hf");
  const Dataset lf = require_dataset(c.lf_path, "lf");
  const ProtocolConfig p = c.protocol();
  const SyntheticData synth = c.method == Method::DirectAug ? synth_direct(lf)
                                                            : synth_explicit_map(hf, lf, p.map_lf_degree, p.epsilon).synth;
  const CVResult r = optimize_w_syn(hf, synth, c.weighting, p.aug_degree, p.epsilon, p.cv_init);
  io::json j = io::to_json(r);
  j["method"] = to_string(c.method);
  j["config_hash"] = c.hash();
  emit(o, "cv.json", j.dump(2) + "\n", out);
  return Ok;
}

inline int cmd_predict(const Options &o, std::ostream &out)
{
  const MFSurrogate s = io::load_surrogate(o.model);
  const Matrix x = io::read_matrix(o.inputs).transpose();
  const Matrix y = predict(s, x);
  if (o.format == "csv")
  {
    emit(o, "predictions.csv", matrix_text(y.transpose()), out);
  }
  else
  {
    io::json j{{"n_samples", y.cols()}, {"output_dim", y.rows()}, {"predictions", io::detail::matrix_to_json(y.transpose())}};
    emit(o, "predictions.json", j.dump() + "\n", out);
  }
  return Ok;
}

inline int cmd_evaluate(const Options &o, std::ostream &out)
{
  const MFSurrogate s = io::load_surrogate(o.model);
  const Dataset test = io::load_dataset(o.test);
  const Matrix y = predict(s, test.inputs);
  const std::vector<double> rel = relative_errors(test.outputs, y);
  const double acc = normalized_l2_accuracy(test.outputs, y);
  if (o.node_errors)
  {
    emit(o, "node_errors.csv", matrix_text((test.outputs - y).cwiseAbs().transpose()), out);
  }
  if (o.format == "csv")
  {
    std::ostringstream s_out;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", acc);
    s_out << "sample,relative_error\n";
    for (std::size_t i = 0; i < rel.size(); ++i)
    {
      char row[64];
      std::snprintf(row, sizeof(row), "%zu,%.17g\n", i, rel[i]);
      s_out << row;
    }
    s_out << "accuracy," << buf << "\n";
    emit(o, "accuracy.csv", s_out.str(), out);
  }
  else
  {
    io::json j{{"accuracy", acc}, {"n_test", rel.size()}, {"relative_errors", rel}};
    emit(o, "accuracy.json", j.dump(2) + "\n", out);
  }
  return Ok;
}

inline int cmd_benchmark(const Options &o, std::ostream &out)
{
  const io::ExperimentConfig c = make_config(o);
  std::unique_ptr<SyntheticProblem> problem;
  std::optional<DataSource> source;
  if (!c.hf_path.empty() || !c.lf_path.empty())
  {
    Dataset hf = require_dataset(c.hf_path, "hf");
    Dataset lf = require_dataset(c.lf_path, "lf");
    source.emplace(std::move(hf), std::move(lf));
  }
  else
  {
    problem = std::make_unique<SyntheticProblem>(c.seeded_generator());
    source.emplace(*problem);
  }
  const ProtocolReport r = run_protocol(*source, c.seeded_plan(), c.methods, c.protocol());
  if (o.format == "csv")
  {
    emit(o, "report.csv", io::report_to_csv(r), out);
  }
  else
  {
    emit(o, "report.json", io::report_to_json(r, c.hash()).dump(2) + "\n", out);
  }
  return Ok;
}

}  // namespace detail

//
// Command-line entry point. Exit codes: 0 success, 1 usage or configuration
// error, 2 data error, 3 numerical failure.
//
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
  detail::Options o;
  CLI::App app{"Projection-based multifidelity linear regression", "mflr"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", o.config, "Experiment configuration (JSON)");
  app.add_option("--seed", o.seed, "Root random seed (overrides the config)");
  app.add_option("--out", o.out, "Output directory (default: write to stdout)");
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  CLI::Option *threads = app.add_option("--threads", o.threads, "Worker threads")->envname("MFLR_THREADS")->check(CLI::PositiveNumber);

  CLI::App *fit = app.add_subcommand("fit", "Fit a surrogate and write it as JSON");
  fit->add_option("--hf", o.hf, "HF dataset manifest");
  fit->add_option("--lf", o.lf, "LF dataset manifest");

  CLI::App *cv = app.add_subcommand("cv", "Select w_syn by leave-one-out cross-validation");
  cv->add_option("--hf", o.hf, "HF dataset manifest");
  cv->add_option("--lf", o.lf, "LF dataset manifest");

  CLI::App *pred = app.add_subcommand("predict", "Predict outputs at new inputs");
  pred->add_option("--model", o.model, "Surrogate file")->required();
  pred->add_option("--inputs", o.inputs, "Input matrix, one sample per row")->required();

  CLI::App *eval = app.add_subcommand("evaluate", "Score a surrogate on a test dataset");
  eval->add_option("--model", o.model, "Surrogate file")->required();
  eval->add_option("--test", o.test, "Test dataset manifest")->required();
  eval->add_flag("--node-errors", o.node_errors, "Also write per-node absolute errors (node_errors.csv)");

  CLI::App *bench = app.add_subcommand("benchmark", "Run the repeated-subsampling benchmark");
  bench->add_option("--hf", o.hf, "HF pool manifest");
  bench->add_option("--lf", o.lf, "LF pool manifest");

  try
  {
    app.parse(argc, argv);
    // values taken from the environment skip CLI11 validators
    const char *env = std::getenv("MFLR_THREADS");
    if (env != nullptr && threads->count() == 0 && o.threads < 1)
    {
      throw CLI::ValidationError("MFLR_THREADS", std::string("must be a positive integer, got '") + env + "'");
    }
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e, out, err);
    return code == 0 ? Ok : Usage;
  }

  try
  {
    if (*fit)
    {
      return detail::cmd_fit(o, out);
    }
    if (*cv)
    {
      return detail::cmd_cv(o, out);
    }
    if (*pred)
    {
      return detail::cmd_predict(o, out);
    }
    if (*eval)
    {
      return detail::cmd_evaluate(o, out);
    }
    return detail::cmd_benchmark(o, out);
  }
  catch (const ConfigError &e)
  {
    err << "mflr: configuration error: " << e.what() << "\n";
    return Usage;
  }
  catch (const std::invalid_argument &e)
  {
    err << "mflr: invalid argument: " << e.what() << "\n";
    return Usage;
  }
  catch (const DataError &e)
  {
    err << "mflr: data error: " << e.what() << "\n";
    return Data;
  }
  catch (const NumericalError &e)
  {
    err << "mflr: numerical error: " << e.what() << "\n";
    return Numerical;
  }
  catch (const std::exception &e)
  {
    err << "mflr: " << e.what() << "\n";
    return Numerical;
  }
}

}  // namespace mflr::cli

#endif  // MFLR_CLI_HPP
