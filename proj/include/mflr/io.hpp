// Copyright mflr contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef MFLR_IO_HPP
#define MFLR_IO_HPP

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>
#include <json.hpp>
#include "mflr/bench.hpp"
#include "mflr/mf.hpp"

namespace mflr::io
{

using json = nlohmann::json;
namespace fs = std::filesystem;

inline constexpr int kSurrogateVersion = 1;
inline constexpr int kReportVersion = 1;

//
// Matrix files: UTF-8 delimiter-separated values, one sample per row.
// Comma, semicolon, tab or plain whitespace separate values; blank lines and
// lines starting with '#' are skipped.
//
inline Matrix parse_matrix(std::istream &in, const std::string &source = "<stream>")
{
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line))
  {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
    {
      line.pop_back();
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#')
    {
      continue;
    }
    for (char &ch : line)
    {
      if (ch == ',' || ch == ';' || ch == '\t')
      {
        ch = ' ';
      }
    }
    std::istringstream fields(line);
    std::string tok;
    std::size_t count = 0;
    while (fields >> tok)
    {
      const char *begin = tok.c_str();
      char *end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0')
      {
        throw DataError(DataError::Code::Malformed, source + ": malformed value '" + tok + "' at line " +
                                                        std::to_string(line_no));
      }
      if (!std::isfinite(v))
      {
        throw DataError(DataError::Code::NonFinite, source + ": non-finite value at line " + std::to_string(line_no));
      }
      values.push_back(v);
      ++count;
    }
    if (rows == 0)
    {
      cols = count;
    }
    else if (count != cols)
    {
      throw DataError(DataError::Code::Ragged, source + ": ragged row at line " + std::to_string(line_no));
    }
    ++rows;
  }
  if (rows == 0)
  {
    throw DataError(DataError::Code::Empty, source + ": no data rows");
  }
  return from_row_major(rows, cols, values);
}

inline Matrix read_matrix(const fs::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw DataError(DataError::Code::Io, "cannot open " + path.string());
  }
  return parse_matrix(in, path.string());
}

inline void write_matrix(std::ostream &out, const Matrix &a, char delimiter = ',')
{
  char buf[32];
  for (Eigen::Index i = 0; i < a.rows(); ++i)
  {
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
      std::snprintf(buf, sizeof(buf), "%.17g", a(i, j));
      if (j > 0)
      {
        out << delimiter;
      }
      out << buf;
    }
    out << '\n';
  }
}

inline void write_matrix(const fs::path &path, const Matrix &a)
{
  std::ofstream out(path);
  if (!out)
  {
    throw DataError(DataError::Code::Io, "cannot write " + path.string());
  }
  write_matrix(out, a);
}

inline json read_json(const fs::path &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw DataError(DataError::Code::Io, "cannot open " + path.string());
  }
  try
  {
    return json::parse(in);
  }
  catch (const json::parse_error &e)
  {
    throw DataError(DataError::Code::Malformed, path.string() + ": " + e.what());
  }
}

inline void write_text(const fs::path &path, const std::string &text)
{
  if (path.has_parent_path())
  {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out)
  {
    throw DataError(DataError::Code::Io, "cannot write " + path.string());
  }
  out << text;
}

namespace detail
{

inline void reject_unknown_keys(const json &j, std::initializer_list<const char *> allowed, const std::string &where,
                                bool config = false)
{
  if (!j.is_object())
  {
    const std::string msg = where + " must be a JSON object";
    if (config)
    {
      throw ConfigError(msg);
    }
    throw DataError(DataError::Code::Schema, msg);
  }
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto &item : j.items())
  {
    if (ok.count(item.key()) == 0)
    {
      const std::string msg = where + ": unknown key '" + item.key() + "'";
      if (config)
      {
        throw ConfigError(msg);
      }
      throw DataError(DataError::Code::Schema, msg);
    }
  }
}

inline json matrix_to_json(const Matrix &a)
{
  return json{{"rows", a.rows()}, {"cols", a.cols()}, {"data", to_row_major(a)}};
}

inline Matrix matrix_from_json(const json &j)
{
  const auto rows = j.at("rows").get<std::size_t>();
  const auto cols = j.at("cols").get<std::size_t>();
  const auto data = j.at("data").get<std::vector<double>>();
  return from_row_major(rows, cols, data);
}

inline json vector_to_json(const Vector &v)
{
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Vector vector_from_json(const json &j)
{
  const auto data = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i)
  {
    v(static_cast<Eigen::Index>(i)) = data[i];
  }
  require_finite(Matrix(v), "vector");
  return v;
}

}  // namespace detail

// ---- datasets ---------------------------------------------------------------

inline const char *to_string(Fidelity f)
{
  return f == Fidelity::HF ? "HF" : "LF";
}

inline Fidelity fidelity_from_string(const std::string &s)
{
  if (s == "HF" || s == "hf")
  {
    return Fidelity::HF;
  }
  if (s == "LF" || s == "lf")
  {
    return Fidelity::LF;
  }
  throw DataError(DataError::Code::Schema, "unknown fidelity tag '" + s + "'");
}

//
// A dataset is a JSON manifest naming an inputs file (N x d), an outputs
// file (N x m), a fidelity tag and a per-sample cost. Relative file names
// are resolved against the manifest's directory.
//
inline Dataset load_dataset(const fs::path &manifest_path)
{
  const json m = read_json(manifest_path);
  detail::reject_unknown_keys(m, {"inputs", "outputs", "fidelity", "cost_per_sample"}, manifest_path.string());
  Dataset ds;
  try
  {
    const fs::path base = manifest_path.parent_path();
    const fs::path inputs = base / m.at("inputs").get<std::string>();
    const fs::path outputs = base / m.at("outputs").get<std::string>();
    ds.fidelity = fidelity_from_string(m.at("fidelity").get<std::string>());
    ds.cost_per_sample = m.value("cost_per_sample", ds.fidelity == Fidelity::HF ? 1.0 : 1.0 / 127.0);
    ds.inputs = read_matrix(inputs).transpose();
    ds.outputs = read_matrix(outputs).transpose();
  }
  catch (const json::exception &e)
  {
    throw DataError(DataError::Code::Schema, manifest_path.string() + ": " + e.what());
  }
  if (ds.inputs.cols() != ds.outputs.cols())
  {
    throw DataError(DataError::Code::DimensionMismatch,
                    manifest_path.string() + ": dimension mismatch: " + std::to_string(ds.inputs.cols()) +
                        " input rows vs " + std::to_string(ds.outputs.cols()) + " output rows");
  }
  if (!(ds.cost_per_sample >= 0.0) || !std::isfinite(ds.cost_per_sample))
  {
    throw DataError(DataError::Code::Schema, manifest_path.string() + ": cost_per_sample must be non-negative");
  }
  return ds;
}

// Writes <stem>_inputs.csv, <stem>_outputs.csv and the manifest itself.
inline void save_dataset(const Dataset &ds, const fs::path &manifest_path)
{
  ds.validate();
  const fs::path base = manifest_path.parent_path();
  if (!base.empty())
  {
    fs::create_directories(base);
  }
  const std::string stem = manifest_path.stem().string();
  write_matrix(base / (stem + "_inputs.csv"), ds.inputs.transpose());
  write_matrix(base / (stem + "_outputs.csv"), ds.outputs.transpose());
  const json m{{"inputs", stem + "_inputs.csv"},
               {"outputs", stem + "_outputs.csv"},
               {"fidelity", to_string(ds.fidelity)},
               {"cost_per_sample", ds.cost_per_sample}};
  write_text(manifest_path, m.dump(2) + "\n");
}

// ---- surrogates -------------------------------------------------------------

inline Variant variant_from_string(const std::string &s)
{
  for (Variant v : {Variant::SingleFidelity, Variant::DirectAug, Variant::ExplicitMapAug, Variant::Additive})
  {
    if (s == mflr::to_string(v))
    {
      return v;
    }
  }
  throw DataError(DataError::Code::Schema, "unknown surrogate variant '" + s + "'");
}

inline json to_json(const FeatureMap &fm)
{
  json j{{"input_dim", fm.input_dim()}, {"degree", fm.degree()}};
  if (fm.scaled())
  {
    j["lower"] = detail::vector_to_json(fm.lower());
    j["upper"] = detail::vector_to_json(fm.upper());
  }
  return j;
}

inline FeatureMap feature_map_from_json(const json &j)
{
  FeatureMap fm(j.at("input_dim").get<int>(), j.at("degree").get<int>());
  if (j.contains("lower"))
  {
    fm = fm.with_bounds(detail::vector_from_json(j.at("lower")), detail::vector_from_json(j.at("upper")));
  }
  return fm;
}

inline json to_json(const ReducedBasis &b)
{
  return json{{"basis", detail::matrix_to_json(b.basis)},
              {"mean", detail::vector_to_json(b.mean)},
              {"singular_values", detail::vector_to_json(b.singular_values)},
              {"energy_tolerance", b.energy_tolerance}};
}

inline ReducedBasis basis_from_json(const json &j)
{
  ReducedBasis b;
  b.basis = detail::matrix_from_json(j.at("basis"));
  b.mean = detail::vector_from_json(j.at("mean"));
  b.singular_values = detail::vector_from_json(j.at("singular_values"));
  b.energy_tolerance = j.at("energy_tolerance").get<double>();
  require_dims(b.basis.rows() == b.mean.size() || b.basis.cols() == 0, "basis rows must match mean length");
  if (b.basis.cols() == 0)
  {
    b.basis.resize(b.mean.size(), 0);
  }
  return b;
}

inline json to_json(const LinearModel &m)
{
  return json{{"feature_map", to_json(m.feature_map)},
              {"coefficients", detail::matrix_to_json(m.coefficients)},
              {"underdetermined", m.underdetermined}};
}

inline LinearModel model_from_json(const json &j)
{
  LinearModel m;
  m.feature_map = feature_map_from_json(j.at("feature_map"));
  m.coefficients = detail::matrix_from_json(j.at("coefficients"));
  if (m.coefficients.cols() == 0)
  {
    m.coefficients.resize(m.feature_map.size(), 0);
  }
  m.underdetermined = j.value("underdetermined", false);
  require_dims(m.coefficients.rows() == m.feature_map.size(), "coefficient rows must equal the feature count");
  return m;
}

inline json to_json(const MFSurrogate &s, const std::string &config_hash = "")
{
  json j{{"format", "mflr-surrogate"},
         {"version", kSurrogateVersion},
         {"variant", mflr::to_string(s.variant)},
         {"w_syn", s.w_syn},
         {"config_hash", config_hash},
         {"warnings", s.warnings}};
  if (s.variant == Variant::Additive)
  {
    j["lf_basis"] = to_json(s.lf_basis);
    j["lf_model"] = to_json(s.lf_model);
    j["delta_basis"] = to_json(s.delta_basis);
    j["delta_model"] = to_json(s.delta_model);
  }
  else
  {
    j["hf_basis"] = to_json(s.hf_basis);
    j["model"] = to_json(s.model);
  }
  return j;
}

inline MFSurrogate surrogate_from_json(const json &j)
{
  try
  {
    if (j.at("format").get<std::string>() != "mflr-surrogate")
    {
      throw DataError(DataError::Code::Schema, "not an mflr surrogate file");
    }
    if (j.at("version").get<int>() != kSurrogateVersion)
    {
      throw DataError(DataError::Code::Schema, "unsupported surrogate version " + j.at("version").dump());
    }
    MFSurrogate s;
    s.variant = variant_from_string(j.at("variant").get<std::string>());
    s.w_syn = j.value("w_syn", 0.0);
    s.warnings = j.value("warnings", std::vector<std::string>{});
    if (s.variant == Variant::Additive)
    {
      s.lf_basis = basis_from_json(j.at("lf_basis"));
      s.lf_model = model_from_json(j.at("lf_model"));
      s.delta_basis = basis_from_json(j.at("delta_basis"));
      s.delta_model = model_from_json(j.at("delta_model"));
      require_dims(s.lf_model.output_dim() == s.lf_basis.k() && s.delta_model.output_dim() == s.delta_basis.k(),
                   "additive surrogate parts are inconsistent");
    }
    else
    {
      s.hf_basis = basis_from_json(j.at("hf_basis"));
      s.model = model_from_json(j.at("model"));
      require_dims(s.model.output_dim() == s.hf_basis.k(), "model output count must equal basis size");
    }
    return s;
  }
  catch (const json::exception &e)
  {
    throw DataError(DataError::Code::Schema, std::string("surrogate file: ") + e.what());
  }
}

inline void save_surrogate(const MFSurrogate &s, const fs::path &path, const std::string &config_hash = "")
{
  write_text(path, to_json(s, config_hash).dump() + "\n");
}

inline MFSurrogate load_surrogate(const fs::path &path)
{
  return surrogate_from_json(read_json(path));
}

// ---- experiment configuration -------------------------------------------------

struct Degrees
{
  int sf = 1;
  int additive_lf = 1;
  int additive_delta = 1;
  int augmented = 2;
  int map_lf = 2;
};

struct ExperimentConfig
{
  Method method = Method::DirectAug;
  double epsilon = 0.995;
  Degrees degrees;
  WeightScheme weighting{WeightKind::Proximity, 0.1, 10.0};
  bool cv_enabled = true;
  double cv_init = 0.1;
  RepetitionPlan plan;
  std::vector<MethodSpec> methods = default_methods();
  std::string hf_path;
  std::string lf_path;
  GeneratorSpec generator;
  bool generator_seed_set = false;
  std::uint64_t seed = 0;
  double cost_ratio = 1.0 / 127.0;
  int threads = 1;
  json source;  // parsed document, for hashing

  ProtocolConfig protocol() const
  {
    ProtocolConfig p;
    p.epsilon = epsilon;
    p.sf_degree = degrees.sf;
    p.additive_lf_degree = degrees.additive_lf;
    p.additive_delta_degree = degrees.additive_delta;
    p.aug_degree = degrees.augmented;
    p.map_lf_degree = degrees.map_lf;
    p.cv_init = cv_init;
    p.cost_ratio = cost_ratio;
    p.threads = threads;
    return p;
  }

  RepetitionPlan seeded_plan() const
  {
    RepetitionPlan p = plan;
    p.seed = seed;
    return p;
  }

  GeneratorSpec seeded_generator() const
  {
    GeneratorSpec g = generator;
    if (!generator_seed_set)
    {
      g.seed = derive_seed(seed, {tag(Stream::Generator)});
    }
    return g;
  }

  std::string hash() const
  {
    json j = source;
    j["seed"] = seed;
    const std::string text = j.dump();
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(mflr::detail::fnv1a(text.data(), text.size())));
    return buf;
  }
};

namespace detail
{

template <typename T>
T get_checked(const json &j, const char *key, T fallback)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  try
  {
    return j.at(key).get<T>();
  }
  catch (const json::exception &)
  {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

inline void check_range(bool ok, const std::string &msg)
{
  if (!ok)
  {
    throw ConfigError(msg);
  }
}

inline WeightKind weight_kind_from_string(const std::string &s)
{
  if (s == "proximity")
  {
    return WeightKind::Proximity;
  }
  if (s == "fixed")
  {
    return WeightKind::Fixed;
  }
  if (s == "sigmoid")
  {
    throw ConfigError("weighting scheme 'sigmoid' is reserved and not implemented");
  }
  throw ConfigError("unknown weighting scheme '" + s + "' (expected proximity or fixed)");
}

inline WeightScheme parse_scheme(const json &j, WeightScheme base)
{
  base.kind = weight_kind_from_string(get_checked<std::string>(j, "scheme", base.kind == WeightKind::Fixed ? "fixed" : "proximity"));
  base.w_syn = get_checked<double>(j, "w_syn", base.w_syn);
  base.tau_percentile = get_checked<double>(j, "tau_percentile", base.tau_percentile);
  check_range(base.w_syn > 0.0 && base.w_syn < 1.0, "w_syn must lie in (0, 1)");
  check_range(base.tau_percentile >= 0.0 && base.tau_percentile <= 100.0, "tau_percentile must lie in [0, 100]");
  return base;
}

}  // namespace detail

// Parses an experiment configuration; unknown keys and out-of-range values
// raise ConfigError.
inline ExperimentConfig parse_config(const json &j, const fs::path &base_dir = {})
{
  using detail::check_range;
  using detail::get_checked;
  detail::reject_unknown_keys(j,
                              {"method", "epsilon", "degrees", "weighting", "cv", "plan", "methods", "data", "generator",
                               "seed", "cost_ratio", "threads"},
                              "config", true);
  ExperimentConfig c;
  c.source = j;
  c.method = method_from_string(get_checked<std::string>(j, "method", to_string(c.method)));
  c.epsilon = get_checked<double>(j, "epsilon", c.epsilon);
  check_range(c.epsilon > 0.0 && c.epsilon <= 1.0, "epsilon must lie in (0, 1]");
  c.seed = get_checked<std::uint64_t>(j, "seed", c.seed);
  c.cost_ratio = get_checked<double>(j, "cost_ratio", c.cost_ratio);
  check_range(c.cost_ratio >= 0.0 && std::isfinite(c.cost_ratio), "cost_ratio must be non-negative");
  c.threads = get_checked<int>(j, "threads", c.threads);
  check_range(c.threads >= 1, "threads must be >= 1");

  if (j.contains("degrees"))
  {
    const json &d = j.at("degrees");
    detail::reject_unknown_keys(d, {"sf", "additive_lf", "additive_delta", "augmented", "map_lf"}, "config.degrees", true);
    c.degrees.sf = get_checked<int>(d, "sf", c.degrees.sf);
    c.degrees.additive_lf = get_checked<int>(d, "additive_lf", c.degrees.additive_lf);
    c.degrees.additive_delta = get_checked<int>(d, "additive_delta", c.degrees.additive_delta);
    c.degrees.augmented = get_checked<int>(d, "augmented", c.degrees.augmented);
    c.degrees.map_lf = get_checked<int>(d, "map_lf", c.degrees.map_lf);
    for (int v : {c.degrees.sf, c.degrees.additive_lf, c.degrees.additive_delta, c.degrees.augmented, c.degrees.map_lf})
    {
      check_range(v >= 0 && v <= 8, "polynomial degrees must lie in [0, 8]");
    }
  }
  if (j.contains("weighting"))
  {
    detail::reject_unknown_keys(j.at("weighting"), {"scheme", "w_syn", "tau_percentile"}, "config.weighting", true);
    c.weighting = detail::parse_scheme(j.at("weighting"), c.weighting);
  }
  if (j.contains("cv"))
  {
    const json &v = j.at("cv");
    detail::reject_unknown_keys(v, {"enabled", "init"}, "config.cv", true);
    c.cv_enabled = get_checked<bool>(v, "enabled", c.cv_enabled);
    c.cv_init = get_checked<double>(v, "init", c.cv_init);
    check_range(c.cv_init > 0.0 && c.cv_init < 1.0, "cv.init must lie in (0, 1)");
  }
  if (j.contains("plan"))
  {
    const json &p = j.at("plan");
    detail::reject_unknown_keys(p, {"n_reps", "n_hf_grid", "n_lf", "n_test", "n_pool", "redraw_lf"}, "config.plan", true);
    c.plan.n_reps = get_checked<int>(p, "n_reps", c.plan.n_reps);
    c.plan.n_hf_grid = get_checked<std::vector<int>>(p, "n_hf_grid", c.plan.n_hf_grid);
    c.plan.n_lf = get_checked<int>(p, "n_lf", c.plan.n_lf);
    c.plan.n_test = get_checked<int>(p, "n_test", c.plan.n_test);
    c.plan.n_pool = get_checked<int>(p, "n_pool", c.plan.n_pool);
    c.plan.redraw_lf = get_checked<bool>(p, "redraw_lf", c.plan.redraw_lf);
    try
    {
      c.plan.validate();
    }
    catch (const std::invalid_argument &e)
    {
      throw ConfigError(std::string("config.plan: ") + e.what());
    }
  }
  if (j.contains("methods"))
  {
    c.methods.clear();
    for (const json &m : j.at("methods"))
    {
      detail::reject_unknown_keys(m, {"method", "cv", "scheme", "w_syn", "tau_percentile"}, "config.methods[]", true);
      MethodSpec spec;
      spec.method = method_from_string(get_checked<std::string>(m, "method", "sf"));
      spec.cross_validate = get_checked<bool>(m, "cv", true);
      spec.scheme = detail::parse_scheme(m, c.weighting);
      c.methods.push_back(spec);
    }
    check_range(!c.methods.empty(), "config.methods must not be empty");
  }
  if (j.contains("data"))
  {
    const json &d = j.at("data");
    detail::reject_unknown_keys(d, {"hf", "lf"}, "config.data", true);
    auto resolve = [&](const std::string &p) { return p.empty() ? p : (base_dir / p).string(); };
    c.hf_path = resolve(get_checked<std::string>(d, "hf", ""));
    c.lf_path = resolve(get_checked<std::string>(d, "lf", ""));
  }
  if (j.contains("generator"))
  {
    const json &g = j.at("generator");
    detail::reject_unknown_keys(g,
                                {"d", "m", "k_true", "hf_degree", "variation", "mode_decay", "lf_scale", "lf_shift",
                                 "bias_magnitude", "noise_sigma", "seed", "lower", "upper"},
                                "config.generator", true);
    GeneratorSpec &s = c.generator;
    s.d = get_checked<int>(g, "d", s.d);
    s.m = get_checked<int>(g, "m", s.m);
    s.k_true = get_checked<int>(g, "k_true", s.k_true);
    s.hf_degree = get_checked<int>(g, "hf_degree", s.hf_degree);
    s.variation = get_checked<double>(g, "variation", s.variation);
    s.mode_decay = get_checked<double>(g, "mode_decay", s.mode_decay);
    s.lf_scale = get_checked<double>(g, "lf_scale", s.lf_scale);
    s.lf_shift = get_checked<double>(g, "lf_shift", s.lf_shift);
    s.bias_magnitude = get_checked<double>(g, "bias_magnitude", s.bias_magnitude);
    s.noise_sigma = get_checked<double>(g, "noise_sigma", s.noise_sigma);
    check_range(s.d >= 1 && s.m >= 2 && s.k_true >= 1 && s.k_true < s.m && s.hf_degree >= 0,
                "config.generator dimensions are invalid");
    check_range(s.noise_sigma >= 0.0, "config.generator.noise_sigma must be non-negative");
    if (g.contains("seed"))
    {
      s.seed = get_checked<std::uint64_t>(g, "seed", 0);
      c.generator_seed_set = true;
    }
    if (g.contains("lower") || g.contains("upper"))
    {
      const auto lo = get_checked<std::vector<double>>(g, "lower", {});
      const auto hi = get_checked<std::vector<double>>(g, "upper", {});
      check_range(lo.size() == hi.size() && static_cast<int>(lo.size()) == s.d,
                  "config.generator bounds need d lower and d upper values");
      s.bounds.lower = Eigen::Map<const Vector>(lo.data(), static_cast<Eigen::Index>(lo.size()));
      s.bounds.upper = Eigen::Map<const Vector>(hi.data(), static_cast<Eigen::Index>(hi.size()));
      for (std::size_t i = 0; i < lo.size(); ++i)
      {
        check_range(std::isfinite(lo[i]) && std::isfinite(hi[i]) && hi[i] > lo[i], "config.generator bounds are degenerate");
      }
    }
  }
  return c;
}

inline ExperimentConfig load_config(const fs::path &path)
{
  json j;
  {
    std::ifstream in(path);
    if (!in)
    {
      throw ConfigError("cannot open config " + path.string());
    }
    try
    {
      j = json::parse(in);
    }
    catch (const json::parse_error &e)
    {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  return parse_config(j, path.parent_path());
}

// ---- reports ------------------------------------------------------------------

inline std::string weighting_label(const MethodSpec &m)
{
  if (!m.augments())
  {
    return "none";
  }
  const std::string kind = m.scheme.kind == WeightKind::Proximity ? "proximity" : "fixed";
  return (m.cross_validate ? "loocv_" : "fixed_weight_") + kind;
}

inline json to_json(const CVResult &r)
{
  json trace = json::array();
  for (const CVEvaluation &e : r.trace)
  {
    trace.push_back({{"w_syn", e.w_syn}, {"objective", e.objective}});
  }
  return json{{"w_syn_star", r.w_syn_star}, {"objective", r.objective_value}, {"init", r.init}, {"trace", trace}};
}

//
// Benchmark report. Top-level keys: schema, version, seed, config_hash, plan,
// settings, results. Each result carries method, weighting, w_fixed, n_hf,
// n_lf, median, p25, p75, equivalent_cost, accuracies and w_syn.
//
inline json report_to_json(const ProtocolReport &r, const std::string &config_hash)
{
  json results = json::array();
  for (const MethodReport &m : r.results)
  {
    json item{{"method", to_string(m.spec.method)},
              {"weighting", weighting_label(m.spec)},
              {"w_fixed", (m.spec.augments() && !m.spec.cross_validate) ? json(m.spec.scheme.w_syn) : json(nullptr)},
              {"n_hf", m.report.n_hf},
              {"n_lf", m.report.n_lf},
              {"median", m.report.median},
              {"p25", m.report.p25},
              {"p75", m.report.p75},
              {"equivalent_cost", m.report.equivalent_cost},
              {"accuracies", m.report.per_repetition},
              {"w_syn", m.w_syn}};
    results.push_back(std::move(item));
  }
  std::vector<std::int64_t> test(r.test_indices.begin(), r.test_indices.end());
  return json{{"schema", "mflr-benchmark-report"},
              {"version", kReportVersion},
              {"seed", r.plan.seed},
              {"config_hash", config_hash},
              {"plan",
               {{"n_reps", r.plan.n_reps},
                {"n_hf_grid", r.plan.n_hf_grid},
                {"n_lf", r.plan.n_lf},
                {"n_test", r.plan.n_test},
                {"n_pool", r.plan.n_pool},
                {"redraw_lf", r.plan.redraw_lf},
                {"test_indices", test}}},
              {"settings",
               {{"epsilon", r.config.epsilon},
                {"degrees",
                 {{"sf", r.config.sf_degree},
                  {"additive_lf", r.config.additive_lf_degree},
                  {"additive_delta", r.config.additive_delta_degree},
                  {"augmented", r.config.aug_degree},
                  {"map_lf", r.config.map_lf_degree}}},
                {"cv_init", r.config.cv_init},
                {"cost_ratio", r.config.cost_ratio}}},
              {"results", results}};
}

inline std::string report_to_csv(const ProtocolReport &r)
{
  std::ostringstream out;
  out << "method,weighting,w_fixed,n_hf,n_lf,median,p25,p75,equivalent_cost\n";
  char buf[256];
  for (const MethodReport &m : r.results)
  {
    const std::string w = (m.spec.augments() && !m.spec.cross_validate) ? std::to_string(m.spec.scheme.w_syn) : "";
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%d,%d,%.17g,%.17g,%.17g,%.17g\n", to_string(m.spec.method),
                  weighting_label(m.spec).c_str(), w.c_str(), m.report.n_hf, m.report.n_lf, m.report.median, m.report.p25,
                  m.report.p75, m.report.equivalent_cost);
    out << buf;
  }
  return out.str();
}

}  // namespace mflr::io

#endif  // MFLR_IO_HPP
