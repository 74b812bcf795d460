#include "ccsa/error.hpp"
#include "ccsa/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace ccsa {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where)
{
  if (!j.is_object())
    throw ValidationError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : allowed)
      known = known || item.key() == key;
    if (!known)
      throw ValidationError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out)
{
  if (!j.contains(key))
    return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad value for '") + key + "': " + e.what());
  }
}

Vector read_vector(const json& j, const char* key)
{
  std::vector<double> values;
  read(j, key, values);
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> to_std(const Vector& v)
{
  return {v.data(), v.data() + v.size()};
}

double read_cap(const json& j)
{
  if (!j.contains("lambda_cap") || j.at("lambda_cap").is_null())
    return kInfinity;
  double cap = kInfinity;
  read(j, "lambda_cap", cap);
  return cap;
}

json cap_json(double cap)
{
  return std::isinf(cap) ? json(nullptr) : json(cap);
}

ProblemSpec problem_from(const json& j)
{
  ProblemSpec spec;
  if (j.is_string()) {
    spec.name = j.get<std::string>();
    return spec;
  }
  read(j, "name", spec.name);
  if (spec.name == "portfolio") {
    check_keys(j, {"name", "pi", "l", "b", "xi_bar", "sigma"}, "portfolio problem");
    read(j, "pi", spec.portfolio.pi);
    read(j, "l", spec.portfolio.l);
    read(j, "b", spec.portfolio.b);
    read(j, "xi_bar", spec.portfolio.xi_bar);
    read(j, "sigma", spec.portfolio.sigma);
  } else if (spec.name == "toy") {
    check_keys(j, {"name", "pi", "mean", "stddev"}, "toy problem");
    read(j, "pi", spec.toy.pi);
    read(j, "mean", spec.toy.mean);
    read(j, "stddev", spec.toy.stddev);
  } else {
    throw ValidationError("unknown problem '" + spec.name + "'");
  }
  return spec;
}

json problem_json(const ProblemSpec& spec)
{
  if (spec.name == "toy")
    return {{"name", "toy"}, {"pi", spec.toy.pi}, {"mean", spec.toy.mean},
            {"stddev", spec.toy.stddev}};
  return {{"name", spec.name},           {"pi", spec.portfolio.pi},
          {"l", spec.portfolio.l},       {"b", spec.portfolio.b},
          {"xi_bar", spec.portfolio.xi_bar}, {"sigma", spec.portfolio.sigma}};
}

IterateState initial_from(const json& j)
{
  check_keys(j, {"u", "lambda"}, "initial state");
  return {read_vector(j, "u"), read_vector(j, "lambda"), 0};
}

json initial_json(const IterateState& s)
{
  return {{"u", to_std(s.u)}, {"lambda", to_std(s.lambda)}};
}

TuningConstants tuning_from(const json& j)
{
  check_keys(j, {"gamma", "beta", "a", "b", "d", "e", "f", "g", "hypothesis"}, "schedules");
  TuningConstants t;
  read(j, "gamma", t.gamma);
  read(j, "beta", t.beta);
  read(j, "a", t.a);
  read(j, "b", t.b);
  read(j, "d", t.d);
  read(j, "e", t.e);
  read(j, "f", t.f);
  read(j, "g", t.g);
  if (j.contains("hypothesis")) {
    std::string h;
    read(j, "hypothesis", h);
    t.hypothesis = parse_hypothesis(h);
  }
  return t;
}

json tuning_json(const TuningConstants& t)
{
  return {{"gamma", t.gamma}, {"beta", t.beta}, {"a", t.a}, {"b", t.b},
          {"d", t.d},         {"e", t.e},       {"f", t.f}, {"g", t.g},
          {"hypothesis", to_string(t.hypothesis)}};
}

// Reads estimator/kernel/dual mode/schedules from an object whose other
// keys were already vetted by the caller.
VariantConfig variant_fields(const json& j)
{
  VariantConfig v;
  std::string kind = "ac";
  read(j, "estimator", kind);
  v.estimator.kind = parse_estimator_kind(kind);
  v.estimator.dual_mode = v.estimator.kind == EstimatorKind::ac
                            ? DualEstimateMode::mollified
                            : DualEstimateMode::raw_indicator;
  v.label = kind == "ac" ? "AC" : kind == "fd" ? "FD" : "exact";
  if (j.contains("kernel")) {
    std::string name;
    read(j, "kernel", name);
    v.estimator.kernel = kernel_by_name(name);
  }
  if (j.contains("dual_estimate_mode")) {
    std::string mode;
    read(j, "dual_estimate_mode", mode);
    v.estimator.dual_mode = parse_dual_estimate_mode(mode);
  }
  if (j.contains("schedules"))
    v.tuning = tuning_from(j.at("schedules"));
  return v;
}

void variant_json(json& j, const VariantConfig& v)
{
  j["estimator"] = to_string(v.estimator.kind);
  j["kernel"] = v.estimator.kernel.name();
  j["dual_estimate_mode"] = to_string(v.estimator.dual_mode);
  j["schedules"] = tuning_json(v.tuning);
}

json parse_document(std::string_view text)
{
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

std::string slurp(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json vector_json(const Vector& v)
{
  return to_std(v);
}

json matrix_json(const Eigen::MatrixXd& m)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(m(i, c));
    rows.push_back(row);
  }
  return rows;
}

} // namespace

ExperimentConfig parse_experiment_config(std::string_view text)
{
  const json j = parse_document(text);
  check_keys(j,
             {"problem", "initial", "iterations", "record_stride", "lambda_cap", "replications",
              "base_seed", "seeds", "variants", "output_dir", "emit_plots", "workers"},
             "experiment config");
  ExperimentConfig c;
  if (j.contains("problem"))
    c.problem = problem_from(j.at("problem"));
  if (j.contains("initial"))
    c.initial = initial_from(j.at("initial"));
  read(j, "iterations", c.iterations);
  read(j, "record_stride", c.record_stride);
  c.lambda_cap = read_cap(j);
  read(j, "replications", c.replications);
  read(j, "base_seed", c.base_seed);
  read(j, "seeds", c.seeds);
  if (j.contains("variants")) {
    if (!j.at("variants").is_array())
      throw ValidationError("'variants' must be an array");
    c.variants.clear();
    for (const auto& vj : j.at("variants")) {
      check_keys(vj, {"label", "estimator", "kernel", "dual_estimate_mode", "schedules"},
                 "variant");
      VariantConfig v = variant_fields(vj);
      read(vj, "label", v.label);
      c.variants.push_back(std::move(v));
    }
  }
  std::string dir = c.output_dir.string();
  read(j, "output_dir", dir);
  c.output_dir = dir;
  read(j, "emit_plots", c.emit_plots);
  read(j, "workers", c.workers);
  c.validate();
  return c;
}

SolveConfig parse_solve_config(std::string_view text)
{
  const json j = parse_document(text);
  check_keys(j,
             {"problem", "estimator", "kernel", "dual_estimate_mode", "schedules", "initial",
              "iterations", "record_stride", "seed", "lambda_cap"},
             "solve config");
  SolveConfig c;
  if (j.contains("problem"))
    c.problem = problem_from(j.at("problem"));
  c.variant = variant_fields(j);
  if (j.contains("initial"))
    c.initial = initial_from(j.at("initial"));
  read(j, "iterations", c.iterations);
  read(j, "record_stride", c.record_stride);
  read(j, "seed", c.seed);
  c.lambda_cap = read_cap(j);
  c.variant.tuning.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
  return parse_experiment_config(slurp(path));
}

SolveConfig load_solve_config(const std::filesystem::path& path)
{
  return parse_solve_config(slurp(path));
}

std::string to_json(const ExperimentConfig& c)
{
  json j;
  j["problem"] = problem_json(c.problem);
  if (c.initial)
    j["initial"] = initial_json(*c.initial);
  j["iterations"] = c.iterations;
  j["record_stride"] = c.record_stride;
  j["lambda_cap"] = cap_json(c.lambda_cap);
  j["replications"] = c.replications;
  j["base_seed"] = c.base_seed;
  j["seeds"] = c.seeds;
  json variants = json::array();
  for (const auto& v : c.variants) {
    json vj;
    vj["label"] = v.label;
    variant_json(vj, v);
    variants.push_back(vj);
  }
  j["variants"] = variants;
  j["output_dir"] = c.output_dir.string();
  j["emit_plots"] = c.emit_plots;
  j["workers"] = c.workers;
  return j.dump(2);
}

std::string to_json(const SolveConfig& c)
{
  json j;
  j["problem"] = problem_json(c.problem);
  variant_json(j, c.variant);
  if (c.initial)
    j["initial"] = initial_json(*c.initial);
  j["iterations"] = c.iterations;
  j["record_stride"] = c.record_stride;
  j["seed"] = c.seed;
  j["lambda_cap"] = cap_json(c.lambda_cap);
  return j.dump(2);
}

std::string to_json(const BiasVarianceReport& r)
{
  json j{{"smoothing", r.smoothing}, {"samples", r.samples}, {"mean", vector_json(r.mean)},
         {"variance", vector_json(r.variance)}, {"bias", vector_json(r.bias)}, {"mqe", r.mqe}};
  return j.dump(2);
}

std::string to_json(const LinearizationReport& r)
{
  json eig = json::array();
  for (const auto& z : r.eigenvalues)
    eig.push_back({{"re", z.real()}, {"im", z.imag()}});
  json j{{"indices", r.indices},
         {"matrix", matrix_json(r.matrix)},
         {"eigenvalues", eig},
         {"min_real", r.min_real},
         {"threshold", r.threshold},
         {"stable_gamma_below_one", r.stable_gamma_below_one},
         {"stable_gamma_one", r.stable_gamma_one}};
  return j.dump(2);
}

std::string to_json(const CltSummary& s)
{
  json cps = json::array();
  for (const auto& c : s.checkpoints)
    cps.push_back({{"k", c.k},
                   {"mean", vector_json(c.mean)},
                   {"covariance", matrix_json(c.covariance)},
                   {"skewness", vector_json(c.skewness)},
                   {"excess_kurtosis", vector_json(c.excess_kurtosis)},
                   {"mse", c.mse},
                   {"scaled_mse", c.scaled_mse}});
  json j{{"replications", s.replications}, {"mse_slope", s.mse_slope}, {"checkpoints", cps}};
  return j.dump(2);
}

} // namespace ccsa
