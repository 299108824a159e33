#include "streamrec/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "streamrec/errors.hpp"
#include "streamrec/io.hpp"

namespace streamrec {

using json = nlohmann::ordered_json;

namespace {

template <typename T>
void read_key(const json& obj, const char* key, T& target) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  target = it->template get<T>();
}

template <typename T>
void read_optional(const json& obj, const char* key, std::optional<T>& target) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (it->is_null()) target.reset();
  else target = it->template get<T>();
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw std::invalid_argument("config: '" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : obj.items())
    if (!ok.count(item.key())) throw std::invalid_argument("config: unknown key '" + where + "." + item.key() + "'");
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::string generator_name(Generator) { return "daubechies4"; }

Generator generator_from_string(const std::string& s) {
  if (s == "daubechies4" || s == "d4") return Generator::Daubechies4;
  throw std::invalid_argument("config: unknown generator '" + s + "'");
}

}  // namespace

ExperimentConfig level_crossing_config() {
  ExperimentConfig c;
  c.name = "level-crossing";
  c.basis = BasisDescriptor{BasisFamily::LOT, 75, 0.25, 16.0, 1024, Generator::Daubechies4};
  c.out_dir = "out/level-crossing";
  return c;
}

ExperimentConfig delay_doppler_config() {
  ExperimentConfig c;
  c.name = "delay-doppler";
  c.basis = BasisDescriptor{BasisFamily::LOT, 85, 0.25, 16.0, 1024, Generator::Daubechies4};
  c.signal.kind = "ofdm";
  c.signal.components = 64;
  c.signal.first_interval = -1;
  c.signal.last_interval = 17;
  c.sampling.kind = "delay-doppler";
  c.sampling.taps = default_taps();
  c.sampling.t_step = 0.01;
  c.out_dir = "out/delay-doppler";
  return c;
}

ExperimentConfig preset_config(const std::string& name) {
  if (name == "level-crossing") return level_crossing_config();
  if (name == "delay-doppler") return delay_doppler_config();
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

std::string config_to_json(const ExperimentConfig& c) {
  json taps = json::array();
  for (const auto& t : c.sampling.taps) taps.push_back({{"a", t.a}, {"tau", t.tau}, {"f", t.f}});
  json j = {
      {"name", c.name},
      {"basis",
       {{"family", to_string(c.basis.family)},
        {"n", c.basis.n},
        {"eta", c.basis.eta},
        {"omega", c.basis.omega},
        {"grid_size", c.basis.grid_size},
        {"generator", generator_name(c.basis.generator)}}},
      {"signal",
       {{"kind", c.signal.kind},
        {"seed", c.signal.seed},
        {"spacing", c.signal.spacing},
        {"support", {c.signal.support_lo, c.signal.support_hi}},
        {"components", c.signal.components},
        {"intervals", {c.signal.first_interval, c.signal.last_interval}}}},
      {"sampling",
       {{"kind", c.sampling.kind},
        {"levels", c.sampling.levels},
        {"level_min", c.sampling.level_min},
        {"level_max", c.sampling.level_max},
        {"window", {c.sampling.window_lo, c.sampling.window_hi}},
        {"scan_step", c.sampling.scan_step},
        {"tolerance", c.sampling.tolerance},
        {"taps", taps},
        {"t_step", c.sampling.t_step},
        {"noise_sigma", c.sampling.noise_sigma}}},
      {"solver",
       {{"first_batch", c.solver.first_batch},
        {"last_batch", c.solver.last_batch},
        {"lambda_rel", c.solver.lambda_rel},
        {"max_lag", optional_json(c.solver.max_lag)},
        {"freeze_lag", optional_json(c.solver.freeze_lag)},
        {"tail_reg_transient", c.solver.tail_reg_transient},
        {"compare_lag", optional_json(c.solver.compare_lag)}}},
      {"analysis",
       {{"k_range", {c.analysis.k_lo, c.analysis.k_hi}},
        {"K_range", {c.analysis.K_lo, c.analysis.K_hi}},
        {"nyquist_spacing", c.analysis.nyquist_spacing},
        {"rmse_window", {c.analysis.rmse_lo, c.analysis.rmse_hi}},
        {"conditioning", c.analysis.conditioning}}},
      {"output", {{"dir", c.out_dir}}},
  };
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const json j = json::parse(text, nullptr, false);
  ExperimentConfig base = level_crossing_config();
  if (!j.is_discarded() && j.is_object() && j.contains("name")) base = preset_config(j.at("name").get<std::string>());
  return config_from_json(text, base);
}

ExperimentConfig config_from_json(const std::string& text, const ExperimentConfig& base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  ExperimentConfig c = base;
  try {
    check_keys(j, "", {"name", "basis", "signal", "sampling", "solver", "analysis", "output"});
    read_key(j, "name", c.name);
    if (j.contains("basis")) {
      const auto& b = j["basis"];
      check_keys(b, "basis", {"family", "n", "eta", "omega", "grid_size", "generator"});
      if (b.contains("family")) c.basis.family = basis_family_from_string(b["family"].get<std::string>());
      read_key(b, "n", c.basis.n);
      read_key(b, "eta", c.basis.eta);
      read_key(b, "omega", c.basis.omega);
      read_key(b, "grid_size", c.basis.grid_size);
      if (b.contains("generator")) c.basis.generator = generator_from_string(b["generator"].get<std::string>());
    }
    if (j.contains("signal")) {
      const auto& s = j["signal"];
      check_keys(s, "signal", {"kind", "seed", "spacing", "support", "components", "intervals"});
      read_key(s, "kind", c.signal.kind);
      read_key(s, "seed", c.signal.seed);
      read_key(s, "spacing", c.signal.spacing);
      if (s.contains("support")) {
        c.signal.support_lo = s["support"].at(0).get<double>();
        c.signal.support_hi = s["support"].at(1).get<double>();
      }
      read_key(s, "components", c.signal.components);
      if (s.contains("intervals")) {
        c.signal.first_interval = s["intervals"].at(0).get<long>();
        c.signal.last_interval = s["intervals"].at(1).get<long>();
      }
    }
    if (j.contains("sampling")) {
      const auto& s = j["sampling"];
      check_keys(s, "sampling", {"kind", "levels", "level_min", "level_max", "window", "scan_step", "tolerance", "taps",
                                 "t_step", "noise_sigma"});
      read_key(s, "kind", c.sampling.kind);
      read_key(s, "levels", c.sampling.levels);
      read_key(s, "level_min", c.sampling.level_min);
      read_key(s, "level_max", c.sampling.level_max);
      if (s.contains("window")) {
        c.sampling.window_lo = s["window"].at(0).get<double>();
        c.sampling.window_hi = s["window"].at(1).get<double>();
      }
      read_key(s, "scan_step", c.sampling.scan_step);
      read_key(s, "tolerance", c.sampling.tolerance);
      if (s.contains("taps")) {
        c.sampling.taps.clear();
        for (const auto& t : s["taps"]) {
          check_keys(t, "sampling.taps[]", {"a", "tau", "f"});
          Tap tap;
          read_key(t, "a", tap.a);
          read_key(t, "tau", tap.tau);
          read_key(t, "f", tap.f);
          c.sampling.taps.push_back(tap);
        }
      }
      read_key(s, "t_step", c.sampling.t_step);
      read_key(s, "noise_sigma", c.sampling.noise_sigma);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      check_keys(s, "solver", {"first_batch", "last_batch", "lambda_rel", "max_lag", "freeze_lag",
                               "tail_reg_transient", "compare_lag"});
      read_key(s, "first_batch", c.solver.first_batch);
      read_key(s, "last_batch", c.solver.last_batch);
      read_key(s, "lambda_rel", c.solver.lambda_rel);
      read_optional(s, "max_lag", c.solver.max_lag);
      read_optional(s, "freeze_lag", c.solver.freeze_lag);
      read_key(s, "tail_reg_transient", c.solver.tail_reg_transient);
      read_optional(s, "compare_lag", c.solver.compare_lag);
    }
    if (j.contains("analysis")) {
      const auto& a = j["analysis"];
      check_keys(a, "analysis", {"k_range", "K_range", "nyquist_spacing", "rmse_window", "conditioning"});
      if (a.contains("k_range")) {
        c.analysis.k_lo = a["k_range"].at(0).get<long>();
        c.analysis.k_hi = a["k_range"].at(1).get<long>();
      }
      if (a.contains("K_range")) {
        c.analysis.K_lo = a["K_range"].at(0).get<long>();
        c.analysis.K_hi = a["K_range"].at(1).get<long>();
      }
      read_key(a, "nyquist_spacing", c.analysis.nyquist_spacing);
      if (a.contains("rmse_window")) {
        c.analysis.rmse_lo = a["rmse_window"].at(0).get<double>();
        c.analysis.rmse_hi = a["rmse_window"].at(1).get<double>();
      }
      read_key(a, "conditioning", c.analysis.conditioning);
    }
    if (j.contains("output")) {
      check_keys(j["output"], "output", {"dir"});
      read_key(j["output"], "dir", c.out_dir);
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (c.basis.n == 0) fail("basis.n must be positive");
  if (c.basis.family != BasisFamily::ShiftInvariant && !(c.basis.eta > 0.0 && c.basis.eta <= 0.5))
    fail("basis.eta must be in (0, 1/2]");
  if (c.basis.family == BasisFamily::SlepianLOT && !(c.basis.omega > 0.0)) fail("basis.omega must be positive");
  if (c.signal.kind != "bandlimited-sinc" && c.signal.kind != "ofdm") fail("signal.kind must be bandlimited-sinc or ofdm");
  if (!(c.signal.spacing > 0.0)) fail("signal.spacing must be positive");
  if (!(c.signal.support_hi > c.signal.support_lo)) fail("signal.support is empty");
  if (c.signal.components == 0 || c.signal.components % 2 != 0) fail("signal.components must be even and positive");
  if (c.signal.last_interval < c.signal.first_interval) fail("signal.intervals is empty");
  if (c.sampling.kind != "level-crossing" && c.sampling.kind != "delay-doppler")
    fail("sampling.kind must be level-crossing or delay-doppler");
  if (c.sampling.levels == 0) fail("sampling.levels must be positive");
  if (!(c.sampling.window_hi > c.sampling.window_lo)) fail("sampling.window is empty");
  if (!(c.sampling.scan_step > 0.0) || !(c.sampling.tolerance > 0.0)) fail("scan_step and tolerance must be positive");
  if (!(c.sampling.t_step > 0.0)) fail("sampling.t_step must be positive");
  if (c.sampling.noise_sigma < 0.0) fail("sampling.noise_sigma must be non-negative");
  if (c.sampling.kind == "delay-doppler" && c.sampling.taps.empty()) fail("sampling.taps is empty");
  if (c.solver.last_batch < c.solver.first_batch) fail("solver batch range is empty");
  if (!(c.solver.lambda_rel >= 0.0)) fail("solver.lambda_rel must be non-negative");
  if (c.solver.compare_lag && *c.solver.compare_lag == 0) fail("solver.compare_lag must be positive");
  if (c.analysis.k_hi < c.analysis.k_lo || c.analysis.K_hi < c.analysis.K_lo) fail("analysis ranges are empty");
  if (!(c.analysis.nyquist_spacing > 0.0)) fail("analysis.nyquist_spacing must be positive");
  if (!(c.analysis.rmse_hi > c.analysis.rmse_lo)) fail("analysis.rmse_window is empty");
}

std::function<double(double)> make_signal(const SignalConfig& c) {
  if (c.kind == "bandlimited-sinc") {
    auto s = std::make_shared<BandlimitedSignal>(c.seed, c.spacing, c.support_lo, c.support_hi);
    return [s](double t) { return (*s)(t); };
  }
  if (c.kind == "ofdm") {
    auto s = std::make_shared<OfdmSignal>(c.seed, c.components, c.first_interval, c.last_interval);
    return [s](double t) { return (*s)(t); };
  }
  throw std::invalid_argument("make_signal: unknown kind '" + c.kind + "'");
}

SampleStream simulate(const ExperimentConfig& c) {
  validate(c);
  const auto x = make_signal(c.signal);
  SampleStream out;
  if (c.sampling.kind == "level-crossing") {
    const auto levels = equispaced_levels(c.sampling.levels, c.sampling.level_min, c.sampling.level_max);
    out = level_crossings(x, levels, c.sampling.window_lo, c.sampling.window_hi,
                          CrossingOptions{c.sampling.scan_step, c.sampling.tolerance});
  } else {
    out = delay_doppler_sample(x, c.sampling.taps, c.sampling.t_step, c.sampling.window_lo, c.sampling.window_hi);
  }
  add_noise(out, c.sampling.noise_sigma, c.signal.seed ^ 0x9e3779b97f4a7c15ULL);
  return out;
}

SolverOptions solver_options(const SolverConfig& c) {
  SolverOptions o;
  o.max_lag = c.max_lag;
  o.freeze_lag = c.freeze_lag;
  o.tail_reg_transient = c.tail_reg_transient;
  return o;
}

std::vector<SampleBatch> prepare_batches(const ExperimentConfig& c, const PacketBasis& basis,
                                         const SampleStream& samples) {
  auto batches = batch_stream(samples, basis.eta(), BatchRange{c.solver.first_batch, c.solver.last_batch});
  for (auto& b : batches) {
    if (c.sampling.kind == "delay-doppler") assemble_taps(b, basis, c.sampling.taps);
    else assemble_point(b, basis);
  }
  return batches;
}

StreamSolver run_solver(const std::vector<SampleBatch>& batches, std::size_t n, const SolverOptions& options,
                        double lambda_rel) {
  StreamSolver solver(n, options);
  for (const auto& b : batches) solver.push(b, default_tail_lambda(b.a, lambda_rel));
  return solver;
}

std::map<long, Vector> final_estimates(const StreamSolver& solver) {
  std::map<long, Vector> out = solver.history().converged();
  for (long k : solver.retained_packets()) out[k] = solver.estimate(k);
  return out;
}

double reconstruct_at(const PacketBasis& basis, const std::map<long, Vector>& coefficients, double t) {
  const auto base = static_cast<long>(std::floor(t));
  double x = 0.0;
  for (long k = base - 1; k <= base + 1; ++k) {
    auto it = coefficients.find(k);
    if (it != coefficients.end()) x += synthesize(basis, it->second, k, t);
  }
  return x;
}

double relative_rmse(const std::function<double(double)>& x, const std::function<double(double)>& x_hat, double lo,
                     double hi, double h) {
  if (!(h > 0.0) || !(hi >= lo)) throw std::invalid_argument("relative_rmse: bad grid");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / h + 1e-9)) + 1;
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = lo + h * static_cast<double>(i);
    const double xt = x(t);
    const double d = x_hat(t) - xt;
    err += d * d;
    ref += xt * xt;
  }
  return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
}

double coefficient_difference(const std::map<long, Vector>& a, const std::map<long, Vector>& b) {
  double num = 0.0, den = 0.0;
  for (const auto& [k, vb] : b) {
    auto it = a.find(k);
    if (it == a.end()) throw std::invalid_argument("coefficient_difference: packet " + std::to_string(k) + " missing");
    const Vector d = subtract(it->second, vb);
    num += dot(d, d);
    den += dot(vb, vb);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  ExperimentResult r;
  r.config = config;
  const PacketBasis basis = make_basis(config.basis);
  const auto x = make_signal(config.signal);
  r.samples = simulate(config);
  const auto batches = prepare_batches(config, basis, r.samples);
  r.batch_count = batches.size();
  for (const auto& b : batches) r.batch_sizes.push_back(b.size());

  SolverOptions full = solver_options(config.solver);
  full.max_lag.reset();
  full.freeze_lag.reset();
  full.record_trace = config.analysis.conditioning;
  const StreamSolver solver = run_solver(batches, basis.size(), full, config.solver.lambda_rel);
  r.coefficients = final_estimates(solver);
  r.history = solver.history();
  r.retained_high_water = solver.retained_blocks_high_water();

  r.lags = lag_table(r.history, r.coefficients, config.analysis.k_lo, config.analysis.k_hi, config.analysis.K_lo,
                     config.analysis.K_hi);
  r.lag_summary = summarize_lags(r.lags);
  if (config.analysis.conditioning && batches.size() >= 2) {
    try {
      r.conditioning = conditioning(solver.trace());
    } catch (const std::exception& e) {
      r.conditioning_error = e.what();
    }
  }

  auto x_hat = [&](double t) { return reconstruct_at(basis, r.coefficients, t); };
  r.rmse = relative_rmse(x, x_hat, config.analysis.rmse_lo, config.analysis.rmse_hi, config.analysis.nyquist_spacing);

  // Truncated-memory run: the configured L_max, or the comparison lag.
  std::optional<std::size_t> lag = config.solver.max_lag ? config.solver.max_lag : config.solver.compare_lag;
  if (lag) {
    SolverOptions opt = solver_options(config.solver);
    opt.max_lag = lag;
    opt.record_history = false;
    const StreamSolver truncated = run_solver(batches, basis.size(), opt, config.solver.lambda_rel);
    const auto coef = final_estimates(truncated);
    r.truncated_difference = coefficient_difference(coef, r.coefficients);
    auto x_trunc = [&](double t) { return reconstruct_at(basis, coef, t); };
    r.rmse_truncated =
        relative_rmse(x, x_trunc, config.analysis.rmse_lo, config.analysis.rmse_hi, config.analysis.nyquist_spacing);
  }

  const double h = config.analysis.nyquist_spacing;
  const auto count = static_cast<std::size_t>(std::floor((config.sampling.window_hi - config.sampling.window_lo) / h + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = config.sampling.window_lo + h * static_cast<double>(i);
    r.grid_t.push_back(t);
    r.grid_x.push_back(x(t));
    r.grid_x_hat.push_back(x_hat(t));
  }
  return r;
}

std::string summary_json(const ExperimentResult& r) {
  json lags = json::array();
  for (std::size_t i = 0; i < r.lag_summary.lags.size(); ++i)
    lags.push_back({{"lag", r.lag_summary.lags[i]},
                    {"mean_log10", r.lag_summary.mean_log10[i]},
                    {"max_log10", r.lag_summary.max_log10[i]}});
  json j = {
      {"name", r.config.name},
      {"samples", r.samples.size()},
      {"batches", r.batch_count},
      {"samples_per_batch", r.batch_sizes},
      {"rmse", r.rmse},
      {"rmse_truncated", optional_json(r.rmse_truncated)},
      {"truncated_lag",
       optional_json(r.config.solver.max_lag ? r.config.solver.max_lag : r.config.solver.compare_lag)},
      {"truncated_coefficient_difference", optional_json(r.truncated_difference)},
      {"lag_decay_slope", r.lag_summary.slope},
      {"lags", lags},
      {"retained_blocks_high_water", r.retained_high_water},
  };
  if (r.conditioning) {
    const auto& c = *r.conditioning;
    auto finite = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    j["conditioning"] = {{"kappa", c.kappa},     {"delta", c.delta},
                         {"theta", c.theta},     {"epsilon", c.epsilon},
                         {"epsilon_measured", c.epsilon_measured},
                         {"lambda_inv", finite(c.lambda_inv)},
                         {"m_y", c.m_y},         {"rho", finite(c.rho)},
                         {"constant", finite(c.constant)},
                         {"in_regime", c.regime}};
  } else if (!r.conditioning_error.empty()) {
    j["conditioning"] = {{"error", r.conditioning_error}};
  }
  return j.dump(2) + "\n";
}

std::string reconstruction_csv(const ExperimentResult& r) {
  std::ostringstream out;
  out << "t,x_true,x_hat\n";
  for (std::size_t i = 0; i < r.grid_t.size(); ++i)
    out << format_double(r.grid_t[i]) << ',' << format_double(r.grid_x[i]) << ',' << format_double(r.grid_x_hat[i])
        << '\n';
  return out.str();
}

void write_artifacts(const ExperimentResult& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path p(dir);
  write_text((p / "config.resolved").string(), config_to_json(r.config));
  write_samples_csv((p / "samples.csv").string(), r.samples);
  write_text((p / "coefficients.csv").string(), coefficients_csv(r.coefficients));
  write_text((p / "estimates.csv").string(), estimates_csv(r.history));
  write_text((p / "lag_table.csv").string(), lag_table_csv(r.lags));
  write_text((p / "lag_table.txt").string(), format_lag_table(r.lags));
  if (r.conditioning) write_text((p / "conditioning.csv").string(), conditioning_csv(*r.conditioning));
  write_text((p / "reconstruction.csv").string(), reconstruction_csv(r));
  write_text((p / "summary.json").string(), summary_json(r));
}

}  // namespace streamrec
