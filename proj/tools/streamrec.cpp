// streamrec command line: simulate, reconstruct, analyze, experiment.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streamrec/analysis.hpp"
#include "streamrec/basis.hpp"
#include "streamrec/errors.hpp"
#include "streamrec/experiment.hpp"
#include "streamrec/io.hpp"
#include "streamrec/stream_solver.hpp"

using namespace streamrec;

namespace {

struct Common {
  std::string config;
  std::string preset = "level-crossing";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> lmax;
  std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, Common& c, bool with_preset) {
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  if (with_preset)
    cmd->add_option("--experiment", c.preset, "preset the config starts from")
        ->check(CLI::IsMember({"level-crossing", "delay-doppler"}));
  cmd->add_option("--seed", c.seed, "signal seed (overrides config)");
  cmd->add_option("--lmax", c.lmax, "L_max (overrides config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", c.out_dir, "output directory (overrides config)");
}

ExperimentConfig load_config(const Common& c, const std::string& preset) {
  ExperimentConfig cfg = preset_config(preset);
  if (!c.config.empty()) cfg = config_from_json(read_text(c.config), cfg);
  if (c.seed) cfg.signal.seed = *c.seed;
  if (c.lmax) cfg.solver.max_lag = *c.lmax;
  if (c.out_dir) cfg.out_dir = *c.out_dir;
  validate(cfg);
  return cfg;
}

void print_summary(const ExperimentResult& r, const std::string& dir) {
  std::printf("%s: %zu samples in %zu batches\n", r.config.name.c_str(), r.samples.size(), r.batch_count);
  std::printf("rmse %.6g\n", r.rmse);
  if (r.rmse_truncated)
    std::printf("rmse (L_max) %.6g, coefficient difference %.3g\n", *r.rmse_truncated, *r.truncated_difference);
  if (r.conditioning)
    std::printf("kappa %.6g delta %.4g theta %.4g eps %.4g rho %.4g%s\n", r.conditioning->kappa,
                r.conditioning->delta, r.conditioning->theta, r.conditioning->epsilon, r.conditioning->rho,
                r.conditioning->regime ? "" : " (out of regime)");
  std::printf("lag table (log10 relative error):\n%s", format_lag_table(r.lags).c_str());
  std::printf("wrote %s\n", dir.c_str());
}

int run_monte_carlo(std::size_t n, double eta, std::vector<double> grid, std::size_t trials, double p, double target,
                    std::uint64_t seed, const std::string& out) {
  const PacketBasis basis = build_lot(n, eta);
  const MonteCarloResult r = sampling_monte_carlo(basis, grid, trials, p, target, seed);
  std::ostringstream csv;
  csv << "m,samples,lambda_min_q10,lambda_min_q50,lambda_min_q90,lambda_max_q10,lambda_max_q50,lambda_max_q90,"
         "e_norm_q10,e_norm_q50,e_norm_q90,delta_q10,delta_q50,delta_q90,success\n";
  for (const auto& pt : r.points) {
    csv << format_double(pt.m) << ',' << pt.samples;
    for (const auto* q : {&pt.lambda_min, &pt.lambda_max, &pt.e_norm, &pt.delta})
      for (double v : *q) csv << ',' << format_double(v);
    csv << ',' << format_double(pt.success) << '\n';
  }
  if (out.empty()) std::cout << csv.str();
  else write_text(out, csv.str());
  if (r.required_m) std::cerr << "required M for delta <= " << target << ": " << *r.required_m << "\n";
  else std::cerr << "no M on the grid reaches delta <= " << target << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming reconstruction of signals from non-uniform samples"};
  app.require_subcommand(1);

  // simulate
  Common sim;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "generate a signal and write its samples");
  add_common(simulate_cmd, sim, true);
  simulate_cmd->add_option("--out", sim_out, "samples CSV (default <out-dir>/samples.csv)");

  // reconstruct
  Common rec;
  std::string rec_samples, rec_checkpoint, rec_resume;
  auto* reconstruct_cmd = app.add_subcommand("reconstruct", "stream a samples CSV through the solver");
  add_common(reconstruct_cmd, rec, true);
  reconstruct_cmd->add_option("--samples", rec_samples, "samples CSV (t,y)")->required()->check(CLI::ExistingFile);
  reconstruct_cmd->add_option("--checkpoint", rec_checkpoint, "write the solver state here when done");
  reconstruct_cmd->add_option("--resume", rec_resume, "resume from a checkpoint")->check(CLI::ExistingFile);

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "diagnostics");
  analyze_cmd->require_subcommand(1);
  Common lag;
  std::string lag_samples;
  auto* lags_cmd = analyze_cmd->add_subcommand("lags", "lag-error table and conditioning for a samples CSV");
  add_common(lags_cmd, lag, true);
  lags_cmd->add_option("--samples", lag_samples, "samples CSV (t,y)")->required()->check(CLI::ExistingFile);

  std::size_t mc_n = 16, mc_trials = 50;
  double mc_eta = 0.25, mc_p = 0.05, mc_target = 0.2;
  std::uint64_t mc_seed = 1;
  std::vector<double> mc_grid{64, 128, 256, 512, 1024};
  std::string mc_out;
  auto* mc_cmd = analyze_cmd->add_subcommand("monte-carlo", "conditioning of uniformly random sampling (LOT basis)");
  mc_cmd->add_option("--n", mc_n, "packet size")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--eta", mc_eta, "overlap");
  mc_cmd->add_option("--m", mc_grid, "sampling rates per unit interval")->expected(1, -1);
  mc_cmd->add_option("--trials", mc_trials, "trials per rate")->check(CLI::PositiveNumber);
  mc_cmd->add_option("--p", mc_p, "failure probability target");
  mc_cmd->add_option("--delta", mc_target, "delta target");
  mc_cmd->add_option("--seed", mc_seed, "base seed");
  mc_cmd->add_option("--out", mc_out, "CSV output (default stdout)");

  double sl_omega = 16.0, sl_eta = 0.25;
  std::size_t sl_n = 40, sl_grid = 1024;
  std::string sl_out;
  auto* slepian_cmd = analyze_cmd->add_subcommand("slepian", "eigenvalues of the band-and-fold operator");
  slepian_cmd->add_option("--omega", sl_omega, "bandlimit, cycles per unit time");
  slepian_cmd->add_option("--eta", sl_eta, "overlap");
  slepian_cmd->add_option("--n", sl_n, "basis size")->check(CLI::PositiveNumber);
  slepian_cmd->add_option("--grid-size", sl_grid, "time grid size");
  slepian_cmd->add_option("--out", sl_out, "CSV output (default stdout)");

  double ep_delta = 0.2, ep_theta = 0.3;
  auto* eps_cmd = analyze_cmd->add_subcommand("epsilon", "fixed point of the Schur-complement recursion");
  eps_cmd->add_option("--delta", ep_delta, "delta")->required();
  eps_cmd->add_option("--theta", ep_theta, "theta")->required();

  // experiment
  Common exp;
  std::string exp_name;
  auto* experiment_cmd = app.add_subcommand("experiment", "full reproduction runs");
  experiment_cmd->add_option("name", exp_name, "level-crossing or delay-doppler")
      ->required()
      ->check(CLI::IsMember({"level-crossing", "delay-doppler"}));
  add_common(experiment_cmd, exp, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*simulate_cmd) {
      const ExperimentConfig cfg = load_config(sim, sim.preset);
      const SampleStream samples = simulate(cfg);
      std::string path = sim_out;
      if (path.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        path = (std::filesystem::path(cfg.out_dir) / "samples.csv").string();
      }
      write_samples_csv(path, samples);
      std::printf("wrote %zu samples to %s\n", samples.size(), path.c_str());
    } else if (*reconstruct_cmd) {
      const ExperimentConfig cfg = load_config(rec, rec.preset);
      const PacketBasis basis = make_basis(cfg.basis);
      const auto batches = prepare_batches(cfg, basis, read_samples_csv(rec_samples));
      SolverOptions opt = solver_options(cfg.solver);
      StreamSolver solver = rec_resume.empty() ? StreamSolver(basis.size(), opt) : StreamSolver::load_checkpoint(rec_resume);
      if (solver.size() != basis.size()) throw std::invalid_argument("checkpoint packet size does not match the basis");
      std::size_t pushed = 0;
      for (const auto& b : batches) {
        if (solver.initialized() && b.k <= solver.last_index()) continue;
        solver.push(b, default_tail_lambda(b.a, cfg.solver.lambda_rel));
        ++pushed;
      }
      std::filesystem::create_directories(cfg.out_dir);
      const std::filesystem::path dir(cfg.out_dir);
      write_text((dir / "coefficients.csv").string(), coefficients_csv(final_estimates(solver)));
      write_text((dir / "estimates.csv").string(), estimates_csv(solver.history()));
      if (!rec_checkpoint.empty()) solver.save_checkpoint(rec_checkpoint);
      std::printf("streamed %zu batches (packets %ld..%ld) into %s\n", pushed, solver.first_index(),
                  solver.last_index(), cfg.out_dir.c_str());
    } else if (*analyze_cmd) {
      if (*lags_cmd) {
        const ExperimentConfig cfg = load_config(lag, lag.preset);
        const PacketBasis basis = make_basis(cfg.basis);
        const auto batches = prepare_batches(cfg, basis, read_samples_csv(lag_samples));
        SolverOptions opt;
        opt.tail_reg_transient = cfg.solver.tail_reg_transient;
        opt.record_trace = true;
        const StreamSolver solver = run_solver(batches, basis.size(), opt, cfg.solver.lambda_rel);
        const auto table = lag_table(solver.history(), final_estimates(solver), cfg.analysis.k_lo, cfg.analysis.k_hi,
                                     cfg.analysis.K_lo, cfg.analysis.K_hi);
        std::filesystem::create_directories(cfg.out_dir);
        const std::filesystem::path dir(cfg.out_dir);
        write_text((dir / "lag_table.csv").string(), lag_table_csv(table));
        std::printf("%s", format_lag_table(table).c_str());
        const ConditioningReport report = conditioning(solver.trace());
        write_text((dir / "conditioning.csv").string(), conditioning_csv(report));
        std::printf("kappa %.6g delta %.4g theta %.4g eps %.4g rho %.4g%s\n", report.kappa, report.delta, report.theta,
                    report.epsilon, report.rho, report.regime ? "" : " (out of regime)");
      } else if (*mc_cmd) {
        return run_monte_carlo(mc_n, mc_eta, mc_grid, mc_trials, mc_p, mc_target, mc_seed, mc_out);
      } else if (*slepian_cmd) {
        const SlepianBuild b = build_slepian_lot(sl_omega, sl_eta, sl_n, sl_grid);
        std::ostringstream csv;
        csv << "index,eigenvalue,relative\n";
        const auto& ev = b.spectrum.eigenvalues;
        for (std::size_t i = 0; i < ev.size(); ++i)
          csv << i + 1 << ',' << format_double(ev[i]) << ',' << format_double(ev[i] / ev[0]) << '\n';
        if (sl_out.empty()) std::cout << csv.str();
        else write_text(sl_out, csv.str());
        if (ev.size() >= sl_n)
          std::cerr << "eigenvalue " << sl_n << " / largest = " << ev[sl_n - 1] / ev[0] << "\n";
      } else if (*eps_cmd) {
        const EpsilonResult r = epsilon_bound(ep_delta, ep_theta);
        std::printf("epsilon %.15g (recursion %.15g after %zu terms)\n", r.epsilon, r.sequence.back(),
                    r.sequence.size());
        std::printf("rho %.15g\n", ep_theta / (1.0 - r.epsilon));
      }
    } else if (*experiment_cmd) {
      const ExperimentConfig cfg = load_config(exp, exp_name);
      const ExperimentResult r = run_experiment(cfg);
      write_artifacts(r, cfg.out_dir);
      print_summary(r, cfg.out_dir);
    }
  } catch (const SingularBlock& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
