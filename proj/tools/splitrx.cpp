// SPDX-License-Identifier: Apache-2.0
// Command-line front end: closed forms, Monte Carlo estimates, optimal
// designs, sweeps, figure tables and the acceptance self-test.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splitrx/harness.hpp"
#include "splitrx/kernels.hpp"
#include "splitrx/mi_closed.hpp"
#include "splitrx/mi_mc.hpp"
#include "splitrx/optimizer.hpp"
#include "splitrx/parallel.hpp"

using namespace splitrx;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
};

struct SystemArgs {
  std::string channel = "1,1";
  std::string phases;
  std::string rho = "0.56";
  std::string alpha;
  std::string beta;
  std::string mode = "splitting";
  double power = 100.0;
  NoiseProfile noise;

  void add(CLI::App* app, bool with_design) {
    app->add_option("--channel", channel, "Channel magnitudes |h_k|, comma separated")->capture_default_str();
    app->add_option("--phases", phases, "Channel phases in radians, comma separated");
    app->add_option("--power", power, "Transmit power P (linear)")->capture_default_str();
    app->add_option("--sigma-a-sq", noise.sigma_a_sq, "Antenna noise power")->capture_default_str();
    app->add_option("--sigma-cov-sq", noise.sigma_cov_sq, "Conversion noise power")->capture_default_str();
    app->add_option("--sigma-rec-sq", noise.sigma_rec_sq, "Rectifier noise power")->capture_default_str();
    if (!with_design) return;
    app->add_option("--rho", rho, "Splitting ratios: one shared value or one per antenna")->capture_default_str();
    app->add_option("--alpha", alpha, "CD combining weights (default: proportional to |h|^2)");
    app->add_option("--beta", beta, "ED combining weights (default: proportional to |h|^2)");
    app->add_option("--mode", mode, "splitting, cd-only or ed-only")
        ->check(CLI::IsMember({"splitting", "cd-only", "ed-only"}))
        ->capture_default_str();
  }

  ChannelVector channel_vector() const { return ChannelVector{parse_number_list(channel), parse_number_list(phases)}; }

  ValidConfig config() const {
    const ChannelVector h = channel_vector();
    const std::size_t K = h.size();
    std::vector<double> r = parse_number_list(rho);
    if (r.size() == 1) r.assign(K, r.front());
    std::vector<double> a = parse_number_list(alpha), b = parse_number_list(beta);
    if (a.empty() || b.empty()) {
      const CombiningWeights w = optimal_weights(h);
      if (a.empty()) a = w.alpha;
      if (b.empty()) b = w.beta;
    }
    ReceiverDesign d = ReceiverDesign::splitting(r, a, b);
    if (mode == "cd-only") d = ReceiverDesign::cd_only(a);
    if (mode == "ed-only") d = ReceiverDesign::ed_only(b);
    return validate(h, noise, d, TransmitConfig{power});
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::io, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void print_table(const ResultTable& t, const std::string& path) {
  Output out(path);
  t.write_csv(out.stream());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-antenna ED-CD splitting receiver: mutual information toolkit"};
  app.require_subcommand(1);
  Globals g;
  g.threads = default_threads();
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (default: SPLITRX_THREADS or all cores)");
  app.add_option("--out", g.out, "Write output to this file instead of stdout");
  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "Kernel variant: auto, scalar or avx2")->capture_default_str();

  // mi-approx
  auto* approx_cmd = app.add_subcommand("mi-approx", "High-SNR closed-form MI for a design");
  SystemArgs approx_args;
  approx_args.add(approx_cmd, true);
  bool show_aux = false;
  approx_cmd->add_flag("--aux", show_aux, "Also print the auxiliary quantities");

  // mi-mc
  auto* mc_cmd = app.add_subcommand("mi-mc", "Monte Carlo histogram estimate of the exact MI");
  SystemArgs mc_args;
  mc_args.add(mc_cmd, true);
  McSettings mc;
  std::optional<std::uint32_t> bins, cond_bins;
  mc_cmd->add_option("--n-joint", mc.n_joint, "Samples for the joint entropy")->capture_default_str();
  mc_cmd->add_option("--n-outer", mc.n_outer, "Conditioning symbols")->capture_default_str();
  mc_cmd->add_option("--n-inner", mc.n_inner, "Samples per conditioning symbol")->capture_default_str();
  mc_cmd->add_option("--bins", bins, "Fixed bins per dimension for the joint histogram (default: automatic)");
  mc_cmd->add_option("--cond-bins", cond_bins, "Fixed bins per dimension for the conditional histograms");
  mc_cmd->add_option("--occupancy", mc.target_occupancy, "Target samples per occupied cell")->capture_default_str();

  // optimize
  auto* opt_cmd = app.add_subcommand("optimize", "Optimal splitting ratio and combining weights");
  SystemArgs opt_args;
  opt_args.add(opt_cmd, false);
  bool numeric = false;
  opt_cmd->add_flag("--numeric", numeric, "Also run the numerical optimizer and the stationarity check");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  sweep_cmd->add_option("--config", config_path, "Config file (key = value lines)");
  sweep_cmd->add_option("--set", overrides, "Override a config key, key=value (repeatable)");

  // figure
  auto* fig_cmd = app.add_subcommand("figure", "Emit the data table of a built-in figure preset");
  std::string fig_name;
  fig_cmd->add_option("name", fig_name, "fig2, fig3, fig4, fig5 or fig6")->required();
  fig_cmd->add_option("--set", overrides, "Override a preset key, key=value (repeatable)");

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance criteria");
  SelftestOptions st;
  self_cmd->add_flag("--quick", st.quick, "Reduced Monte Carlo effort (smoke run)");
  self_cmd->add_option("--only", st.only, "Run only these criterion ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (!kernels::select(kernel)) throw Error(ErrorCode::invalid_settings, "kernel '" + kernel + "' is not available");

    auto apply_overrides = [&](SweepSpec spec) {
      for (const std::string& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::config_parse, "--set expects key=value, got '" + kv + "'");
        try {
          apply_config_value(spec, kv.substr(0, eq), kv.substr(eq + 1));
        } catch (const Error& e) {
          throw Error(ErrorCode::config_parse, std::string("--set: ") + e.what());
        }
      }
      spec.seed = g.seed;
      spec.threads = g.threads;
      return spec;
    };

    if (*approx_cmd) {
      const ValidConfig cfg = approx_args.config();
      Output out(g.out);
      out.stream() << "method,mi_bits\nclosed-form," << format_number(mi_approx(cfg).value) << '\n';
      if (show_aux) {
        const AuxQuantities q = aux_quantities(cfg);
        out.stream() << "\nquantity,value\nA," << format_number(q.a) << "\nC," << format_number(q.c) << "\nA_prime,"
                     << format_number(q.a_prime) << "\nC_prime," << format_number(q.c_prime) << "\ngamma,"
                     << format_number(q.gamma) << '\n';
        for (std::size_t k = 0; k < q.b.size(); ++k) {
          out.stream() << "B_" << k << ',' << format_number(q.b[k]) << "\nB_prime_" << k << ','
                       << format_number(q.b_prime[k]) << '\n';
        }
      }
    } else if (*mc_cmd) {
      const ValidConfig cfg = mc_args.config();
      mc.bins_per_dim = bins;
      mc.cond_bins_per_dim = cond_bins;
      mc.seed = g.seed;
      mc.threads = g.threads;
      const MiEstimate e = estimate_mi(cfg, mc);
      Output out(g.out);
      out.stream() << "method,mi_bits,std_error,joint_entropy,conditional_entropy,joint_bins,cond_bins_min,"
                      "cond_bins_max,n_joint,n_outer,n_inner,seed\n"
                   << "monte-carlo," << format_number(e.value) << ',' << format_number(e.std_error) << ','
                   << format_number(e.mc->joint_entropy) << ',' << format_number(e.mc->conditional_entropy) << ','
                   << e.mc->joint_bins << ',' << e.mc->cond_bins_min << ',' << e.mc->cond_bins_max << ','
                   << mc.n_joint << ',' << mc.n_outer << ',' << mc.n_inner << ',' << mc.seed << '\n';
    } else if (*opt_cmd) {
      const ChannelVector h = opt_args.channel_vector();
      const TransmitConfig tx{opt_args.power};
      const OptimalDesign best = optimal_design(h, opt_args.noise);
      const double rho = best.rho.rho_star;
      Output out(g.out);
      auto& os = out.stream();
      os << "quantity,value\n";
      os << "rho_star," << format_number(rho) << '\n';
      os << "regime," << (best.rho.regime == Regime::splitting ? "splitting" : "cd-degenerate") << '\n';
      if (best.rho.roots) {
        os << "upsilon," << format_number(best.rho.roots->upsilon) << "\nphi," << format_number(best.rho.roots->phi)
           << "\npsi," << format_number(best.rho.roots->psi) << '\n';
      }
      os << "golden_section_fallback," << (best.rho.used_fallback ? 1 : 0) << '\n';
      for (std::size_t k = 0; k < h.size(); ++k) os << "weight_" << k << ',' << format_number(best.weights.alpha[k]) << '\n';
      os << "mi_max," << format_number(mi_max(h, opt_args.noise, tx, rho).value) << '\n';
      os << "mi_mrc," << format_number(mi_mrc(h, opt_args.noise, tx, rho).value) << '\n';
      os << "mi_egc," << format_number(mi_egc(h, opt_args.noise, tx, rho).value) << '\n';
      os << "mi_cd," << format_number(mi_cd(h, opt_args.noise, tx).value) << '\n';
      os << "gain_finite," << format_number(gain_finite(h, opt_args.noise, tx).gain_bits) << '\n';
      os << "gain_asymptotic," << format_number(gain_asymptotic(opt_args.noise, rho).gain_bits) << '\n';
      if (numeric) {
        NumericOptions no;
        no.seed = g.seed;
        no.threads = g.threads;
        const NumericOptimum num = numeric_optimize(h, opt_args.noise, tx, no);
        os << "numeric_mi," << format_number(num.mi_bits) << "\nnumeric_converged," << (num.converged ? 1 : 0) << '\n';
        for (std::size_t k = 0; k < h.size(); ++k) {
          os << "numeric_rho_" << k << ',' << format_number(num.design.rho[k]) << "\nnumeric_alpha_" << k << ','
             << format_number(num.design.alpha[k]) << "\nnumeric_beta_" << k << ','
             << format_number(num.design.beta[k]) << '\n';
        }
        if (best.rho.regime == Regime::splitting) {
          const StationarityReport rep = stationarity_check(best.design(h.size()), h, opt_args.noise, tx);
          os << "stationarity_max_gradient," << format_number(rep.max_gradient) << "\nstationarity_decreased,"
             << rep.decreased << "\nstationarity_passed," << (rep.passed() ? 1 : 0) << '\n';
        }
      }
    } else if (*sweep_cmd) {
      SweepSpec spec = config_path.empty() ? SweepSpec{} : load_sweep_config(config_path);
      spec = apply_overrides(std::move(spec));
      print_table(run_sweep(spec), g.out.empty() ? spec.output_path : g.out);
    } else if (*fig_cmd) {
      const SweepSpec spec = apply_overrides(figure_spec(fig_name));
      print_table(run_sweep(spec), g.out.empty() ? spec.output_path : g.out);
    } else if (*self_cmd) {
      st.seed = g.seed;
      st.threads = g.threads;
      const auto results = run_selftest(st, [](const CriterionResult& r) {
        std::cout << format_criterion(r) << std::endl;
      });
      bool all = true;
      for (const auto& r : results) all = all && r.passed;
      return all ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cout.flush();
    std::fprintf(stderr, "ERROR %s: %s\n", std::string(error_code_name(e.code())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "ERROR internal: %s\n", e.what());
    return 3;
  }
  return 0;
}
