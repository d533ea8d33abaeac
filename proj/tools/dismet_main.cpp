#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dismet/oracle.hpp"
#include "dismet/report.hpp"

namespace {

struct ConfigFlags {
  std::vector<double> range;
};

void add_config_flags(CLI::App* cmd, dismet::EvalConfig& cfg, ConfigFlags& flags) {
  cmd->add_option("--bins", cfg.grid.n_bins, "quantization bins per latent")
      ->capture_default_str();
  cmd->add_option("--range", flags.range, "quantization range LO HI")->expected(2);
  cmd->add_option("--samples", cfg.n_mc_samples, "Monte Carlo samples per estimate")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.rng_seed, "RNG seed")->capture_default_str();
  std::map<std::string, dismet::BinMethod> methods{
      {"erf", dismet::BinMethod::Erf}, {"rectangle", dismet::BinMethod::Rectangle}};
  cmd->add_option("--bin-method", cfg.bin_method, "bin mass rule: erf or rectangle")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
  cmd->add_option("--factor-bins", cfg.factor_bins, "bins for continuous factor columns")
      ->capture_default_str();
}

void apply_range(dismet::EvalConfig& cfg, const ConfigFlags& flags) {
  if (flags.range.size() == 2) {
    cfg.grid.lo = flags.range[0];
    cfg.grid.hi = flags.range[1];
  }
}

std::string preset_help() {
  std::string help = "synthetic world preset (";
  const auto& names = dismet::preset_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) help += ", ";
    help += names[i];
  }
  help += ")";
  return help;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dismet: information-theoretic disentanglement metrics"};
  app.require_subcommand(1);

  dismet::EvaluateOptions eval_opt;
  ConfigFlags eval_flags;
  std::vector<std::string> soft_specs;
  CLI::App* evaluate = app.add_subcommand("evaluate", "compute metrics for saved posteriors");
  evaluate->add_option("--posteriors", eval_opt.posteriors_path, "posterior file (csv or binary)")
      ->required();
  evaluate->add_option("--factors", eval_opt.factors_path, "factor label csv");
  evaluate->add_option("--soft-labels", soft_specs,
                       "per-factor soft label csv as K=PATH (repeatable)");
  evaluate->add_option("--out", eval_opt.out_dir, "output directory")->capture_default_str();
  evaluate->add_option("--metrics", eval_opt.metrics, "comma list of metrics or 'all'")
      ->capture_default_str();
  add_config_flags(evaluate, eval_opt.config, eval_flags);

  dismet::SynthOptions synth_opt;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic world to disk");
  synth->add_option("--preset", synth_opt.preset, preset_help())->required();
  synth->add_option("--seed", synth_opt.seed, "world seed")->capture_default_str();
  synth->add_option("--out", synth_opt.out_dir, "output directory")->capture_default_str();
  synth->add_option("--cards", synth_opt.cards, "factor cardinality override")->delimiter(',');
  synth->add_option("--noise-latents", synth_opt.noise_latents, "extra pure-noise latents")
      ->capture_default_str();

  dismet::OracleCheckOptions oc_opt;
  ConfigFlags oc_flags;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "compare the estimators against exact enumeration on a preset world");
  oracle->add_option("--preset", oc_opt.preset, preset_help())->required();
  oracle->add_option("--seeds", oc_opt.seeds, "seeds averaged for sampled metrics")
      ->capture_default_str();
  oracle->add_flag("--corrupt-range", oc_opt.corrupt_range,
                   "negative control: narrow the library grid by 1 on each side");
  oracle->add_option("--cards", oc_opt.cards, "factor cardinality override")->delimiter(',');
  add_config_flags(oracle, oc_opt.config, oc_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  if (evaluate->parsed()) {
    apply_range(eval_opt.config, eval_flags);
    for (const std::string& spec : soft_specs) {
      auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0) {
        std::cerr << "config error: --soft-labels expects K=PATH, got '" << spec << "'\n";
        return 3;
      }
      std::size_t k = 0;
      try {
        k = static_cast<std::size_t>(std::stoul(spec.substr(0, eq)));
      } catch (const std::exception&) {
        std::cerr << "config error: bad factor index in --soft-labels '" << spec << "'\n";
        return 3;
      }
      eval_opt.soft_labels.emplace_back(k, spec.substr(eq + 1));
    }
    return dismet::cmd_evaluate(eval_opt);
  }
  if (synth->parsed()) return dismet::cmd_synth(synth_opt);
  if (oracle->parsed()) {
    apply_range(oc_opt.config, oc_flags);
    return dismet::cmd_oracle_check(oc_opt);
  }
  return 3;
}
