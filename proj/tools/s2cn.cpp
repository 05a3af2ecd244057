#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "s2cn/cli/commands.hpp"
#include "s2cn/data/key_value.hpp"

namespace {

void add_run_flags(CLI::App* cmd, s2cn::RunConfig& flags, std::string& config_path) {
  cmd->add_option("--config", config_path, "key=value config file; flags override it");
  cmd->add_option("--dataset", flags.dataset, "dataset manifest");
  cmd->add_option("--preset", flags.preset, "ExtendedYaleB, ORL, COIL20, COIL100, synthetic");
  cmd->add_option("--loss-config", flags.loss_config, "base, +L3, +L4, dual");
  cmd->add_option("--seed", flags.seed);
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--checkpoint", flags.checkpoint, "start from a saved model");
  cmd->add_option("--subjects", flags.subjects, "keep only the first n classes");
  cmd->add_option("--t0", flags.t0, "epochs between label updates");
  cmd->add_option("--tmax", flags.t_max, "number of label updates");
  cmd->add_option("--tau", flags.tau);
  cmd->add_option("--gamma1", flags.gamma1);
  cmd->add_option("--gamma2", flags.gamma2);
  cmd->add_option("--gamma3", flags.gamma3);
  cmd->add_option("--gamma4", flags.gamma4);
  cmd->add_option("--lr", flags.learning_rate);
  cmd->add_option("--cae-epochs", flags.cae_epochs);
  cmd->add_option("--dsc-epochs", flags.dsc_epochs);
  cmd->add_option("--regularizer", flags.regularizer, "l1 or l2");
  cmd->add_option("--cross-entropy", flags.cross_entropy, "softplus or loglik");
  cmd->add_option("--align", flags.align, "align labels between updates (default true)");
  cmd->add_option("--features", flags.use_features, "train on the manifest's feature tensor instead of images");
  cmd->add_option("--stages", flags.stages, "comma list of cae, dsc, full");
}

s2cn::RunConfig merged(const s2cn::RunConfig& flags, const std::string& config_path) {
  s2cn::RunConfig base;
  if (!config_path.empty()) base = s2cn::config_from_key_values(s2cn::read_key_values(config_path));
  return s2cn::overlay(base, flags);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-supervised convolutional subspace clustering"};
  app.require_subcommand(1);

  s2cn::RunConfig pre_flags, train_flags, ablate_flags;
  std::string pre_cfg, train_cfg, ablate_cfg;
  CLI::App* pretrain = app.add_subcommand("pretrain", "pretrain the convolutional auto-encoder");
  add_run_flags(pretrain, pre_flags, pre_cfg);
  CLI::App* train = app.add_subcommand("train", "run the full training procedure");
  add_run_flags(train, train_flags, train_cfg);
  CLI::App* ablate = app.add_subcommand("ablate", "compare loss configurations over paired seeds");
  add_run_flags(ablate, ablate_flags, ablate_cfg);
  ablate->add_option("--seeds", ablate_flags.seeds, "comma list of seeds (default 0,1,2,3,4)");

  s2cn::EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "clustering error of a labels CSV");
  eval->add_option("--labels", eval_args.labels)->required();
  eval->add_option("--truth", eval_args.truth)->required();
  eval->add_option("--clusters", eval_args.clusters);
  eval->add_option("--report", eval_args.report, "write a report CSV here");

  s2cn::GradcheckOptions grad_opts;
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of every loss gradient");
  gradcheck->add_option("--scale", grad_opts.scale);
  gradcheck->add_option("--seed", grad_opts.seed);
  gradcheck->add_option("--corrupt", grad_opts.corrupt, "perturb one component's gradient");

  s2cn::SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "write a union-of-subspaces dataset");
  synth->add_option("--subspaces", synth_args.spec.subspaces);
  synth->add_option("--dim", synth_args.spec.dim);
  synth->add_option("--ambient", synth_args.spec.ambient);
  synth->add_option("--per-subspace", synth_args.spec.per_subspace);
  synth->add_option("--noise", synth_args.spec.noise);
  synth->add_option("--seed", synth_args.spec.seed);
  synth->add_option("--name", synth_args.name);
  synth->add_option("--out", synth_args.out);

  std::string inspect_path;
  CLI::App* inspect = app.add_subcommand("inspect", "describe a checkpoint, tensor file, or manifest");
  inspect->add_option("path", inspect_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : s2cn::kExitUser;
  }

  try {
    if (*pretrain) return s2cn::cmd_pretrain(merged(pre_flags, pre_cfg), std::cout, std::cerr);
    if (*train) return s2cn::cmd_train(merged(train_flags, train_cfg), std::cout, std::cerr);
    if (*ablate) return s2cn::cmd_ablate(merged(ablate_flags, ablate_cfg), std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return s2cn::kExitUser;
  }
  if (*eval) return s2cn::cmd_eval(eval_args, std::cout, std::cerr);
  if (*gradcheck) return s2cn::cmd_gradcheck(grad_opts, std::cout, std::cerr);
  if (*synth) return s2cn::cmd_synth(synth_args, std::cout, std::cerr);
  if (*inspect) return s2cn::cmd_inspect(inspect_path, std::cout, std::cerr);
  return s2cn::kExitUser;
}
