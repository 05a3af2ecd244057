#include "s2cn/cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "s2cn/data/dataset.hpp"
#include "s2cn/data/tensor_file.hpp"
#include "s2cn/evalkit/ablation.hpp"
#include "s2cn/evalkit/metrics.hpp"
#include "s2cn/numkit/errors.hpp"
#include "s2cn/trainer/checkpoint.hpp"

namespace s2cn {

namespace {

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw std::invalid_argument(key + ": expected true or false, got '" + text + "'");
}

template <typename T>
void take(std::optional<T>& dst, const std::optional<T>& src) {
  if (src) dst = src;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

void write_text(const std::filesystem::path& path, const std::string& text) { write_file_atomic(path, text); }

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  }
}

struct Prepared {
  ImageDataset dataset;
  TrainData data;
  HyperParams hyper;
  TrainOptions options;
  std::optional<Model> initial;
  std::string preset;
};

Prepared prepare(const RunConfig& config, const std::string& default_stages) {
  if (config.dataset.empty()) throw std::invalid_argument("no dataset manifest given (--dataset)");
  if (!std::filesystem::exists(config.dataset)) {
    throw std::invalid_argument("dataset manifest not found: " + config.dataset.string());
  }
  Prepared p;
  p.dataset = load_dataset(config.dataset);
  if (config.subjects) p.dataset = subset_subjects(p.dataset, *config.subjects);
  p.preset = resolve_preset(config, p.dataset.name);
  p.hyper = resolve_hyper(config, p.dataset.name, p.dataset.clusters);
  p.options.use_features = config.use_features.value_or(false);
  p.data = make_train_data(p.dataset, p.options.use_features);
  if (!p.options.use_features) {
    p.options.network = preset_network(p.preset, p.dataset.images.extent(1), p.dataset.images.extent(2));
  }
  std::string stages = default_stages;
  if (config.checkpoint) {
    if (!std::filesystem::exists(*config.checkpoint)) {
      throw std::invalid_argument("checkpoint not found: " + config.checkpoint->string());
    }
    p.initial = load_model(*config.checkpoint);
    if (default_stages == "cae,dsc,full") stages = p.initial->coefficients.empty() ? "dsc,full" : "full";
  }
  p.options.stages = parse_stages(config.stages.value_or(stages));
  if (p.data.clusters < 2) throw std::invalid_argument("dataset needs at least 2 clusters");
  return p;
}

void write_meta(const std::filesystem::path& dir, const std::string& command, const std::string& started,
                const Prepared& p) {
  std::ostringstream os;
  os << "command=" << command << '\n'
     << "started=" << started << '\n'
     << "finished=" << timestamp() << '\n'
     << "dataset=" << p.dataset.name << '\n'
     << "resampler=" << (p.dataset.resampler.empty() ? "unrecorded" : p.dataset.resampler) << '\n'
     << "preset=" << p.preset << '\n'
     << "hyper_hash=" << p.hyper.hash() << '\n';
  write_text(dir / "meta.txt", os.str());
}

void write_history_file(const std::filesystem::path& dir, const TrainHistory& history) {
  std::ostringstream os;
  write_history_csv(os, history);
  write_text(dir / "history.csv", os.str());
}

int run_training(const RunConfig& config, const std::string& command, const std::string& default_stages,
                 std::ostream& out, std::ostream& err) {
  const std::string started = timestamp();
  Prepared p = prepare(config, default_stages);
  std::filesystem::create_directories(config.out);

  TrainResult result;
  try {
    result = train(p.data, p.hyper, p.options, p.initial);
  } catch (const TrainingAborted& e) {
    write_history_file(config.out, e.partial().history);
    err << "numeric failure: " << e.what() << " (partial history in " << (config.out / "history.csv").string()
        << ")\n";
    return kExitNumeric;
  }

  write_history_file(config.out, result.history);
  save_model(config.out / "model.s2cn", result.model);
  if (!result.labels.labels.empty()) {
    save_labels_csv(config.out / "labels.csv", result.labels.labels);
    std::ostringstream align;
    write_alignment_csv(align, result.history);
    write_text(config.out / "alignment.csv", align.str());
    if (p.dataset.has_truth()) {
      EvalReport report;
      report.dataset = p.dataset.name;
      report.clusters = p.dataset.clusters;
      report.loss_config = config.loss_config ? to_string(parse_loss_config(*config.loss_config)) : "dual";
      report.seed = p.hyper.seed;
      report.error_percent = clustering_error(result.labels.labels, p.dataset.labels, p.dataset.clusters);
      report.hyper_hash = p.hyper.hash();
      std::ostringstream os;
      write_report_csv(os, std::span<const EvalReport>(&report, 1));
      write_text(config.out / "report.csv", os.str());
      out << "error_percent=" << format_number(report.error_percent) << '\n';
    }
  }
  write_meta(config.out, command, started, p);
  out << "wrote " << config.out.string() << '\n';
  return kExitOk;
}

}  // namespace

RunConfig config_from_key_values(const KeyValues& kv) {
  RunConfig c;
  for (const auto& [raw_key, value] : kv) {
    const std::string key = normalize_key(raw_key);
    if (key == "dataset") c.dataset = value;
    else if (key == "preset") c.preset = value;
    else if (key == "loss-config") c.loss_config = value;
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "out") c.out = value;
    else if (key == "checkpoint") c.checkpoint = value;
    else if (key == "subjects") c.subjects = parse_u64(key, value);
    else if (key == "gamma1") c.gamma1 = parse_double(key, value);
    else if (key == "gamma2") c.gamma2 = parse_double(key, value);
    else if (key == "gamma3") c.gamma3 = parse_double(key, value);
    else if (key == "gamma4") c.gamma4 = parse_double(key, value);
    else if (key == "tau") c.tau = parse_double(key, value);
    else if (key == "lr" || key == "learning-rate") c.learning_rate = parse_double(key, value);
    else if (key == "t0") c.t0 = parse_u64(key, value);
    else if (key == "tmax" || key == "t-max") c.t_max = parse_u64(key, value);
    else if (key == "cae-epochs") c.cae_epochs = parse_u64(key, value);
    else if (key == "dsc-epochs") c.dsc_epochs = parse_u64(key, value);
    else if (key == "regularizer") c.regularizer = value;
    else if (key == "cross-entropy") c.cross_entropy = value;
    else if (key == "align") c.align = parse_bool(key, value);
    else if (key == "features") c.use_features = parse_bool(key, value);
    else if (key == "stages") c.stages = value;
    else if (key == "seeds") c.seeds = value;
    else throw std::invalid_argument("unknown config key '" + raw_key + "'");
  }
  return c;
}

RunConfig overlay(RunConfig base, const RunConfig& flags) {
  if (!flags.dataset.empty()) base.dataset = flags.dataset;
  if (flags.out != RunConfig{}.out) base.out = flags.out;
  take(base.preset, flags.preset);
  take(base.loss_config, flags.loss_config);
  take(base.seed, flags.seed);
  take(base.checkpoint, flags.checkpoint);
  take(base.subjects, flags.subjects);
  take(base.gamma1, flags.gamma1);
  take(base.gamma2, flags.gamma2);
  take(base.gamma3, flags.gamma3);
  take(base.gamma4, flags.gamma4);
  take(base.tau, flags.tau);
  take(base.learning_rate, flags.learning_rate);
  take(base.t0, flags.t0);
  take(base.t_max, flags.t_max);
  take(base.cae_epochs, flags.cae_epochs);
  take(base.dsc_epochs, flags.dsc_epochs);
  take(base.regularizer, flags.regularizer);
  take(base.cross_entropy, flags.cross_entropy);
  take(base.align, flags.align);
  take(base.use_features, flags.use_features);
  take(base.stages, flags.stages);
  take(base.seeds, flags.seeds);
  return base;
}

std::string resolve_preset(const RunConfig& config, const std::string& dataset_name) {
  if (config.preset) return *config.preset;
  for (const std::string& name : preset_names()) {
    std::string a = name, b = dataset_name;
    std::transform(a.begin(), a.end(), a.begin(), [](unsigned char ch) { return std::tolower(ch); });
    std::transform(b.begin(), b.end(), b.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (a == b) return name;
  }
  return "synthetic";
}

HyperParams resolve_hyper(const RunConfig& config, const std::string& dataset_name, std::size_t clusters) {
  HyperParams h = preset(resolve_preset(config, dataset_name), clusters);
  if (config.gamma1) h.gamma1 = *config.gamma1;
  if (config.gamma2) h.gamma2 = *config.gamma2;
  if (config.gamma3) h.gamma3 = *config.gamma3;
  if (config.gamma4) h.gamma4 = *config.gamma4;
  if (config.tau) h.tau = *config.tau;
  if (config.learning_rate) h.learning_rate = *config.learning_rate;
  if (config.t0) h.t0 = *config.t0;
  if (config.t_max) h.t_max = *config.t_max;
  if (config.cae_epochs) h.cae_epochs = *config.cae_epochs;
  if (config.dsc_epochs) h.dsc_epochs = *config.dsc_epochs;
  if (config.regularizer) h.regularizer = parse_regularizer(*config.regularizer);
  if (config.cross_entropy) {
    if (*config.cross_entropy == "softplus") h.cross_entropy = CrossEntropyForm::softplus;
    else if (*config.cross_entropy == "loglik") h.cross_entropy = CrossEntropyForm::log_likelihood;
    else throw std::invalid_argument("cross-entropy must be softplus or loglik");
  }
  if (config.align) h.align_labels = *config.align;
  if (config.seed) h.seed = *config.seed;
  h = with_loss_config(h, parse_loss_config(config.loss_config.value_or("dual")));
  h.validate();
  return h;
}

StageFlags parse_stages(const std::string& text) {
  StageFlags flags{false, false, false};
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item == "cae") flags.cae = true;
    else if (item == "dsc") flags.dsc = true;
    else if (item == "full") flags.full = true;
    else if (!item.empty()) throw std::invalid_argument("unknown stage '" + item + "' (expected cae, dsc, full)");
  }
  return flags;
}

void write_history_csv(std::ostream& os, const TrainHistory& history) {
  os << "epoch,stage,L0,L1,L2,L3,L4,L,err_percent,L3_over_L1\n";
  for (const HistoryRow& row : history.rows) {
    const LossBreakdown& l = row.loss;
    os << l.epoch << ',' << to_string(row.stage) << ',' << format_number(l.l0) << ',' << format_number(l.l1) << ','
       << format_number(l.l2) << ',' << format_number(l.l3) << ',' << format_number(l.l4) << ','
       << format_number(l.total) << ',' << opt_number(row.error_percent) << ','
       << (l.l1 > 0.0 ? format_number(l.l3 / l.l1) : std::string()) << '\n';
  }
}

void write_alignment_csv(std::ostream& os, const TrainHistory& history) {
  os << "iteration,epoch,permutation,agreement,err_percent\n";
  for (const SpectralUpdate& u : history.updates) {
    os << u.iteration << ',' << u.epoch << ',';
    for (std::size_t k = 0; k < u.alignment.permutation.size(); ++k) {
      os << (k ? " " : "") << u.alignment.permutation[k];
    }
    os << ',' << u.alignment.agreement << ',' << opt_number(u.error_percent) << '\n';
  }
}

int cmd_pretrain(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return run_training(config, "pretrain", "cae", out, err); });
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] { return run_training(config, "train", "cae,dsc,full", out, err); });
}

int cmd_ablate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::string started = timestamp();
    Prepared p = prepare(config, "cae,dsc,full");
    AblationPlan plan;
    plan.options = p.options;
    RunConfig unconfigured = config;
    unconfigured.loss_config = "dual";
    plan.hyper = resolve_hyper(unconfigured, p.dataset.name, p.dataset.clusters);
    plan.seeds.clear();
    std::istringstream is(config.seeds.value_or("0,1,2,3,4"));
    std::string item;
    while (std::getline(is, item, ',')) {
      if (!item.empty()) plan.seeds.push_back(parse_u64("seeds", item));
    }
    if (config.loss_config) plan.configs = {parse_loss_config(*config.loss_config)};

    const std::vector<EvalReport> reports = run_ablation(p.data, plan, p.initial);
    const std::vector<SummaryRow> summary = aggregate(reports);
    std::filesystem::create_directories(config.out);
    std::ostringstream rep, sum;
    write_report_csv(rep, reports);
    write_summary_csv(sum, summary);
    write_text(config.out / "report.csv", rep.str());
    write_text(config.out / "summary.csv", sum.str());
    write_meta(config.out, "ablate", started, p);
    out << sum.str();
    return kExitOk;
  });
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<Label> pred = read_labels_csv(args.labels);
    const std::vector<Label> truth = read_labels_csv(args.truth);
    std::size_t clusters = 0;
    if (args.clusters) {
      clusters = *args.clusters;
    } else {
      for (Label l : pred) clusters = std::max<std::size_t>(clusters, static_cast<std::size_t>(std::max(l, 0)));
      for (Label l : truth) clusters = std::max<std::size_t>(clusters, static_cast<std::size_t>(std::max(l, 0)));
    }
    const double error = clustering_error(pred, truth, clusters);
    out << "error_percent=" << format_number(error) << '\n';
    if (args.report) {
      EvalReport report;
      report.dataset = args.truth.stem().string();
      report.clusters = clusters;
      report.loss_config = "-";
      report.error_percent = error;
      std::ostringstream os;
      write_report_csv(os, std::span<const EvalReport>(&report, 1));
      write_text(*args.report, os.str());
    }
    return kExitOk;
  });
}

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<ComponentCheck> checks = run_gradcheck(options);
    bool ok = true;
    out << std::left << std::setw(12) << "component" << std::setw(16) << "max_rel_error" << std::setw(9)
        << "entries" << "status  worst\n";
    for (const ComponentCheck& c : checks) {
      ok = ok && c.pass;
      std::ostringstream rel;
      rel << std::scientific << std::setprecision(3) << c.max_relative_error;
      out << std::left << std::setw(12) << c.component << std::setw(16) << rel.str() << std::setw(9) << c.entries
          << (c.pass ? "PASS    " : "FAIL    ") << c.worst_parameter << '\n';
      if (!c.pass) err << "gradient mismatch in component " << c.component << " at " << c.worst_parameter << '\n';
    }
    return ok ? kExitOk : kExitNumeric;
  });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SyntheticSet set = gen_synthetic(args.spec);
    const ImageDataset ds = to_pseudo_images(set, args.name);
    std::filesystem::create_directories(args.out);
    const std::filesystem::path manifest = write_dataset(args.out, ds);
    out << "wrote " << manifest.string() << '\n';
    return kExitOk;
  });
}

int cmd_inspect(const std::filesystem::path& path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open " + path.string());
    char magic[4] = {0, 0, 0, 0};
    is.read(magic, 4);
    is.close();
    auto describe = [&](const std::string& name, const Tensor& t) {
      out << name << ' ' << shape_to_string(t.shape());
      if (!t.empty()) {
        const auto [lo, hi] = std::minmax_element(t.values().begin(), t.values().end());
        out << " min=" << format_number(*lo) << " max=" << format_number(*hi);
      }
      out << '\n';
    };
    if (std::equal(magic, magic + 4, kCheckpointMagic)) {
      const Archive archive = load_archive(path);
      out << "checkpoint with " << archive.size() << " records\n";
      for (const NamedTensor& rec : archive) describe(rec.name, rec.value);
    } else if (std::equal(magic, magic + 4, kTensorMagic)) {
      describe("tensor", load_tensor(path));
    } else {
      const ImageDataset ds = load_dataset(path);
      out << "dataset " << ds.name << ": " << ds.size() << " samples, " << ds.clusters << " clusters\n";
      if (!ds.images.empty()) describe("images", ds.images);
      if (!ds.features.empty()) describe("features", ds.features);
    }
    return kExitOk;
  });
}

}  // namespace s2cn
