// causal: command-line front end for the causality library.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "causal/am.hpp"
#include "causal/causality.hpp"
#include "causal/dataset.hpp"
#include "causal/desk_net.hpp"
#include "causal/error.hpp"
#include "causal/factors.hpp"
#include "causal/io.hpp"
#include "causal/rng.hpp"

namespace fs = std::filesystem;
using namespace causal;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitDiverged = 4;
constexpr int kExitNonFinite = 5;

const char* kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  2  bad flag, bad config key or value, unreadable or malformed input file\n"
    "  3  degenerate input (all-zero stack, numeric overflow, degenerate histogram target)\n"
    "  4  training diverged (the message names the seed)\n"
    "  5  non-finite gradient during activation maximization\n"
    "\n"
    "Settings come from --config (key=value lines, '#' comments) and are\n"
    "overridden by the matching subcommand flags. Unknown keys are rejected.\n"
    "Outputs go to --out (created if missing); files are written only after\n"
    "the whole command has succeeded.\n";

// Thrown for anything that should exit with code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Key=value settings with typed, validated accessors. Every key a command
// reads is recorded so leftovers can be reported as unknown.
class Settings {
 public:
  explicit Settings(io::Config kv) : kv_(std::move(kv)) {}

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) {
    used_.insert(key);
    return kv_.count(key) > 0;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double real(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(it->second, &used);
      if (used == it->second.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("'" + key + "' must be a finite number, got '" + it->second + "'");
  }

  long long integer(const std::string& key, long long fallback, long long lo) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    long long v = 0;
    try {
      std::size_t used = 0;
      v = std::stoll(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(it->second);
    } catch (const std::exception&) {
      throw UsageError("'" + key + "' must be an integer, got '" + it->second + "'");
    }
    if (v < lo) throw UsageError("'" + key + "' must be >= " + std::to_string(lo));
    return v;
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) {
    used_.insert(key);
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    return parse_seed(it->second, key);
  }

  bool boolean(const std::string& key, bool fallback) {
    const std::string v = str(key, fallback ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw UsageError("'" + key + "' must be true or false, got '" + v + "'");
  }

  std::vector<std::string> list(const std::string& key, const std::string& fallback) {
    std::vector<std::string> out;
    std::stringstream ss(str(key, fallback));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item.erase(0, item.find_first_not_of(' '));
      item.erase(item.find_last_not_of(' ') + 1);
      if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw UsageError("'" + key + "' must list at least one value");
    return out;
  }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) throw UsageError("unknown setting '" + k + "'");
    }
  }

  static std::uint64_t parse_seed(const std::string& text, const std::string& what) {
    try {
      std::size_t used = 0;
      if (!text.empty() && text[0] != '-') {
        const auto v = std::stoull(text, &used);
        if (used == text.size()) return v;
      }
    } catch (const std::exception&) {
    }
    throw UsageError("'" + what + "' must be a non-negative integer, got '" + text + "'");
  }

 private:
  io::Config kv_;
  std::set<std::string> used_;
};

// Wraps library parse helpers so a bad enum value exits with code 2.
template <typename F>
auto parse_enum(const std::string& key, const std::string& value, F&& parse) {
  try {
    return parse(value);
  } catch (const Error&) {
    throw UsageError("bad value '" + value + "' for '" + key + "'");
  }
}

fs::path existing_file(const std::string& key, const std::string& value) {
  if (value.empty()) throw UsageError("'" + key + "' is required");
  const fs::path p(value);
  if (!fs::is_regular_file(p)) throw UsageError("'" + key + "': no such file '" + value + "'");
  return p;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + p.string() + "'");
  return in;
}

EstimatorConfig estimator_settings(Settings& s) {
  EstimatorConfig e;
  e.method = parse_enum("method", s.str("method", "max"), parse_estimator);
  e.lehmer_p = s.real("p", 0.0);
  e.epsilon = s.real("epsilon", 1e-12);
  try {
    e.validate();
  } catch (const Error& err) {
    throw UsageError(err.what());
  }
  return e;
}

FactorConfig factor_settings(Settings& s) {
  FactorConfig f;
  f.direction = parse_enum("direction", s.str("direction", "causes"), parse_direction);
  f.mode = parse_enum("mode", s.str("mode", "full"), parse_mode);
  return f;
}

// Collected output files, written only once the command has finished.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }
  void commit() const {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw UsageError("cannot create output directory '" + dir_.string() + "'");
    for (const auto& [name, content] : files_) io::atomic_write(dir_ / name, content);
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

template <typename F>
std::string render(F&& write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

// ---- cmap ------------------------------------------------------------------

void cmd_cmap(Settings& s, Outputs& out) {
  const fs::path input = existing_file("input", s.str("input", ""));
  const EstimatorConfig est = estimator_settings(s);
  s.reject_unknown();
  auto in = open_in(input);
  const FeatureStack stack = io::read_stack_csv(in);
  const CausalityMap map = compute_causality_map(stack, est);
  out.add("cmap.csv", render([&](std::ostream& os) { io::write_map_csv(os, map); }));
  out.add("cmap.pgm", render([&](std::ostream& os) { io::write_map_heatmap(os, map); }));
}

// ---- factors ---------------------------------------------------------------

void cmd_factors(Settings& s, Outputs& out) {
  const fs::path input = existing_file("input", s.str("input", ""));
  const FactorConfig fc = factor_settings(s);
  s.reject_unknown();
  auto in = open_in(input);
  const CausalityMap map = io::read_map_csv(in);
  const FactorVector f = extract_factors(map, fc);
  out.add("factors.csv", render([&](std::ostream& os) { io::write_factors_csv(os, f); }));
}

// ---- train -----------------------------------------------------------------

struct RunOutcome {
  std::optional<TrainResult> result;
  std::optional<Error> error;
};

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void cmd_train(Settings& s, Outputs& out, std::uint64_t global_seed) {
  std::vector<Variant> variants;
  for (const auto& v : s.list("variants", "baseline")) variants.push_back(parse_enum("variants", v, parse_variant));
  std::vector<std::uint64_t> seeds;
  if (s.has("seeds")) {
    for (const auto& v : s.list("seeds", "")) seeds.push_back(Settings::parse_seed(v, "seeds"));
  } else {
    seeds.push_back(global_seed);
  }

  TrainConfig base;
  base.net.factors = factor_settings(s);
  base.net.estimator = estimator_settings(s);
  base.net.cmap_backprop = s.boolean("cmap_backprop", base.net.cmap_backprop);
  base.epochs = static_cast<int>(s.integer("epochs", base.epochs, 1));
  base.batch_size = static_cast<int>(s.integer("batch_size", base.batch_size, 1));
  base.learning_rate = s.real("learning_rate", base.learning_rate);
  base.n_samples = static_cast<std::size_t>(s.integer("n_samples", static_cast<long long>(base.n_samples), 2));
  base.train_fraction = s.real("train_fraction", base.train_fraction);
  base.val_fraction = s.real("val_fraction", base.val_fraction);
  const bool save_params = s.boolean("save_params", false);
  const auto threads = static_cast<std::size_t>(s.integer("threads", 1, 1));
  s.reject_unknown();
  try {
    base.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  std::vector<TrainConfig> jobs;
  for (Variant v : variants) {
    for (std::uint64_t seed : seeds) {
      TrainConfig c = base;
      c.net.variant = v;
      c.seed = seed;
      jobs.push_back(c);
    }
  }

  // Runs share nothing, so they can go to worker threads; results land in
  // job order either way.
  std::vector<RunOutcome> outcomes(jobs.size());
  auto work = [&](std::size_t i) {
    try {
      outcomes[i].result = train(jobs[i]);
    } catch (const Error& e) {
      outcomes[i].error = e;
    }
  };
  if (threads <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex m;
    for (std::size_t t = 0; t < std::min(threads, jobs.size()); ++t) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lk(m);
            if (next >= jobs.size()) return;
            i = next++;
          }
          work(i);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!outcomes[i].error) continue;
    const Error& e = *outcomes[i].error;
    if (e.kind() == ErrorKind::DivergedLoss) {
      throw Error(ErrorKind::DivergedLoss,
                  "variant " + to_string(jobs[i].net.variant) + " seed " + std::to_string(jobs[i].seed) +
                      " diverged at epoch " + std::to_string(e.index()),
                  static_cast<std::int64_t>(jobs[i].seed));
    }
    throw e;
  }

  nlohmann::ordered_json j;
  j["command"] = "train";
  nlohmann::ordered_json cfg;
  std::vector<std::string> vnames;
  for (Variant v : variants) vnames.push_back(to_string(v));
  cfg["variants"] = vnames;
  cfg["seeds"] = seeds;
  cfg["epochs"] = base.epochs;
  cfg["batch_size"] = base.batch_size;
  cfg["learning_rate"] = base.learning_rate;
  cfg["n_samples"] = base.n_samples;
  cfg["train_fraction"] = base.train_fraction;
  cfg["val_fraction"] = base.val_fraction;
  cfg["direction"] = to_string(base.net.factors.direction);
  cfg["mode"] = to_string(base.net.factors.mode);
  cfg["method"] = to_string(base.net.estimator.method);
  cfg["p"] = base.net.estimator.lehmer_p;
  cfg["epsilon"] = base.net.estimator.epsilon;
  cfg["cmap_backprop"] = base.net.cmap_backprop;
  j["config"] = cfg;

  std::ostringstream epochs_csv;
  epochs_csv << std::setprecision(17)
             << "variant,seed,epoch,train_loss,train_accuracy,val_loss,val_accuracy\n";
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const TrainResult& r = *outcomes[i].result;
    const std::string vname = to_string(jobs[i].net.variant);
    runs.push_back({{"variant", vname},
                    {"seed", jobs[i].seed},
                    {"test_accuracy", r.test_accuracy},
                    {"best_epoch", r.best_epoch},
                    {"parameter_count", r.parameter_count}});
    for (const auto& m : r.history) {
      epochs_csv << vname << ',' << jobs[i].seed << ',' << m.epoch << ',' << m.train_loss << ','
                 << m.train_accuracy << ',' << m.val_loss << ',' << m.val_accuracy << '\n';
    }
    if (save_params) {
      out.add("params_" + vname + "_" + std::to_string(jobs[i].seed) + ".json", io::params_to_json(r.params));
    }
  }
  j["runs"] = runs;

  nlohmann::ordered_json aggs = nlohmann::ordered_json::array();
  for (Variant v : variants) {
    std::vector<double> acc;
    std::size_t params = 0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].net.variant != v) continue;
      acc.push_back(outcomes[i].result->test_accuracy);
      params = outcomes[i].result->parameter_count;
    }
    double mean = 0.0;
    for (double a : acc) mean += a;
    mean /= static_cast<double>(acc.size());
    aggs.push_back({{"variant", to_string(v)},
                    {"runs", acc.size()},
                    {"test_accuracy_mean", mean},
                    {"test_accuracy_std", sample_std(acc)},
                    {"parameter_count", params}});
  }
  j["aggregates"] = aggs;

  out.add("metrics.json", j.dump(2) + "\n");
  out.add("epochs.csv", epochs_csv.str());
}

// ---- am --------------------------------------------------------------------

Image seeded_uniform_image(std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed, double lo,
                           double hi) {
  SplitMix64 rng(seed);
  Image img(h, w, c);
  for (double& v : img.pixels()) v = rng.uniform(lo, hi);
  return img;
}

Image load_image(const std::string& key, const std::string& value) {
  const fs::path p = existing_file(key, value);
  auto in = open_in(p);
  return p.extension() == ".pgm" ? io::read_pgm(in) : io::read_image_csv(in);
}

std::vector<double> load_row(const std::string& key, const std::string& value) {
  auto in = open_in(existing_file(key, value));
  std::vector<double> row;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw UsageError("'" + key + "': cannot parse number '" + cell + "'");
      }
    }
  }
  if (row.empty()) throw UsageError("'" + key + "': file holds no values");
  return row;
}

void cmd_am(Settings& s, Outputs& out, std::uint64_t seed) {
  AmConfig cfg;
  cfg.seed = seed;
  cfg.iterations = static_cast<int>(s.integer("iterations", cfg.iterations, 0));
  cfg.step_size = s.real("step_size", cfg.step_size);
  cfg.jitter_px = static_cast<int>(s.integer("jitter_px", cfg.jitter_px, 0));
  cfg.blur_every = static_cast<int>(s.integer("blur_every", cfg.blur_every, 0));
  cfg.prior_every = static_cast<int>(s.integer("prior_every", cfg.prior_every, 1));
  cfg.clip_lo = s.real("clip_lo", cfg.clip_lo);
  cfg.clip_hi = s.real("clip_hi", cfg.clip_hi);
  cfg.hist_lo = s.real("hist_lo", cfg.hist_lo);
  cfg.hist_hi = s.real("hist_hi", cfg.hist_hi);
  cfg.prior_weights.histogram = s.real("w_histogram", 0.0);
  cfg.prior_weights.noise = s.real("w_noise", 0.0);
  cfg.prior_weights.symmetry = s.real("w_symmetry", 0.0);
  cfg.prior_weights.frequency = s.real("w_frequency", 0.0);

  const std::string scorer_spec = s.str("scorer", "quadratic-test");
  const std::string init_spec = s.str("init", "random");
  auto h = static_cast<std::size_t>(s.integer("height", 16, 1));
  auto w = static_cast<std::size_t>(s.integer("width", 16, 1));
  auto c = static_cast<std::size_t>(s.integer("channels", 1, 1));

  PriorTargets targets;
  if (s.has("histogram_target")) targets.histogram = load_row("histogram_target", s.str("histogram_target", ""));
  if (s.has("reference")) targets.reference = load_image("reference", s.str("reference", ""));
  if (cfg.prior_weights.histogram != 0.0 && targets.histogram.empty()) {
    throw UsageError("w_histogram needs 'histogram_target'");
  }
  if (cfg.prior_weights.frequency != 0.0 && !targets.reference) {
    throw UsageError("w_frequency needs 'reference'");
  }

  Scorer scorer;
  if (scorer_spec == "quadratic-test") {
    if (c != 1 && c != 3) throw UsageError("'channels' must be 1 or 3");
    scorer = quadratic_scorer(seeded_uniform_image(h, w, c, derive_seed(seed, 101), 0.2, 0.8));
  } else if (scorer_spec.rfind("desknet:", 0) == 0) {
    const auto last = scorer_spec.rfind(':');
    if (last <= 8) throw UsageError("scorer must look like desknet:<params-file>:<class>");
    const std::string file = scorer_spec.substr(8, last - 8);
    const std::string cls_text = scorer_spec.substr(last + 1);
    if (cls_text != "0" && cls_text != "1") throw UsageError("desknet class must be 0 or 1");
    DeskNetParams params = io::params_from_json(io::read_file(existing_file("scorer", file)));
    NetConfig net;
    net.variant = params.variant;
    net.factors = factor_settings(s);
    net.estimator = estimator_settings(s);
    if (h != kSampleSide || w != kSampleSide || c != 1) {
      throw UsageError("the desknet scorer needs height=16 width=16 channels=1");
    }
    scorer = desknet_scorer(std::move(params), net, std::stoi(cls_text));
  } else {
    throw UsageError("unknown scorer '" + scorer_spec + "'");
  }
  s.reject_unknown();
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  Image init;
  if (init_spec == "random") {
    init = seeded_uniform_image(h, w, c, derive_seed(seed, 100), cfg.clip_lo, cfg.clip_hi);
  } else if (init_spec == "zeros") {
    init = Image(h, w, c);
  } else {
    init = load_image("init", init_spec);
    if (init.height() != h || init.width() != w || init.channels() != c) {
      throw UsageError("init image shape disagrees with height/width/channels");
    }
  }

  const auto regs = prior_regularizers(cfg, targets);
  const AmResult res = am_run(scorer, init, cfg, regs);

  std::ostringstream trace;
  trace << std::setprecision(17) << "iteration,activation,regularizer\n";
  for (const auto& r : res.trace) trace << r.iteration << ',' << r.activation << ',' << r.regularizer << '\n';
  out.add("image.pgm", render([&](std::ostream& os) { io::write_image_pnm(os, res.image, cfg.clip_lo, cfg.clip_hi); }));
  out.add("image.csv", render([&](std::ostream& os) { io::write_image_csv(os, res.image); }));
  out.add("trace.csv", trace.str());
}

// ---- dataset ---------------------------------------------------------------

void cmd_dataset(Settings& s, Outputs& out, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(s.integer("n_samples", 2858, 2));
  s.reject_unknown();
  const auto data = generate_dataset(n, derive_seed(seed, 1));  // same images as train with this seed
  out.add("dataset.csv", render([&](std::ostream& os) { write_dataset_csv(os, data); }));
}

int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::ZeroStack:
    case ErrorKind::NumericOverflow:
    case ErrorKind::DegenerateTarget:
      return kExitDegenerate;
    case ErrorKind::DivergedLoss:
      return kExitDiverged;
    case ErrorKind::NonFiniteGradient:
      return kExitNonFinite;
    default:
      return kExitParse;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causality maps, causality factors, desk-scale training and activation maximization."};
  app.footer(kExitHelp);
  app.require_subcommand(1);

  std::string seed_text = "0";
  std::string out_dir = ".";
  std::string config_path;
  app.add_option("--seed", seed_text, "Run seed (non-negative integer)");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--config", config_path, "key=value settings file");

  // Subcommand flags are folded into the settings map under their key.
  std::map<std::string, std::string> flag_values;
  auto flag = [&](CLI::App* sub, const std::string& key, const std::string& help) {
    sub->add_option("--" + key, flag_values[sub->get_name() + "/" + key], help);
  };

  auto* cmap = app.add_subcommand("cmap", "Causality map of a feature stack -> cmap.csv, cmap.pgm");
  flag(cmap, "input", "Stack CSV ('# k=K n=N' header, k*n rows of n values)");
  flag(cmap, "method", "max | lehmer (default max)");
  flag(cmap, "p", "Lehmer exponent (default 0)");
  flag(cmap, "epsilon", "Denominator floor (default 1e-12)");

  auto* factors = app.add_subcommand("factors", "Causality factors of a map -> factors.csv");
  flag(factors, "input", "Map CSV ('# k=K' header, k rows of k values)");
  flag(factors, "direction", "causes | effects (default causes)");
  flag(factors, "mode", "full | bool (default full)");

  auto* trainc = app.add_subcommand("train", "Train desk nets -> metrics.json, epochs.csv");
  trainc->footer(
      "Config keys: variants seeds epochs batch_size learning_rate n_samples train_fraction\n"
      "val_fraction direction mode method p epsilon cmap_backprop save_params threads");
  flag(trainc, "variants", "Comma list of baseline,cat,mulcat,cab,damaged_cat,damaged_mulcat");
  flag(trainc, "seeds", "Comma list of seeds (default: --seed)");
  flag(trainc, "epochs", "Epochs per run");

  auto* am = app.add_subcommand("am", "Activation maximization -> image.pgm, image.csv, trace.csv");
  am->footer(
      "Config keys: scorer iterations step_size jitter_px blur_every prior_every clip_lo clip_hi\n"
      "w_histogram w_noise w_symmetry w_frequency histogram_target hist_lo hist_hi reference\n"
      "height width channels init direction mode method p epsilon");
  flag(am, "scorer", "quadratic-test | desknet:<params-file>:<class>");
  flag(am, "iterations", "Ascent steps");

  auto* dataset = app.add_subcommand("dataset", "Export the synthetic dataset -> dataset.csv");
  flag(dataset, "n_samples", "Number of images");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    const std::uint64_t seed = Settings::parse_seed(seed_text, "--seed");
    io::Config kv;
    if (!config_path.empty()) {
      auto in = open_in(existing_file("--config", config_path));
      kv = io::read_config(in);
    }
    Settings s(std::move(kv));
    CLI::App* sub = app.get_subcommands().front();
    for (const auto& [name, value] : flag_values) {
      const auto slash = name.find('/');
      if (name.substr(0, slash) != sub->get_name()) continue;
      if (sub->count("--" + name.substr(slash + 1)) > 0) s.set(name.substr(slash + 1), value);
    }
    // explicit global flags beat the config file
    const std::uint64_t config_seed = s.seed("seed", seed);
    const std::string config_out = s.str("out", out_dir);
    const std::uint64_t effective = app.count("--seed") ? seed : config_seed;
    Outputs out{fs::path(app.count("--out") ? out_dir : config_out)};

    const std::string name = sub->get_name();
    if (name == "cmap") cmd_cmap(s, out);
    else if (name == "factors") cmd_factors(s, out);
    else if (name == "train") cmd_train(s, out, effective);
    else if (name == "am") cmd_am(s, out, effective);
    else cmd_dataset(s, out, effective);
    out.commit();
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
