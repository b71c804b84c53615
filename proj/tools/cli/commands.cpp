#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "bsp/consistency.hpp"
#include "bsp/inference.hpp"
#include "bsp/io.hpp"
#include "bsp/likelihood.hpp"
#include "bsp/measure.hpp"
#include "bsp/process.hpp"
#include "bsp/relational.hpp"
#include "bsp/rng.hpp"

namespace bsp::cli {
namespace {

namespace fs = std::filesystem;
using io::json;

// Every setting any subcommand understands. Values come from, in increasing
// priority: built-in defaults, the --config JSON file, command-line flags.
struct Settings {
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string config;
  std::size_t threads = 1;
  std::string domain = "unit-square";
  std::optional<double> budget;
  std::string weight;

  // toy
  std::string preset = "case2";
  bool fit = false;
  std::string points;
  std::uint32_t labels = 0;
  std::size_t particles = 20;
  std::optional<std::size_t> iterations;
  double alpha = 1.0;

  // relational
  std::string edges;
  std::string mask;
  std::size_t nodes = 200;
  double planted_budget = 4.0;
  double holdout = 0.1;
  double alpha0 = 0.5;
  double beta0 = 0.5;

  // consistency
  std::string sub;
  std::size_t runs = 10'000;
  double significance = 0.01;
  bool broken = false;

  // density
  std::size_t grid = 720;
  std::size_t samples = 0;
};

[[noreturn]] void config_error(const std::string& what) {
  fail(ErrorKind::kInvalidArgument, what);
}

// Accepts a JSON string or a JSON object (kept as text for later parsing).
std::string text_or_json(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) return v.dump();
  config_error("config key '" + key + "' must be a string or an object");
}

template <typename T>
T config_value(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    config_error("config key '" + key + "' has the wrong type");
  }
}

void apply_config(const fs::path& path, Settings& s) {
  json j;
  try {
    j = io::parse_json(io::read_file(path), path.string());
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (!j.is_object()) config_error("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") s.seed = config_value<std::uint64_t>(v, key);
    else if (key == "out") s.out = config_value<std::string>(v, key);
    else if (key == "threads") s.threads = config_value<std::size_t>(v, key);
    else if (key == "domain") s.domain = text_or_json(v, key);
    else if (key == "budget") s.budget = config_value<double>(v, key);
    else if (key == "weight") s.weight = text_or_json(v, key);
    else if (key == "preset") s.preset = config_value<std::string>(v, key);
    else if (key == "fit") s.fit = config_value<bool>(v, key);
    else if (key == "points") s.points = config_value<std::string>(v, key);
    else if (key == "labels") s.labels = config_value<std::uint32_t>(v, key);
    else if (key == "particles") s.particles = config_value<std::size_t>(v, key);
    else if (key == "iterations") s.iterations = config_value<std::size_t>(v, key);
    else if (key == "alpha") s.alpha = config_value<double>(v, key);
    else if (key == "edges") s.edges = config_value<std::string>(v, key);
    else if (key == "mask") s.mask = config_value<std::string>(v, key);
    else if (key == "nodes") s.nodes = config_value<std::size_t>(v, key);
    else if (key == "planted_budget") s.planted_budget = config_value<double>(v, key);
    else if (key == "holdout") s.holdout = config_value<double>(v, key);
    else if (key == "alpha0") s.alpha0 = config_value<double>(v, key);
    else if (key == "beta0") s.beta0 = config_value<double>(v, key);
    else if (key == "sub") s.sub = text_or_json(v, key);
    else if (key == "runs") s.runs = config_value<std::size_t>(v, key);
    else if (key == "significance") s.significance = config_value<double>(v, key);
    else if (key == "broken") s.broken = config_value<bool>(v, key);
    else if (key == "grid") s.grid = config_value<std::size_t>(v, key);
    else if (key == "samples") s.samples = config_value<std::size_t>(v, key);
    else config_error("unknown config key '" + key + "'");
  }
}

std::vector<double> parse_numbers(std::string_view text, const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      config_error("malformed number in " + what + ": '" + item + "'");
    }
    if (used != item.size()) config_error("malformed number in " + what + ": '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// unit-square | rect:x0,y0,x1,y1 | poly:x,y;x,y;... | JSON polygon | path.json
ConvexPolygon parse_polygon(const std::string& text, const std::string& what) {
  if (text == "unit-square") return ConvexPolygon::unit_square();
  if (text.rfind("rect:", 0) == 0) {
    const auto v = parse_numbers(text.substr(5), what);
    if (v.size() != 4) config_error(what + " rect needs four numbers");
    return ConvexPolygon::rectangle(v[0], v[1], v[2], v[3]);
  }
  if (text.rfind("poly:", 0) == 0) {
    std::vector<Point2> pts;
    std::istringstream ss(text.substr(5));
    for (std::string pair; std::getline(ss, pair, ';');) {
      const auto v = parse_numbers(pair, what);
      if (v.size() != 2) config_error(what + " vertices must be 'x,y'");
      pts.push_back({v[0], v[1]});
    }
    return ConvexPolygon(std::move(pts));
  }
  try {
    if (!text.empty() && text.front() == '{') {
      return io::polygon_from_json(io::parse_json(text, what));
    }
    if (text.size() > 5 && text.substr(text.size() - 5) == ".json") {
      return io::polygon_from_json(io::parse_json(io::read_file(text), text));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) config_error(e.what());
    throw;
  }
  config_error("unrecognised " + what + " '" + text + "'");
}

DirectionWeight mixed_default() {
  return DirectionWeight::mixed(
      {{DirectionWeight::axis_aligned(), 1.0}, {DirectionWeight::uniform(), 1.0}});
}

DirectionWeight parse_weight(const std::string& text, const DirectionWeight& fallback) {
  if (text.empty()) return fallback;
  if (text == "uniform") return DirectionWeight::uniform();
  if (text == "axis") return DirectionWeight::axis_aligned();
  if (text == "mixed") return mixed_default();
  if (text.front() == '{') {
    try {
      return io::weight_from_json(io::parse_json(text, "weight"));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kParse) config_error(e.what());
      throw;
    }
  }
  config_error("unrecognised weight '" + text + "'");
}

std::uint64_t require_seed(const Settings& s) {
  if (!s.seed) config_error("--seed is required for this command");
  return *s.seed;
}

double require_positive(double v, const std::string& what) {
  if (!(v > 0.0) || !std::isfinite(v)) config_error(what + " must be positive and finite");
  return v;
}

json test_json(const stats::TestResult& r) {
  return {{"statistic", r.statistic}, {"dof", r.dof}, {"p_value", r.p_value}};
}

// Writes trees/<hash>.json for every record and the JSON-lines trace.
void write_trace(const fs::path& out, const std::vector<json>& records,
                 const std::vector<const BspTree*>& trees) {
  std::string lines;
  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::string text = io::dump(io::to_json(*trees[k]));
    const std::string ref = "trees/" + io::hex64(io::fnv1a(text)) + ".json";
    io::write_file(out / ref, text);
    json r = records[k];
    r["tree_ref"] = ref;
    lines += r.dump() + "\n";
  }
  io::write_file(out / "trace.jsonl", lines);
}

void write_tree(const fs::path& out, const std::string& stem, const BspTree& tree) {
  io::write_file(out / (stem + ".json"), io::dump(io::to_json(tree)));
  io::write_file(out / (stem + ".svg"), io::to_svg(tree));
}

// ---------------------------------------------------------------- sample

int cmd_sample(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = require_seed(s);
  const ConvexPolygon domain = parse_polygon(s.domain, "domain");
  const double budget = require_positive(s.budget.value_or(1.0), "budget");
  const DirectionWeight w = parse_weight(s.weight, DirectionWeight::uniform());
  Rng rng = Rng(seed).split(Stream::kTree);
  const BspTree tree = sample_bsp(domain, budget, w, rng);
  const fs::path dir(s.out);
  write_tree(dir, "tree", tree);
  out << "leaves " << tree.num_leaves() << "\n";
  out << "total_perimeter " << io::format_double(total_perimeter(tree)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- toy

struct ToyPreset {
  double budget = 3.0;
  std::uint32_t labels = 5;
};

ToyPreset preset_of(const std::string& name) {
  if (name == "case1") return {10.0, 4};
  if (name == "case2" || name == "case3") return {3.0, 5};
  config_error("unknown preset '" + name + "' (expected case1, case2 or case3)");
}

// Case 1: labels planted by a tree on a dense grid. Cases 2 and 3: five
// Gaussian clusters of 200 points labelled by cluster plus 100 (case 2) or
// 500 (case 3) uniform noise points with uniformly random labels.
LabelledPoints make_toy(const std::string& preset, const ToyPreset& p, const DirectionWeight& w,
                        Rng& rng, std::optional<BspTree>& truth) {
  const ConvexPolygon square = ConvexPolygon::unit_square();
  if (preset == "case1") {
    constexpr std::size_t kSide = 32;
    std::vector<Point2> grid;
    for (std::size_t i = 0; i < kSide; ++i) {
      for (std::size_t j = 0; j < kSide; ++j) {
        grid.push_back({(static_cast<double>(i) + 0.5) / kSide,
                        (static_cast<double>(j) + 0.5) / kSide});
      }
    }
    const std::vector<double> alpha(p.labels, 0.1);
    auto [toy, tree] = generate_toy(square, p.budget, w, alpha, grid, rng);
    truth = std::move(tree);
    return std::move(toy.data);
  }
  constexpr std::size_t kClusters = 5;
  constexpr std::size_t kPerCluster = 200;
  constexpr double kSpread = 0.06;
  LabelledPoints data;
  data.num_labels = p.labels;
  for (std::size_t c = 0; c < kClusters; ++c) {
    const Point2 centre{rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)};
    for (std::size_t k = 0; k < kPerCluster;) {
      const Point2 q{rng.normal(centre.x, kSpread), rng.normal(centre.y, kSpread)};
      if (q.x <= 0.0 || q.x >= 1.0 || q.y <= 0.0 || q.y >= 1.0) continue;
      data.points.push_back(q);
      data.labels.push_back(static_cast<std::uint32_t>(c));
      ++k;
    }
  }
  const std::size_t noise = preset == "case2" ? 100 : 500;
  for (std::size_t k = 0; k < noise; ++k) {
    data.points.push_back({rng.uniform(), rng.uniform()});
    data.labels.push_back(static_cast<std::uint32_t>(rng.uniform_index(p.labels)));
  }
  return data;
}

int cmd_toy(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = require_seed(s);
  const Rng root(seed);
  const fs::path dir(s.out);
  const ToyPreset preset = preset_of(s.preset);
  const double budget = require_positive(s.budget.value_or(preset.budget), "budget");
  const DirectionWeight w = parse_weight(s.weight, DirectionWeight::uniform());

  LabelledPoints data;
  if (!s.points.empty()) {
    const std::uint32_t labels = s.labels ? s.labels : preset.labels;
    std::ifstream in(s.points);
    if (!in) fail(ErrorKind::kIo, "cannot open " + s.points);
    data = io::read_points_csv(in, s.points, labels);
  } else {
    ToyPreset p = preset;
    p.budget = budget;
    if (s.labels) p.labels = s.labels;
    std::optional<BspTree> truth;
    Rng data_rng = root.split(Stream::kData);
    data = make_toy(s.preset, p, w, data_rng, truth);
    io::write_file(dir / "data.csv", io::points_csv(data));
    if (truth) write_tree(dir, "truth", *truth);
    out << "points " << data.size() << "\n";
  }
  if (!s.fit && s.points.empty()) return kExitOk;

  const ConvexPolygon domain = parse_polygon(s.domain, "domain");
  const auto lik = BlockLikelihood::dirichlet_multinomial(
      std::vector<double>(data.num_labels, require_positive(s.alpha, "alpha")));
  CsmcConfig cfg;
  cfg.num_particles = s.particles;
  cfg.budget = budget;
  cfg.weight = w;
  cfg.num_threads = s.threads;
  const std::size_t iterations = s.iterations.value_or(50);
  const auto trace = gibbs_run(data, lik, domain, cfg, iterations, root.split(Stream::kUser));

  std::vector<json> records;
  std::vector<const BspTree*> trees;
  for (const GibbsRecord& r : trace) {
    records.push_back({{"iter", r.iteration}, {"loglik", r.log_likelihood},
                       {"num_blocks", r.num_blocks}});
    trees.push_back(&r.tree);
  }
  write_trace(dir, records, trees);
  const BspTree& last = trace.back().tree;
  write_tree(dir, "fit", last);

  // Training accuracy of the majority label of each final block.
  const PartitionSnapshot part = final_partition(last);
  const auto counts = block_counts(part, data);
  std::size_t correct = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const BlockId id = locate(part, data.points[k]);
    const auto blocks = part.blocks();
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(blocks.begin(), blocks.end(), id,
                         [](const Block& b, BlockId v) { return b.id < v; }) -
        blocks.begin());
    const auto& c = counts[pos];
    const auto best = static_cast<std::uint32_t>(std::max_element(c.begin(), c.end()) - c.begin());
    if (best == data.labels[k]) ++correct;
  }
  std::vector<std::uint32_t> global(data.num_labels, 0);
  for (std::uint32_t l : data.labels) ++global[l];
  const double baseline = lik.block_log_evidence(global);
  const double accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  const json metrics = {{"label_accuracy", accuracy},
                        {"train_loglik", trace.back().log_likelihood},
                        {"baseline_loglik", baseline},
                        {"num_blocks", last.num_leaves()}};
  io::write_file(dir / "metrics.json", io::dump(metrics));
  out << "label_accuracy " << io::format_double(accuracy) << "\n";
  out << "train_loglik " << io::format_double(trace.back().log_likelihood) << "\n";
  out << "baseline_loglik " << io::format_double(baseline) << "\n";
  out << "num_blocks " << last.num_leaves() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- relational

int cmd_relational(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = require_seed(s);
  const Rng root(seed);
  const fs::path dir(s.out);
  const DirectionWeight w = parse_weight(s.weight, mixed_default());
  require_positive(s.alpha0, "alpha0");
  require_positive(s.beta0, "beta0");

  RelationalDataset ds;
  if (!s.edges.empty()) {
    std::ifstream in(s.edges);
    if (!in) fail(ErrorKind::kIo, "cannot open " + s.edges);
    ds = io::read_edge_list(in, s.edges);
    if (!s.mask.empty()) {
      std::ifstream min(s.mask);
      if (!min) fail(ErrorKind::kIo, "cannot open " + s.mask);
      io::read_mask(min, s.mask, ds);
    } else {
      Rng r = root.split(Stream::kData, 1);
      hold_out(ds, s.holdout, r);
    }
  } else {
    if (s.nodes < 2) config_error("nodes must be at least 2");
    Rng r = root.split(Stream::kData, 0);
    PlantedRelational planted = generate_relational(
        s.nodes, require_positive(s.planted_budget, "planted_budget"), w, s.alpha0, s.beta0, r);
    ds = std::move(planted.dataset);
    Rng h = root.split(Stream::kData, 1);
    hold_out(ds, s.holdout, h);
    io::write_file(dir / "edges.txt", io::write_edge_list(ds));
    io::write_file(dir / "mask.txt", io::write_mask(ds));
    write_tree(dir, "truth", planted.tree);
  }
  // Surface an unusable test split before the (long) fit.
  test_auc(ds, std::vector<double>(ds.n * ds.n, 0.0));

  RelationalFitConfig cfg;
  cfg.csmc.num_particles = s.particles;
  cfg.csmc.budget = require_positive(s.budget.value_or(8.0), "budget");
  cfg.csmc.weight = w;
  cfg.csmc.num_threads = s.threads;
  cfg.iterations = s.iterations.value_or(100);
  if (cfg.iterations < 1) config_error("iterations must be at least 1");
  cfg.alpha0 = s.alpha0;
  cfg.beta0 = s.beta0;
  const RelationalFit fit = fit_relational(ds, cfg, root.split(Stream::kUser));

  std::vector<json> records;
  std::vector<const BspTree*> trees;
  for (const RelationalIteration& r : fit.trace) {
    records.push_back({{"iter", r.iteration}, {"loglik", r.train_log_likelihood},
                       {"num_blocks", r.num_blocks}, {"acceptance", r.acceptance_rate}});
    trees.push_back(&r.tree);
  }
  write_trace(dir, records, trees);
  io::write_file(dir / "predictions.csv", io::predictions_csv(ds, fit.scores));
  const double a = test_auc(ds, fit.scores);
  const json metrics = {{"auc", a},
                        {"train_loglik", fit.trace.back().train_log_likelihood},
                        {"num_blocks", fit.trace.back().num_blocks},
                        {"test_fraction", ds.test_fraction()}};
  io::write_file(dir / "metrics.json", io::dump(metrics));
  out << "auc " << io::format_double(a) << "\n";
  out << "train_loglik " << io::format_double(fit.trace.back().train_log_likelihood) << "\n";
  out << "num_blocks " << fit.trace.back().num_blocks << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- consistency

int cmd_consistency(const Settings& s, std::ostream& out) {
  const std::uint64_t seed = require_seed(s);
  ConsistencyConfig cfg;
  cfg.domain = parse_polygon(s.domain, "domain");
  if (!s.sub.empty()) cfg.sub = parse_polygon(s.sub, "sub");
  cfg.budget = require_positive(s.budget.value_or(2.0), "budget");
  cfg.weight = parse_weight(s.weight, DirectionWeight::uniform());
  cfg.runs = s.runs;
  cfg.num_threads = s.threads;
  cfg.significance = s.significance;
  cfg.fault = s.broken ? RestrictionFault::kDropOuterCuts : RestrictionFault::kNone;
  if (!(cfg.significance > 0.0 && cfg.significance < 1.0)) {
    config_error("significance must be in (0, 1)");
  }
  if (cfg.runs < 2) config_error("runs must be at least 2");
  const ConsistencyReport rep = run_consistency(cfg, Rng(seed));
  const json report = {{"runs", cfg.runs},
                       {"significance", cfg.significance},
                       {"broken", s.broken},
                       {"leaf_counts", test_json(rep.leaf_counts)},
                       {"cut_counts", test_json(rep.cut_counts)},
                       {"first_cut", test_json(rep.first_cut)},
                       {"passed", rep.passed}};
  io::write_file(fs::path(s.out) / "consistency.json", io::dump(report));
  out << "leaf_counts_p " << io::format_double(rep.leaf_counts.p_value) << "\n";
  out << "cut_counts_p " << io::format_double(rep.cut_counts.p_value) << "\n";
  out << "first_cut_p " << io::format_double(rep.first_cut.p_value) << "\n";
  out << (rep.passed ? "PASS" : "FAIL") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- density

int cmd_density(const Settings& s, std::ostream& out) {
  const ConvexPolygon domain = parse_polygon(s.domain, "domain");
  const DirectionWeight w = parse_weight(s.weight, DirectionWeight::uniform());
  if (s.grid < 2) config_error("grid must be at least 2");
  const fs::path dir(s.out);
  std::ostringstream csv;
  csv << "theta,density,kind\n";
  for (std::size_t k = 0; k <= s.grid; ++k) {
    const double theta = M_PI * static_cast<double>(k) / static_cast<double>(s.grid);
    csv << io::format_double(theta) << ',' << io::format_double(continuous_density(domain, w, theta))
        << ",density\n";
  }
  for (double a : atoms(w)) {
    csv << io::format_double(a) << ',' << io::format_double(atom_mass(domain, w, a)) << ",atom\n";
  }
  io::write_file(dir / "density.csv", csv.str());
  out << "block_measure " << io::format_double(block_measure(domain, w)) << "\n";
  if (s.samples > 0) {
    const Rng root(require_seed(s));
    const double budget = require_positive(s.budget.value_or(1.0), "budget");
    for (std::size_t k = 0; k < s.samples; ++k) {
      Rng r = root.split(Stream::kTree, k);
      write_tree(dir, "sample_" + std::to_string(k), sample_bsp(domain, budget, w, r));
    }
    out << "samples " << s.samples << "\n";
  }
  return kExitOk;
}

// Finds --config before the main parse so that flags can override it.
std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
  }
  return {};
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kInvalidPolygon:
    case ErrorKind::kSubdomainNotContained:
    case ErrorKind::kTimeOutOfRange:
    case ErrorKind::kIo:
      return kExitConfig;
    case ErrorKind::kParse:
    case ErrorKind::kSingleClass:
    case ErrorKind::kPointOutsideDomain:
      return kExitData;
    case ErrorKind::kCutMisses:
    case ErrorKind::kDegenerateCut:
    case ErrorKind::kQuadratureFailure:
    case ErrorKind::kEnvelopeViolation:
    case ErrorKind::kRunawayProcess:
    case ErrorKind::kAllWeightsZero:
      return kExitNumerical;
  }
  return kExitNumerical;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"BSP-Tree process sampler and experiment driver", "bsptree"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", s.seed, "Seed (required by stochastic commands)");
  app.add_option("--out", s.out, "Output directory");
  app.add_option("--config", s.config, "JSON file of settings; flags override it");
  app.add_option("--threads", s.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--domain", s.domain,
                 "unit-square | rect:x0,y0,x1,y1 | poly:x,y;x,y;... | polygon JSON file");
  app.add_option("--budget", s.budget, "Budget tau");
  app.add_option("--weight", s.weight, "uniform | axis | mixed | weight JSON");

  auto* sample = app.add_subcommand("sample", "Sample one partition; write tree JSON and SVG");

  auto* toy = app.add_subcommand("toy", "Synthesize labelled toy data and optionally fit it");
  toy->add_option("--preset", s.preset, "case1 | case2 | case3");
  toy->add_flag("--fit", s.fit, "Fit the data with the Gibbs sampler");
  toy->add_option("--points", s.points, "Fit an x,y,label CSV instead of a preset");
  toy->add_option("--labels", s.labels, "Number of labels");
  toy->add_option("--particles", s.particles, "C-SMC particles")->check(CLI::PositiveNumber);
  toy->add_option("--iterations", s.iterations, "Gibbs iterations");
  toy->add_option("--alpha", s.alpha, "Symmetric Dirichlet concentration for fitting");

  auto* rel = app.add_subcommand("relational", "Fit the relational model and report held-out AUC");
  rel->add_option("--edges", s.edges, "Edge list ('n <N>' header, then 'i j' lines)");
  rel->add_option("--mask", s.mask, "Test-entry list in the edge-list format");
  rel->add_option("--nodes", s.nodes, "Nodes of the synthetic planted dataset");
  rel->add_option("--planted-budget", s.planted_budget, "Budget of the planted partition");
  rel->add_option("--holdout", s.holdout, "Held-out fraction when no mask is given");
  rel->add_option("--alpha0", s.alpha0, "Beta prior: links");
  rel->add_option("--beta0", s.beta0, "Beta prior: non-links");
  rel->add_option("--particles", s.particles, "C-SMC particles")->check(CLI::PositiveNumber);
  rel->add_option("--iterations", s.iterations, "Gibbs iterations");

  auto* cons = app.add_subcommand("consistency", "Restrict-vs-direct self-consistency tests");
  cons->add_option("--sub", s.sub, "Subdomain polygon (same forms as --domain)");
  cons->add_option("--runs", s.runs, "Runs per arm");
  cons->add_option("--significance", s.significance, "Test level");
  cons->add_flag("--broken", s.broken, "Use a deliberately broken restriction (negative control)");

  auto* dens = app.add_subcommand("density", "Export the direction density grid");
  dens->add_option("--grid", s.grid, "Number of theta intervals over (0, pi]");
  dens->add_option("--samples", s.samples, "Sampled partitions to export");

  try {
    const std::string config = find_config(args);
    if (!config.empty()) apply_config(config, s);
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 wants reversed
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*sample) return cmd_sample(s, out);
    if (*toy) return cmd_toy(s, out);
    if (*rel) return cmd_relational(s, out);
    if (*cons) return cmd_consistency(s, out);
    if (*dens) return cmd_density(s, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace bsp::cli
