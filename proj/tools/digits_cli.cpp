#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "digits/analysis/dichotomies.hpp"
#include "digits/analysis/learning.hpp"
#include "digits/bench/benchmark.hpp"
#include "digits/core/error.hpp"
#include "digits/search/engine.hpp"
#include "digits/sketch/parser.hpp"
#include "digits/sketch/unroll.hpp"

using namespace digits;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kInfra = 1;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> time_budget_s;
  std::optional<std::size_t> depth_budget;
  std::optional<double> tau;
  bool adaptive = false;
  std::string solver;
  std::optional<std::size_t> verify_samples;
  std::string out;
  bool verbose = false;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::map<std::string, double> parse_constants(const std::vector<std::string>& defs) {
  std::map<std::string, double> out;
  for (const auto& d : defs) {
    const auto eq = d.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("constant must be NAME=VALUE, got '" + d + "'");
    const auto v = parse_list(d.substr(eq + 1));
    if (v.size() != 1) throw ConfigError("constant must be NAME=VALUE, got '" + d + "'");
    out[d.substr(0, eq)] = v[0];
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw InfrastructureError("cannot write " + g.out);
  out << text;
}

// ---- run ----

int cmd_run(const Globals& g, const std::string& file, std::optional<std::size_t> run_index) {
  auto spec = bench::BenchmarkSpec::load(file);
  if (!g.solver.empty()) spec.solver_path = g.solver;
  if (g.verify_samples) spec.verify_samples = *g.verify_samples;
  if (g.adaptive || g.tau) {
    // Replace the configured modes by the requested one, keeping the seeds.
    std::vector<std::uint64_t> seeds;
    for (const auto& r : spec.runs) {
      if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) seeds.push_back(r.seed);
    }
    const double budget = spec.runs.front().time_budget_s;
    spec.runs.clear();
    for (auto s : seeds) {
      bench::RunSpec r;
      r.tau_mode = g.adaptive ? search::TauMode::adaptive : search::TauMode::fixed;
      r.tau = g.tau.value_or(1.0);
      r.time_budget_s = budget;
      r.seed = s;
      spec.runs.push_back(r);
    }
  }
  for (auto& r : spec.runs) {
    if (g.seed) r.seed = *g.seed;
    if (g.time_budget_s) r.time_budget_s = *g.time_budget_s;
    if (g.depth_budget) r.depth_budget = *g.depth_budget;
  }
  bench::validate(spec);
  const std::filesystem::path outdir = g.out.empty() ? std::filesystem::path("results") / spec.name : std::filesystem::path(g.out);
  bench::ExperimentOptions opts;
  opts.run_index = run_index;
  opts.quiet = !g.verbose;
  const auto res = bench::run_experiment(spec, outdir, opts);
  std::cout << bench::summary_csv(res.rows);
  std::cerr << "wrote " << outdir.string() << "\n";
  return res.all_failed ? kInfra : 0;
}

// ---- synth ----

struct SynthArgs {
  std::string cls = "interval";
  std::size_t dim = 1;
  std::string spec;
  std::string sketch_file;
  std::vector<std::string> constants;
  std::string post;
  std::string dist_json;
  std::string denominator = "depth";
};

int cmd_synth(const Globals& g, const SynthArgs& a) {
  bench::BenchmarkSpec s;
  s.name = "synth";
  if (a.cls == "interval") {
    s.class_spec = {{"kind", "interval"}};
    s.distribution = InputDistribution::uniform_box({0.0}, {1.0});
    if (a.spec.empty()) throw ConfigError("--spec is required for the interval class (the bound a)");
    const auto v = parse_list(a.spec);
    if (v.size() != 1) throw ConfigError("interval --spec takes one number");
    s.spec_program = {{"kind", "interval"}, {"a", v[0]}};
  } else if (a.cls == "hyperrectangle") {
    s.class_spec = {{"kind", "hyperrectangle"}, {"dim", a.dim}};
    s.distribution = InputDistribution::uniform_box(std::vector<double>(a.dim, -1.0), std::vector<double>(a.dim, 1.0));
    const auto v = parse_list(a.spec);
    if (v.size() != 2 * a.dim) throw ConfigError("hyperrectangle --spec takes lo1,hi1,...,lod,hid");
    std::vector<double> lo, hi;
    for (std::size_t i = 0; i < a.dim; ++i) {
      lo.push_back(v[2 * i]);
      hi.push_back(v[2 * i + 1]);
    }
    s.spec_program = {{"kind", "hyperrectangle"}, {"lo", lo}, {"hi", hi}};
  } else if (a.cls == "sketch") {
    if (a.sketch_file.empty()) throw ConfigError("--sketch is required for the sketch class");
    json consts = json::object();
    for (const auto& [k, v] : parse_constants(a.constants)) consts[k] = v;
    const auto path = std::filesystem::absolute(a.sketch_file);
    s.class_spec = {{"kind", "sketch"}, {"file", path.string()}, {"constants", consts}};
    const auto v = a.spec.empty() ? std::vector<double>{0.0} : parse_list(a.spec);
    if (v.size() != 1) throw ConfigError("sketch --spec takes the constant output bit");
    s.spec_program = {{"kind", "constant"}, {"value", static_cast<int>(v[0])}};
    if (a.dist_json.empty()) throw ConfigError("--dist is required for the sketch class");
  } else {
    throw ConfigError("--class must be interval, hyperrectangle or sketch");
  }
  if (!a.dist_json.empty()) {
    try {
      s.distribution = InputDistribution::from_json(json::parse(a.dist_json));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("--dist: ") + e.what());
    }
  }
  s.postcondition = a.post;
  if (s.postcondition.empty() && a.cls != "sketch") throw ConfigError("--post is required");
  if (g.verify_samples) s.verify_samples = *g.verify_samples;
  s.solver_path = g.solver;

  auto built = bench::build_problem(s, bench::verifier_seed_for(g.seed.value_or(1)));
  search::SearchConfig cfg;
  cfg.tau_mode = g.adaptive ? search::TauMode::adaptive : search::TauMode::fixed;
  cfg.tau = g.tau.value_or(1.0);
  if (a.denominator == "length") {
    cfg.denominator = search::ThresholdDenominator::length;
  } else if (a.denominator != "depth") {
    throw ConfigError("--denominator must be depth or length");
  }
  if (g.time_budget_s) cfg.time_budget_s = *g.time_budget_s;
  if (g.depth_budget) cfg.depth_budget = *g.depth_budget;
  if (!g.time_budget_s && !g.depth_budget) cfg.time_budget_s = 60.0;
  cfg.seed = g.seed.value_or(1);
  cfg.retry_unknown = a.cls == "sketch";
  const auto report = search::run(built.problem, cfg);
  emit(g, search::to_json(report).dump(2) + "\n");
  return 0;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string cls = "interval";
  std::size_t dim = 1;
  std::size_t m_max = 30;
  double k = 0.1;
  double tail_tau = 0.2;
  bool force_enumeration = false;
};

int cmd_analyze(const Globals& g, const AnalyzeArgs& a) {
  std::shared_ptr<const ProgramFamily> family;
  InputDistribution dist = InputDistribution::uniform_box({0.0}, {1.0});
  std::optional<Program> spec;
  unsigned vc = 1;
  if (a.cls == "interval") {
    family = interval_family();
    spec = make_interval(0.5);
  } else if (a.cls == "hyperrectangle") {
    if (a.dim == 0) throw ConfigError("--dim must be >= 1");
    family = box_family(a.dim);
    dist = InputDistribution::uniform_box(std::vector<double>(a.dim, -1.0), std::vector<double>(a.dim, 1.0));
    spec = make_box(std::vector<double>(a.dim, -0.5), std::vector<double>(a.dim, 0.5));
    vc = static_cast<unsigned>(2 * a.dim);
  } else {
    throw ConfigError("--class must be interval or hyperrectangle");
  }
  if (a.m_max == 0) throw ConfigError("--m-max must be >= 1");
  if (a.force_enumeration && a.m_max > analysis::kMaxEnumerated + 1) {
    throw ConfigError("--force-enumeration supports --m-max up to " + std::to_string(analysis::kMaxEnumerated + 1));
  }

  // Trie search with threshold 1 up to depth m_max; the verifier only has to
  // exist, so it uses a trivially true postcondition.
  auto synth = std::make_shared<BoxSynthesizer>(family);
  VerifierConfig vc_cfg;
  vc_cfg.samples = g.verify_samples.value_or(1000);
  vc_cfg.seed = bench::verifier_seed_for(g.seed.value_or(1));
  auto post = Postcondition::parse("Pr[ret == 1] >= 0", family->input_names(), 0);
  auto verifier = std::make_shared<Verifier>(dist, post, *spec, vc_cfg);
  search::SearchConfig cfg;
  cfg.seed = g.seed.value_or(1);
  cfg.depth_budget = a.m_max;
  search::SearchEngine engine(search::Problem{*spec, dist, synth, verifier}, cfg);
  const auto report = engine.run();
  if (report.depth < a.m_max) throw InfrastructureError("search stopped early: " + report.stop_reason);

  std::ostringstream os;
  os << "m,measured_queries,lemma1_prediction,sauer_envelope,tail_exact,tail_hoeffding,tail_kl\n";
  std::size_t measured = 0;
  std::size_t predicted = 0;
  double envelope = 0.0;
  for (std::size_t m = 1; m <= a.m_max; ++m) {
    measured += m < report.queries_per_depth.size() ? report.queries_per_depth[m] : 0;
    // Query at depth m = |Π(x_1..x_{m-1})|.
    predicted += a.force_enumeration
                     ? analysis::count_dichotomies_enumerated(*synth, engine.samples(), m - 1)
                     : analysis::count_dichotomies(*synth, engine.samples(), m - 1);
    const std::size_t prev = m - 1;
    envelope += prev < vc ? std::pow(2.0, static_cast<double>(prev)) : analysis::sauer_bound(vc, prev);
    analysis::TailParams tp{m, a.k, a.tail_tau};
    const double exact = analysis::tail_exact(tp);
    const auto bounds = analysis::tail_bounds(tp);
    os << m << ',' << measured << ',' << predicted << ',' << fmt(envelope) << ',' << fmt(exact) << ','
       << fmt(bounds.hoeffding) << ',' << fmt(bounds.kl) << '\n';
  }
  emit(g, os.str());
  return 0;
}

// ---- sketch check ----

struct CheckArgs {
  std::string file;
  std::vector<std::string> constants;
  std::string holes;
  std::string input;
};

int cmd_sketch_check(const Globals& g, const CheckArgs& a) {
  sketch::ParseOptions po;
  po.constants = parse_constants(a.constants);
  const auto ast = sketch::parse(read_text(a.file), po);
  const auto flat = sketch::unroll(ast);
  json j;
  j["name"] = ast.name;
  json inputs = json::array();
  for (const auto& p : ast.inputs) inputs.push_back(p.name);
  j["inputs"] = inputs;
  json holes = json::array();
  for (const auto& h : ast.holes) holes.push_back({{"id", h.id}, {"lo", h.lo}, {"hi", h.hi}});
  j["holes"] = holes;
  j["asserts"] = sketch::count_asserts(ast);
  j["asserts_unrolled"] = sketch::count_asserts(flat);
  j["loop_free"] = sketch::is_loop_free(ast);
  j["unrolled"] = sketch::print(flat);
  if (!a.holes.empty() || !a.input.empty()) {
    if (a.holes.empty() || a.input.empty()) throw ConfigError("--holes and --input must be given together");
    const auto hv = parse_list(a.holes);
    const auto x = parse_list(a.input);
    if (hv.size() != ast.holes.size()) throw ConfigError("--holes needs one value per hole");
    if (x.size() != ast.inputs.size()) throw ConfigError("--input needs one value per input");
    const auto obs = sketch::evaluate_sketch(flat, sketch::hole_assignment(flat, hv), x);
    json events = json::array();
    for (char e : obs.events) events.push_back(e != 0);
    j["evaluation"] = {{"output", obs.output}, {"events", events}};
  }
  emit(g, j.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distribution-guided inductive synthesis with threshold pruning"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Sample-sequence seed");
  app.add_option("--time-budget-s", g.time_budget_s, "Wall-clock budget per run")->check(CLI::NonNegativeNumber);
  app.add_option("--depth-budget", g.depth_budget, "Maximum search depth");
  app.add_option("--tau", g.tau, "Pruning threshold (fixed mode) or starting threshold")->check(CLI::Range(0.0, 1.0));
  app.add_flag("--adaptive", g.adaptive, "Refine the threshold to the best error found");
  app.add_option("--solver", g.solver, "SMT-LIB2 solver executable for sketch classes");
  app.add_option("--verify-samples", g.verify_samples, "Points per verifier estimate")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output file (synth, analyze, sketch check) or directory (run)");
  app.add_flag("-v,--verbose", g.verbose, "Progress on stderr");

  auto* run = app.add_subcommand("run", "Run a benchmark spec file");
  std::string run_file;
  std::optional<std::size_t> run_index;
  run->add_option("spec", run_file, "Benchmark JSON")->required();
  run->add_option("--run-index", run_index, "Run only this entry of the spec's runs");

  auto* synth = app.add_subcommand("synth", "Search for one problem given on the command line");
  SynthArgs sa;
  synth->add_option("--class", sa.cls, "interval | hyperrectangle | sketch");
  synth->add_option("--dim", sa.dim, "Dimension of the hyperrectangle class");
  synth->add_option("--spec", sa.spec, "interval: a; hyperrectangle: lo1,hi1,...; sketch: constant output");
  synth->add_option("--sketch", sa.sketch_file, "Sketch source file");
  synth->add_option("--const", sa.constants, "Sketch constant NAME=VALUE");
  synth->add_option("--post", sa.post, "Postcondition; sketches default to their asserts");
  synth->add_option("--dist", sa.dist_json, "Input distribution as JSON");
  synth->add_option("--denominator", sa.denominator, "depth | length");

  auto* analyze = app.add_subcommand("analyze", "Query counts and tail bounds as CSV");
  AnalyzeArgs aa;
  analyze->add_option("--class", aa.cls, "interval | hyperrectangle");
  analyze->add_option("--dim", aa.dim, "Dimension of the hyperrectangle class");
  analyze->add_option("--m-max", aa.m_max, "Largest sample count");
  analyze->add_option("--k", aa.k, "Specification error used for the tail columns");
  analyze->add_option("--tail-tau", aa.tail_tau, "Threshold used for the tail columns");
  analyze->add_flag("--force-enumeration", aa.force_enumeration, "Count dichotomies by 2^m enumeration");

  auto* sk = app.add_subcommand("sketch", "Sketch utilities");
  sk->require_subcommand(1);
  sk->fallthrough();
  auto* check = sk->add_subcommand("check", "Parse, unroll and optionally evaluate a sketch");
  CheckArgs ca;
  check->add_option("file", ca.file, "Sketch source")->required();
  check->add_option("--const", ca.constants, "Constant NAME=VALUE");
  check->add_option("--holes", ca.holes, "Hole values v1,v2,...");
  check->add_option("--input", ca.input, "Input values x1,x2,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (run->parsed()) return cmd_run(g, run_file, run_index);
    if (synth->parsed()) return cmd_synth(g, sa);
    if (analyze->parsed()) return cmd_analyze(g, aa);
    if (check->parsed()) return cmd_sketch_check(g, ca);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InfrastructureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInfra;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInfra;
  }
  return kUsage;
}
