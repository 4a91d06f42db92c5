#include "digits/bench/benchmark.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "digits/core/error.hpp"
#include "digits/core/rng.hpp"
#include "digits/sketch/parser.hpp"
#include "digits/sketch/unroll.hpp"

namespace digits::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InfrastructureError("cannot write " + p.string());
  out << text;
}

search::TauMode parse_mode(const std::string& s) {
  if (s == "adaptive") return search::TauMode::adaptive;
  if (s == "fixed") return search::TauMode::fixed;
  throw ConfigError("tau_mode must be \"fixed\" or \"adaptive\", got \"" + s + "\"");
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

void collect_thresholds(const sketch::Block& block, std::vector<double>& out) {
  for (const auto& s : block) {
    if (s->kind == sketch::Stmt::Kind::assertion) out.push_back(s->theta);
    collect_thresholds(s->then_body, out);
    collect_thresholds(s->else_body, out);
  }
}

std::string synthetic_post(double b) {
  return "Pr[ret == 1 && x1 <= 0] / Pr[x1 <= 0] >= Pr[ret == 1 && x1 >= 0] / Pr[x1 >= 0] && Pr[ret == 1] >= " +
         fmt(b);
}

std::string b_tag(double b) {
  // 0.05 -> 005, 0.1 -> 01, 0.2 -> 02
  std::string s = fmt(b);
  std::string out;
  for (char c : s) {
    if (c != '.') out += c;
  }
  return out;
}

std::string run_label(const RunSpec& r) {
  std::string mode = r.tau_mode == search::TauMode::adaptive ? "adaptive" : "tau" + fmt(r.tau);
  return mode + "_seed" + std::to_string(r.seed);
}

}  // namespace

BenchmarkSpec BenchmarkSpec::from_json(const json& j, const fs::path& base_dir) {
  try {
    BenchmarkSpec s;
    s.base_dir = base_dir;
    s.name = j.at("name").get<std::string>();
    s.kind = get_or<std::string>(j, "kind", "custom");
    if (j.contains("params")) s.params = j.at("params");
    const auto& prob = j.at("problem");
    s.class_spec = prob.at("class");
    s.spec_program = prob.at("spec");
    s.distribution = InputDistribution::from_json(prob.at("distribution"));
    const auto& post = prob.at("postcondition");
    if (post.is_string()) {
      s.postcondition = post.get<std::string>();
    } else if (!(post.is_object() && get_or<std::string>(post, "kind", "") == "sketch_asserts")) {
      throw ConfigError("postcondition must be a string or {\"kind\": \"sketch_asserts\"}");
    }
    if (j.contains("vc_dimension") && !j.at("vc_dimension").is_null()) {
      s.vc_dimension = j.at("vc_dimension").get<unsigned>();
    }
    if (j.contains("optimum_error") && !j.at("optimum_error").is_null()) {
      s.optimum_error = j.at("optimum_error").get<double>();
    }
    const json ver = j.value("verifier", json::object());
    s.verify_samples = get_or<std::size_t>(ver, "samples", s.verify_samples);
    s.confidence = get_or<double>(ver, "confidence", s.confidence);
    const json srch = j.value("search", json::object());
    const auto denom = get_or<std::string>(srch, "denominator", "depth");
    if (denom == "depth") {
      s.denominator = search::ThresholdDenominator::depth;
    } else if (denom == "length") {
      s.denominator = search::ThresholdDenominator::length;
    } else {
      throw ConfigError("search.denominator must be \"depth\" or \"length\"");
    }
    s.node_budget = get_or<std::size_t>(srch, "node_budget", s.node_budget);
    s.retry_unknown = get_or<bool>(srch, "retry_unknown", s.retry_unknown);
    const json solver = j.value("solver", json::object());
    s.solver_path = get_or<std::string>(solver, "path", "");
    s.solver_timeout_ms = get_or<int>(solver, "timeout_ms", s.solver_timeout_ms);
    for (const auto& r : j.at("runs")) {
      RunSpec run;
      run.tau_mode = parse_mode(get_or<std::string>(r, "tau_mode", "adaptive"));
      run.tau = get_or<double>(r, "tau", 1.0);
      run.time_budget_s = get_or<double>(r, "time_budget_s", 120.0);
      if (r.contains("depth_budget") && !r.at("depth_budget").is_null()) {
        run.depth_budget = r.at("depth_budget").get<std::size_t>();
      }
      run.seed = get_or<std::uint64_t>(r, "seed", 1);
      s.runs.push_back(run);
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed benchmark spec: ") + e.what());
  }
}

BenchmarkSpec BenchmarkSpec::load(const fs::path& file) {
  if (!fs::exists(file)) throw ConfigError("benchmark file not found: " + file.string());
  json j;
  try {
    j = json::parse(read_file(file));
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
  auto spec = from_json(j, file.parent_path().empty() ? fs::path(".") : file.parent_path());
  validate(spec);
  return spec;
}

json BenchmarkSpec::to_json() const {
  json runs_j = json::array();
  for (const auto& r : runs) {
    json rj = {{"tau_mode", search::to_string(r.tau_mode)},
               {"tau", r.tau},
               {"time_budget_s", r.time_budget_s},
               {"seed", r.seed}};
    rj["depth_budget"] = r.depth_budget ? json(*r.depth_budget) : json(nullptr);
    runs_j.push_back(rj);
  }
  json j;
  j["name"] = name;
  j["kind"] = kind;
  j["params"] = params;
  j["problem"] = {{"class", class_spec},
                  {"spec", spec_program},
                  {"distribution", distribution.to_json()},
                  {"postcondition", postcondition.empty() ? json{{"kind", "sketch_asserts"}} : json(postcondition)}};
  if (vc_dimension) j["vc_dimension"] = *vc_dimension;
  if (optimum_error) j["optimum_error"] = *optimum_error;
  j["verifier"] = {{"samples", verify_samples}, {"confidence", confidence}};
  j["search"] = {{"denominator", search::to_string(denominator)},
                 {"node_budget", node_budget},
                 {"retry_unknown", retry_unknown}};
  j["solver"] = {{"path", solver_path}, {"timeout_ms", solver_timeout_ms}};
  j["runs"] = runs_j;
  return j;
}

bool BenchmarkSpec::uses_sketch() const { return get_or<std::string>(class_spec, "kind", "") == "sketch"; }

void validate(const BenchmarkSpec& spec) {
  if (spec.name.empty()) throw ConfigError("benchmark name is empty");
  if (spec.runs.empty()) throw ConfigError(spec.name + ": no runs configured");
  if (spec.verify_samples == 0) throw ConfigError(spec.name + ": verifier.samples must be >= 1");
  if (!(spec.confidence > 0.0 && spec.confidence < 1.0)) throw ConfigError(spec.name + ": confidence must be in (0,1)");
  if (spec.uses_sketch()) {
    const auto file = get_or<std::string>(spec.class_spec, "file", "");
    if (file.empty()) throw ConfigError(spec.name + ": sketch class needs a file");
    const fs::path p = fs::path(file).is_absolute() ? fs::path(file) : spec.base_dir / file;
    if (!fs::exists(p)) throw ConfigError(spec.name + ": sketch file not found: " + p.string());
  } else if (spec.postcondition.empty()) {
    throw ConfigError(spec.name + ": sketch_asserts postcondition needs a sketch class");
  }
  const double b = get_or<double>(spec.params, "b", 0.0);
  for (const auto& r : spec.runs) {
    if (!(r.tau >= 0.0 && r.tau <= 1.0)) throw ConfigError(spec.name + ": tau must be in [0,1]");
    if (!(r.time_budget_s >= 0.0)) throw ConfigError(spec.name + ": time_budget_s must be >= 0");
    if (spec.kind == "synthetic" && r.tau_mode == search::TauMode::fixed && r.tau < b) {
      throw ConfigError(spec.name + ": fixed tau " + fmt(r.tau) + " is below b = " + fmt(b));
    }
  }
  if (spec.kind == "thermostat") {
    static const std::set<int> kUnroll = {5, 10, 20, 40}, kN = {2, 4, 8};
    const int u = get_or<int>(spec.params, "Unrollings", -1), n = get_or<int>(spec.params, "N", -1);
    if (!kUnroll.contains(u) || !kN.contains(n)) {
      throw ConfigError(spec.name + ": Unrollings must be in {5,10,20,40} and N in {2,4,8}");
    }
  }
}

const std::vector<double>& tau_grid() {
  static const std::vector<double> grid = {0.07, 0.15, 0.3, 0.5, 1.0};
  return grid;
}

BenchmarkSpec gen_synthetic(unsigned d, double b) {
  if (d < 1 || d > 3) throw ConfigError("synthetic benchmark dimension must be 1, 2 or 3");
  if (!(b > 0.0 && b < 0.5)) throw ConfigError("synthetic benchmark mass b must be in (0, 0.5)");
  BenchmarkSpec s;
  s.name = "synthetic_d" + std::to_string(d) + "_b" + b_tag(b);
  s.kind = "synthetic";
  s.params = {{"d", d}, {"b", b}};
  s.class_spec = {{"kind", "hyperrectangle"}, {"dim", d}};
  std::vector<double> lo(d, -1.0), hi(d, 1.0);
  s.distribution = InputDistribution::uniform_box(lo, hi);
  std::vector<double> slo(d, -1.0), shi(d, 1.0);
  slo[0] = 0.0;
  shi[0] = 2.0 * b;
  s.spec_program = {{"kind", "hyperrectangle"}, {"lo", slo}, {"hi", shi}};
  s.postcondition = synthetic_post(b);
  s.vc_dimension = 2 * d;
  s.optimum_error = b;
  for (double tau : tau_grid()) {
    if (tau < b) continue;
    s.runs.push_back({search::TauMode::fixed, tau, 120.0, std::nullopt, 1});
  }
  s.runs.push_back({search::TauMode::adaptive, 1.0, 120.0, std::nullopt, 1});
  return s;
}

BenchmarkSpec gen_thermostat(unsigned unrollings, unsigned n_threshold, const std::string& sketch_file) {
  static const std::set<unsigned> kUnroll = {5, 10, 20, 40}, kN = {2, 4, 8};
  if (!kUnroll.contains(unrollings) || !kN.contains(n_threshold)) {
    throw ConfigError("thermostat: Unrollings must be in {5,10,20,40} and N in {2,4,8}");
  }
  BenchmarkSpec s;
  s.name = "thermostat_u" + std::to_string(unrollings) + "_n" + std::to_string(n_threshold);
  s.kind = "thermostat";
  s.params = {{"Unrollings", unrollings}, {"N", n_threshold}};
  s.class_spec = {{"kind", "sketch"},
                  {"file", sketch_file},
                  {"constants", {{"Unrollings", unrollings}, {"N", n_threshold}}}};
  s.spec_program = {{"kind", "constant"}, {"value", 0}};
  std::vector<GaussianComponent> modes;
  for (double mean : {30.0, 35.0, 50.0}) modes.push_back({1.0 / 3.0, {mean}, {9.0}});
  s.distribution = InputDistribution::product(
      {InputDistribution::gaussian_mixture(modes), InputDistribution::gaussian({75.0}, {1.0})});
  s.retry_unknown = true;
  s.runs.push_back({search::TauMode::adaptive, 1.0, 600.0, std::nullopt, 1});
  return s;
}

BenchmarkSpec gen_fairness_standin(const std::string& size) {
  unsigned d = 0;
  if (size == "s") d = 2;
  if (size == "m") d = 3;
  if (size == "l") d = 4;
  if (d == 0) throw ConfigError("fairness stand-in size must be s, m or l");
  BenchmarkSpec s;
  s.name = "fairness_standin_" + size;
  s.kind = "fairness";
  s.params = {{"d", d}, {"size", size}};
  s.class_spec = {{"kind", "hyperrectangle"}, {"dim", d}};
  std::vector<double> lo(d, -1.0), hi(d, 1.0);
  s.distribution = InputDistribution::uniform_box(lo, hi);
  // Acceptance rate 0.3/0.7 of the x1 >= 0 rate on the x1 <= 0 side.
  std::vector<double> slo(d, -0.6), shi(d, 0.6);
  slo[0] = -0.3;
  shi[0] = 0.7;
  s.spec_program = {{"kind", "hyperrectangle"}, {"lo", slo}, {"hi", shi}};
  s.postcondition = "Pr[ret == 1 && x1 <= 0] / Pr[x1 <= 0] >= 0.8 * Pr[ret == 1 && x1 >= 0] / Pr[x1 >= 0]";
  s.vc_dimension = 2 * d;
  for (std::uint64_t seed : {1, 2, 3}) {
    s.runs.push_back({search::TauMode::fixed, 1.0, 600.0, std::nullopt, seed});
    s.runs.push_back({search::TauMode::adaptive, 1.0, 600.0, std::nullopt, seed});
  }
  return s;
}

std::uint64_t verifier_seed_for(std::uint64_t run_seed) { return derive_seed(run_seed, 0x76657269666965ULL); }

BuiltProblem build_problem(const BenchmarkSpec& spec, std::uint64_t verifier_seed) {
  std::shared_ptr<const SketchSynthesizer> sketch_synth;
  std::shared_ptr<const ProgramFamily> family;
  std::shared_ptr<const sketch::SketchFamily> sketch_family;
  std::shared_ptr<const Synthesizer> synth;
  const auto cls = get_or<std::string>(spec.class_spec, "kind", "");
  if (cls == "interval") {
    family = interval_family();
  } else if (cls == "hyperrectangle") {
    family = box_family(get_or<std::size_t>(spec.class_spec, "dim", spec.distribution.dimension()));
  } else if (cls == "sketch") {
    const auto file = get_or<std::string>(spec.class_spec, "file", "");
    const fs::path p = fs::path(file).is_absolute() ? fs::path(file) : spec.base_dir / file;
    sketch::ParseOptions po;
    if (spec.class_spec.contains("constants")) {
      for (const auto& [k, v] : spec.class_spec.at("constants").items()) po.constants[k] = v.get<double>();
    }
    sketch_family = std::make_shared<sketch::SketchFamily>(sketch::parse(read_file(p), po));
    family = sketch_family;
  } else {
    throw ConfigError(spec.name + ": unknown class kind \"" + cls + "\"");
  }
  if (family->input_dim() != spec.distribution.dimension()) {
    throw ConfigError(spec.name + ": class dimension does not match the distribution");
  }

  const auto sk = get_or<std::string>(spec.spec_program, "kind", "");
  std::optional<Program> spec_prog;
  if (sk == "interval") {
    spec_prog = make_interval(spec.spec_program.at("a").get<double>());
  } else if (sk == "hyperrectangle") {
    const auto lo = spec.spec_program.at("lo").get<std::vector<double>>();
    const auto hi = spec.spec_program.at("hi").get<std::vector<double>>();
    if (lo.size() != family->input_dim() || hi.size() != lo.size()) {
      throw ConfigError(spec.name + ": spec box dimension mismatch");
    }
    spec_prog = make_box(lo, hi);
  } else if (sk == "constant") {
    spec_prog = make_constant(family->input_dim(), get_or<int>(spec.spec_program, "value", 0), family->input_names());
  } else {
    throw ConfigError(spec.name + ": unknown spec kind \"" + sk + "\"");
  }

  Postcondition post = [&] {
    if (!spec.postcondition.empty()) {
      return Postcondition::parse(spec.postcondition, family->input_names(), family->event_count());
    }
    if (!sketch_family) throw ConfigError(spec.name + ": sketch_asserts postcondition needs a sketch class");
    std::vector<double> thetas;
    collect_thresholds(sketch_family->ast().body, thetas);
    return Postcondition::events_above(thetas, family->input_names());
  }();

  if (sketch_family) {
    const auto path = sketch::find_solver(spec.solver_path);
    if (!path) {
      throw InfrastructureError(spec.solver_path.empty()
                                    ? "no SMT-LIB2 solver found (set DIGITS_SOLVER or pass --solver)"
                                    : "solver not found: " + spec.solver_path);
    }
    SketchSynthConfig sc;
    sc.solver.path = *path;
    sc.solver.timeout_ms = spec.solver_timeout_ms;
    auto ss = std::make_shared<SketchSynthesizer>(sketch_family, sc);
    sketch_synth = ss;
    synth = ss;
  } else {
    synth = std::make_shared<BoxSynthesizer>(family);
  }

  VerifierConfig vc;
  vc.samples = spec.verify_samples;
  vc.confidence = spec.confidence;
  vc.seed = verifier_seed;
  auto verifier = std::make_shared<Verifier>(spec.distribution, post, *spec_prog, vc);
  return BuiltProblem{search::Problem{*spec_prog, spec.distribution, synth, verifier}, sketch_synth};
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "benchmark,tau_mode,seed,final_depth,best_error,synth_queries,wall_s,tau,accepted,half_width,sample_hash,"
        "shared_prefix_hash,status,note\n";
  for (const auto& r : rows) {
    std::string note = r.note;
    for (char& c : note) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    os << r.benchmark << ',' << r.tau_mode << ',' << r.seed << ',' << r.final_depth << ','
       << (r.best_error ? fmt(*r.best_error) : "") << ',' << r.synth_queries << ',' << fmt(r.wall_s) << ','
       << fmt(r.tau) << ',' << (r.accepted ? 1 : 0) << ',' << (r.half_width ? fmt(*r.half_width) : "") << ','
       << r.sample_hash << ',' << r.shared_prefix_hash << ',' << r.status << ',' << note << '\n';
  }
  return os.str();
}

std::string comparison_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "benchmark,seed,fixed_depth,adaptive_depth,depth_ratio,fixed_error,adaptive_error\n";
  std::map<std::uint64_t, std::pair<const SummaryRow*, const SummaryRow*>> by_seed;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    if (r.tau_mode == "adaptive") by_seed[r.seed].second = &r;
    if (r.tau_mode == "fixed" && r.tau == 1.0) by_seed[r.seed].first = &r;
  }
  for (const auto& [seed, pair] : by_seed) {
    const auto* f = pair.first;
    const auto* a = pair.second;
    if (f == nullptr || a == nullptr) continue;
    const std::string ratio = f->final_depth > 0
                                  ? fmt(static_cast<double>(a->final_depth) / static_cast<double>(f->final_depth))
                                  : "";
    os << a->benchmark << ',' << seed << ',' << f->final_depth << ',' << a->final_depth << ',' << ratio << ','
       << (f->best_error ? fmt(*f->best_error) : "") << ',' << (a->best_error ? fmt(*a->best_error) : "") << '\n';
  }
  return os.str();
}

ExperimentResult run_experiment(const BenchmarkSpec& spec, const fs::path& outdir, const ExperimentOptions& opts) {
  validate(spec);
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw InfrastructureError("cannot create " + outdir.string() + ": " + ec.message());

  ExperimentResult result;
  // Flattened sample points of each finished run, for the shared-prefix audit.
  std::vector<SampleSequence> sequences;
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < spec.runs.size(); ++i) {
    if (!opts.run_index || *opts.run_index == i) indices.push_back(i);
  }
  if (indices.empty()) throw ConfigError("run index out of range");

  for (std::size_t i : indices) {
    const RunSpec& run = spec.runs[i];
    SummaryRow row;
    row.benchmark = spec.name;
    row.tau_mode = search::to_string(run.tau_mode);
    row.tau = run.tau;
    row.seed = run.seed;
    row.run_dir = run_label(run);
    SampleSequence seq(spec.distribution.dimension(), run.seed);
    std::optional<BuiltProblem> built;
    try {
      built = build_problem(spec, verifier_seed_for(run.seed));
    } catch (const InfrastructureError& e) {
      row.status = "skipped";
      row.note = e.what();
      if (!opts.quiet) std::cerr << spec.name << ": " << row.run_dir << " skipped: " << e.what() << std::endl;
      sequences.push_back(std::move(seq));
      result.rows.push_back(std::move(row));
      continue;
    }
    try {
      search::SearchConfig cfg;
      cfg.tau_mode = run.tau_mode;
      cfg.tau = run.tau;
      cfg.denominator = spec.denominator;
      cfg.time_budget_s = run.time_budget_s;
      if (run.depth_budget) cfg.depth_budget = *run.depth_budget;
      cfg.node_budget = spec.node_budget;
      cfg.seed = run.seed;
      cfg.retry_unknown = spec.retry_unknown;
      if (!opts.quiet) std::cerr << spec.name << ": " << row.run_dir << " ..." << std::endl;
      search::SearchEngine engine(built->problem, cfg);
      const auto report = engine.run();
      seq = engine.samples();

      const fs::path dir = outdir / row.run_dir;
      fs::create_directories(dir);
      json rj = search::to_json(report);
      rj["benchmark"] = spec.name;
      if (built->sketch_synth) {
        const auto& st = built->sketch_synth->stats();
        rj["solver"] = {{"path", built->sketch_synth->config().solver.path},
                        {"queries", st.queries},
                        {"sat", st.sat},
                        {"unsat", st.unsat},
                        {"unknown", st.unknown},
                        {"timeouts", st.timeouts},
                        {"rejected_models", st.rejected_models},
                        {"solver_seconds", st.solver_seconds}};
      }
      write_file(dir / "report.json", rj.dump(2) + "\n");
      write_file(dir / "depth.csv", search::series_csv(report.depth_series));
      write_file(dir / "error.csv", search::series_csv(report.error_series));
      write_file(dir / "tau.csv", search::series_csv(report.tau_trace));

      row.final_depth = report.depth;
      row.synth_queries = report.counters.synth_queries;
      row.wall_s = report.wall_s;
      row.sample_hash = report.sample_hash;
      if (report.best) {
        row.best_error = report.best->error.value;
        row.half_width = report.best->error.half_width;
        row.accepted = report.best->verdict.accepted;
      }
      row.note = report.stop_reason;
      if (!opts.quiet) {
        std::cerr << "  depth " << row.final_depth << ", queries " << row.synth_queries << ", best "
                  << (row.best_error ? fmt(*row.best_error) : "none") << std::endl;
      }
    } catch (const InfrastructureError& e) {
      row.status = "failed";
      row.note = e.what();
      if (!opts.quiet) std::cerr << "  " << row.status << ": " << e.what() << std::endl;
    }
    sequences.push_back(std::move(seq));
    result.rows.push_back(std::move(row));
  }

  // Runs sharing a seed must have drawn the same points; hash the common prefix.
  std::map<std::uint64_t, std::size_t> common;
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    if (result.rows[k].status != "ok") continue;
    const auto seed = result.rows[k].seed;
    const auto n = sequences[k].size();
    auto it = common.find(seed);
    if (it == common.end()) {
      common[seed] = n;
    } else {
      it->second = std::min(it->second, n);
    }
  }
  for (std::size_t k = 0; k < result.rows.size(); ++k) {
    if (result.rows[k].status != "ok") continue;
    result.rows[k].shared_prefix_hash = sequences[k].hash(common[result.rows[k].seed]);
  }

  result.all_failed = true;
  for (const auto& r : result.rows) {
    if (r.status == "ok") result.all_failed = false;
  }
  write_file(outdir / "summary.csv", summary_csv(result.rows));
  write_file(outdir / "comparison.csv", comparison_csv(result.rows));
  return result;
}

}  // namespace digits::bench
