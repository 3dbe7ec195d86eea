#include "qrc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "qrc/algorithms.hpp"
#include "qrc/csv.hpp"
#include "qrc/evaluation.hpp"
#include "qrc/ingestion.hpp"
#include "qrc/manifest.hpp"
#include "qrc/reports.hpp"
#include "qrc/simulator.hpp"

namespace qrc::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- inputs

struct InputOptions {
  std::string events;
  std::string papers;
  std::string blocklist;
  std::vector<std::string> exclude_users;
  bool keep_all_users = false;
  long min_day = 0;
  bool has_min_day = false;
  WeightScheme weights;
};

void add_input_options(CLI::App* sub, InputOptions& o, bool events_required) {
  auto* ev = sub->add_option("--events", o.events, "Interaction events CSV")->check(CLI::ExistingFile);
  if (events_required) ev->required();
  sub->add_option("--papers", o.papers, "Paper metadata CSV")->check(CLI::ExistingFile);
  sub->add_option("--blocklist", o.blocklist, "File of user ids to drop, one per line")
      ->check(CLI::ExistingFile);
  sub->add_flag("--keep-all-users", o.keep_all_users,
                "Keep users with no upload and a single action");
  sub->add_option("--min-day", o.min_day, "Drop papers submitted before this day");
  sub->add_option("--w-up", o.weights.upload, "Upload link weight")
      ->check(CLI::PositiveNumber);
  sub->add_option("--w-down", o.weights.download, "Download link weight")
      ->check(CLI::PositiveNumber);
  sub->add_option("--w-view", o.weights.view, "View link weight")->check(CLI::PositiveNumber);
}

struct LoadedData {
  std::vector<InteractionEvent> events;
  std::vector<PaperRecord> papers;
  bool has_papers = false;
  UserItemNetwork user_item;
  std::optional<AuthorPaperNetwork> author_paper;
};

std::unordered_set<std::string> read_blocklist(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.insert(line);
  }
  return out;
}

// Reads and cleans the inputs: min-day cutoff, blocked users, earliest event
// per (user, paper), then the low-activity filter.
LoadedData load_inputs(const InputOptions& o, RunManifest& manifest, bool build_network) {
  LoadedData d;
  if (!o.events.empty()) {
    d.events = read_events_file(o.events);
    manifest.add_input(o.events);
  }
  if (!o.papers.empty()) {
    d.papers = read_papers_file(o.papers);
    d.has_papers = true;
    manifest.add_input(o.papers);
  }
  if (o.has_min_day) {
    if (!d.has_papers) throw UsageError("--min-day needs --papers");
    apply_min_day(d.papers, d.events, o.min_day);
  }
  std::unordered_set<std::string> blocked(o.exclude_users.begin(), o.exclude_users.end());
  if (!o.blocklist.empty()) {
    manifest.add_input(o.blocklist);
    blocked.merge(read_blocklist(o.blocklist));
  }
  if (!blocked.empty()) d.events = remove_users(d.events, blocked);
  d.events = dedup_earliest(d.events);
  if (!o.keep_all_users) d.events = filter_low_activity(d.events);

  if (build_network) {
    if (d.has_papers) {
      auto nets = build_networks(d.events, d.papers, o.weights);
      d.user_item = std::move(nets.user_item);
      d.author_paper = std::move(nets.author_paper);
    } else {
      d.user_item = build_user_item_network(d.events, o.weights);
    }
  }
  return d;
}

// ------------------------------------------------------------ algorithms

struct AlgoOptions {
  std::string algo = "qr";
  QrcParams params;
  double omega = 0;
  bool weighted = false;
  ConvergenceConfig convergence;
};

void add_algo_options(CLI::App* sub, AlgoOptions& o) {
  const auto unit = CLI::Range(0.0, 1.0);
  sub->add_option("--algo", o.algo, "bihits, qr, er or qrc")
      ->check(CLI::IsMember({"bihits", "qr", "er", "qrc"}));
  sub->add_option("--tq", o.params.qr.theta_q, "theta_Q")->check(unit);
  sub->add_option("--tr", o.params.qr.theta_r, "theta_R")->check(unit);
  sub->add_option("--rq", o.params.qr.rho_q, "rho_Q")->check(unit);
  sub->add_option("--rr", o.params.qr.rho_r, "rho_R")->check(unit);
  sub->add_option("--phi-a", o.params.phi_a, "Author-degree exponent phi_A")->check(unit);
  sub->add_option("--phi-p", o.params.phi_p, "Paper-degree exponent phi_P")->check(unit);
  sub->add_option("--rho-a", o.params.rho_a, "Credit mean penalty rho_A")->check(unit);
  sub->add_option("--lambda", o.params.lambda, "Credit mixing weight")->check(unit);
  sub->add_option("--omega", o.omega, "EigenRumor author weight")->check(unit);
  sub->add_flag("--weighted", o.weighted, "biHITS on link weights instead of adjacency");
  sub->add_option("--tol", o.convergence.tolerance, "Convergence tolerance")
      ->check(CLI::PositiveNumber);
  sub->add_option("--max-iter", o.convergence.max_iterations, "Iteration cap")
      ->check(CLI::PositiveNumber);
}

bool needs_authors(const std::string& algo) { return algo == "er" || algo == "qrc"; }

void validate_algo(const AlgoOptions& o, bool has_papers) {
  if (needs_authors(o.algo) && !has_papers) throw UsageError(o.algo + " requires --papers");
  try {
    o.params.validate();
    o.convergence.validate();
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
}

ScoreSet run_algo(const AlgoOptions& o, const LoadedData& d) {
  if (o.algo == "bihits") return bihits(d.user_item, o.weighted, o.convergence);
  if (o.algo == "qr") return qr(d.user_item, o.params.qr, o.convergence);
  if (o.algo == "er") return eigenrumor(d.user_item, *d.author_paper, o.omega, o.convergence);
  return qrc(d.user_item, *d.author_paper, o.params, o.convergence);
}

ScoreTable score_table(const ScoreSet& s, const LoadedData& d) {
  const LabelIndex* authors = d.author_paper ? &d.author_paper->author_labels() : nullptr;
  return make_score_table(s, d.user_item.user_labels(), d.user_item.item_labels(), authors);
}

void report_convergence(std::ostream& err, const std::string& prefix, const ScoreSet& s) {
  err << prefix << "converged=" << (s.converged ? "true" : "false")
      << " iterations=" << s.iterations << " residual=" << csv::format_double(s.residual) << '\n';
  for (const auto& w : s.warnings) err << prefix << "warning: " << w << '\n';
}

// --------------------------------------------------------------- metrics

struct MetricRow {
  std::vector<std::string> header;
  std::vector<std::string> values;

  void add(std::string name, std::string value) {
    header.push_back(std::move(name));
    values.push_back(std::move(value));
  }
};

std::string format_estimate(const Estimate& e) {
  return e.value ? csv::format_double(*e.value) : "NA";
}

void append_correlations(MetricRow& row, const CorrelationReport& c) {
  row.add("c_Qf", format_estimate(c.quality_fitness));
  row.add("c_Ra", format_estimate(c.reputation_ability));
  row.add("c_Qt", format_estimate(c.quality_age));
  row.add("c_Rnu", format_estimate(c.reputation_activity));
}

void append_top_k(MetricRow& row, const TopKReport& t) {
  row.add("k", std::to_string(t.k));
  const std::pair<const char*, const MeanSe*> parts[] = {{"day", &t.submission_day},
                                                         {"downloads", &t.downloads},
                                                         {"citations", &t.citations},
                                                         {"impact", &t.impact_factor}};
  for (const auto& [name, m] : parts) {
    row.add(std::string(name) + "_mean", csv::format_double(m->mean));
    row.add(std::string(name) + "_se", csv::format_double(m->se));
  }
}

struct TruthOptions {
  std::string users;
  std::string items;

  bool given() const { return !users.empty() || !items.empty(); }
};

void add_truth_options(CLI::App* sub, TruthOptions& o) {
  sub->add_option("--users-truth", o.users, "Ground truth CSV user_id,ability,activity")
      ->check(CLI::ExistingFile);
  sub->add_option("--items-truth", o.items, "Ground truth CSV item_id,fitness,created_at")
      ->check(CLI::ExistingFile);
}

TruthTables load_truth(const TruthOptions& o, RunManifest& manifest) {
  TruthTables t;
  if (!o.users.empty()) {
    t.users = read_user_truth_file(o.users);
    manifest.add_input(o.users);
  }
  if (!o.items.empty()) {
    t.items = read_item_truth_file(o.items);
    manifest.add_input(o.items);
  }
  return t;
}

// Metrics shared by evaluate and sweep, so that a single-point sweep row
// equals the evaluate row of the same scores.
MetricRow score_metrics(const ScoreTable& table, const TruthTables* truth,
                        const MetadataById* metadata, std::size_t k) {
  MetricRow row;
  if (truth) append_correlations(row, correlate(table, *truth));
  if (metadata) append_top_k(row, top_k_from_table(table, *metadata, k));
  return row;
}

// ------------------------------------------------------------- manifests

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out += sep;
    out += parts[k];
  }
  return out;
}

void record_params(RunManifest& m, const CLI::App* sub) {
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    const std::string value = opt->count() ? join(opt->results(), ',') : opt->get_default_str();
    m.set("param." + name, value);
  }
}

void write_manifest(RunManifest& m, const CLI::App* sub, const std::vector<std::string>& outputs,
                    const std::string& path) {
  record_params(m, sub);
  for (const auto& o : outputs) m.add_output(o);
  m.write_file(path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

void write_table(std::ostream& out, const MetricRow& row) {
  csv::write_row(out, row.header);
  csv::write_row(out, row.values);
}

// --------------------------------------------------------------- commands

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
};

struct SimulateOptions {
  SimConfig config;
  std::string out_dir;
};

int cmd_simulate(const SimulateOptions& o, const CLI::App* sub, Context& ctx) {
  try {
    o.config.validate();
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  const SimResult sim = run_simulation(o.config);
  std::filesystem::create_directories(o.out_dir);
  const auto dir = std::filesystem::path(o.out_dir);
  const std::string events_path = (dir / "events.csv").string();
  const std::string users_path = (dir / "users.csv").string();
  const std::string items_path = (dir / "items.csv").string();

  std::vector<InteractionEvent> events;
  events.reserve(sim.events.size());
  for (const auto& e : sim.events) {
    events.push_back({std::to_string(e.user), std::to_string(e.item), e.action,
                      static_cast<std::int64_t>(e.step)});
  }
  const TruthTables truth = truth_tables(sim.truth);
  {
    auto f = open_output(events_path);
    write_events(f, events);
    auto u = open_output(users_path);
    write_user_truth(u, truth.users);
    auto i = open_output(items_path);
    write_item_truth(i, truth.items);
  }
  RunManifest m("simulate", ctx.args);
  m.set("seed", std::to_string(o.config.seed));
  m.set("items", std::to_string(sim.truth.fitness.size()));
  m.set("edges", std::to_string(sim.events.size()));
  write_manifest(m, sub, {events_path, users_path, items_path},
                 (dir / "manifest.txt").string());
  ctx.err << "simulate: users=" << o.config.n_users << " items=" << sim.truth.fitness.size()
          << " edges=" << sim.events.size() << '\n';
  return kExitOk;
}

struct RankOptions {
  InputOptions input;
  AlgoOptions algo;
  std::string out;
};

int cmd_rank(const RankOptions& o, const CLI::App* sub, Context& ctx) {
  validate_algo(o.algo, !o.input.papers.empty());
  RunManifest m("rank", ctx.args);
  const LoadedData d = load_inputs(o.input, m, true);
  const ScoreSet s = run_algo(o.algo, d);
  {
    auto f = open_output(o.out);
    write_scores(f, score_table(s, d));
  }
  m.set("converged", s.converged ? "true" : "false");
  m.set("iterations", std::to_string(s.iterations));
  m.set("residual", csv::format_double(s.residual));
  write_manifest(m, sub, {o.out}, o.out + ".manifest");
  report_convergence(ctx.err, "rank: ", s);
  if (!s.converged) {
    ctx.err << "rank: scores in " << o.out << " are the last iterate, not a fixed point\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

struct SweepOptions {
  InputOptions input;
  AlgoOptions algo;
  TruthOptions truth;
  std::vector<std::string> grid;
  bool qr16 = false;
  std::size_t k = 20;
  std::size_t jobs = 1;
  std::string out;
};

using Setter = void (*)(AlgoOptions&, double);

const std::map<std::string, Setter>& grid_setters() {
  static const std::map<std::string, Setter> setters = {
      {"tq", [](AlgoOptions& o, double v) { o.params.qr.theta_q = v; }},
      {"tr", [](AlgoOptions& o, double v) { o.params.qr.theta_r = v; }},
      {"rq", [](AlgoOptions& o, double v) { o.params.qr.rho_q = v; }},
      {"rr", [](AlgoOptions& o, double v) { o.params.qr.rho_r = v; }},
      {"phi-a", [](AlgoOptions& o, double v) { o.params.phi_a = v; }},
      {"phi-p", [](AlgoOptions& o, double v) { o.params.phi_p = v; }},
      {"rho-a", [](AlgoOptions& o, double v) { o.params.rho_a = v; }},
      {"lambda", [](AlgoOptions& o, double v) { o.params.lambda = v; }},
      {"omega", [](AlgoOptions& o, double v) { o.omega = v; }},
  };
  return setters;
}

struct GridAxis {
  std::string name;
  std::vector<double> values;
};

std::vector<GridAxis> parse_grid(const SweepOptions& o) {
  std::vector<GridAxis> axes;
  if (o.qr16) {
    for (const char* name : {"tq", "tr", "rq", "rr"}) axes.push_back({name, {0.0, 1.0}});
  }
  for (const auto& spec : o.grid) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--grid expects name=values, got '" + spec + "'");
    const std::string name = spec.substr(0, eq);
    if (!grid_setters().contains(name)) throw UsageError("unknown grid parameter '" + name + "'");
    for (const auto& a : axes) {
      if (a.name == name) throw UsageError("grid parameter '" + name + "' given twice");
    }
    axes.push_back({name, parse_grid_values(spec.substr(eq + 1))});
  }
  if (axes.empty()) throw UsageError("sweep needs --grid or --qr16");
  return axes;
}

struct SweepPoint {
  std::vector<double> values;
  AlgoOptions algo;
};

struct SweepOutcome {
  ScoreSet scores;
  MetricRow metrics;
  std::exception_ptr error;
};

int cmd_sweep(const SweepOptions& o, const CLI::App* sub, Context& ctx) {
  const auto axes = parse_grid(o);
  const bool has_papers = !o.input.papers.empty();
  if (!o.truth.given() && !has_papers) {
    throw UsageError("sweep needs ground truth (--users-truth/--items-truth) or --papers");
  }

  // Cartesian product, last axis fastest.
  std::vector<SweepPoint> points(1, SweepPoint{{}, o.algo});
  for (const auto& axis : axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (double v : axis.values) {
        SweepPoint q = p;
        q.values.push_back(v);
        grid_setters().at(axis.name)(q.algo, v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }
  for (const auto& p : points) validate_algo(p.algo, has_papers);

  RunManifest m("sweep", ctx.args);
  const LoadedData d = load_inputs(o.input, m, true);
  const TruthTables truth = load_truth(o.truth, m);
  const MetadataById metadata = has_papers ? metadata_by_id(d.papers, d.events) : MetadataById{};

  std::vector<SweepOutcome> outcomes(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        outcomes[i].scores = run_algo(points[i].algo, d);
        const ScoreTable table = score_table(outcomes[i].scores, d);
        outcomes[i].metrics = score_metrics(table, o.truth.given() ? &truth : nullptr,
                                            has_papers ? &metadata : nullptr, o.k);
      } catch (...) {
        outcomes[i].error = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(o.jobs, 1, points.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& r : outcomes) {
    if (r.error) std::rethrow_exception(r.error);
  }

  std::size_t unstable = 0;
  {
    auto f = open_output(o.out);
    std::vector<std::string> header;
    for (const auto& a : axes) header.push_back(a.name);
    for (const char* h : {"converged", "iterations", "residual"}) header.emplace_back(h);
    const auto& mh = outcomes.front().metrics.header;
    header.insert(header.end(), mh.begin(), mh.end());
    csv::write_row(f, header);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& r = outcomes[i];
      std::vector<std::string> row;
      for (double v : points[i].values) row.push_back(csv::format_double(v));
      row.emplace_back(r.scores.converged ? "true" : "false");
      row.push_back(std::to_string(r.scores.iterations));
      row.push_back(csv::format_double(r.scores.residual));
      row.insert(row.end(), r.metrics.values.begin(), r.metrics.values.end());
      csv::write_row(f, row);
      if (!r.scores.converged) ++unstable;
    }
  }
  write_manifest(m, sub, {o.out}, o.out + ".manifest");
  ctx.err << "sweep: " << points.size() << " points, " << unstable << " not converged\n";
  return kExitOk;
}

struct EvaluateOptions {
  InputOptions input;
  TruthOptions truth;
  std::string scores;
  std::string compare;
  std::string metric = "citations";
  std::string alternative = "two-sided";
  std::size_t k = 20;
  std::string out;
};

double metric_value(const PaperMetadata& m, const std::string& metric) {
  if (metric == "citations") return m.citations;
  if (metric == "downloads") return m.downloads;
  if (metric == "impact") return m.impact_factor;
  return static_cast<double>(m.submission_day);
}

std::vector<double> top_k_sample(const ScoreTable& table, const MetadataById& metadata,
                                 std::size_t k, const std::string& metric) {
  std::vector<double> out;
  for (const auto& id : top_item_ids(table, k)) {
    const auto it = metadata.find(id);
    if (it == metadata.end()) throw DataError("ranked paper without metadata: " + id);
    out.push_back(metric_value(it->second, metric));
  }
  return out;
}

void print_table(std::ostream& out, const MetricRow& row) {
  std::size_t width = 6;
  for (const auto& h : row.header) width = std::max(width, h.size());
  out << std::left << std::setw(static_cast<int>(width + 2)) << "metric" << "value\n";
  for (std::size_t k = 0; k < row.header.size(); ++k) {
    out << std::left << std::setw(static_cast<int>(width + 2)) << row.header[k] << row.values[k]
        << '\n';
  }
}

int cmd_evaluate(const EvaluateOptions& o, const CLI::App* sub, Context& ctx) {
  const bool has_papers = !o.input.papers.empty();
  if (!o.truth.given() && !has_papers) {
    throw UsageError("evaluate needs ground truth (--users-truth/--items-truth) or --papers");
  }
  if (!o.compare.empty() && !has_papers) throw UsageError("--compare needs --papers");

  RunManifest m("evaluate", ctx.args);
  const ScoreTable table = read_scores_file(o.scores);
  m.add_input(o.scores);
  const LoadedData d = load_inputs(o.input, m, false);
  const TruthTables truth = load_truth(o.truth, m);
  const MetadataById metadata = has_papers ? metadata_by_id(d.papers, d.events) : MetadataById{};

  MetricRow row = score_metrics(table, o.truth.given() ? &truth : nullptr,
                                has_papers ? &metadata : nullptr, o.k);
  if (!o.compare.empty()) {
    const ScoreTable other = read_scores_file(o.compare);
    m.add_input(o.compare);
    const auto a = top_k_sample(table, metadata, o.k, o.metric);
    const auto b = top_k_sample(other, metadata, o.k, o.metric);
    const Alternative alt = o.alternative == "less"      ? Alternative::Less
                            : o.alternative == "greater" ? Alternative::Greater
                                                         : Alternative::TwoSided;
    const auto mw = mann_whitney_u(a, b, alt);
    row.add("mw_metric", o.metric);
    row.add("mw_u", csv::format_double(mw.u));
    row.add("mw_p", csv::format_double(mw.p_value));
    row.add("mw_exact", mw.exact ? "true" : "false");
  }
  print_table(ctx.out, row);
  if (!o.out.empty()) {
    {
      auto f = open_output(o.out);
      write_table(f, row);
    }
    write_manifest(m, sub, {o.out}, o.out + ".manifest");
  }
  return kExitOk;
}

struct DegreeOptions {
  InputOptions input;
  std::string side;
  std::string action = "all";
  std::string out;
};

int cmd_degree_dist(DegreeOptions o, const CLI::App* sub, Context& ctx) {
  if (o.side == "author") {
    if (o.input.papers.empty()) throw UsageError("--side author needs --papers");
    if (o.action != "all") throw UsageError("--side author only supports --action all");
  } else if (o.input.events.empty()) {
    throw UsageError("--side " + o.side + " needs --events");
  }
  RunManifest m("degree-dist", ctx.args);
  const LoadedData d = load_inputs(o.input, m, false);

  std::vector<Index> degrees;
  if (o.side == "author") {
    std::map<std::string, Index> papers_per_author;
    for (const auto& p : d.papers) {
      std::unordered_set<std::string> seen;
      for (const auto& raw : p.authors) {
        if (raw.find_first_not_of(" \t") == std::string::npos) continue;
        const auto name = normalize_author_name(raw);
        if (seen.insert(name).second) ++papers_per_author[name];
      }
    }
    for (const auto& [name, n] : papers_per_author) degrees.push_back(n);
  } else {
    const std::optional<Action> filter =
        o.action == "all" ? std::nullopt : parse_action(o.action);
    std::map<std::string, Index> counts;
    for (const auto& e : d.events) {
      if (filter && e.action != *filter) continue;
      ++counts[o.side == "user" ? e.user : e.paper];
    }
    for (const auto& [id, n] : counts) degrees.push_back(n);
  }
  {
    auto f = open_output(o.out);
    csv::write_row(f, {"degree", "fraction_at_least"});
    for (const auto& r : degree_distribution(degrees)) {
      csv::write_row(f, {std::to_string(r.degree), csv::format_double(r.fraction_at_least)});
    }
  }
  write_manifest(m, sub, {o.out}, o.out + ".manifest");
  return kExitOk;
}

int cmd_replay(const std::string& path, bool verify, Context& ctx) {
  const RunManifest m = RunManifest::read_file(path);
  if (verify) {
    for (const auto& [key, digest] : m.entries()) {
      if (!key.starts_with("input.")) continue;
      const std::string input = key.substr(6);
      if (file_sha256(input) != digest) {
        throw DataError("input " + input + " no longer matches the recorded digest");
      }
    }
  }
  const auto argv = m.argv();
  if (!argv.empty() && argv.front() == "replay") throw DataError("manifest records a replay");
  return run(argv, ctx.out, ctx.err);
}

}  // namespace

std::vector<double> parse_grid_values(const std::string& spec) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw UsageError("bad grid value '" + s + "' in '" + spec + "'");
    }
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("grid range must be start:stop:step, got '" + spec + "'");
    const double start = number(parts[0]);
    const double stop = number(parts[1]);
    const double step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("empty grid range '" + spec + "'");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) {
      // Round to 12 significant digits so that 0.1 steps print as 0.3, not
      // 0.30000000000000004.
      std::ostringstream v;
      v << std::setprecision(12) << start + static_cast<double>(k) * step;
      out.push_back(std::stod(v.str()));
    }
  } else {
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw UsageError("empty grid '" + spec + "'");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Quality, reputation and author-credit ranking on bipartite networks", "qrc");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run the agent-based data generator");
  simulate->add_option("--users", sim.config.n_users, "Number of users N")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--mu", sim.config.mu, "Trait shape mu in (0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--x", sim.config.x_spread, "Fitness spread X")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--selectivity", sim.config.h, "Selectivity exponent h")->check(CLI::PositiveNumber);
  simulate->add_option("--p-upload", sim.config.p_upload, "Upload probability p_U")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--steps", sim.config.steps, "Time steps");
  simulate->add_option("--downloads-per-step", sim.config.downloads_per_step,
                       "Downloads per active user and step");
  simulate->add_option("--seed", sim.config.seed, "Random seed");
  simulate->add_option("--out", sim.out_dir, "Output directory")->required();

  RankOptions rank_opts;
  auto* rank = app.add_subcommand("rank", "Score users, items and authors");
  add_input_options(rank, rank_opts.input, true);
  add_algo_options(rank, rank_opts.algo);
  rank->add_option("--out", rank_opts.out, "Scores CSV")->required();

  SweepOptions sweep_opts;
  auto* sweep = app.add_subcommand("sweep", "Rank over a parameter grid");
  add_input_options(sweep, sweep_opts.input, true);
  add_algo_options(sweep, sweep_opts.algo);
  add_truth_options(sweep, sweep_opts.truth);
  sweep->add_option("--grid", sweep_opts.grid, "name=v1,v2,... or name=start:stop:step");
  sweep->add_flag("--qr16", sweep_opts.qr16, "All 16 binary (tq, tr, rq, rr) settings");
  sweep->add_option("--k", sweep_opts.k, "Top-k size for metadata reports")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", sweep_opts.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_opts.out, "Sweep table CSV")->required();

  EvaluateOptions eval_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Correlation and top-k reports for scores");
  evaluate->add_option("--scores", eval_opts.scores, "Scores CSV")
      ->required()
      ->check(CLI::ExistingFile);
  add_input_options(evaluate, eval_opts.input, false);
  add_truth_options(evaluate, eval_opts.truth);
  evaluate->add_option("--compare", eval_opts.compare, "Second scores CSV for Mann-Whitney U")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--metric", eval_opts.metric, "Paper metric compared by Mann-Whitney U")
      ->check(CLI::IsMember({"citations", "downloads", "impact", "day"}));
  evaluate->add_option("--alternative", eval_opts.alternative, "two-sided, less or greater")
      ->check(CLI::IsMember({"two-sided", "less", "greater"}));
  evaluate->add_option("--k", eval_opts.k, "Top-k size")->check(CLI::PositiveNumber);
  evaluate->add_option("--out", eval_opts.out, "Report CSV");

  DegreeOptions deg_opts;
  auto* degree = app.add_subcommand("degree-dist", "Cumulative degree distribution");
  add_input_options(degree, deg_opts.input, false);
  degree->add_option("--side", deg_opts.side, "user, item or author")
      ->required()
      ->check(CLI::IsMember({"user", "item", "author"}));
  degree->add_option("--action", deg_opts.action, "all, upload, download or view")
      ->check(CLI::IsMember({"all", "upload", "download", "view"}));
  degree->add_option("--exclude-user", deg_opts.input.exclude_users, "User id to drop");
  degree->add_option("--out", deg_opts.out, "Distribution CSV")->required();

  std::string manifest_path;
  bool no_verify = false;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", manifest_path, "Manifest file")->required()->check(CLI::ExistingFile);
  replay->add_flag("--no-verify", no_verify, "Skip the input digest check");

  Context ctx{args, out, err};
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    auto mark_min_day = [](CLI::App* sub, InputOptions& in) {
      in.has_min_day = sub->get_option("--min-day")->count() > 0;
    };
    mark_min_day(rank, rank_opts.input);
    mark_min_day(sweep, sweep_opts.input);
    mark_min_day(evaluate, eval_opts.input);
    mark_min_day(degree, deg_opts.input);

    if (simulate->parsed()) return cmd_simulate(sim, simulate, ctx);
    if (rank->parsed()) return cmd_rank(rank_opts, rank, ctx);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, sweep, ctx);
    if (evaluate->parsed()) return cmd_evaluate(eval_opts, evaluate, ctx);
    if (degree->parsed()) return cmd_degree_dist(deg_opts, degree, ctx);
    if (replay->parsed()) return cmd_replay(manifest_path, !no_verify, ctx);
    err << "no command given\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace qrc::cli
