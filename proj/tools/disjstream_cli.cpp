#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "disjstream/clean.hpp"
#include "disjstream/disj_instance.hpp"
#include "disjstream/disj_protocols.hpp"
#include "disjstream/errors.hpp"
#include "disjstream/lowrank.hpp"
#include "disjstream/protocol.hpp"
#include "disjstream/reductions.hpp"
#include "disjstream/rng.hpp"
#include "disjstream/sketches.hpp"
#include "disjstream/sparse_recovery.hpp"
#include "disjstream/stream.hpp"
#include "disjstream/turnstile_hh.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace disjstream;

namespace {

// Bad flag combinations; exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- output

// A report is a table of rows plus summary fields. Emitted as
// <out>.csv / <out>.json, or as JSON on stdout when no --out is given.
struct Report {
  std::string command;
  json summary = json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json report_json(const Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json o = json::object();
    for (std::size_t c = 0; c < r.columns.size(); ++c) o[r.columns[c]] = row[c];
    rows.push_back(o);
  }
  return {{"command", r.command}, {"summary", r.summary}, {"columns", r.columns}, {"rows", rows}};
}

void emit(const Report& r, const std::string& out) {
  if (out.empty()) {
    std::cout << report_json(r).dump(2) << '\n';
    return;
  }
  {
    std::ofstream csv(out + ".csv");
    if (!csv) throw std::runtime_error("cannot write " + out + ".csv");
    for (std::size_t c = 0; c < r.columns.size(); ++c) csv << (c ? "," : "") << r.columns[c];
    csv << '\n';
    for (const auto& row : r.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << csv_escape(row[c]);
      csv << '\n';
    }
  }
  std::ofstream js(out + ".json");
  if (!js) throw std::runtime_error("cannot write " + out + ".json");
  js << report_json(r).dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << body;
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  return json::parse(f);
}

// ---------------------------------------------------------------- workers

// Runs fn(trial) for every trial on `workers` threads. Results land in slot
// `trial`, so the output order does not depend on scheduling.
template <class Result, class Fn>
std::vector<Result> run_trials(std::size_t trials, unsigned workers, Fn fn) {
  std::vector<Result> out(trials);
  std::vector<std::exception_ptr> errors(trials);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < trials;) {
      try {
        out[t] = fn(t);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// ---------------------------------------------------------------- config

// Turns {"key": value} into "--key value" tokens. Arrays repeat the flag,
// booleans become bare flags when true.
std::vector<std::string> config_tokens(const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::vector<std::string> out;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    auto scalar = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return fmt(v.get<double>());
      throw ConfigError("config value for '" + key + "' must be a string or number");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(scalar(v));
      }
    } else {
      out.push_back(flag);
      out.push_back(scalar(value));
    }
  }
  return out;
}

// Splices the contents of --config FILE in front of the remaining flags of
// the subcommand, so explicit flags (which come later) win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t span = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      span = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      span = 1;
    } else {
      continue;
    }
    const auto tokens = config_tokens(read_json_file(path));
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + span));
    // Insert right after the subcommand name(s) so later flags override.
    std::size_t at = 1;
    while (at < args.size() && !args[at].empty() && args[at][0] != '-') ++at;
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(at), tokens.begin(), tokens.end());
    return args;
  }
  return args;
}

Label parse_label(const std::string& s) {
  try {
    return label_from_string(s);
  } catch (const std::exception&) {
    throw ConfigError("--label must be yes or no");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string kind;
  std::size_t n = 16, k = 0, l = 0, d = 64;
  double c = 0.5, eps = 0.0, p = 2.0, zeta = 1.0;
  std::string label = "yes";
  std::string source = "adversarial";
  std::string format = "text";
  std::string out;
  std::optional<std::uint64_t> seed;
};

DisjInstance make_instance(std::size_t n, std::size_t k, std::size_t l, Label label,
                           const std::string& source, std::uint64_t seed) {
  if (source == "adversarial")
    return label == Label::kYes ? adversarial_yes(n, k, l, seed) : adversarial_no(n, k, l, seed);
  if (source == "eta") return sample_eta(n, k, l, label == Label::kYes ? 1 : 0, seed).instance;
  throw ConfigError("--source must be adversarial or eta");
}

void write_stream(const GenOptions& o, const StreamHeader& h, const UpdateStream& updates) {
  std::ostringstream os;
  if (o.format == "text")
    write_stream_text(os, h, updates);
  else if (o.format == "binary")
    write_stream_binary(os, updates);
  else
    throw ConfigError("--format must be text or binary for streams");
  write_text_file(o.out, os.str());
}

void cmd_gen(const GenOptions& o) {
  require(o.seed.has_value(), "--seed is required: seeds are never implicit");
  const Label label = parse_label(o.label);
  const std::uint64_t seed = *o.seed;
  if (o.kind == "disj") {
    require(o.k >= 1, "--k must be at least 1");
    const std::size_t l = o.l ? o.l : default_l(o.k, o.c);
    const auto inst = make_instance(o.n, o.k, l, label, o.source, seed);
    write_text_file(o.out, inst.to_json().dump() + "\n");
  } else if (o.kind == "hh-stream") {
    require(o.eps > 0.0, "--eps is required for hh-stream");
    const auto prm = hh_reduction_params(o.n, o.p, o.eps);
    const auto rs = to_hh_stream(make_instance(o.n, prm.k, prm.l, label, o.source, seed), o.p, o.eps);
    write_stream(o, rs.header(), rs.flatten());
  } else if (o.kind == "powerlaw") {
    const auto prm = powerlaw_params(o.n, o.p, o.zeta);
    const auto rs = to_powerlaw_stream(make_instance(o.n, prm.k, prm.l, label, o.source, seed), o.p, o.zeta);
    write_stream(o, rs.header(), rs.flatten());
  } else if (o.kind == "fp") {
    const auto prm = fp_params(o.n, o.p);
    const auto rs = to_fp_stream(make_instance(o.n, prm.k, prm.l, label, o.source, seed), o.p);
    write_stream(o, rs.header(), rs.flatten());
  } else if (o.kind == "lowrank") {
    const auto inst = gen_lowrank_instance(o.d, label, seed);
    if (o.format == "json") {
      write_text_file(o.out, inst.to_json().dump() + "\n");
    } else {
      StreamHeader h{inst.d, inst.players(), label == Label::kYes ? lowrank_star_multiplicity(inst.d) : 0, 2.0, label};
      write_stream(o, h, inst.to_stream());
    }
  } else {
    throw ConfigError("unknown kind '" + o.kind + "'");
  }
}

// ---------------------------------------------------------------- run

struct RunOptions {
  std::string alg;
  std::string input;
  std::string format = "text";
  std::size_t universe = 0;
  double eps = 0.25;
  std::uint64_t length_bound = 0;
  bool strict = false;
  std::size_t capacity = 0, sparsity = 0, width = 0, depth = 5;
  std::optional<std::uint64_t> seed;
  std::string out;
};

UpdateStream load_stream(const RunOptions& o, std::size_t* universe) {
  std::ifstream f(o.input, std::ios::binary);
  if (!f) throw ConfigError("cannot open " + o.input);
  if (o.format == "text") {
    StreamHeader h;
    auto u = read_stream_text(f, &h);
    *universe = o.universe ? o.universe : h.n;
    return u;
  }
  if (o.format == "binary") {
    require(o.universe > 0, "--universe is required for binary streams");
    *universe = o.universe;
    return read_stream_binary(f);
  }
  throw ConfigError("--format must be text or binary");
}

Report cmd_run(const RunOptions& o) {
  std::size_t universe = 0;
  const auto updates = load_stream(o, &universe);
  const auto x = replay(universe, updates);
  Report r;
  r.command = "run";
  r.summary["alg"] = o.alg;
  r.summary["universe"] = universe;
  r.summary["length"] = updates.size();

  if (o.alg == "mg") {
    for (const auto& u : updates)
      if (u.sign < 0) throw ConfigError("mg needs an insertion-only stream");
    const std::size_t cap = o.capacity ? o.capacity : static_cast<std::size_t>(std::ceil(1.0 / o.eps));
    MisraGriesSummary mg(cap);
    for (const auto& u : updates) mg.update(u.index);
    r.summary["capacity"] = cap;
    r.summary["decrement_rounds"] = mg.decrement_rounds();
    r.columns = {"index", "estimate", "exact"};
    for (const auto& [i, c] : mg.counters()) r.rows.push_back({std::to_string(i), std::to_string(c), std::to_string(x[i])});
  } else if (o.alg == "countsketch") {
    require(o.seed.has_value(), "--seed is required for countsketch");
    const std::size_t width = o.width ? o.width : static_cast<std::size_t>(std::ceil(6.0 / (o.eps * o.eps)));
    CountSketch cs(width, o.depth, *o.seed);
    for (const auto& u : updates) cs.update(u.index, u.sign);
    r.summary["width"] = width;
    r.summary["depth"] = o.depth;
    r.columns = {"index", "estimate", "exact"};
    for (auto i : cs.heavy_hitters(o.eps, universe))
      r.rows.push_back({std::to_string(i), fmt(cs.estimate(i)), std::to_string(x[i])});
  } else if (o.alg == "turnstile-hh") {
    const std::uint64_t L = o.length_bound ? o.length_bound : std::max<std::uint64_t>(1, updates.size());
    auto hh = o.strict ? BoundedTurnstileHH::strict(universe, o.eps, L) : BoundedTurnstileHH::linf(universe, o.eps, L);
    for (const auto& u : updates) hh.update(u.index, u.sign);
    r.summary["length_bound"] = L;
    r.summary["eps"] = o.eps;
    r.summary["sparsity"] = hh.sparsity();
    r.summary["word_count"] = hh.word_count();
    r.summary["strict"] = o.strict;
    double norm2 = 0.0;
    for (auto v : x) norm2 += static_cast<double>(v) * static_cast<double>(v);
    r.summary["l2"] = std::sqrt(norm2);
    if (o.strict) {
      r.summary["branch"] = hh.positives() - hh.negatives() <= hh.sparsity() ? "sparse" : "dense";
      r.columns = {"index", "estimate", "exact"};
      for (auto i : hh.query_strict())
        r.rows.push_back({std::to_string(i), std::to_string(hh.estimate(i)), std::to_string(x[i])});
    } else {
      const auto z = hh.query_linf();
      r.summary["branch"] = z.from_sparse ? "sparse" : "dense";
      r.summary["error_bound"] = z.error_bound;
      r.columns = {"index", "estimate", "exact"};
      for (const auto& [i, v] : z.values) r.rows.push_back({std::to_string(i), std::to_string(v), std::to_string(x[i])});
    }
  } else if (o.alg == "sparse-recovery") {
    require(o.sparsity > 0, "--sparsity is required for sparse-recovery");
    SyndromeSketch sk(universe, o.sparsity);
    for (const auto& u : updates) sk.update(u.index, u.sign);
    const auto y = sk.decode();
    r.summary["sparsity"] = o.sparsity;
    r.summary["decoded"] = y.has_value();
    r.columns = {"index", "estimate", "exact"};
    if (y)
      for (const auto& [i, v] : *y) r.rows.push_back({std::to_string(i), std::to_string(v), std::to_string(x[i])});
  } else {
    throw ConfigError("unknown algorithm '" + o.alg + "'");
  }
  return r;
}

// ---------------------------------------------------------------- protocol

struct ProtocolOptions {
  std::string name;
  std::size_t n = 8, k = 4, l = 0;
  double c = 0.5, eps = 0.5;
  std::string encoding = "adaptive";
  std::string source = "adversarial";
  std::string label = "mixed";
  std::string instance;
  std::size_t trials = 100;
  int players = 3, rounds = 2;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct TrialRow {
  std::vector<std::string> cells;
  bool error = false;
  bool false_yes = false;
  std::uint64_t bits = 0, player_bits = 0;
  double diff = 0.0, obs_gap = 0.0;
};

Report cmd_protocol(ProtocolOptions o) {
  require(o.seed.has_value(), "--seed is required: seeds are never implicit");
  const std::uint64_t seed = *o.seed;
  Report r;
  r.command = "protocol";
  r.summary["protocol"] = o.name;
  r.summary["seed"] = seed;

  if (o.name == "clean-sim") {
    RandomTabularOptions opts;
    opts.players = o.players;
    opts.rounds = o.rounds;
    r.summary["players"] = o.players;
    r.summary["rounds"] = o.rounds;
    r.columns = {"trial", "player", "max_atom_diff", "observation_prob", "tv", "gap"};
    auto rows = run_trials<TrialRow>(o.trials, o.workers, [&](std::size_t t) {
      const auto base = random_tabular_protocol(opts, mix_key(seed, t)).to_spec();
      const int player = static_cast<int>(t % static_cast<std::size_t>(o.players));
      const auto clean = clean_simulate(base, player);
      double diff = 0.0;
      for (std::uint64_t mask = 0; mask < (1ULL << o.players); ++mask) {
        std::vector<PlayerInput> in(static_cast<std::size_t>(o.players));
        for (int j = 0; j < o.players; ++j) in[static_cast<std::size_t>(j)] = (mask >> j) & 1;
        const auto a = transcript_distribution(base, in);
        const auto b = transcript_distribution(clean, in);
        std::set<Atom> atoms;
        for (const auto& [s, _] : a.probs()) atoms.insert(s);
        for (const auto& [s, _] : b.probs()) atoms.insert(s);
        for (auto s : atoms) diff = std::max(diff, std::abs(a(s) - b(s)));
      }
      std::vector<PlayerInput> zero(static_cast<std::size_t>(o.players), 0), unit = zero;
      unit[static_cast<std::size_t>(player)] = 1;
      const double obs = observation_probability(clean, player);
      const double tv = tv_distance(transcript_distribution(base, zero), transcript_distribution(base, unit));
      TrialRow row;
      row.diff = diff;
      row.obs_gap = std::abs(obs - tv);
      row.cells = {std::to_string(t), std::to_string(player), fmt(diff), fmt(obs), fmt(tv), fmt(row.obs_gap)};
      return row;
    });
    double max_diff = 0.0, max_gap = 0.0;
    for (auto& row : rows) {
      max_diff = std::max(max_diff, row.diff);
      max_gap = std::max(max_gap, row.obs_gap);
      r.rows.push_back(std::move(row.cells));
    }
    r.summary["trials"] = o.trials;
    r.summary["max_atom_diff"] = max_diff;
    r.summary["max_observation_gap"] = max_gap;
    return r;
  }

  std::optional<DisjInstance> fixed;
  if (!o.instance.empty()) {
    fixed = DisjInstance::from_json(read_json_file(o.instance));
    o.n = fixed->n();
    o.k = fixed->k();
    if (!o.l) o.l = fixed->l();
  }

  std::optional<ProtocolSpec> spec;
  std::size_t l = o.l;
  const auto enc = publish_encoding_from_string(o.encoding);
  if (o.name == "deterministic") {
    if (!l) l = default_l(o.k, o.c);
    spec = deterministic_disj_protocol(o.n, o.k, enc);
  } else if (o.name == "eps-publish") {
    if (!l) l = default_l(o.k, o.c);
    spec = epsilon_publish_protocol(o.n, o.k, l, o.eps, enc);
    r.summary["eps"] = o.eps;
    r.summary["closed_form_yes_failure"] = epsilon_publish_failure_probability(l, o.eps);
  } else if (o.name == "pigeonhole") {
    if (!l) l = o.k;
    spec = pigeonhole_promise_protocol(o.n, o.k);
  } else {
    throw ConfigError("unknown protocol '" + o.name + "'");
  }
  r.summary["n"] = o.n;
  r.summary["k"] = o.k;
  r.summary["l"] = l;
  r.summary["bit_bound"] = o.n * static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(o.k + 1))));

  require(o.label == "mixed" || o.label == "yes" || o.label == "no", "--label must be yes, no or mixed");

  r.columns = {"trial", "label", "output", "correct", "bits", "max_player_bits"};
  auto rows = run_trials<TrialRow>(fixed ? 1 : o.trials, o.workers, [&](std::size_t t) {
    const std::uint64_t ts = mix_key(seed, t);
    Label want = o.label == "yes" ? Label::kYes : o.label == "no" ? Label::kNo : (t % 2 ? Label::kYes : Label::kNo);
    const DisjInstance inst = fixed ? *fixed : make_instance(o.n, o.k, l, want, o.source, ts);
    const auto truth = verify_promise(inst);
    if (!truth.ok()) throw PromiseViolation("instance breaks the promise: " + truth.reason);
    const auto tr = run_protocol(*spec, inst.row_masks(), mix_key(ts, 0xabcdef));
    const bool out = tr.output.value_or(false);
    const bool yes = *truth.label == Label::kYes;
    const auto per = tr.bits_per_player(static_cast<int>(o.k));
    TrialRow row;
    row.bits = tr.bit_cost();
    row.player_bits = per.empty() ? 0 : *std::max_element(per.begin(), per.end());
    row.error = out != yes;
    row.false_yes = out && !yes;
    row.cells = {std::to_string(t), to_string(*truth.label), out ? "yes" : "no", row.error ? "0" : "1",
                 std::to_string(row.bits), std::to_string(row.player_bits)};
    return row;
  });
  std::size_t errors = 0, false_yes = 0;
  std::uint64_t max_bits = 0, max_player = 0;
  double sum_bits = 0.0;
  for (auto& row : rows) {
    errors += row.error;
    false_yes += row.false_yes;
    max_bits = std::max(max_bits, row.bits);
    max_player = std::max(max_player, row.player_bits);
    sum_bits += static_cast<double>(row.bits);
    r.rows.push_back(std::move(row.cells));
  }
  r.summary["trials"] = rows.size();
  r.summary["errors"] = errors;
  r.summary["false_yes"] = false_yes;
  r.summary["error_rate"] = rows.empty() ? 0.0 : static_cast<double>(errors) / static_cast<double>(rows.size());
  r.summary["mean_bits"] = rows.empty() ? 0.0 : sum_bits / static_cast<double>(rows.size());
  r.summary["max_bits"] = max_bits;
  r.summary["max_player_bits"] = max_player;
  return r;
}

// ---------------------------------------------------------------- adversary

struct AdversaryOptions {
  std::string matrix;
  std::size_t r = 32, n = 256;
  std::optional<std::uint64_t> seed;
  std::string out;
};

Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    for (double v; ls >> v;) row.push_back(v);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  require(!rows.empty(), "matrix file is empty");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == rows[0].size(), "matrix rows have different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return M;
}

Eigen::MatrixXd random_orthonormal_rows(std::size_t r, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd G(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(r));
  for (Eigen::Index i = 0; i < G.rows(); ++i)
    for (Eigen::Index j = 0; j < G.cols(); ++j) G(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(G.rows(), G.cols());
  return Q.transpose();
}

Report cmd_adversary(const AdversaryOptions& o) {
  Eigen::MatrixXd M;
  Report rep;
  rep.command = "adversary";
  if (!o.matrix.empty()) {
    M = read_matrix(o.matrix);
    rep.summary["matrix"] = o.matrix;
  } else {
    require(o.seed.has_value(), "--seed is required for a random matrix");
    M = random_orthonormal_rows(o.r, o.n, *o.seed);
    rep.summary["seed"] = *o.seed;
  }
  const auto a = linear_sketch_adversary(M);
  const Eigen::VectorXd diff = M * (a.x1 - a.x2);
  rep.summary["r"] = M.rows();
  rep.summary["n"] = M.cols();
  rep.summary["istar"] = a.istar;
  rep.summary["sketch_gap"] = diff.norm();
  rep.summary["x1_nonnegative"] = (a.x1.array() >= 0.0).all();
  rep.summary["x1_istar_sq"] = a.x1[a.istar] * a.x1[a.istar];
  rep.summary["x1_norm_sq"] = a.x1.squaredNorm();
  rep.summary["heavy_in_x1"] = is_lp_heavy(a.x1, a.istar, 2.0, 0.25);
  rep.summary["heavy_in_x2"] = is_lp_heavy(a.x2, a.istar, 2.0, 0.25);
  rep.columns = {"index", "x1", "x2"};
  for (Eigen::Index i = 0; i < a.x1.size(); ++i) rep.rows.push_back({std::to_string(i), fmt(a.x1[i]), fmt(a.x2[i])});
  return rep;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::string results;
  std::string out;
};

void cmd_report(const ReportOptions& o) {
  require(fs::is_directory(o.results), "--results must be a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.results))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  Report space{"report", {}, {"source", "alg", "eps", "length_bound", "sparsity", "word_count", "words_per_unit"}, {}};
  Report comm{"report", {}, {"source", "protocol", "n", "k", "l", "eps", "error_rate", "mean_bits", "max_bits", "bit_bound"}, {}};
  Report fail{"report", {}, {"source", "l", "eps", "trials", "empirical_failure", "closed_form"}, {}};
  auto num = [](const json& s, const char* key) { return s.contains(key) ? fmt(s.at(key).get<double>()) : std::string{}; };

  for (const auto& path : files) {
    json j;
    try {
      j = read_json_file(path.string());
    } catch (const std::exception&) {
      continue;
    }
    if (!j.is_object() || !j.contains("summary")) continue;
    const auto& s = j.at("summary");
    const std::string name = path.filename().string();
    const std::string cmd = j.value("command", "");
    if (cmd == "run" && s.value("alg", "") == "turnstile-hh") {
      const double L = s.at("length_bound").get<double>(), eps = s.at("eps").get<double>();
      const double unit = std::pow(L / eps, 2.0 / 3.0);
      space.rows.push_back({name, "turnstile-hh", num(s, "eps"), num(s, "length_bound"), num(s, "sparsity"),
                            num(s, "word_count"), fmt(s.at("word_count").get<double>() / unit)});
    } else if (cmd == "protocol" && s.value("protocol", "") != "clean-sim") {
      const std::string proto = s.value("protocol", "");
      comm.rows.push_back({name, proto, num(s, "n"), num(s, "k"), num(s, "l"), num(s, "eps"), num(s, "error_rate"),
                           num(s, "mean_bits"), num(s, "max_bits"), num(s, "bit_bound")});
      if (proto == "eps-publish") {
        // Failures only happen on YES inputs; rate among them.
        std::size_t yes = 0, missed = 0;
        for (const auto& row : j.at("rows")) {
          if (row.at("label") != to_string(Label::kYes)) continue;
          ++yes;
          missed += row.at("output") == "no";
        }
        fail.rows.push_back({name, num(s, "l"), num(s, "eps"), std::to_string(yes),
                             yes ? fmt(static_cast<double>(missed) / static_cast<double>(yes)) : "",
                             num(s, "closed_form_yes_failure")});
      }
    }
  }
  const std::string dir = o.out.empty() ? o.results : o.out;
  fs::create_directories(dir);
  emit(space, (fs::path(dir) / "space_vs_eps").string());
  emit(comm, (fs::path(dir) / "communication").string());
  emit(fail, (fs::path(dir) / "failure_rate").string());
  std::cout << json{{"space_vs_eps", space.rows.size()}, {"communication", comm.rows.size()},
                    {"failure_rate", fail.rows.size()}}
                   .dump()
            << '\n';
}

const char* kColumnsHelp = R"(CSV columns (every report also has a JSON mirror with a "summary" object):
  run:        index, estimate (algorithm's value), exact (true frequency from replay)
  protocol:   trial, label (promise label of the instance), output (yes/no),
              correct (1 if output matches label), bits (blackboard bits written),
              max_player_bits (most bits written by one player)
  clean-sim:  trial, player (the cleaned player), max_atom_diff (largest
              per-transcript probability difference, maximized over inputs),
              observation_prob (Pr[player observes] on all-zero input),
              tv (tv distance between transcripts on 0 and e_player), gap (|observation_prob - tv|)
  adversary:  index, x1, x2 (the two inputs with equal sketches)
  report:     space_vs_eps.csv: source, alg, eps, length_bound, sparsity, word_count,
                words_per_unit (word_count / (L/eps)^(2/3))
              communication.csv: source, protocol, n, k, l, eps, error_rate, mean_bits,
                max_bits, bit_bound (n*ceil(log2(k+1)))
              failure_rate.csv: source, l, eps, trials (YES instances), empirical_failure,
                closed_form ((1-eps)^l + l eps (1-eps)^(l-1))
)";

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Set disjointness protocols, stream reductions and heavy hitters sketches"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  auto tl = [](CLI::Option* opt) { return opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };

  GenOptions gen;
  auto* g = app.add_subcommand("gen", "Generate an instance or a reduced stream");
  g->add_option("kind", gen.kind, "disj | hh-stream | powerlaw | fp | lowrank")->required()
      ->check(CLI::IsMember({"disj", "hh-stream", "powerlaw", "fp", "lowrank"}));
  tl(g->add_option("--n", gen.n, "Universe size of the DISJ instance"));
  tl(g->add_option("--k", gen.k, "Players (disj only; reductions derive k)"));
  tl(g->add_option("--l", gen.l, "Multiplicity of the popular element (default ceil(c*k))"));
  tl(g->add_option("--c", gen.c, "Fraction c in l = ceil(c*k)"));
  tl(g->add_option("--eps", gen.eps, "Heaviness for hh-stream"));
  tl(g->add_option("--p", gen.p, "Norm exponent p"));
  tl(g->add_option("--zeta", gen.zeta, "Power-law exponent"));
  tl(g->add_option("--d", gen.d, "Dimension for lowrank (perfect square)"));
  tl(g->add_option("--label", gen.label, "yes | no"));
  tl(g->add_option("--source", gen.source, "adversarial | eta"));
  tl(g->add_option("--format", gen.format, "text | binary (streams), json (lowrank)"));
  tl(g->add_option("--out", gen.out, "Output file (stdout if omitted)"));
  tl(g->add_option("--seed", gen.seed, "Random seed (required)"));
  g->add_option("--config", "JSON file of flag values; explicit flags override it");

  RunOptions run;
  auto* rn = app.add_subcommand("run", "Run a streaming algorithm on a stream file");
  rn->add_option("alg", run.alg, "mg | countsketch | turnstile-hh | sparse-recovery")->required()
      ->check(CLI::IsMember({"mg", "countsketch", "turnstile-hh", "sparse-recovery"}));
  tl(rn->add_option("--input", run.input, "Stream file")->required());
  tl(rn->add_option("--format", run.format, "text | binary"));
  tl(rn->add_option("--universe", run.universe, "Universe size (binary streams; overrides the text header)"));
  tl(rn->add_option("--eps", run.eps, "Heaviness parameter"));
  tl(rn->add_option("--length-bound", run.length_bound, "Declared stream length L (default: actual length)"));
  rn->add_flag("--strict", run.strict, "Strict turnstile query instead of the l_inf/l_2 estimate");
  tl(rn->add_option("--capacity", run.capacity, "Misra-Gries slots (default ceil(1/eps))"));
  tl(rn->add_option("--sparsity", run.sparsity, "S for sparse-recovery"));
  tl(rn->add_option("--width", run.width, "CountSketch width (default ceil(6/eps^2))"));
  tl(rn->add_option("--depth", run.depth, "CountSketch depth"));
  tl(rn->add_option("--seed", run.seed, "Seed for countsketch"));
  tl(rn->add_option("--out", run.out, "Write <out>.csv and <out>.json instead of JSON on stdout"));
  rn->add_option("--config", "JSON file of flag values; explicit flags override it");

  ProtocolOptions proto;
  auto* pr = app.add_subcommand("protocol", "Run blackboard protocol trials");
  pr->add_option("name", proto.name, "deterministic | eps-publish | pigeonhole | clean-sim")->required()
      ->check(CLI::IsMember({"deterministic", "eps-publish", "pigeonhole", "clean-sim"}));
  tl(pr->add_option("--n", proto.n, "Universe size (<= 64)"));
  tl(pr->add_option("--k", proto.k, "Players"));
  tl(pr->add_option("--l", proto.l, "Multiplicity (default ceil(c*k); k for pigeonhole)"));
  tl(pr->add_option("--c", proto.c, "Fraction c in l = ceil(c*k)"));
  tl(pr->add_option("--eps", proto.eps, "Selection probability of eps-publish"));
  tl(pr->add_option("--encoding", proto.encoding, "adaptive | subset | size-combination"));
  tl(pr->add_option("--source", proto.source, "adversarial | eta"));
  tl(pr->add_option("--label", proto.label, "yes | no | mixed (alternating)"));
  tl(pr->add_option("--instance", proto.instance, "Run once on this instance JSON"));
  tl(pr->add_option("--trials", proto.trials, "Number of trials"));
  tl(pr->add_option("--players", proto.players, "clean-sim: players of the random protocols"));
  tl(pr->add_option("--rounds", proto.rounds, "clean-sim: rounds of the random protocols"));
  tl(pr->add_option("--workers", proto.workers, "Worker threads"));
  tl(pr->add_option("--seed", proto.seed, "Random seed (required)"));
  tl(pr->add_option("--out", proto.out, "Write <out>.csv and <out>.json instead of JSON on stdout"));
  pr->add_option("--config", "JSON file of flag values; explicit flags override it");

  AdversaryOptions adv;
  auto* ad = app.add_subcommand("adversary", "Build two inputs a linear sketch cannot tell apart");
  tl(ad->add_option("--matrix", adv.matrix, "Whitespace-separated r x n sketch matrix"));
  tl(ad->add_option("--r", adv.r, "Rows of a random orthonormal sketch"));
  tl(ad->add_option("--n", adv.n, "Columns of a random orthonormal sketch"));
  tl(ad->add_option("--seed", adv.seed, "Seed for the random sketch"));
  tl(ad->add_option("--out", adv.out, "Write <out>.csv and <out>.json instead of JSON on stdout"));
  ad->add_option("--config", "JSON file of flag values; explicit flags override it");

  ReportOptions rep;
  auto* rp = app.add_subcommand("report", "Collect JSON reports in a directory into CSV/JSON tables");
  tl(rp->add_option("--results", rep.results, "Directory of run/protocol JSON reports")->required());
  tl(rp->add_option("--out", rep.out, "Output directory (default: the results directory)"));
  rp->add_option("--config", "JSON file of flag values; explicit flags override it");

  try {
    args = expand_config(args);
    std::vector<const char*> cargs;
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    if (*g) {
      cmd_gen(gen);
    } else if (*rn) {
      emit(cmd_run(run), run.out);
    } else if (*pr) {
      emit(cmd_protocol(proto), proto.out);
    } else if (*ad) {
      emit(cmd_adversary(adv), adv.out);
    } else if (*rp) {
      cmd_report(rep);
    }
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", "config"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << json{{"error", "invalid_argument"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "failure"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
