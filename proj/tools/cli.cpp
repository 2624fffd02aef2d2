#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"
#include "ps4/certify.hpp"
#include "ps4/error.hpp"
#include "ps4/exppair.hpp"
#include "ps4/kernel.hpp"
#include "ps4/parallel.hpp"
#include "ps4/solver.hpp"
#include "ps4/sums.hpp"

namespace ps4::cli {

namespace {

enum class Format { Csv, Jsonl, Table };

using Cell = std::variant<std::string, double, std::int64_t, std::uint64_t, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;  // extra "#" lines after the provenance header
  std::string empty_text;          // printed (table format) or noted when there are no rows
};

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string cell_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) return v;
        else if constexpr (std::is_same_v<T, double>) return fmt_double(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return std::to_string(v);
      },
      c);
}

nlohmann::ordered_json cell_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

void write_table(const Table& t, Format f, std::ostream& os) {
  for (const auto& n : t.notes) os << "# " << n << "\n";
  if (t.rows.empty() && !t.empty_text.empty()) {
    if (f == Format::Table) {
      os << t.empty_text << "\n";
      return;
    }
    os << "# " << t.empty_text << "\n";
  }
  switch (f) {
    case Format::Csv: {
      for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
      os << "\n";
      for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_field(cell_text(r[i]));
        os << "\n";
      }
      break;
    }
    case Format::Jsonl: {
      for (const auto& r : t.rows) {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < r.size(); ++i) j[t.columns[i]] = cell_json(r[i]);
        os << j.dump() << "\n";
      }
      break;
    }
    case Format::Table: {
      std::vector<std::size_t> width(t.columns.size());
      std::vector<std::vector<std::string>> text;
      for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
      for (const auto& r : t.rows) {
        auto& line = text.emplace_back();
        for (std::size_t i = 0; i < r.size(); ++i) {
          line.push_back(cell_text(r[i]));
          width[i] = std::max(width[i], line.back().size());
        }
      }
      auto emit = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          s += cells[i];
          if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size() + 2, ' ');
        }
        os << s << "\n";
      };
      emit(t.columns);
      for (const auto& line : text) emit(line);
      break;
    }
  }
}

const char* kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Hypothesis: return "hypothesis";
    case ConstraintKind::Branch: return "branch";
    case ConstraintKind::Assembly: return "assembly";
  }
  return "?";
}

std::string join(const std::vector<std::string>& v, const char* sep = " ") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::uint64_t to_count(double v, const char* what) {
  if (!(v >= 0) || v != std::floor(v) || v > 1e15)
    throw DomainError(std::string(what) + " must be a nonnegative integer, got " + fmt_double(v));
  return static_cast<std::uint64_t>(v);
}

// Thrown by a command to request exit code 1 after its output is written.
struct Failure {
  Table table;
  std::string message;
};

struct Certify {
  std::string u = "304/2667", v = "1147/2667", z = "2363/5334", theta1 = "4961/10668";
  std::string pair_i, pair_ii, pair_long;

  void add(CLI::App* app) {
    app->add_option("--u", u, "U = X^u")->capture_default_str();
    app->add_option("--v", v, "V = X^v")->capture_default_str();
    app->add_option("--z", z, "Z = X^z")->capture_default_str();
    app->add_option("--theta1", theta1, "Type I split")->capture_default_str();
    app->add_option("--pair-i", pair_i, "word for the Type I pair (default A2B)");
    app->add_option("--pair-ii", pair_ii, "word for the Type II pair (default AB)");
    app->add_option("--pair-long", pair_long, "word for the long-word pair");
  }
  Params params() const {
    auto p = Params::from(Rational::parse(u), Rational::parse(v), Rational::parse(z), Rational::parse(theta1));
    p.validate();
    return p;
  }
  PairSet pairs() const {
    auto ps = PairSet::defaults();
    if (!pair_i.empty()) ps.type_i = eval_word(parse_word(pair_i));
    if (!pair_ii.empty()) ps.type_ii = eval_word(parse_word(pair_ii));
    if (!pair_long.empty()) ps.long_word = eval_word(parse_word(pair_long));
    return ps;
  }
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Piatetski-Shapiro prime quadruple workbench"};
  app.name("ps4");
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ps4 ") + kVersion);
  app.set_config("--config", "", "key=value file; command-line flags override it");

  std::string format = "table";
  std::string out_path;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--format", format, "csv, jsonl or table")
      ->check(CLI::IsMember({"csv", "jsonl", "table"}))
      ->capture_default_str();
  app.add_option("--out", out_path, "write output to this file");
  app.add_option("--seed", seed, "random seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0 = all available)")->capture_default_str();

  std::function<Table()> command;
  std::string command_name;
  auto bind = [&](CLI::App* sub, std::string name, std::function<Table()> fn) {
    sub->callback([&command, &command_name, name = std::move(name), fn = std::move(fn)] {
      command = fn;
      command_name = name;
    });
  };

  // exppair
  auto* exppair = app.add_subcommand("exppair", "exponent pairs and A/B words");
  exppair->require_subcommand(1);
  std::string word;
  auto* ep_eval = exppair->add_subcommand("eval", "evaluate a word at (0, 1)");
  ep_eval->add_option("--word", word, "word such as BA3BA2BABABA2BABAB")->required();
  bind(ep_eval, "exppair eval", [&] {
    auto w = parse_word(word);
    auto p = eval_word(w);
    Table t;
    t.columns = {"word", "kappa", "lambda", "pair"};
    t.rows.push_back({w.str(), p.kappa().str(), p.lambda().str(), p.str()});
    return t;
  });

  std::string objective = "long-word", linfrac, sigma = "2515/2667", sense = "max", pruning = "auto";
  int depth = 19;
  auto* ep_search = exppair->add_subcommand("search", "optimize a linear-fractional objective over words");
  ep_search->add_option("--objective", objective, "long-word, kappa or linfrac")
      ->check(CLI::IsMember({"long-word", "kappa", "linfrac"}))
      ->capture_default_str();
  ep_search->add_option("--linfrac", linfrac, "p0,pk,pl,q0,qk,ql for --objective linfrac");
  ep_search->add_option("--sigma", sigma, "sigma for the long-word objective")->capture_default_str();
  ep_search->add_option("--depth", depth, "maximum word length")->check(CLI::Range(1, 64))->capture_default_str();
  ep_search->add_option("--sense", sense, "max or min")->check(CLI::IsMember({"max", "min"}))->capture_default_str();
  ep_search->add_option("--pruning", pruning, "auto, off or force")
      ->check(CLI::IsMember({"auto", "off", "force"}))
      ->capture_default_str();
  bind(ep_search, "exppair search", [&] {
    LinFrac obj;
    if (objective == "long-word") {
      obj = LinFrac::long_word_threshold(Rational::parse(sigma));
    } else if (objective == "kappa") {
      obj = LinFrac::kappa();
    } else {
      std::vector<Rational> k;
      std::stringstream ss(linfrac);
      for (std::string item; std::getline(ss, item, ',');) k.push_back(Rational::parse(item));
      if (k.size() != 6) throw DomainError("--linfrac needs six comma-separated rationals");
      obj = {k[0], k[1], k[2], k[3], k[4], k[5]};
    }
    const Pruning pr = pruning == "off" ? Pruning::Off : pruning == "force" ? Pruning::Force : Pruning::Auto;
    auto r = search_linfrac(obj, depth, sense == "max" ? Sense::Maximize : Sense::Minimize, pr);
    Table t;
    t.columns = {"word", "kappa", "lambda", "value", "pruning_applied", "distinct_pairs"};
    t.rows.push_back({r.word.str(), r.pair.kappa().str(), r.pair.lambda().str(), r.value.str(), r.pruning_applied,
                      static_cast<std::uint64_t>(r.distinct_pairs)});
    return t;
  });

  // certify
  auto* certify = app.add_subcommand("certify", "exact exponent bookkeeping");
  certify->require_subcommand(1);
  Certify cert_opts;
  std::string cert_c = "1193/889";
  bool assert_feasible = false, assert_admissible = false;
  auto* c_verify = certify->add_subcommand("verify", "slack of every constraint at c");
  cert_opts.add(c_verify);
  c_verify->add_option("--c", cert_c, "exponent c as num/den")->capture_default_str();
  c_verify->add_flag("--assert-feasible", assert_feasible, "exit 1 unless every slack is >= 0");
  c_verify->add_flag("--assert-admissible", assert_admissible, "exit 1 unless feasible with strict slacks > 0");
  bind(c_verify, "certify verify", [&] {
    auto sys = build_system(cert_opts.pairs(), cert_opts.params());
    auto rep = verify_at(sys, Rational::parse(cert_c));
    Table t;
    t.notes = {"c: " + rep.c.str(), "sigma: " + rep.sigma.str(), std::string("feasible: ") + (rep.feasible ? "yes" : "no"),
               std::string("admissible: ") + (rep.admissible ? "yes" : "no"), "binding: " + join(rep.binding)};
    t.columns = {"name", "kind", "lhs", "rhs", "sup_at", "slack", "strict", "binding"};
    for (const auto& e : rep.entries)
      t.rows.push_back({e.name, std::string(kind_name(e.kind)), e.lhs.str(), e.rhs.str(),
                        e.sup_at ? e.sup_at->str() : std::string("-"), e.slack.str(), e.strict, e.binding});
    if ((assert_feasible && !rep.feasible) || (assert_admissible && !rep.admissible))
      throw Failure{t, "c = " + rep.c.str() + " fails the asserted check"};
    return t;
  });

  bool per_constraint = false;
  std::string expect;
  auto* c_threshold = certify->add_subcommand("threshold", "largest admissible c");
  cert_opts.add(c_threshold);
  c_threshold->add_flag("--per-constraint", per_constraint, "also list each constraint's own threshold");
  c_threshold->add_option("--expect", expect, "exit 1 unless the threshold equals this rational");
  bind(c_threshold, "certify threshold", [&] {
    auto sys = build_system(cert_opts.pairs(), cert_opts.params());
    auto th = threshold_c(sys);
    Table t;
    if (per_constraint) {
      t.notes = {"cstar: " + th.cstar.str(), "binding: " + join(th.binding)};
      t.columns = {"name", "threshold"};
      for (const auto& ct : constraint_thresholds(sys)) t.rows.push_back({ct.name, ct.c.str()});
    } else {
      t.columns = {"cstar", "binding"};
      t.rows.push_back({th.cstar.str(), join(th.binding)});
    }
    if (!expect.empty() && th.cstar != Rational::parse(expect))
      throw Failure{t, "threshold " + th.cstar.str() + " differs from " + expect};
    return t;
  });

  std::vector<std::string> free_names;
  std::string step = "1/5334";
  auto* c_tune = certify->add_subcommand("tune", "grid search over free parameters");
  cert_opts.add(c_tune);
  c_tune->add_option("--free", free_names, "free parameters among u, v, z, theta1")->delimiter(',')->required();
  c_tune->add_option("--step", step, "grid step as num/den")->capture_default_str();
  bind(c_tune, "certify tune", [&] {
    std::vector<FreeParam> free;
    for (const auto& n : free_names) free.push_back(parse_free_param(n));
    auto r = tune(free, Rational::parse(step), cert_opts.pairs(), cert_opts.params());
    Table t;
    t.columns = {"u", "v", "z", "theta1", "cstar", "binding", "evaluated"};
    t.rows.push_back({r.params.u.str(), r.params.v.str(), r.params.z.str(), r.params.theta1.str(), r.cstar.str(),
                      join(r.binding), static_cast<std::uint64_t>(r.evaluated)});
    return t;
  });

  // kernel
  auto* kernel = app.add_subcommand("kernel", "smoothing kernel checks");
  kernel->require_subcommand(1);
  double ka = 0.9, kb = 0.1;
  int kr = 10;
  KernelGrid kgrid;
  auto* k_check = kernel->add_subcommand("check", "bound, parity, plateau and support checks");
  k_check->add_option("--a", ka)->capture_default_str();
  k_check->add_option("--b", kb)->capture_default_str();
  k_check->add_option("--r", kr)->capture_default_str();
  k_check->add_option("--samples", kgrid.samples, "log-spaced |x| samples")->capture_default_str();
  k_check->add_option("--x-min", kgrid.x_min)->capture_default_str();
  k_check->add_option("--x-max", kgrid.x_max)->capture_default_str();
  k_check->add_option("--phi-samples", kgrid.phi_samples)->capture_default_str();
  k_check->add_option("--ulp-slack", kgrid.ulp_slack)->capture_default_str();
  bind(k_check, "kernel check", [&] {
    auto rep = kernel_check(KernelParams::make(ka, kb, kr), kgrid);
    Table t;
    t.columns = {"max_violation", "argmax_x", "samples", "bound_violations", "parity_violations", "phi_checked",
                 "plateau_error", "support_error", "ok"};
    t.rows.push_back({rep.max_violation, rep.argmax_x, static_cast<std::uint64_t>(rep.samples),
                      static_cast<std::uint64_t>(rep.bound_violations),
                      static_cast<std::uint64_t>(rep.parity_violations), rep.phi_checked, rep.plateau_error,
                      rep.support_error, rep.ok()});
    if (!rep.ok()) throw Failure{t, "kernel check failed"};
    return t;
  });

  // sums
  auto* sums = app.add_subcommand("sums", "exponential sums over (X, 2X]");
  sums->require_subcommand(1);
  double sc = 1.2, sX = 100000;
  std::vector<double> xs, ladder = {1e3, 1e4, 1e5};
  std::string kind = "S";
  std::size_t grid = 100, samples = 2000, points = 1000;

  auto* s_eval = sums->add_subcommand("eval", "S, U, T or I at given x");
  s_eval->add_option("--c", sc)->capture_default_str();
  s_eval->add_option("--X", sX)->capture_default_str();
  s_eval->add_option("--x", xs, "comma-separated points")->delimiter(',')->required();
  s_eval->add_option("--kind", kind, "S, U, T or I")->check(CLI::IsMember({"S", "U", "T", "I"}))->capture_default_str();
  bind(s_eval, "sums eval", [&] {
    auto g = GlobalParams::make(sc, to_count(sX, "X"));
    Table t;
    t.columns = {"X", "c", "x", "re", "im", "abs", "bound", "ratio"};
    for (const auto& r : evaluate(parse_sum_kind(kind), g, xs))
      t.rows.push_back({r.X, r.c, r.x, r.value.real(), r.value.imag(), std::abs(r.value), r.bound, r.ratio()});
    return t;
  });

  auto to_ladder = [&] {
    std::vector<std::uint64_t> out;
    for (double v : ladder) out.push_back(to_count(v, "ladder entry"));
    return out;
  };

  auto* s_major = sums->add_subcommand("major", "max |S - I| / X over the major arc");
  s_major->add_option("--c", sc)->capture_default_str();
  s_major->add_option("--ladder", ladder, "comma-separated X values")->delimiter(',')->capture_default_str();
  s_major->add_option("--grid", grid, "grid points on [0, tau]")->capture_default_str();
  bind(s_major, "sums major", [&] {
    auto lad = to_ladder();
    Table t;
    t.columns = {"X", "c", "tau", "zero_ratio", "max_ratio", "argmax_x", "grid"};
    for (const auto& r : major_arc_report(sc, lad, {}, grid))
      t.rows.push_back({r.X, sc, r.tau, r.zero_ratio, r.max_ratio, r.argmax_x, static_cast<std::uint64_t>(r.grid)});
    return t;
  });

  auto* s_moments = sums->add_subcommand("moments", "major and minor arc mean values");
  s_moments->add_option("--c", sc)->capture_default_str();
  s_moments->add_option("--ladder", ladder, "comma-separated X values")->delimiter(',')->capture_default_str();
  s_moments->add_option("--samples", samples, "Monte Carlo samples on the minor arc")->capture_default_str();
  bind(s_moments, "sums moments", [&] {
    auto lad = to_ladder();
    Table t;
    t.columns = {"X", "c", "tau", "K", "major", "major_ratio", "minor", "minor_ci95", "minor_ratio", "samples"};
    for (const auto& r : moment_report(sc, lad, seed, samples))
      t.rows.push_back({r.X, sc, r.tau, r.K, r.major, r.major_ratio, r.minor, r.minor_ci95, r.minor_ratio,
                        static_cast<std::uint64_t>(r.samples)});
    return t;
  });

  auto* s_minor = sums->add_subcommand("minor", "max |S| over a random and rational grid on the minor arc");
  s_minor->add_option("--c", sc)->capture_default_str();
  s_minor->add_option("--ladder", ladder, "comma-separated X values")->delimiter(',')->capture_default_str();
  s_minor->add_option("--points", points)->capture_default_str();
  bind(s_minor, "sums minor", [&] {
    Table t;
    t.columns = {"X", "c", "points", "max_abs", "argmax_x", "ratio"};
    for (auto X : to_ladder()) {
      auto g = GlobalParams::make(sc, X);
      auto r = minor_grid_report(g, sieve_range(X), points, seed);
      t.rows.push_back({r.X, sc, static_cast<std::uint64_t>(r.points), r.max_abs, r.argmax_x, r.ratio});
    }
    return t;
  });

  // solver
  double vc = 1.2, vN = 1e6;
  std::optional<double> veps;
  double limit = 10;
  auto instance_notes = [](const Instance& in) {
    std::vector<std::string> n{"instance: " + in.str()};
    if (in.outside_theorem) n.push_back("warning: c >= 1193/889 lies outside the proven range");
    return n;
  };

  auto* solve = app.add_subcommand("solve", "prime quadruples with |p1^c + ... + p4^c - N| < eps");
  solve->add_option("--c", vc)->capture_default_str();
  solve->add_option("--N", vN)->capture_default_str();
  solve->add_option("--eps", veps, "window (default (ln X)^-2)");
  solve->add_option("--limit", limit, "maximum quadruples to print (inf for all)")->capture_default_str();
  bind(solve, "solve", [&] {
    auto in = make_instance(vc, vN, veps);
    const std::size_t lim = std::isinf(limit) ? kNoLimit : static_cast<std::size_t>(to_count(limit, "limit"));
    Table t;
    t.notes = instance_notes(in);
    t.columns = {"p1", "p2", "p3", "p4", "delta"};
    t.empty_text = "none found";
    for (const auto& r : find_solutions(in, lim)) t.rows.push_back({r.p1, r.p2, r.p3, r.p4, r.delta});
    return t;
  });

  bool with_main = false;
  std::size_t mc = 100000;
  auto* count = app.add_subcommand("count", "weighted count B4 of ordered quadruples");
  count->add_option("--c", vc)->capture_default_str();
  count->add_option("--N", vN)->capture_default_str();
  count->add_option("--eps", veps, "window (default (ln X)^-2)");
  count->add_option("--samples", mc, "Monte Carlo samples for the volume")->capture_default_str();
  count->add_flag("--main-term", with_main, "also integrate the main term");
  bind(count, "count", [&] {
    auto in = make_instance(vc, vN, veps);
    auto cw = count_weighted(in);
    auto vol = predicted_volume(in, mc, seed);
    Table t;
    t.notes = instance_notes(in);
    t.columns = {"N", "X", "P", "eps", "raw", "B4", "V", "V_ci95"};
    std::vector<Cell> row{in.N, in.X, static_cast<std::uint64_t>(cw.P), in.eps, cw.raw, cw.B4, vol.V, vol.ci95};
    if (with_main) {
      auto m = main_term_integral(in);
      t.columns.push_back("main_term");
      t.columns.push_back("main_term_norm");
      row.push_back(m.value);
      row.push_back(m.value / (in.eps * std::pow(static_cast<double>(in.X), 4.0 - in.c)));
    }
    t.rows.push_back(row);
    return t;
  });

  double n_from = 1e4, n_to = 1e6;
  std::size_t n_points = 50;
  std::string scan_eps;
  auto* scan_cmd = app.add_subcommand("scan", "solvability over a log-spaced N grid");
  scan_cmd->add_option("--c", vc)->capture_default_str();
  scan_cmd->add_option("--N-from", n_from)->capture_default_str();
  scan_cmd->add_option("--N-to", n_to)->capture_default_str();
  scan_cmd->add_option("--points", n_points)->capture_default_str();
  scan_cmd->add_option("--eps", scan_eps, "fixed window, or 'log' for 1/ln N (default (ln X)^-2)");
  scan_cmd->add_option("--samples", mc, "Monte Carlo samples for the volume")->capture_default_str();
  bind(scan_cmd, "scan", [&] {
    ScanOptions opt;
    opt.seed = seed;
    opt.mc_samples = mc;
    if (scan_eps == "log") {
      opt.log_window = true;
    } else if (!scan_eps.empty()) {
      double e = 0;
      auto res = std::from_chars(scan_eps.data(), scan_eps.data() + scan_eps.size(), e);
      if (res.ec != std::errc{} || res.ptr != scan_eps.data() + scan_eps.size())
        throw ParseError("--eps expects a number or 'log', got '" + scan_eps + "'", 0);
      opt.eps = e;
    }
    auto Ns = log_grid(n_from, n_to, n_points);
    Table t;
    t.columns = {"N", "X", "P", "raw", "B4", "V", "B4_norm", "solvable", "eps", "V_ci95"};
    std::size_t unsolved = 0;
    for (const auto& r : scan(vc, Ns, opt)) {
      t.rows.push_back({r.N, r.X, static_cast<std::uint64_t>(r.P), r.raw, r.B4, r.V, r.normalized, r.solvable, r.eps,
                        r.V_ci95});
      if (!r.solvable) ++unsolved;
    }
    t.notes.push_back("unsolved: " + std::to_string(unsolved));
    return t;
  });

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << "ps4 " << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  set_thread_count(threads);
  const Format fmt = format == "csv" ? Format::Csv : format == "jsonl" ? Format::Jsonl : Format::Table;

  std::ofstream file;
  std::ostream* sink = &out;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      err << "error: cannot open " << out_path << " for writing\n";
      return kUsage;
    }
    sink = &file;
  }
  // Provenance: global options and those of the invoked subcommand chain.
  std::vector<std::string> config_lines;
  std::function<void(const CLI::App*, const std::string&)> echo = [&](const CLI::App* a, const std::string& prefix) {
    for (const CLI::Option* o : a->get_options()) {
      if (o->get_lnames().empty()) continue;
      const std::string& name = o->get_lnames().front();
      if (name == "help" || name == "version" || name == "config" || name == "out") continue;
      std::vector<std::string> vals = o->count() ? o->results() : std::vector<std::string>{o->get_default_str()};
      for (auto& v : vals) {
        // echo exact rationals in lowest terms, like every other output
        if (v.find('/') == std::string::npos) continue;
        try {
          v = Rational::parse(v).str();
        } catch (const Error&) {
        }
      }
      config_lines.push_back(prefix + name + "=" + join(vals, ","));
    }
    for (const CLI::App* sub : a->get_subcommands()) echo(sub, prefix + sub->get_name() + ".");
  };
  echo(&app, "");
  auto header = [&] {
    *sink << "# ps4 " << kVersion << "\n# command: " << command_name << "\n";
    for (const auto& line : config_lines) *sink << "# config: " << line << "\n";
  };

  try {
    Table t = command();
    header();
    write_table(t, fmt, *sink);
    return kOk;
  } catch (const Failure& failed) {
    header();
    write_table(failed.table, fmt, *sink);
    err << "verification failed: " << failed.message << "\n";
    return kVerificationFailed;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kVerificationFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace ps4::cli
