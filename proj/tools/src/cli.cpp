#include "qsa/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include "qsa/channels.hpp"
#include "qsa/superadd.hpp"

namespace qsa::cli {

namespace {

// Seed streams. Each consumer of randomness draws from its own child of the
// run seed so that adding states never changes the channel and so on.
constexpr std::uint64_t kStateStream = 1;
constexpr std::uint64_t kOptimizerStream = 2;
constexpr std::uint64_t kPsiStream = 3;
constexpr std::uint64_t kBasisStream = 4;

const std::map<std::string, Command> kCommands{{"smin", Command::smin},         {"hhat", Command::hhat},
                                               {"lemma", Command::lemma},       {"superadd", Command::superadd},
                                               {"additivity", Command::additivity}, {"sweep", Command::sweep}};
const std::map<std::string, PsiKind> kPsiKinds{
    {"depolarizing", PsiKind::depolarizing}, {"random_kraus", PsiKind::random_kraus}, {"identity", PsiKind::identity}};
const std::map<std::string, OutputFormat> kFormats{
    {"table", OutputFormat::table}, {"json", OutputFormat::json}, {"csv", OutputFormat::csv}};
const std::map<std::string, LogBase> kBases{{"e", LogBase::e}, {"2", LogBase::two}};

template <typename E>
std::string name_of(const std::map<std::string, E>& names, E value) {
  for (const auto& [k, v] : names) {
    if (v == value) return k;
  }
  return "?";
}

std::string fmt12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", round_sig12(x));
  return buf;
}

// Cells keep their type until formatting so json and csv agree.
using Cell = std::variant<std::uint64_t, double, std::string, bool>;
using Row = std::vector<Cell>;

std::string cell_text(const Cell& c) {
  if (const auto* u = std::get_if<std::uint64_t>(&c)) return std::to_string(*u);
  if (const auto* x = std::get_if<double>(&c)) return fmt12(*x);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return std::get<bool>(c) ? "true" : "false";
}

struct Report {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  json details = json::array();
  std::size_t violations = 0;
  std::size_t unconverged = 0;
};

template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, Fn&& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::string max_p_text(std::size_t d) {
  const std::size_t d2 = d * d;
  return std::to_string(d2) + "/" + std::to_string(d2 - 1);
}

void check_p(const char* field, double p, std::size_t d) {
  if (!(p >= 0.0)) {
    throw InvalidConfig(std::string(field) + ": must be >= 0, got " + fmt12(p));
  }
  if (p > DepolarizingParams::max_p(d) + 1e-12) {
    throw InvalidConfig(std::string(field) + ": " + fmt12(p) + " exceeds d^2/(d^2-1) = " + max_p_text(d) +
                        " for d = " + std::to_string(d));
  }
}

std::size_t effective_jobs(std::size_t jobs) {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

DensityMatrix state_for(const RunConfig& cfg, std::size_t dim, std::size_t i) {
  return random_density(dim, dim, derive_seed(derive_seed(cfg.optimizer.seed, kStateStream), i));
}

std::uint64_t state_seed(const RunConfig& cfg, std::size_t i) {
  return derive_seed(derive_seed(cfg.optimizer.seed, kStateStream), i).value;
}

OptimizerConfig optimizer_for(const RunConfig& cfg, std::size_t i) {
  OptimizerConfig c = cfg.optimizer;
  c.seed = derive_seed(derive_seed(cfg.optimizer.seed, kOptimizerStream), i);
  return c;
}

Channel make_psi(const RunConfig& cfg) {
  switch (cfg.psi_kind) {
    case PsiKind::identity:
      return Channel::identity(cfg.d_k);
    case PsiKind::depolarizing:
      return depolarizing_channel({cfg.d_k, cfg.psi_p});
    case PsiKind::random_kraus:
      return random_kraus_channel(cfg.d_k, cfg.psi_env == 0 ? cfg.d_k : cfg.psi_env,
                                  derive_seed(cfg.optimizer.seed, kPsiStream));
  }
  return Channel::identity(cfg.d_k);
}

double psi_param(const RunConfig& cfg) {
  switch (cfg.psi_kind) {
    case PsiKind::depolarizing:
      return cfg.psi_p;
    case PsiKind::random_kraus:
      return static_cast<double>(cfg.psi_env == 0 ? cfg.d_k : cfg.psi_env);
    case PsiKind::identity:
      break;
  }
  return 0.0;
}

Report run_smin(const RunConfig& cfg) {
  const double tol = tol::kOptimizedMargin;
  const DepolarizingParams params{cfg.d, cfg.p};
  const OptResult numeric = s_min_numeric(depolarizing_channel(params), optimizer_for(cfg, 0));
  const double closed = s_min_dep_closed(params);
  const double diff = numeric.value - closed;
  const LogBase b = cfg.log_base;

  Report r;
  r.columns = {"d", "p", "seed", "closed", "numeric", "diff", "converged"};
  r.rows.push_back({std::uint64_t{cfg.d}, cfg.p, cfg.optimizer.seed.value, to_log_base(closed, b),
                    to_log_base(numeric.value, b), to_log_base(diff, b), numeric.converged});
  r.details.push_back(json{{"closed", round_sig12(to_log_base(closed, b))},
                           {"numeric", to_json(numeric, b)},
                           {"diff", round_sig12(to_log_base(diff, b))}});
  r.violations = std::abs(diff) > tol ? 1 : 0;
  r.unconverged = numeric.converged ? 0 : 1;
  return r;
}

Report run_hhat(const RunConfig& cfg) {
  const double tol = tol::kOptimizedMargin;
  const DepolarizingParams params{cfg.d, cfg.p};
  const Channel dep = depolarizing_channel(params);
  const double closed = h_hat_dep_closed(params);
  const auto results = parallel_map<OptResult>(cfg.n_states, effective_jobs(cfg.jobs), [&](std::size_t i) {
    return h_hat_numeric(dep, state_for(cfg, cfg.d, i), optimizer_for(cfg, i));
  });
  const LogBase b = cfg.log_base;

  Report r;
  r.columns = {"d", "p", "seed", "closed", "numeric", "diff", "converged"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    const double diff = results[i].value - closed;
    r.rows.push_back({std::uint64_t{cfg.d}, cfg.p, state_seed(cfg, i), to_log_base(closed, b),
                      to_log_base(results[i].value, b), to_log_base(diff, b), results[i].converged});
    r.details.push_back(json{{"seed", state_seed(cfg, i)},
                             {"closed", round_sig12(to_log_base(closed, b))},
                             {"numeric", to_json(results[i], b)},
                             {"diff", round_sig12(to_log_base(diff, b))}});
    if (std::abs(diff) > tol) ++r.violations;
    if (!results[i].converged) ++r.unconverged;
  }
  return r;
}

Report run_lemma(const RunConfig& cfg) {
  const DepolarizingParams params{cfg.d, cfg.p};
  const BipartiteDims dims(cfg.d, cfg.d_k);
  const Channel psi = make_psi(cfg);
  const auto results =
      parallel_map<std::vector<LemmaReport>>(cfg.n_states, effective_jobs(cfg.jobs), [&](std::size_t i) {
        return verify_lemma_instance(state_for(cfg, dims.total(), i), dims, psi, params, cfg.n_bases,
                                     derive_seed(derive_seed(cfg.optimizer.seed, kBasisStream), i));
      });
  const LogBase b = cfg.log_base;
  const std::string kind = name_of(kPsiKinds, cfg.psi_kind);

  Report r;
  r.columns = {"d", "d_k", "p", "psi_kind", "psi_param", "seed", "basis", "lhs", "bound", "margin", "marginal_check"};
  for (std::size_t i = 0; i < results.size(); ++i) {
    json bases = json::array();
    for (std::size_t k = 0; k < results[i].size(); ++k) {
      const LemmaReport& rep = results[i][k];
      r.rows.push_back({std::uint64_t{cfg.d}, std::uint64_t{cfg.d_k}, cfg.p, kind, psi_param(cfg),
                        state_seed(cfg, i), std::uint64_t{k}, to_log_base(rep.lhs, b), to_log_base(rep.bound, b),
                        to_log_base(rep.margin, b), rep.marginal_check});
      bases.push_back(to_json(rep, b));
      if (rep.margin < -tol::kExactMargin || rep.marginal_check > 1e-10) ++r.violations;
    }
    r.details.push_back(json{{"seed", state_seed(cfg, i)}, {"bases", std::move(bases)}});
  }
  return r;
}

Report superadd_rows(const RunConfig& cfg, const std::vector<double>& ps) {
  const BipartiteDims dims(cfg.d, cfg.d_k);
  const Channel psi = make_psi(cfg);
  const std::size_t n = ps.size() * cfg.n_states;
  // Grid index g = point * n_states + state, so results come back sorted by
  // (p, state) whatever order the workers finish in.
  const auto results = parallel_map<SuperaddReport>(n, effective_jobs(cfg.jobs), [&](std::size_t g) {
    const double p = ps[g / cfg.n_states];
    const std::size_t i = g % cfg.n_states;
    return strong_superadd_check(psi, state_for(cfg, dims.total(), i), dims, {cfg.d, p}, optimizer_for(cfg, g));
  });
  const LogBase b = cfg.log_base;
  const std::string kind = name_of(kPsiKinds, cfg.psi_kind);

  Report r;
  r.columns = {"d", "d_k", "p", "psi_kind", "psi_param", "seed", "lhs", "rhs_dep", "rhs_psi", "margin", "converged"};
  for (std::size_t g = 0; g < n; ++g) {
    const SuperaddReport& rep = results[g];
    const double p = ps[g / cfg.n_states];
    const std::uint64_t seed = state_seed(cfg, g % cfg.n_states);
    const bool converged = rep.lhs_converged && rep.rhs_psi_converged;
    r.rows.push_back({std::uint64_t{cfg.d}, std::uint64_t{cfg.d_k}, p, kind, psi_param(cfg), seed,
                      to_log_base(rep.lhs, b), to_log_base(rep.rhs_dep, b), to_log_base(rep.rhs_psi, b),
                      to_log_base(rep.margin, b), converged});
    json entry = to_json(rep, b);
    entry["p"] = p;
    entry["seed"] = seed;
    r.details.push_back(std::move(entry));
    if (!rep.consistent()) ++r.violations;
    if (!converged) ++r.unconverged;
  }
  return r;
}

Report run_additivity(const RunConfig& cfg) {
  const AdditivityReport rep =
      smin_additivity_check(make_psi(cfg), {cfg.d, cfg.p}, optimizer_for(cfg, 0));
  const LogBase b = cfg.log_base;

  Report r;
  r.columns = {"d", "d_k", "p", "psi_kind", "psi_param", "seed", "joint", "sum", "gap", "converged"};
  r.rows.push_back({std::uint64_t{cfg.d}, std::uint64_t{cfg.d_k}, cfg.p, name_of(kPsiKinds, cfg.psi_kind),
                    psi_param(cfg), cfg.optimizer.seed.value, to_log_base(rep.joint, b), to_log_base(rep.sum, b),
                    to_log_base(rep.gap, b), rep.converged});
  r.details.push_back(to_json(rep, b));
  r.violations = std::abs(rep.gap) > tol::kOptimizedMargin ? 1 : 0;
  r.unconverged = rep.converged ? 0 : 1;
  return r;
}

json config_json(const RunConfig& cfg) {
  json grid = json::array();
  for (double p : cfg.p_grid) grid.push_back(p);
  return json{{"command", name_of(kCommands, cfg.command)},
              {"d", cfg.d},
              {"d_k", cfg.d_k},
              {"p", cfg.p},
              {"p_grid", std::move(grid)},
              {"psi_kind", name_of(kPsiKinds, cfg.psi_kind)},
              {"psi_param", psi_param(cfg)},
              {"n_states", cfg.n_states},
              {"n_bases", cfg.n_bases},
              {"restarts", cfg.optimizer.restarts},
              {"max_iters", cfg.optimizer.max_iters},
              {"value_tol", cfg.optimizer.value_tol},
              {"step_tol", cfg.optimizer.step_tol},
              {"ensemble_cap", cfg.optimizer.ensemble_cap},
              {"seed", cfg.optimizer.seed.value},
              {"log_base", name_of(kBases, cfg.log_base)}};
}

void write_table(const Report& r, std::ostream& out) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(r.columns.size());
  for (std::size_t c = 0; c < r.columns.size(); ++c) width[c] = r.columns[c].size();
  for (const auto& row : r.rows) {
    auto& text = cells.emplace_back();
    for (std::size_t c = 0; c < row.size(); ++c) {
      text.push_back(cell_text(row[c]));
      width[c] = std::max(width[c], text.back().size());
    }
  }
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c > 0) out << "  ";
      out << fields[c] << std::string(width[c] - fields[c].size(), ' ');
    }
    out << '\n';
  };
  line(r.columns);
  for (const auto& text : cells) line(text);
  out << "violations: " << r.violations << "  unconverged: " << r.unconverged << '\n';
}

void write_csv(const Report& r, std::ostream& out) {
  for (std::size_t c = 0; c < r.columns.size(); ++c) out << (c ? "," : "") << r.columns[c];
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
    out << '\n';
  }
}

void write_json(const RunConfig& cfg, const Report& r, int exit_code, std::ostream& out) {
  json doc{{"config", config_json(cfg)},
           {"results", r.details},
           {"summary", {{"violations", r.violations}, {"unconverged", r.unconverged}, {"exit_code", exit_code}}}};
  out << doc.dump(2) << '\n';
}

template <typename E>
CLI::Option* add_choice(CLI::App& app, const std::string& flag, std::string& target,
                        const std::map<std::string, E>& names, const std::string& help) {
  std::vector<std::string> keys;
  for (const auto& kv : names) keys.push_back(kv.first);
  return app.add_option(flag, target, help)->check(CLI::IsMember(keys))->capture_default_str();
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidConfig("p-grid: '" + item + "' is not a number");
    }
  }
  if (parts.size() != 3) throw InvalidConfig("p-grid: expected start:stop:step");
  const double start = parts[0];
  const double stop = parts[1];
  const double step = parts[2];
  if (!(step > 0.0)) throw InvalidConfig("p-grid: step must be > 0");
  if (stop < start) throw InvalidConfig("p-grid: stop must be >= start");
  std::vector<double> grid;
  // Points are start + i * step so that rounding does not accumulate.
  for (std::size_t i = 0;; ++i) {
    const double p = start + static_cast<double>(i) * step;
    if (p > stop + 1e-9 * step) break;
    grid.push_back(round_sig12(p));
  }
  return grid;
}

void validate(const RunConfig& cfg) {
  if (cfg.d < 2) throw InvalidConfig("d: must be >= 2");
  if (cfg.d_k < 1) throw InvalidConfig("dk: must be >= 1");
  check_p("p", cfg.p, cfg.d);
  for (double p : cfg.p_grid) check_p("p-grid", p, cfg.d);
  if (cfg.psi_kind == PsiKind::depolarizing) {
    if (cfg.d_k < 2) throw InvalidConfig("dk: a depolarizing psi needs dk >= 2");
    check_p("psi-p", cfg.psi_p, cfg.d_k);
  }
  if (cfg.n_states < 1) throw InvalidConfig("n-states: must be >= 1");
  if (cfg.n_bases < 1) throw InvalidConfig("n-bases: must be >= 1");
  cfg.optimizer.validate();
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Numerical checks of output-entropy additivity for the depolarizing channel", "qsa"};
  app.set_config("--config", "", "key = value file; command-line flags take precedence");
  app.allow_config_extras(false);
  app.get_formatter()->column_width(34);

  RunConfig cfg;
  std::string command;
  std::string psi = "depolarizing";
  std::string format = "table";
  std::string log_base = "e";
  std::string p_grid;
  std::uint64_t seed = 0;

  std::vector<std::string> names;
  for (const auto& kv : kCommands) names.push_back(kv.first);
  app.add_option("command", command, "smin | hhat | lemma | superadd | additivity | sweep")
      ->required()
      ->check(CLI::IsMember(names));
  app.add_option("--d", cfg.d, "dimension of H, the depolarized factor")->capture_default_str();
  app.add_option("--dk", cfg.d_k, "dimension of K, the factor Psi acts on")->capture_default_str();
  app.add_option("--p", cfg.p, "depolarizing parameter, 0 <= p <= d^2/(d^2-1)")->capture_default_str();
  app.add_option("--p-grid", p_grid, "sweep points start:stop:step");
  add_choice(app, "--psi", psi, kPsiKinds, "channel Psi on K");
  app.add_option("--psi-p", cfg.psi_p, "parameter of a depolarizing Psi")->capture_default_str();
  app.add_option("--psi-env", cfg.psi_env, "environment dimension of a random_kraus Psi (0: dk)")
      ->capture_default_str();
  app.add_option("--n-states", cfg.n_states, "random states per grid point")->capture_default_str();
  app.add_option("--n-bases", cfg.n_bases, "balanced bases per state (lemma)")->capture_default_str();
  app.add_option("--restarts", cfg.optimizer.restarts, "optimizer restarts")->capture_default_str();
  app.add_option("--max-iters", cfg.optimizer.max_iters, "iterations per restart")->capture_default_str();
  app.add_option("--value-tol", cfg.optimizer.value_tol, "agreement needed between the best two restarts")
      ->capture_default_str();
  app.add_option("--step-tol", cfg.optimizer.step_tol, "smallest accepted step")->capture_default_str();
  app.add_option("--ensemble-cap", cfg.optimizer.ensemble_cap, "ensemble size (0: dim^2)")->capture_default_str();
  app.add_option("--seed", seed, "run seed")->envname("QSA_SEED")->capture_default_str();
  add_choice(app, "--log-base", log_base, kBases, "unit of reported entropies");
  add_choice(app, "--format", format, kFormats, "output format");
  app.add_option("--output", cfg.output_path, "write the report here instead of stdout");
  app.add_option("--jobs", cfg.jobs, "worker threads (0: available parallelism)")->capture_default_str();

  if (args.empty()) throw UsageRequest{app.help(), false};

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageRequest{app.help(), true};
  } catch (const CLI::ParseError& e) {
    throw InvalidConfig(e.what());
  }

  cfg.command = kCommands.at(command);
  cfg.psi_kind = kPsiKinds.at(psi);
  cfg.format = kFormats.at(format);
  cfg.log_base = kBases.at(log_base);
  cfg.optimizer.seed = RngSeed{seed};
  if (!p_grid.empty()) cfg.p_grid = parse_grid(p_grid);
  if (cfg.command == Command::sweep && cfg.p_grid.empty()) {
    throw InvalidConfig("p-grid: sweep needs --p-grid start:stop:step");
  }
  validate(cfg);
  return cfg;
}

RunResult run(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  Report report;
  switch (cfg.command) {
    case Command::smin:
      report = run_smin(cfg);
      break;
    case Command::hhat:
      report = run_hhat(cfg);
      break;
    case Command::lemma:
      report = run_lemma(cfg);
      break;
    case Command::superadd:
      report = superadd_rows(cfg, {cfg.p});
      break;
    case Command::additivity:
      report = run_additivity(cfg);
      break;
    case Command::sweep:
      report = superadd_rows(cfg, cfg.p_grid);
      break;
  }

  RunResult result;
  result.violations = report.violations;
  result.unconverged = report.unconverged;
  result.exit_code = (report.violations == 0 && report.unconverged == 0) ? 0 : 2;

  switch (cfg.format) {
    case OutputFormat::table:
      write_table(report, out);
      break;
    case OutputFormat::csv:
      write_csv(report, out);
      break;
    case OutputFormat::json:
      write_json(cfg, report, result.exit_code, out);
      break;
  }
  return result;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const UsageRequest& u) {
    (u.explicit_help ? out : err) << u.text;
    return u.explicit_help ? 0 : 1;
  } catch (const InvalidConfig& e) {
    err << "ConfigInvalid: " << e.what() << '\n';
    return 1;
  }

  try {
    RunResult result;
    if (cfg.output_path.empty()) {
      result = run(cfg, out);
    } else {
      std::ofstream file(cfg.output_path, std::ios::binary);
      if (!file) {
        err << "cannot open " << cfg.output_path << " for writing\n";
        return 1;
      }
      result = run(cfg, file);
    }
    if (result.violations > 0) err << result.violations << " margin violation(s)\n";
    if (result.unconverged > 0) err << result.unconverged << " optimization(s) did not converge\n";
    return result.exit_code;
  } catch (const InvalidConfig& e) {
    err << "ConfigInvalid: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qsa::cli
