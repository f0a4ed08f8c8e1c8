#include "qdl/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdl/channels.hpp"
#include "qdl/concurrence.hpp"
#include "qdl/io.hpp"
#include "qdl/scan.hpp"
#include "qdl/types.hpp"
#include "qdl/validate.hpp"

namespace qdl::cli {
namespace {

struct RunConfig {
  std::string channel;
  std::string state;
  double gamma{1.0};
  double lambda{1.0};
  double delta{0.0};
  double omega_c{0.0};
  // qubit B overrides; NaN means "same as qubit A"
  double gamma_b{std::nan("")};
  double lambda_b{std::nan("")};
  double delta_b{std::nan("")};
  double omega_c_b{std::nan("")};

  double t_max{50.0};
  std::size_t n_points{2000};
  std::string out{"-"};
  std::string format{"csv"};
  std::string svg;

  std::string axis;
  double axis_min{0.01};
  double axis_max{10.0};
  std::size_t axis_points{20};
  std::string axis_scale{"log"};
  std::string summary_out;

  double dt{0.0};  // oracle step override for validate
  double eps{1e-9};
  double stationary_band{0.01};
  double peak_ratio{0.5};
  unsigned jobs{1};

  // which keys came from the config file or the command line
  std::set<std::string> provided;
  bool given(const std::string& key) const { return provided.count(key) > 0; }
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::invalid_spec:
    case Errc::unknown_preset:
    case Errc::not_hermitian:
    case Errc::trace_not_one:
    case Errc::not_positive:
    case Errc::tabulation_out_of_range:
      return 2;
    default:
      return 3;
  }
}

unsigned env_jobs() {
  if (const char* v = std::getenv("QDL_JOBS")) {
    const long n = std::strtol(v, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return 1;
}

// Config file values seed the defaults; command-line flags override them.
void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::invalid_spec, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::invalid_spec, std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(Errc::invalid_spec, "config file must hold a JSON object");

  const auto str = [&](const char* key, std::string& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::string>();
  };
  const auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = j.at(key).get<double>();
  };
  const auto idx = [&](const char* key, std::size_t& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::size_t>();
  };
  static const std::vector<std::string> known = {
      "channel", "state", "gamma", "lambda", "delta", "omega_c", "gamma_b", "lambda_b",
      "delta_b", "omega_c_b", "t_max", "n_points", "out", "format", "svg", "axis",
      "axis_min", "axis_max", "axis_points", "axis_scale", "summary_out", "dt", "eps",
      "stationary_band", "peak_ratio", "jobs"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw Error(Errc::invalid_spec, "unknown config key '" + key + "'");
    cfg.provided.insert(key);
  }

  str("channel", cfg.channel);
  str("state", cfg.state);
  num("gamma", cfg.gamma);
  num("lambda", cfg.lambda);
  num("delta", cfg.delta);
  num("omega_c", cfg.omega_c);
  num("gamma_b", cfg.gamma_b);
  num("lambda_b", cfg.lambda_b);
  num("delta_b", cfg.delta_b);
  num("omega_c_b", cfg.omega_c_b);
  num("t_max", cfg.t_max);
  idx("n_points", cfg.n_points);
  str("out", cfg.out);
  str("format", cfg.format);
  str("svg", cfg.svg);
  str("axis", cfg.axis);
  num("axis_min", cfg.axis_min);
  num("axis_max", cfg.axis_max);
  idx("axis_points", cfg.axis_points);
  str("axis_scale", cfg.axis_scale);
  str("summary_out", cfg.summary_out);
  num("dt", cfg.dt);
  num("eps", cfg.eps);
  num("stationary_band", cfg.stationary_band);
  num("peak_ratio", cfg.peak_ratio);
  if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<unsigned>();
}

DensityMatrix<double> load_state(const std::string& name) {
  if (name.empty()) throw Error(Errc::invalid_spec, "missing --state");
  const auto& names = preset_names();
  if (std::find(names.begin(), names.end(), name) != names.end())
    return preset_state<double>(name);
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json")
    return io::read_density_json(name);
  throw Error(Errc::unknown_preset, "state '" + name + "' is neither a preset nor a .json file");
}

ChannelKind parse_channel(const std::string& s) {
  if (s == "ad") return ChannelKind::ad;
  if (s == "pd") return ChannelKind::pd;
  if (s.empty()) throw Error(Errc::invalid_spec, "missing --channel");
  throw Error(Errc::invalid_spec, "channel must be 'ad' or 'pd'");
}

void require_channel_params(const RunConfig& cfg, ChannelKind kind) {
  if (kind == ChannelKind::ad && (cfg.given("omega_c") || cfg.given("omega_c_b")))
    throw Error(Errc::invalid_spec, "--omega-c applies to the pd channel");
  if (kind == ChannelKind::pd && (cfg.given("delta") || cfg.given("delta_b")))
    throw Error(Errc::invalid_spec, "--delta applies to the ad channel");
}

QubitPair<double> build_pair(const RunConfig& cfg) {
  const double gb = std::isnan(cfg.gamma_b) ? cfg.gamma : cfg.gamma_b;
  const double lb = std::isnan(cfg.lambda_b) ? cfg.lambda : cfg.lambda_b;
  if (parse_channel(cfg.channel) == ChannelKind::ad) {
    const double db = std::isnan(cfg.delta_b) ? cfg.delta : cfg.delta_b;
    return QubitPair<double>::ad({cfg.gamma, cfg.lambda, cfg.delta}, {gb, lb, db});
  }
  const double wb = std::isnan(cfg.omega_c_b) ? cfg.omega_c : cfg.omega_c_b;
  return QubitPair<double>::pd({cfg.gamma, cfg.lambda, cfg.omega_c}, {gb, lb, wb});
}

void with_output(const std::string& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(Errc::invalid_spec, "cannot open '" + path + "' for writing");
  body(f);
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  if (cfg.format != "csv" && cfg.format != "json")
    throw Error(Errc::invalid_spec, "format must be 'csv' or 'json'");
  if (!cfg.given("lambda")) throw Error(Errc::invalid_spec, "missing --lambda");
  require_channel_params(cfg, parse_channel(cfg.channel));
  const auto rho0 = load_state(cfg.state);
  const auto pair = build_pair(cfg);
  const TimeGrid<double> grid{cfg.t_max, cfg.n_points};
  const auto trace = evolve_trace(pair, rho0, grid, cfg.state);
  const auto rows = io::evolve_rows(trace);
  with_output(cfg.out, out, [&](std::ostream& os) {
    if (cfg.format == "csv")
      io::write_evolve_csv(os, rows);
    else
      os << io::evolve_to_json(rows).dump(2) << "\n";
  });
  if (!cfg.svg.empty())
    with_output(cfg.svg, out, [&](std::ostream& os) {
      io::write_trace_svg(os, trace, cfg.channel + " channel, state " + cfg.state);
    });
  return 0;
}

int cmd_scan(const RunConfig& cfg, std::ostream& out) {
  if (cfg.axis.empty()) throw Error(Errc::invalid_spec, "missing --axis");
  require_channel_params(cfg, parse_channel(cfg.channel));
  SweepSpec<double> spec{.channel = parse_channel(cfg.channel),
                         .rho0 = load_state(cfg.state),
                         .state_label = cfg.state};
  if (cfg.axis == "lambda")
    spec.axis = SweepAxis::lambda;
  else if (cfg.axis == "delta")
    spec.axis = SweepAxis::delta;
  else if (cfg.axis == "omega_c")
    spec.axis = SweepAxis::omega_c;
  else if (cfg.axis == "gamma")
    spec.axis = SweepAxis::gamma;
  else
    throw Error(Errc::invalid_spec, "axis must be one of lambda, delta, omega_c, gamma");

  const std::string axis_key = cfg.axis == "omega_c" ? "omega_c" : cfg.axis;
  if (cfg.given(axis_key))
    throw Error(Errc::invalid_spec, "axis parameter '" + cfg.axis + "' must not also be fixed");
  if (spec.axis != SweepAxis::lambda && !cfg.given("lambda"))
    throw Error(Errc::invalid_spec, "missing --lambda");

  spec.gamma = cfg.gamma;
  spec.lambda = cfg.lambda;
  spec.detuning = spec.channel == ChannelKind::ad ? cfg.delta : cfg.omega_c;
  spec.axis_min = cfg.axis_min;
  spec.axis_max = cfg.axis_max;
  spec.axis_points = cfg.axis_points;
  if (cfg.axis_scale != "log" && cfg.axis_scale != "linear")
    throw Error(Errc::invalid_spec, "axis scale must be 'log' or 'linear'");
  spec.log_axis = cfg.axis_scale == "log";
  spec.grid = TimeGrid<double>{cfg.t_max, cfg.n_points};

  const ClassifyOptions<double> opt{cfg.stationary_band, cfg.peak_ratio, cfg.eps};
  const auto surface = run_sweep(spec, cfg.jobs, opt);

  with_output(cfg.out, out, [&](std::ostream& os) { io::write_sweep_csv(os, cfg.axis, surface); });
  std::string summary = cfg.summary_out;
  if (summary.empty() && cfg.out != "-") {
    const auto dot = cfg.out.rfind('.');
    summary = dot == std::string::npos ? cfg.out + "_summary"
                                       : cfg.out.substr(0, dot) + "_summary" + cfg.out.substr(dot);
  }
  if (!summary.empty())
    with_output(summary, out,
                [&](std::ostream& os) { io::write_sweep_summary_csv(os, cfg.axis, surface); });
  return 0;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ValidationOptions opt;
  opt.dt_override = cfg.dt;
  opt.jobs = cfg.jobs;
  const auto cases = run_validation_suite(opt);
  std::size_t failed = 0;
  for (const auto& c : cases) {
    out << (c.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(44) << c.name
        << " value=" << io::format_double(c.value) << " tol=" << io::format_double(c.tol);
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << "\n";
    if (!c.pass) ++failed;
  }
  out << cases.size() - failed << "/" << cases.size() << " validation cases passed\n";
  if (failed) {
    for (const auto& c : cases)
      if (!c.pass) {
        err << "validation failed: " << c.name << "\n";
        break;
      }
    return 4;
  }
  return 0;
}

int cmd_presets(std::ostream& out) {
  out << "name,concurrence,purity,x_form\n";
  for (const auto& name : preset_names()) {
    const auto rho = preset_state<double>(name);
    out << name << ',' << io::format_double(concurrence(rho)) << ','
        << io::format_double(rho.purity()) << ',' << (is_x_form(rho, 1e-12) ? "yes" : "no")
        << '\n';
  }
  return 0;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  cfg.jobs = env_jobs();

  // The config file seeds defaults, so it is read before parsing.
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string value;
    if (args[i] == "--config" && i + 1 < args.size())
      value = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      value = args[i].substr(9);
    else
      continue;
    try {
      apply_config_file(value, cfg);
    } catch (const Error& e) {
      err << e.what() << "\n";
      return 2;
    }
    break;
  }

  CLI::App app{"two-qubit entanglement dynamics under local Lorentzian noise"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its values");

  // option key -> CLI option, for "was this provided" bookkeeping
  std::vector<std::pair<std::string, CLI::Option*>> tracked;
  const auto track = [&](const std::string& key, CLI::Option* opt) { tracked.emplace_back(key, opt); };

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override its values");
    track("state", sub->add_option("--state", cfg.state,
                                   "preset (x1, x2, bell_phi_plus, bell_psi_plus) or a "
                                   "density-matrix .json file"));
    track("channel", sub->add_option("--channel", cfg.channel, "noise channel: ad or pd"));
    track("gamma", sub->add_option("--gamma", cfg.gamma, "qubit decay rate (time unit), default 1"));
    track("delta", sub->add_option("--delta", cfg.delta, "ad detuning, units of gamma"));
    track("omega_c", sub->add_option("--omega-c", cfg.omega_c, "pd central frequency, units of gamma"));
    track("t_max", sub->add_option("--t-max", cfg.t_max, "trace length, units of 1/gamma"));
    track("n_points", sub->add_option("--n-points", cfg.n_points, "samples on the time grid"));
    track("jobs", sub->add_option("--jobs", cfg.jobs, "worker cap (env QDL_JOBS)"));
    track("eps", sub->add_option("--eps", cfg.eps, "concurrence floor for death/revival detection"));
    track("stationary_band",
          sub->add_option("--stationary-band", cfg.stationary_band,
                          "peak-to-peak variation relative to C(0) counted as stationary"));
    track("peak_ratio",
          sub->add_option("--peak-ratio", cfg.peak_ratio,
                          "last/first peak ratio separating persistent from damped oscillation"));
  };

  auto* evolve = app.add_subcommand("evolve", "single concurrence trace");
  add_common(evolve);
  track("lambda", evolve->add_option("--lambda", cfg.lambda, "coupling bandwidth"));
  track("gamma_b", evolve->add_option("--gamma-b", cfg.gamma_b, "qubit B decay rate"));
  track("lambda_b", evolve->add_option("--lambda-b", cfg.lambda_b, "qubit B bandwidth"));
  track("delta_b", evolve->add_option("--delta-b", cfg.delta_b, "qubit B detuning"));
  track("omega_c_b", evolve->add_option("--omega-c-b", cfg.omega_c_b, "qubit B central frequency"));
  track("out", evolve->add_option("--out", cfg.out, "output path, '-' for stdout"));
  track("format", evolve->add_option("--format", cfg.format, "csv or json"));
  track("svg", evolve->add_option("--svg", cfg.svg, "also write a minimal SVG line chart here"));

  auto* scan = app.add_subcommand("scan", "sweep one parameter, emit traces and a summary");
  add_common(scan);
  track("lambda", scan->add_option("--lambda", cfg.lambda, "fixed coupling bandwidth"));
  track("axis", scan->add_option("--axis", cfg.axis, "swept parameter: lambda, delta, omega_c or gamma"));
  track("axis_min", scan->add_option("--axis-min", cfg.axis_min, "axis start"));
  track("axis_max", scan->add_option("--axis-max", cfg.axis_max, "axis end"));
  track("axis_points", scan->add_option("--axis-points", cfg.axis_points, "axis rows (>= 2)"));
  track("axis_scale", scan->add_option("--axis-scale", cfg.axis_scale, "log or linear"));
  track("summary_out", scan->add_option("--summary-out", cfg.summary_out,
                                        "summary CSV path (defaults to <out>_summary.csv)"));
  track("out", scan->add_option("--out", cfg.out, "long-format CSV path, '-' for stdout"));

  auto* validate = app.add_subcommand("validate", "oracle vs closed-form suite");
  validate->add_option("--config", config_path, "JSON config file; flags override its values");
  track("dt", validate->add_option("--dt", cfg.dt, "override the oracle step"));
  track("jobs", validate->add_option("--jobs", cfg.jobs, "worker cap (env QDL_JOBS)"));

  auto* presets = app.add_subcommand("presets", "list built-in initial states");
  (void)presets;

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }
  for (const auto& [key, opt] : tracked)
    if (opt->count() > 0) cfg.provided.insert(key);

  try {
    if (app.got_subcommand(evolve)) return cmd_evolve(cfg, out);
    if (app.got_subcommand(scan)) return cmd_scan(cfg, out);
    if (app.got_subcommand(validate)) return cmd_validate(cfg, out, err);
    if (app.got_subcommand(presets)) return cmd_presets(out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace qdl::cli
