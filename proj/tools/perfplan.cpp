// perfplan: speedup modeling, strong-scaling fits and cluster capacity
// planning from the command line.
//
// Exit codes: 0 success, 1 input or parse error, 2 domain error
// (insufficient data, degenerate fit, infeasible plan).

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "perfplan/capacity.hpp"
#include "perfplan/errors.hpp"
#include "perfplan/fitting.hpp"
#include "perfplan/io/config_files.hpp"
#include "perfplan/io/csv.hpp"
#include "perfplan/io/report.hpp"
#include "perfplan/io/svg.hpp"
#include "perfplan/io/units.hpp"
#include "perfplan/scaling.hpp"
#include "perfplan/synthetic.hpp"

namespace {

using perfplan::ClusterNodeSpec;
using perfplan::MemoryModel;
using perfplan::ParseError;
using perfplan::ScalingParams;
using perfplan::SpeedupModel;
using perfplan::io::ReportDocument;

// ---------------------------------------------------------------------------
// plumbing

class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ParseError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish() {
    if (file_.is_open()) {
      file_.flush();
      if (!file_) throw ParseError("failed writing output file");
    }
  }

 private:
  std::ofstream file_;
};

void print_report(const ReportDocument& report, const std::string& format,
                  std::ostream& out) {
  if (format == "json") {
    out << report.to_json().dump(2) << '\n';
  } else if (format == "csv") {
    report.render_csv(out);
  } else {
    report.render_text(out);
  }
}

std::int64_t parse_integer(std::string_view text, std::string_view what) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ParseError("cannot parse " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::int64_t> parse_integer_list(const std::string& text, std::string_view what) {
  std::vector<std::int64_t> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(parse_integer(item, what));
  if (values.empty()) throw ParseError(std::string(what) + " list is empty");
  return values;
}

ClusterNodeSpec load_spec(const std::string& path) {
  return path.empty() ? perfplan::reference_node_spec()
                      : perfplan::io::read_cluster_spec_file(path);
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string input;
  std::int64_t cores_per_node = 0;
  double threshold_k = 3.0;
  std::string format = "text";
  std::string output;
};

void run_fit(const FitArgs& args) {
  const auto observations = perfplan::io::read_timings_csv_file(args.input);
  const auto fit = perfplan::fit_extended<double>(observations, args.cores_per_node);
  const auto outliers = perfplan::detect_outliers<double>(observations, fit, args.threshold_k);
  const auto n_star = perfplan::optimal_node_count(fit.params);
  const double asymptote = perfplan::asymptotic_speedup(fit.params.serial_fraction);

  ReportDocument report;
  report.title = "extended scaling model fit";

  auto& input = report.add_section("input");
  input.add("source", args.input);
  input.add("observations", static_cast<std::int64_t>(observations.size()));
  input.add("censored", static_cast<std::int64_t>(observations.size() - fit.residuals.size()));

  auto& params = report.add_section("parameters");
  params.add("serial_fraction", fit.params.serial_fraction);
  params.add("comm_idle_fraction", fit.params.comm_idle_fraction);
  params.add("cores_per_node", fit.params.cores_per_node);
  params.add("baseline_time_hours", *fit.params.baseline_time_hours, "h");

  auto& derived = report.add_section("derived");
  if (n_star) {
    derived.add("optimal_node_count", *n_star);
  } else {
    derived.add("optimal_node_count", std::string("no finite optimum"));
  }
  if (std::isfinite(asymptote)) {
    derived.add("asymptotic_speedup", asymptote);
  } else {
    derived.add("asymptotic_speedup", std::string("unbounded"));
  }
  derived.add("rms_relative_error", fit.rms_relative_error);

  auto& residuals = report.add_section("residuals");
  for (const auto& r : fit.residuals) {
    residuals.add("N=" + std::to_string(r.n_units), r.relative);
  }

  auto& flagged = report.add_section("outliers");
  flagged.add("count", static_cast<std::int64_t>(outliers.size()));
  for (std::int64_t n : outliers) flagged.add("n_units", n);

  report.notes.push_back("residuals are relative: (model - observed)/observed");
  report.notes.push_back("outliers: censored runs plus |residual| > k * median(|residual|), k = " +
                         perfplan::io::format_double(args.threshold_k));

  OutputSink sink(args.output);
  print_report(report, args.format, sink.stream());
  sink.finish();
}

// ---------------------------------------------------------------------------
// curve

struct CurveArgs {
  std::vector<std::string> sets;
  std::vector<std::string> from_fit;
  std::string n_values;
  std::string n_range;
  std::string n_pow2;
  std::string model = "extended";
  bool normalized = false;
  std::string emit = "csv";
  bool log_x = false;
  std::string title;
  std::string output;
};

struct CurveSet {
  std::string label;
  ScalingParams<double> params;
};

CurveSet parse_set(const std::string& text) {
  CurveSet set;
  set.params.cores_per_node = 32;
  std::stringstream stream(text);
  std::string item;
  bool have_s = false;
  while (std::getline(stream, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("set entry '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "s" || key == "serial_fraction") {
      set.params.serial_fraction = perfplan::io::parse_fraction(value);
      have_s = true;
    } else if (key == "c" || key == "comm_idle_fraction") {
      set.params.comm_idle_fraction = perfplan::io::parse_fraction(value);
    } else if (key == "nc" || key == "cores_per_node") {
      set.params.cores_per_node = parse_integer(value, "cores_per_node");
    } else if (key == "t1" || key == "baseline_time_hours") {
      double t1 = 0;
      const auto* end = value.data() + value.size();
      if (auto [p, ec] = std::from_chars(value.data(), end, t1); ec != std::errc{} || p != end) {
        throw ParseError("cannot parse baseline_time_hours: '" + value + "'");
      }
      set.params.baseline_time_hours = t1;
    } else if (key == "label") {
      set.label = value;
    } else {
      throw ParseError("unknown set key '" + key + "'");
    }
  }
  if (!have_s) throw ParseError("set '" + text + "' is missing s=<serial fraction>");
  if (set.label.empty()) {
    set.label = "S=" + perfplan::io::format_double(set.params.serial_fraction) +
                " C=" + perfplan::io::format_double(set.params.comm_idle_fraction);
  }
  set.params.validate();
  return set;
}

std::vector<std::int64_t> build_n_values(const CurveArgs& args) {
  const int chosen = int(!args.n_values.empty()) + int(!args.n_range.empty()) +
                     int(!args.n_pow2.empty());
  if (chosen != 1) {
    throw ParseError("exactly one of --n-values, --n-range, --n-pow2 is required");
  }
  if (!args.n_values.empty()) return parse_integer_list(args.n_values, "n");

  const std::string& range = args.n_range.empty() ? args.n_pow2 : args.n_range;
  std::vector<std::int64_t> bounds;
  std::stringstream stream(range);
  std::string item;
  while (std::getline(stream, item, ':')) bounds.push_back(parse_integer(item, "n range"));
  if (bounds.size() < 2 || bounds.size() > 3) {
    throw ParseError("range must be start:end or start:end:step");
  }
  const std::int64_t start = bounds[0];
  const std::int64_t end = bounds[1];
  if (start < 1 || end < start) throw ParseError("empty n range");

  std::vector<std::int64_t> values;
  if (!args.n_pow2.empty()) {
    if (bounds.size() == 3) throw ParseError("--n-pow2 takes start:end without a step");
    for (std::int64_t n = 1; n <= end; n <<= 1) {
      if (n >= start) values.push_back(n);
    }
  } else {
    const std::int64_t step = bounds.size() == 3 ? bounds[2] : 1;
    if (step < 1) throw ParseError("range step must be >= 1");
    for (std::int64_t n = start; n <= end; n += step) values.push_back(n);
  }
  if (values.empty()) throw ParseError("empty n range");
  return values;
}

void run_curve(const CurveArgs& args) {
  std::vector<CurveSet> sets;
  for (const auto& path : args.from_fit) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path + ": " + e.what());
    }
    CurveSet set;
    set.params = perfplan::io::params_from_fit_json(doc, path);
    set.label = std::filesystem::path(path).stem().string();
    sets.push_back(std::move(set));
  }
  for (const auto& text : args.sets) sets.push_back(parse_set(text));
  if (sets.empty()) throw ParseError("at least one --set or --from-fit is required");

  const auto n_values = build_n_values(args);
  const SpeedupModel model =
      args.model == "classical" ? SpeedupModel::kClassical : SpeedupModel::kExtended;

  std::vector<perfplan::io::CurveSeries> series;
  for (const auto& set : sets) {
    series.push_back({set.label, perfplan::sample_curve<double>(set.params, n_values, model,
                                                                args.normalized)});
  }

  OutputSink sink(args.output);
  if (args.emit == "svg") {
    perfplan::io::SvgOptions options;
    options.log2_x = args.log_x;
    options.title = args.title;
    options.y_label = args.normalized ? "normalized speedup" : "speedup";
    perfplan::io::write_curve_svg(sink.stream(), series, options);
  } else {
    if (series.size() != 1) {
      throw ParseError("csv emit supports exactly one parameter set; use --emit svg to compare");
    }
    perfplan::io::write_curve_csv(sink.stream(), series[0].points);
  }
  sink.finish();
}

// ---------------------------------------------------------------------------
// plan-qubits

struct PlanArgs {
  std::string spec_file;
  std::int64_t nodes = 0;
  int qubits = 0;
  std::uint64_t bytes_per_amplitude = 16;
  double buffer_factor = 0;  // 0: auto (1 single node, 2 distributed)
  double usable_ram_fraction = 1.0;
  bool no_power_of_two = false;
  std::string format = "text";
  std::string output;
};

void run_plan_qubits(const PlanArgs& args) {
  const ClusterNodeSpec spec = load_spec(args.spec_file);
  MemoryModel memory;
  memory.bytes_per_amplitude = args.bytes_per_amplitude;
  if (args.buffer_factor > 0) memory.buffer_factor = args.buffer_factor;
  memory.usable_ram_fraction = args.usable_ram_fraction;

  if ((args.nodes > 0) == (args.qubits > 0)) {
    throw ParseError("exactly one of --nodes or --qubits is required");
  }

  ReportDocument report;
  report.title = "state-vector capacity plan";

  auto& cluster = report.add_section("cluster");
  cluster.add("ram_per_node_bytes", spec.ram_bytes);
  cluster.add("ram_per_node", perfplan::io::format_bytes(spec.ram_bytes));
  cluster.add("ranks_per_node", spec.effective_ranks_per_node());

  std::int64_t nodes = args.nodes;
  if (args.qubits > 0) {
    nodes = perfplan::nodes_for_qubits(args.qubits, spec, memory, !args.no_power_of_two);
    auto& target = report.add_section("target");
    target.add("qubits", static_cast<std::int64_t>(args.qubits));
    target.add("nodes_required", nodes);
    target.add("rounded_to_power_of_two", !args.no_power_of_two);
  }

  const perfplan::QubitPlan plan = perfplan::max_qubits(nodes, spec, memory);
  auto& section = report.add_section("plan");
  section.add("nodes", nodes);
  section.add("max_qubits", static_cast<std::int64_t>(plan.max_qubits));
  section.add("min_qubits", static_cast<std::int64_t>(plan.min_qubits));
  section.add("bytes_required", plan.bytes_required);
  section.add("required", perfplan::io::format_bytes(plan.bytes_required));
  section.add("bytes_available", plan.bytes_available);
  section.add("available", perfplan::io::format_bytes(plan.bytes_available));

  report.notes.push_back(
      "memory model: " + std::to_string(memory.bytes_per_amplitude) +
      " bytes/amplitude, buffer factor " +
      perfplan::io::format_double(memory.buffer_for(nodes)) + ", usable RAM fraction " +
      perfplan::io::format_double(memory.usable_ram_fraction));
  report.notes.push_back("min_qubits: smallest register with one amplitude per rank");

  OutputSink sink(args.output);
  print_report(report, args.format, sink.stream());
  sink.finish();
}

// ---------------------------------------------------------------------------
// peak

struct PeakArgs {
  std::string spec_file;
  std::int64_t nodes = 0;
  std::vector<std::string> measured;
  std::string format = "text";
  std::string output;
};

void run_peak(const PeakArgs& args) {
  const ClusterNodeSpec spec = load_spec(args.spec_file);
  const double rpeak = perfplan::peak_flops(spec, args.nodes);

  ReportDocument report;
  report.title = "theoretical peak performance";

  auto& cluster = report.add_section("cluster");
  cluster.add("nodes", args.nodes);
  cluster.add("cores_per_node", spec.cores);
  cluster.add("clock_ghz", spec.clock_hz / 1e9, "GHz");
  cluster.add("flops_per_cycle", spec.flops_per_cycle);

  auto& peak = report.add_section("peak");
  peak.add("rpeak_flops", rpeak);
  peak.add("rpeak", perfplan::io::format_flops(rpeak));

  if (!args.measured.empty()) {
    std::vector<double> samples;
    for (const auto& text : args.measured) samples.push_back(perfplan::io::parse_flops(text));
    const auto stats = perfplan::run_statistics(samples);
    const auto eff = perfplan::efficiency(stats.best, rpeak);

    auto& measured = report.add_section("measured");
    measured.add("runs", static_cast<std::int64_t>(samples.size()));
    measured.add("best_flops", stats.best);
    measured.add("best", perfplan::io::format_flops(stats.best));
    if (samples.size() > 1) {
      measured.add("mean_flops", stats.mean);
      measured.add("relative_spread", stats.relative_spread);
    }
    measured.add("efficiency", eff.value);
    if (eff.exceeds_peak) {
      report.notes.push_back(
          "WARNING: measured rate exceeds the theoretical peak; check the node spec");
    }
  }

  OutputSink sink(args.output);
  print_report(report, args.format, sink.stream());
  sink.finish();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string config_file;
  std::string output;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void run_simulate(const SimulateArgs& args) {
  auto config = perfplan::io::read_simulation_config_file(args.config_file);
  if (args.seed_given) config.seed = args.seed;
  const auto observations = perfplan::generate_timings(config);

  OutputSink sink(args.output);
  perfplan::io::write_timings_csv(sink.stream(), observations);
  sink.finish();
}

// ---------------------------------------------------------------------------
// advise

struct AdviseArgs {
  std::int64_t n_units = 0;
  std::string multiples = "8,16";
  std::string format = "text";
  std::string output;
};

void run_advise(const AdviseArgs& args) {
  const auto multiples = parse_integer_list(args.multiples, "multiples");
  const auto advice = perfplan::advise_node_count(args.n_units, multiples);

  ReportDocument report;
  report.title = "node count advisory";

  auto& section = report.add_section("n=" + std::to_string(advice.n_units));
  section.add("power_of_two", advice.power_of_two);
  for (const auto& entry : advice.multiples) {
    const std::string suffix = std::to_string(entry.multiple);
    section.add("divisible_by_" + suffix, entry.divides);
    if (entry.nearest_below) {
      section.add("nearest_below_multiple_of_" + suffix, *entry.nearest_below);
    } else {
      section.add("nearest_below_multiple_of_" + suffix, std::string("none"));
    }
    section.add("nearest_above_multiple_of_" + suffix, entry.nearest_above);
  }

  report.notes.push_back(
      "heuristic divisibility report: misaligned counts correlate with pathological "
      "timings on some codes, but no causal rule is claimed");

  OutputSink sink(args.output);
  print_report(report, args.format, sink.stream());
  sink.finish();
}

void add_format_options(CLI::App* cmd, std::string& format, std::string& output) {
  cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}));
  cmd->add_option("-o,--output", output, "Write output to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"speedup modeling and cluster capacity planning for homogeneous clusters"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand(
      "fit", "Fit the extended speedup model to a timing CSV and flag outliers");
  fit->add_option("input", fit_args.input, "Timing CSV (n_units,wall_time_hours,censored)")
      ->required();
  fit->add_option("--cores-per-node", fit_args.cores_per_node, "Cores per node (Nc)")
      ->required()
      ->check(CLI::PositiveNumber);
  fit->add_option("--threshold-k", fit_args.threshold_k,
                  "Outlier threshold: k * median absolute relative residual")
      ->check(CLI::PositiveNumber);
  add_format_options(fit, fit_args.format, fit_args.output);

  CurveArgs curve_args;
  auto* curve = app.add_subcommand(
      "curve", "Sample speedup curves and emit CSV data or an SVG chart");
  curve->add_option("--set", curve_args.sets,
                    "Parameter set, e.g. s=1%,c=0.2%,nc=32,t1=89.3,label=fitted "
                    "(repeatable; nc defaults to 32)");
  curve->add_option("--from-fit", curve_args.from_fit,
                    "JSON report from `fit --format json` (repeatable)");
  curve->add_option("--n-values", curve_args.n_values, "Explicit unit counts, e.g. 1,24,96");
  curve->add_option("--n-range", curve_args.n_range, "Inclusive range start:end[:step]");
  curve->add_option("--n-pow2", curve_args.n_pow2, "Powers of two within start:end");
  curve->add_option("--model", curve_args.model, "Speedup model")
      ->check(CLI::IsMember({"classical", "extended"}));
  curve->add_flag("--normalized", curve_args.normalized,
                  "Rescale speedups by the model's N=1 value so curves start at 1");
  curve->add_option("--emit", curve_args.emit, "Output kind")
      ->check(CLI::IsMember({"csv", "svg"}));
  curve->add_flag("--log-x", curve_args.log_x, "Log2 x axis (svg only)");
  curve->add_option("--title", curve_args.title, "Chart title (svg only)");
  curve->add_option("-o,--output", curve_args.output, "Write output to a file instead of stdout");

  PlanArgs plan_args;
  auto* plan = app.add_subcommand(
      "plan-qubits", "Maximum simulatable qubits for a node count, or nodes for a target");
  plan->add_option("--spec", plan_args.spec_file,
                   "Cluster spec JSON (default: built-in reference node)");
  plan->add_option("--nodes", plan_args.nodes, "Plan for this many nodes")
      ->check(CLI::PositiveNumber);
  plan->add_option("--qubits", plan_args.qubits, "Find the node count for this register size")
      ->check(CLI::PositiveNumber);
  plan->add_option("--bytes-per-amplitude", plan_args.bytes_per_amplitude,
                   "Bytes per amplitude (16 = complex double)")
      ->check(CLI::PositiveNumber);
  plan->add_option("--buffer-factor", plan_args.buffer_factor,
                   "Memory buffer factor (default: 1 on one node, 2 distributed)")
      ->check(CLI::PositiveNumber);
  plan->add_option("--usable-ram-fraction", plan_args.usable_ram_fraction,
                   "Fraction of node RAM usable by the state vector");
  plan->add_flag("--no-power-of-two", plan_args.no_power_of_two,
                 "Report the raw minimum node count without power-of-two rounding");
  add_format_options(plan, plan_args.format, plan_args.output);

  PeakArgs peak_args;
  auto* peak = app.add_subcommand("peak", "Theoretical peak flops and measured efficiency");
  peak->add_option("--spec", peak_args.spec_file,
                   "Cluster spec JSON (default: built-in reference node)");
  peak->add_option("--nodes", peak_args.nodes, "Node count")->required();
  peak->add_option("--measured", peak_args.measured,
                   "Measured rate, e.g. 1.8T or 0.237P (repeatable for run statistics)");
  add_format_options(peak, peak_args.format, peak_args.output);

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate model-consistent timings from a simulation config");
  simulate->add_option("--config", sim_args.config_file, "Simulation config JSON")->required();
  simulate->add_option("-o,--output", sim_args.output,
                       "Write the timing CSV to a file instead of stdout");
  auto* seed_opt = simulate->add_option("--seed", sim_args.seed, "Override the config seed");

  AdviseArgs advise_args;
  auto* advise = app.add_subcommand(
      "advise", "Divisibility and power-of-two facts for a node count");
  advise->add_option("n", advise_args.n_units, "Node count to check")
      ->required()
      ->check(CLI::PositiveNumber);
  advise->add_option("--multiples", advise_args.multiples, "Preferred multiples (default 8,16)");
  add_format_options(advise, advise_args.format, advise_args.output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  sim_args.seed_given = seed_opt->count() > 0;

  try {
    if (fit->parsed()) run_fit(fit_args);
    if (curve->parsed()) run_curve(curve_args);
    if (plan->parsed()) run_plan_qubits(plan_args);
    if (peak->parsed()) run_peak(peak_args);
    if (simulate->parsed()) run_simulate(sim_args);
    if (advise->parsed()) run_advise(advise_args);
  } catch (const perfplan::InsufficientDataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const perfplan::DegenerateFitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const perfplan::InfeasiblePlanError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
