// audioplace command-line front end.
//
//   audioplace solve         --layout L (--model M | --params P | --raw-trials T | --calibrated)
//   audioplace eval          --layout L <model> [--trials N] [--seed S]
//   audioplace synth-model   [--params P] [--out M]
//   audioplace inspect-model <model>
//   audioplace bench         [--runs 5]
//
// Exit codes: 0 ok, 2 input error, 3 infeasible, 4 internal error. Errors go
// to stderr as a single line "audioplace: error[<kind>]: <message>".

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "audioplace/audioplace.hpp"

namespace {

using namespace audioplace;

enum ExitCode { kOk = 0, kInputError = 2, kInfeasible = 3, kInternal = 4 };

struct ModelSource {
  std::string model_path;
  std::string params_path;
  std::string raw_trials_path;
  bool calibrated = false;
  bool renormalize = false;
  std::optional<int> bin_size;

  void add_to(CLI::App& cmd) {
    auto* group = cmd.add_option_group("model", "confusion model source (exactly one)");
    group->add_option("--model", model_path, "matrix CSV (bin_size_deg header + rows)");
    group->add_option("--params", params_path, "synthetic model parameters JSON");
    group->add_option("--raw-trials", raw_trials_path,
                      "raw trials CSV (true_azimuth_deg,predicted_azimuth_deg)");
    group->add_flag("--calibrated", calibrated, "built-in calibrated synthetic model");
    group->require_option(1);
    cmd.add_flag("--renormalize", renormalize, "rescale matrix rows that do not sum to 1");
    cmd.add_option("--bin-size", bin_size,
                   "bin size in degrees (default 12; must match a loaded matrix)");
  }

  ConfusionModel load() const {
    if (!model_path.empty()) {
      auto model = audioplace::load_model(model_path, LoadOptions{1e-6, renormalize});
      if (bin_size && *bin_size != model.bin_size_deg()) {
        throw InputError(model_path, "bin size " + std::to_string(model.bin_size_deg()) +
                                         " does not match --bin-size " +
                                         std::to_string(*bin_size));
      }
      return model;
    }
    if (!raw_trials_path.empty()) {
      return ingest_raw_trials_file(raw_trials_path, checked_bin_size());
    }
    SyntheticModelParams params =
        params_path.empty() ? calibrated_params() : load_params(params_path);
    if (bin_size) {
      params.bin_size_deg = checked_bin_size();
    }
    return synthesize_model(params);
  }

  int checked_bin_size() const {
    const int b = bin_size.value_or(12);
    if (b <= 0 || 360 % b != 0) {
      throw InputError("--bin-size", std::to_string(b) + " does not divide 360");
    }
    return b;
  }
};

struct SolveFlags {
  double w_blur = 0.9;
  double w_cone = 0.1;
  std::string solver = "dp";
  std::string cone = "point-plus-mirror";
  std::optional<double> max_displacement;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--w-blur", w_blur, "weight of the blur probability term")->capture_default_str();
    cmd.add_option("--w-cone", w_cone, "weight of the normalized cone distance term")
        ->capture_default_str();
    cmd.add_option("--solver", solver, "dp or brute")
        ->check(CLI::IsMember({"dp", "brute"}))
        ->capture_default_str();
    cmd.add_option("--cone", cone, "point-plus-mirror or mirror-only")
        ->check(CLI::IsMember({"point-plus-mirror", "mirror-only"}))
        ->capture_default_str();
    cmd.add_option("--max-displacement", max_displacement,
                   "forbid sound bins farther than this many degrees from the element");
  }

  AnalyzerOptions analyzer() const {
    return AnalyzerOptions{Weights{w_blur, w_cone}, parse_cone_mode(cone)};
  }

  PlacementSolution run(const ScoreMatrix& scores) const {
    SolveOptions opts{max_displacement};
    return solver == "brute" ? brute_force_solve(scores, opts) : solve(scores, opts);
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path, "cannot open output file");
  out << text;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

void print_displacements(std::ostream& os, const PlacementSolution& sol) {
  os << "objective " << fmt("%.6f", sol.objective) << " (" << to_string(sol.solver) << ", cut "
     << sol.cut_rotation << ")\n";
  os << "id\tvisual_deg\tsound_deg\tbin\tdisplacement_deg\n";
  for (const auto& a : sol.assignments) {
    double d = a.sound_azimuth.degrees() - a.visual_azimuth.degrees();
    d = d > 180.0 ? d - 360.0 : (d < -180.0 ? d + 360.0 : d);
    os << a.id << '\t' << fmt("%.3f", a.visual_azimuth.degrees()) << '\t'
       << fmt("%.3f", a.sound_azimuth.degrees()) << '\t' << a.sound_bin.index << '\t'
       << fmt("%+.3f", d) << '\n';
  }
  for (const auto& w : sol.warnings) os << "warning: " << w << '\n';
}

// --------------------------------------------------------------------------

struct SolveCommand {
  std::string layout_path;
  std::string out_path;
  bool no_timing = false;
  ModelSource source;
  SolveFlags flags;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("solve", "optimize sound locations for a layout");
    cmd->add_option("--layout", layout_path, "layout JSON")->required();
    cmd->add_option("--out", out_path, "solution JSON path (default: stdout)");
    cmd->add_flag("--no-timing", no_timing, "omit solve_time_ms from the JSON");
    source.add_to(*cmd);
    flags.add_to(*cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    const Layout layout = load_layout(layout_path);
    const ConfusionModel model = source.load();
    const ScoreMatrix scores = build_score_matrix(model, layout, flags.analyzer());
    const PlacementSolution sol = flags.run(scores);
    write_text(out_path, dump(to_json(sol, !no_timing)));
    if (!out_path.empty() && out_path != "-") print_displacements(std::cout, sol);
  }
};

struct EvalCommand {
  std::string layout_path;
  std::string out_path;
  std::string csv_path;
  std::string dump_trials_prefix;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  ModelSource source;
  SolveFlags flags;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "simulate colocated vs optimized placement");
    cmd->add_option("--layout", layout_path, "layout JSON")->required();
    cmd->add_option("--out", out_path, "report JSON path (default: stdout)");
    cmd->add_option("--csv", csv_path, "plot CSV: strategy,accuracy,stderr");
    cmd->add_option("--dump-trials", dump_trials_prefix,
                    "write <prefix>_colocated.csv and <prefix>_optimized.csv");
    cmd->add_option("--trials", trials, "simulated trials per strategy")->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->add_option("--threads", threads, "worker threads (results do not depend on it)")
        ->capture_default_str();
    source.add_to(*cmd);
    flags.add_to(*cmd);
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (trials < 1) throw InputError("--trials", "must be >= 1");
    const Layout layout = load_layout(layout_path);
    const ConfusionModel model = source.load();
    const ScoreMatrix scores = build_score_matrix(model, layout, flags.analyzer());
    const PlacementSolution optimized = flags.run(scores);
    const PlacementSolution colocated = colocated_solution(scores);

    const bool keep = !dump_trials_prefix.empty();
    const auto simulate = [&](const PlacementSolution& p, const std::string& name) {
      return run_simulation(model, layout, p, SimulationOptions{trials, seed, threads, keep, name});
    };
    const SimulationReport base = simulate(colocated, "colocated");
    const SimulationReport opt = simulate(optimized, "optimized");
    const double delta = opt.accuracy - base.accuracy;
    const double delta_se = std::hypot(opt.accuracy_stderr, base.accuracy_stderr);

    nlohmann::ordered_json j{{"colocated", to_json(base)},
                     {"optimized", to_json(opt)},
                     {"accuracy_delta", delta},
                     {"delta_stderr", delta_se},
                     {"colocated_solution", to_json(colocated, false)},
                     {"optimized_solution", to_json(optimized, false)}};
    write_text(out_path, dump(j));

    if (!csv_path.empty()) {
      std::ostringstream csv;
      csv << "strategy,accuracy,stderr\n";
      for (const auto* r : {&base, &opt}) {
        csv << r->strategy << ',' << fmt("%.17g", r->accuracy) << ','
            << fmt("%.17g", r->accuracy_stderr) << '\n';
      }
      write_text(csv_path, csv.str());
    }
    if (keep) {
      for (const auto* r : {&base, &opt}) {
        std::ostringstream os;
        write_trials_csv(os, *r, layout);
        write_text(dump_trials_prefix + "_" + r->strategy + ".csv", os.str());
      }
    }
    if (!out_path.empty() && out_path != "-") {
      std::cout << "colocated accuracy " << fmt("%.4f", base.accuracy) << " +/- "
                << fmt("%.4f", base.accuracy_stderr) << "\noptimized accuracy "
                << fmt("%.4f", opt.accuracy) << " +/- " << fmt("%.4f", opt.accuracy_stderr)
                << "\ndelta " << fmt("%+.4f", delta) << " (combined stderr "
                << fmt("%.4f", delta_se) << ")\n";
    }
  }
};

struct SynthCommand {
  std::string params_path;
  std::string out_path;
  std::string params_out_path;
  std::optional<int> bin_size;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth-model", "write a synthetic confusion matrix CSV");
    cmd->add_option("--params", params_path,
                    "synthetic parameters JSON (default: built-in calibrated preset)");
    cmd->add_option("--out", out_path, "matrix CSV path (default: stdout)");
    cmd->add_option("--params-out", params_out_path, "also write the effective parameters JSON");
    cmd->add_option("--bin-size", bin_size, "override bin size");
    cmd->add_option("--seed", seed, "override seed (used by monte_carlo integration)");
    cmd->callback([this] { run(); });
  }

  void run() const {
    SyntheticModelParams params =
        params_path.empty() ? calibrated_params() : load_params(params_path);
    if (bin_size) params.bin_size_deg = *bin_size;
    if (seed) params.seed = *seed;
    try {
      params.validate();
    } catch (const std::invalid_argument& e) {
      throw InputError(params_path.empty() ? "synth-model" : params_path, e.what());
    }
    const ConfusionModel model = synthesize_model(params);
    std::ostringstream os;
    write_model_csv(os, model);
    write_text(out_path, os.str());
    if (!params_out_path.empty()) write_text(params_out_path, dump(to_json(params)));
  }
};

struct InspectCommand {
  ModelSource source;
  std::string out_path;
  std::string write_matrix_path;
  std::int64_t trials_per_bin = 100;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("inspect-model", "summarize a confusion model");
    source.add_to(*cmd);
    cmd->add_option("--out", out_path, "summary JSON path (default: stdout)");
    cmd->add_option("--write-matrix", write_matrix_path, "also export the model as matrix CSV");
    cmd->add_option("--trials-per-bin", trials_per_bin, "samples per bin for region statistics")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    cmd->callback([this] { run(); });
  }

  void run() const {
    if (trials_per_bin < 1) throw InputError("--trials-per-bin", "must be >= 1");
    const ConfusionModel model = source.load();
    const auto entropies = row_entropies_bits(model);
    const double mean_h =
        std::accumulate(entropies.begin(), entropies.end(), 0.0) / static_cast<double>(entropies.size());
    const double fraction = diagonal_argmax_fraction(model);
    const int count = static_cast<int>(std::lround(fraction * model.bin_count()));
    nlohmann::ordered_json j{
        {"bin_size_deg", model.bin_size_deg()},
        {"bin_count", model.bin_count()},
        {"diagonal_argmax_count", count},
        {"diagonal_argmax_fraction", fraction},
        {"row_entropy_bits",
         {{"mean", mean_h},
          {"min", *std::min_element(entropies.begin(), entropies.end())},
          {"max", *std::max_element(entropies.begin(), entropies.end())}}},
        {"region_statistics", to_json(table1_statistics(model, trials_per_bin, seed))},
        {"trials_per_bin", trials_per_bin},
        {"seed", seed}};
    write_text(out_path, dump(j));
    if (!write_matrix_path.empty()) {
      std::ostringstream os;
      write_model_csv(os, model);
      write_text(write_matrix_path, os.str());
    }
  }
};

struct BenchCommand {
  int bin_size = 12;
  int runs = 5;
  std::uint64_t seed = 0;
  std::string out_path;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench", "time the exact solver for growing layouts");
    cmd->add_option("--bin-size", bin_size, "starting bin size")->capture_default_str();
    cmd->add_option("--runs", runs, "timed runs per size")->capture_default_str();
    cmd->add_option("--seed", seed, "layout seed")->capture_default_str();
    cmd->add_option("--out", out_path, "CSV path (default: stdout)");
    cmd->callback([this] { run(); });
  }

  static int shrink_to_fit(int bin_size, int n) {
    int b = bin_size;
    while (360 / b < n) {
      --b;
      while (b > 1 && 360 % b != 0) --b;
    }
    return b;
  }

  void run() const {
    if (bin_size <= 0 || 360 % bin_size != 0) throw InputError("--bin-size", "must divide 360");
    if (runs < 1) throw InputError("--runs", "must be >= 1");
    std::ostringstream csv;
    csv << "n,bin_size_deg,bin_count,runs,mean_ms,min_ms,max_ms,objective,deterministic\n";
    std::cerr << "n\tbins\tmean_ms\n";
    for (const int n : {2, 5, 10, 20, 50, 100}) {
      const int b = shrink_to_fit(bin_size, n);
      const ConfusionModel model = calibrated_model(b);
      RandomStream rng(seed, static_cast<std::uint64_t>(n));
      std::vector<Element> elements;
      for (int i = 0; i < n; ++i) {
        elements.push_back({"e" + std::to_string(i), Azimuth(rng.uniform() * 360.0), 0.0, {}});
      }
      const Layout layout(std::move(elements));
      std::vector<double> times;
      std::vector<int> first_bins;
      bool deterministic = true;
      double objective = 0.0;
      const ScoreMatrix scores = build_score_matrix(model, layout);
      for (int r = 0; r < runs; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const PlacementSolution sol = solve(scores);
        times.push_back(
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        if (r == 0) {
          first_bins = sol.bins();
          objective = sol.objective;
        } else {
          deterministic = deterministic && sol.bins() == first_bins;
        }
      }
      const double mean = std::accumulate(times.begin(), times.end(), 0.0) / runs;
      csv << n << ',' << b << ',' << 360 / b << ',' << runs << ',' << fmt("%.4f", mean) << ','
          << fmt("%.4f", *std::min_element(times.begin(), times.end())) << ','
          << fmt("%.4f", *std::max_element(times.begin(), times.end())) << ','
          << fmt("%.17g", objective) << ',' << (deterministic ? "true" : "false") << '\n';
      std::cerr << n << '\t' << 360 / b << '\t' << fmt("%.3f", mean) << '\n';
    }
    write_text(out_path, csv.str());
  }
};

int fail(int code, const char* kind, const std::string& message) {
  std::string one_line = message;
  for (char& c : one_line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "audioplace: error[" << kind << "]: " << one_line << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Displaced spatial-audio placement: optimize, evaluate and inspect models"};
  app.require_subcommand(1);
  SolveCommand solve_cmd;
  EvalCommand eval_cmd;
  SynthCommand synth_cmd;
  InspectCommand inspect_cmd;
  BenchCommand bench_cmd;
  solve_cmd.add_to(app);
  eval_cmd.add_to(app);
  synth_cmd.add_to(app);
  inspect_cmd.add_to(app);
  bench_cmd.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kInputError, "input", e.what());
  } catch (const InfeasibleError& e) {
    return fail(kInfeasible, "infeasible", e.what());
  } catch (const InputError& e) {
    return fail(kInputError, "input", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kInputError, "input", e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, "internal", e.what());
  }
  return kOk;
}
