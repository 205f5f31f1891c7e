// pkin: experiment driver.
//
//   pkin vrw      [--config F] [--seed S] [--repeats R] [--ablation] [--identity-check]
//                 [--out PATH] [--format json|csv] [--emit-histograms] [--assert]
//   pkin protein  (same flags) [--emit-coords]
//   pkin whitworth [--p-a X] [--out PATH]
//
// Exit codes: 0 success, 1 runtime error, 2 acceptance band missed (--assert).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pkin/pkin.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> repeats;
  bool ablation = false;
  bool identity = false;
  std::string out;
  std::string format = "json";
  bool emit_histograms = false;
  bool emit_coords = false;
  bool assert_band = false;
};

void add_run_flags(CLI::App* cmd, RunOptions& o) {
  cmd->add_option("--config", o.config_path, "key = value config file");
  cmd->add_option("--seed", o.seed, "base seed; repeat r uses seed + r");
  cmd->add_option("--repeats", o.repeats, "number of independent chains");
  cmd->add_flag("--ablation", o.ablation, "omit the reference density (naive product)");
  cmd->add_flag("--identity-check", o.identity, "set target := reference; posterior must match the prior");
  cmd->add_option("--out", o.out, "report path (stdout when omitted)");
  cmd->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_flag("--emit-histograms", o.emit_histograms, "write <stem>_histogram.csv next to --out");
  cmd->add_flag("--assert", o.assert_band, "exit 2 when the acceptance band is missed");
}

pkin::ExperimentConfig resolve_config(pkin::Experiment e, const RunOptions& o) {
  pkin::ExperimentConfig c = pkin::default_config(e);
  if (!o.config_path.empty()) c = pkin::load_config(o.config_path, c);
  if (c.experiment != e)
    throw std::invalid_argument("config file sets experiment = " + pkin::to_string(c.experiment) +
                                " but the subcommand is " + pkin::to_string(e));
  if (o.seed) c.seed = *o.seed;
  if (o.repeats) c.repeats = *o.repeats;
  if (o.ablation) c.ablation = true;
  if (o.identity) c.identity_check = true;
  c.validate();
  return c;
}

void write_coords(const std::filesystem::path& path, const pkin::ExperimentConfig& c,
                  const std::vector<std::vector<double>>& samples) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "REMARK   1 MODEL 1: prior mode; MODEL 2: last posterior sample of repeat 0\n";
  std::vector<double> mode;
  for (const auto& vm : pkin::protein_prior_params(c.protein)) mode.push_back(vm.mu);
  pkin::BuildOptions opts{.with_cbeta = true};
  pkin::write_pdb(out, pkin::build_backbone(pkin::DihedralPair::unflatten(mode), c.protein.geometry, opts), 1);
  pkin::write_pdb(out, pkin::build_backbone(pkin::DihedralPair::unflatten(samples.back()), c.protein.geometry, opts),
                  2);
  out << "END\n";
}

int run_sampling(pkin::Experiment e, const RunOptions& o) {
  const pkin::ExperimentConfig c = resolve_config(e, o);
  if (o.emit_coords && e != pkin::Experiment::kProtein)
    throw std::invalid_argument("--emit-coords is only available for the protein experiment");
  if ((o.emit_coords || o.emit_histograms) && o.out.empty())
    throw std::invalid_argument("--emit-coords/--emit-histograms need --out");

  pkin::RepeatObserver observer;
  if (o.emit_coords) {
    std::filesystem::path coords = o.out;
    coords.replace_filename(coords.stem().string() + "_coords.pdb");
    observer.on_samples = [coords, &c](int repeat, const std::vector<std::vector<double>>& samples) {
      if (repeat == 0) write_coords(coords, c, samples);
    };
  }

  const pkin::ExperimentReport report = pkin::run_experiment(c, observer);
  const auto format = pkin::report_format_from_string(o.format);
  if (o.out.empty()) {
    if (format == pkin::ReportFormat::kJson)
      std::cout << pkin::to_json(report).dump(2) << '\n';
    else
      pkin::write_repeats_csv(std::cout, report);
  } else {
    pkin::emit_report(report, format, o.out, o.emit_histograms);
  }

  const auto& s = report.summary;
  std::fprintf(stderr, "%s%s%s: KS [%.3f, %.3f], median p %.3g, %.1f s\n", pkin::to_string(c.experiment).c_str(),
               c.ablation ? " (ablation)" : "", c.identity_check ? " (identity)" : "", s.min_statistic,
               s.max_statistic, s.median_p_value, report.wall_clock_seconds);

  if (o.assert_band) {
    const auto band = pkin::acceptance_band(c);
    const bool ok = pkin::meets_band(report, band);
    std::fprintf(stderr, "[%s] %s\n", ok ? "PASS" : "FAIL", band.description.c_str());
    if (!ok) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Probability kinematics experiments"};
  app.require_subcommand(1);

  RunOptions vrw_opts;
  auto* vrw = app.add_subcommand("vrw", "von Mises random walk update");
  add_run_flags(vrw, vrw_opts);

  RunOptions protein_opts;
  auto* protein = app.add_subcommand("protein", "8-residue helix end-to-end distance update");
  add_run_flags(protein, protein_opts);
  protein->add_flag("--emit-coords", protein_opts.emit_coords, "write <stem>_coords.pdb next to --out");

  double p_a = 2.0 / 3.0;
  std::string whitworth_out;
  auto* whitworth = app.add_subcommand("whitworth", "discrete horse-race update");
  whitworth->add_option("--p-a", p_a, "new probability that A wins")->check(CLI::Range(0.0, 1.0));
  whitworth->add_option("--out", whitworth_out, "JSON output path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vrw) return run_sampling(pkin::Experiment::kVrw, vrw_opts);
    if (*protein) return run_sampling(pkin::Experiment::kProtein, protein_opts);
    if (*whitworth) {
      const auto posterior = pkin::run_whitworth(p_a);
      const std::string text = pkin::to_json(posterior).dump(2);
      if (whitworth_out.empty()) {
        std::cout << text << '\n';
      } else {
        std::ofstream out(whitworth_out);
        if (!(out << text << '\n')) throw std::runtime_error("cannot write '" + whitworth_out + "'");
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
