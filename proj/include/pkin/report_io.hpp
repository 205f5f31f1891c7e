#pragma once

// JSON and CSV emission of experiment reports. JSON uses insertion-ordered
// objects so the byte layout is stable for a given report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "pkin/experiments.hpp"

namespace pkin {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const GeometryParams& g) {
  return ordered_json{{"n_ca", g.n_ca},     {"ca_c", g.ca_c},     {"c_n", g.c_n},     {"n_ca_c", g.n_ca_c},
                      {"ca_c_n", g.ca_c_n}, {"c_n_ca", g.c_n_ca}, {"omega", g.omega}};
}

inline ordered_json to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["ablation"] = c.ablation;
  j["identity_check"] = c.identity_check;
  j["seed"] = c.seed;
  j["repeats"] = c.repeats;
  j["thin"] = c.thin_stride;
  j["histogram_bins"] = c.histogram_bins;
  j["prior_histogram_samples"] = c.prior_histogram_samples;
  j["sampler"] = ordered_json{{"warmup_steps", c.sampler.warmup_steps},
                              {"sample_steps", c.sampler.sample_steps},
                              {"max_tree_depth", c.sampler.max_tree_depth},
                              {"target_accept", c.sampler.target_accept},
                              {"initial_step_size", c.sampler.initial_step_size}};
  j["vrw"] = ordered_json{{"mu", c.vrw.mu},
                          {"kappa", c.vrw.kappa},
                          {"n_steps", c.vrw.n_steps},
                          {"alpha", c.vrw.alpha},
                          {"beta", c.vrw.beta}};
  j["protein"] = ordered_json{{"mu_phi_deg", c.protein.mu_phi_deg},
                              {"mu_psi_deg", c.protein.mu_psi_deg},
                              {"kappa_phi", c.protein.kappa_phi},
                              {"kappa_psi", c.protein.kappa_psi},
                              {"length", c.protein.length},
                              {"target_mean", c.protein.target_mean},
                              {"target_variance", c.protein.target_variance},
                              {"reference_samples", c.protein.reference_samples},
                              {"geometry", to_json(c.protein.geometry)}};
  return j;
}

inline ordered_json to_json(const KSReport& k) {
  return ordered_json{{"statistic", k.statistic}, {"p_value", k.p_value}, {"n_effective", k.n_effective}};
}

inline ordered_json to_json(const ExperimentReport& r) {
  ordered_json j;
  j["config"] = to_json(r.config);
  ordered_json repeats = ordered_json::array();
  for (const auto& rep : r.repeats) {
    ordered_json e;
    e["repeat"] = rep.repeat;
    e["seed"] = rep.seed;
    e["ks"] = to_json(rep.ks);
    e["step_size"] = rep.step_size;
    e["mean_accept"] = rep.mean_accept;
    e["divergences"] = rep.divergences;
    if (rep.reference_fit)
      e["reference_fit"] = ordered_json{{"mean", rep.reference_fit->mean},
                                        {"variance", rep.reference_fit->variance},
                                        {"mad", rep.reference_fit->mad}};
    repeats.push_back(std::move(e));
  }
  j["repeats"] = std::move(repeats);
  j["summary"] = ordered_json{{"min_statistic", r.summary.min_statistic},
                              {"median_statistic", r.summary.median_statistic},
                              {"max_statistic", r.summary.max_statistic},
                              {"median_p_value", r.summary.median_p_value},
                              {"max_p_value", r.summary.max_p_value}};
  j["histograms"] = ordered_json{{"bin_lo", r.histograms.bin_lo},
                                 {"bin_hi", r.histograms.bin_hi},
                                 {"prior_density", r.histograms.prior_density},
                                 {"posterior_density", r.histograms.posterior_density},
                                 {"ablation_density", r.histograms.ablation_density}};
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

inline GeometryParams geometry_from_json(const ordered_json& j) {
  GeometryParams g;
  g.n_ca = j.at("n_ca").get<double>();
  g.ca_c = j.at("ca_c").get<double>();
  g.c_n = j.at("c_n").get<double>();
  g.n_ca_c = j.at("n_ca_c").get<double>();
  g.ca_c_n = j.at("ca_c_n").get<double>();
  g.c_n_ca = j.at("c_n_ca").get<double>();
  g.omega = j.at("omega").get<double>();
  return g;
}

inline ExperimentConfig config_from_json(const ordered_json& j) {
  ExperimentConfig c;
  c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
  c.ablation = j.at("ablation").get<bool>();
  c.identity_check = j.at("identity_check").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.repeats = j.at("repeats").get<int>();
  c.thin_stride = j.at("thin").get<int>();
  c.histogram_bins = j.at("histogram_bins").get<int>();
  c.prior_histogram_samples = j.at("prior_histogram_samples").get<int>();
  const auto& s = j.at("sampler");
  c.sampler.warmup_steps = s.at("warmup_steps").get<int>();
  c.sampler.sample_steps = s.at("sample_steps").get<int>();
  c.sampler.max_tree_depth = s.at("max_tree_depth").get<int>();
  c.sampler.target_accept = s.at("target_accept").get<double>();
  c.sampler.initial_step_size = s.at("initial_step_size").get<double>();
  const auto& v = j.at("vrw");
  c.vrw.mu = v.at("mu").get<double>();
  c.vrw.kappa = v.at("kappa").get<double>();
  c.vrw.n_steps = v.at("n_steps").get<int>();
  c.vrw.alpha = v.at("alpha").get<double>();
  c.vrw.beta = v.at("beta").get<double>();
  const auto& p = j.at("protein");
  c.protein.mu_phi_deg = p.at("mu_phi_deg").get<double>();
  c.protein.mu_psi_deg = p.at("mu_psi_deg").get<double>();
  c.protein.kappa_phi = p.at("kappa_phi").get<double>();
  c.protein.kappa_psi = p.at("kappa_psi").get<double>();
  c.protein.length = p.at("length").get<int>();
  c.protein.target_mean = p.at("target_mean").get<double>();
  c.protein.target_variance = p.at("target_variance").get<double>();
  c.protein.reference_samples = p.at("reference_samples").get<int>();
  c.protein.geometry = geometry_from_json(p.at("geometry"));
  return c;
}

inline ExperimentReport report_from_json(const ordered_json& j) {
  ExperimentReport r;
  r.config = config_from_json(j.at("config"));
  for (const auto& e : j.at("repeats")) {
    RepeatResult rep;
    rep.repeat = e.at("repeat").get<int>();
    rep.seed = e.at("seed").get<std::uint64_t>();
    rep.ks.statistic = e.at("ks").at("statistic").get<double>();
    rep.ks.p_value = e.at("ks").at("p_value").get<double>();
    rep.ks.n_effective = e.at("ks").at("n_effective").get<int>();
    rep.step_size = e.at("step_size").get<double>();
    rep.mean_accept = e.at("mean_accept").get<double>();
    rep.divergences = e.at("divergences").get<int>();
    if (e.contains("reference_fit")) {
      const auto& f = e.at("reference_fit");
      rep.reference_fit = RobustGaussianFit{f.at("mean").get<double>(), f.at("variance").get<double>(),
                                            f.at("mad").get<double>()};
    }
    r.repeats.push_back(rep);
  }
  const auto& s = j.at("summary");
  r.summary.min_statistic = s.at("min_statistic").get<double>();
  r.summary.median_statistic = s.at("median_statistic").get<double>();
  r.summary.max_statistic = s.at("max_statistic").get<double>();
  r.summary.median_p_value = s.at("median_p_value").get<double>();
  r.summary.max_p_value = s.at("max_p_value").get<double>();
  const auto& h = j.at("histograms");
  r.histograms.bin_lo = h.at("bin_lo").get<std::vector<double>>();
  r.histograms.bin_hi = h.at("bin_hi").get<std::vector<double>>();
  r.histograms.prior_density = h.at("prior_density").get<std::vector<double>>();
  r.histograms.posterior_density = h.at("posterior_density").get<std::vector<double>>();
  r.histograms.ablation_density = h.at("ablation_density").get<std::vector<double>>();
  r.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
  return r;
}

inline ordered_json to_json(const DiscreteDistribution& d) {
  ordered_json j = ordered_json::object();
  for (const auto& [label, p] : d) j[label] = p;
  return j;
}

enum class ReportFormat { kJson, kCsv };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::kJson;
  if (s == "csv") return ReportFormat::kCsv;
  throw std::invalid_argument("unknown report format '" + s + "' (expected json or csv)");
}

namespace detail {

inline std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

inline void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline void write_repeats_csv(std::ostream& os, const ExperimentReport& r) {
  os << "seed,statistic,p_value\n";
  for (const auto& rep : r.repeats)
    os << rep.seed << ',' << detail::fmt_double(rep.ks.statistic) << ',' << detail::fmt_double(rep.ks.p_value)
       << '\n';
}

inline void write_histogram_csv(std::ostream& os, const HistogramTable& h) {
  os << "bin_lo,bin_hi,prior_density,posterior_density,ablation_density\n";
  for (std::size_t i = 0; i < h.bin_lo.size(); ++i)
    os << detail::fmt_double(h.bin_lo[i]) << ',' << detail::fmt_double(h.bin_hi[i]) << ','
       << detail::fmt_double(h.prior_density[i]) << ',' << detail::fmt_double(h.posterior_density[i]) << ','
       << detail::fmt_double(h.ablation_density[i]) << '\n';
}

/// `<stem>_histogram.csv` next to `path`.
inline std::filesystem::path histogram_path(const std::filesystem::path& path) {
  auto out = path;
  out.replace_filename(path.stem().string() + "_histogram.csv");
  return out;
}

/// Writes the report. CSV output gets a histogram file alongside when
/// `with_histograms` is set.
inline void emit_report(const ExperimentReport& r, ReportFormat format, const std::filesystem::path& path,
                        bool with_histograms = false) {
  {
    auto out = detail::open_for_write(path);
    if (format == ReportFormat::kJson)
      out << to_json(r).dump(2) << '\n';
    else
      write_repeats_csv(out, r);
    detail::check_written(out, path);
  }
  if (with_histograms) {
    const auto hpath = histogram_path(path);
    auto out = detail::open_for_write(hpath);
    write_histogram_csv(out, r.histograms);
    detail::check_written(out, hpath);
  }
}

}  // namespace pkin
