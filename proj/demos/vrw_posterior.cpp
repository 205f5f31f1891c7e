// Samples the random-walk posterior under both update rules and prints
// text histograms of the resultant length next to the Beta target.
#include <cstdio>
#include <string>

#include "pkin/experiments.hpp"

namespace {

void bar_chart(const char* title, const std::vector<double>& density, double lo, double width) {
  std::printf("%s\n", title);
  for (std::size_t i = 0; i < density.size(); ++i)
    std::printf("  %4.2f %s\n", lo + i * width, std::string(static_cast<std::size_t>(density[i] * 40), '#').c_str());
}

}  // namespace

int main(int argc, char** argv) {
  auto config = pkin::default_config(pkin::Experiment::kVrw);
  config.repeats = 1;
  config.histogram_bins = 20;
  if (argc > 1) config.seed = std::stoull(argv[1]);

  const auto report = pkin::run_vrw_experiment(config);
  const auto& h = report.histograms;
  const double width = h.bin_hi[0] - h.bin_lo[0];
  bar_chart("prior (forward walks)", h.prior_density, h.bin_lo[0], width);
  bar_chart("posterior, reference ratio", h.posterior_density, h.bin_lo[0], width);
  bar_chart("posterior, naive product", h.ablation_density, h.bin_lo[0], width);

  const auto& ks = report.repeats[0].ks;
  std::printf("KS vs target: %.4f (p = %.3g), step size %.3f\n", ks.statistic, ks.p_value,
              report.repeats[0].step_size);
}
