#include "mgrid/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mgrid::harness {

void fill_percentages(double raw, double adjusted, double mga_revenue, double& ess_loss_pct, bool& undefined,
                      double& mga_share_pct) {
  undefined = !(raw > 0.0);
  ess_loss_pct = undefined ? 0.0 : 100.0 * (raw - adjusted) / raw;
  mga_share_pct = adjusted != 0.0 ? 100.0 * mga_revenue / adjusted : 0.0;
}

EpisodeMetrics compute_metrics(std::span<const StepLog> steps, int episode, bool evaluation) {
  EpisodeMetrics m;
  m.episode = episode;
  m.evaluation = evaluation;
  for (const auto& s : steps) {
    m.raw_savings += s.savings();
    m.cpc += s.cpc;
    m.sdc += s.sdc;
    m.cap += s.cap;
    m.mga_revenue += s.r_mga;
    m.mga_net += (s.r_in + s.r_mga) - s.mga_idle_value;
  }
  m.adjusted_savings = m.raw_savings - m.cpc - m.sdc;
  m.reward = m.adjusted_savings - m.cap;
  fill_percentages(m.raw_savings, m.adjusted_savings, m.mga_revenue, m.ess_loss_pct, m.ess_loss_undefined,
                   m.mga_share_pct);
  return m;
}

RunSummary summarise(std::span<const EpisodeMetrics> episodes) {
  RunSummary s;
  for (const auto& e : episodes) {
    if (!e.evaluation) continue;
    ++s.eval_episodes;
    s.raw_savings += e.raw_savings;
    s.adjusted_savings += e.adjusted_savings;
    s.cpc += e.cpc;
    s.sdc += e.sdc;
    s.cap += e.cap;
    s.mga_revenue += e.mga_revenue;
    s.mga_net += e.mga_net;
  }
  fill_percentages(s.raw_savings, s.adjusted_savings, s.mga_revenue, s.ess_loss_pct, s.ess_loss_undefined,
                   s.mga_share_pct);
  return s;
}

std::optional<double> vs_reference_pct(double adjusted, double reference_adjusted) {
  if (reference_adjusted == 0.0 || !std::isfinite(reference_adjusted)) return std::nullopt;
  return 100.0 * (adjusted - reference_adjusted) / reference_adjusted;
}

std::vector<double> trailing_mean(std::span<const double> values, std::size_t window) {
  std::vector<double> out(values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i];
    if (i >= window) acc -= values[i - window];
    out[i] = acc / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

}  // namespace mgrid::harness
