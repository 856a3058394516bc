#include "iadb/ddim.hpp"

#include <cmath>
#include <stdexcept>

#include "iadb/oracle.hpp"
#include "iadb/samplers.hpp"

namespace iadb {

namespace {

void check_alpha_bar(double ab, const char* what) {
  if (!(ab > 0.0 && ab <= 1.0))
    throw std::invalid_argument(std::string(what) + ": alpha_bar must be in (0,1]");
}

}  // namespace

void DdimSchedule::validate() const {
  if (alphas_bar.size() < 2)
    throw std::invalid_argument("DdimSchedule: needs at least 2 entries");
  for (std::size_t t = 0; t < alphas_bar.size(); ++t) {
    check_alpha_bar(alphas_bar[t], "DdimSchedule");
    if (t > 0 && !(alphas_bar[t] < alphas_bar[t - 1]))
      throw std::invalid_argument("DdimSchedule: alphas_bar must strictly decrease");
  }
}

double bridge_beta(double alpha_bar) {
  check_alpha_bar(alpha_bar, "bridge_beta");
  const double sa = std::sqrt(alpha_bar);
  return sa / (sa + std::sqrt(1.0 - alpha_bar));
}

BridgeFrame rescale(const Vec& x, double alpha_bar) {
  check_alpha_bar(alpha_bar, "rescale");
  const double sa = std::sqrt(alpha_bar);
  const double denom = sa + std::sqrt(1.0 - alpha_bar);
  BridgeFrame f;
  f.x_ddim = x;
  f.y_iadb = scale(x, 1.0 / denom);
  f.beta = sa / denom;
  return f;
}

Vec ddim_step(const Vec& x_t, double alpha_bar_t, double alpha_bar_next,
              const Vec& eps_prediction) {
  check_alpha_bar(alpha_bar_t, "ddim_step");
  check_alpha_bar(alpha_bar_next, "ddim_step");
  check_dim(eps_prediction, x_t.size(), "ddim_step");
  const double coef =
      std::sqrt((1.0 - alpha_bar_next) / alpha_bar_next) - std::sqrt((1.0 - alpha_bar_t) / alpha_bar_t);
  const double ratio = std::sqrt(alpha_bar_next / alpha_bar_t);
  Vec out(x_t.size());
  // x'/sqrt(ab') = x/sqrt(ab) + coef * eps, solved for x'.
  for (std::size_t k = 0; k < x_t.size(); ++k)
    out[k] = ratio * x_t[k] + std::sqrt(alpha_bar_next) * coef * eps_prediction[k];
  return out;
}

EquivalenceReport equivalence_check(const DdimSchedule& schedule, const EpsFn& eps_fn,
                                    const Vec& x_start) {
  schedule.validate();
  const std::size_t n = schedule.size();
  EquivalenceReport report;
  report.per_step_deviation.reserve(n - 1);

  // Both chains are advanced from the same rescaled state. The DDIM side is
  // its update rule written in the blended frame (inject x/sqrt(ab) = y/beta
  // into the quoted recursion):
  //     y' = y * (beta'/beta) + beta' * coef * eps
  // The variant-B side is the simplified form
  //     y' = eps + (beta'/beta) * (y - eps)
  // and their agreement is exactly the beta-coefficient identity
  // beta' beta coef = beta - beta'. The predictor sees the original DDIM
  // coordinate, reconstructed through the rescaling.
  Vec y = rescale(x_start, schedule.alphas_bar[0]).y_iadb;

  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double ab_t = schedule.alphas_bar[t];
    const double ab_next = schedule.alphas_bar[t + 1];
    const double beta_t = bridge_beta(ab_t);
    const double beta_next = bridge_beta(ab_next);
    const double coef = std::sqrt((1.0 - ab_next) / ab_next) - std::sqrt((1.0 - ab_t) / ab_t);

    const double denom_t = std::sqrt(ab_t) + std::sqrt(1.0 - ab_t);
    const Vec eps = eps_fn(scale(y, denom_t), t);
    check_dim(eps, y.size(), "equivalence_check: predictor output");

    Vec y_ddim(y.size());
    const double ratio = beta_next / beta_t;
    for (std::size_t k = 0; k < y.size(); ++k)
      y_ddim[k] = y[k] * ratio + beta_next * coef * eps[k];
    const Vec y_b = step_variant(VariantKind::B, y, beta_t, beta_next,
                                 DeblendStats::from_means(eps, Vec(eps.size(), 0.0)));

    double dev = 0;
    for (std::size_t k = 0; k < y.size(); ++k) dev = std::max(dev, std::abs(y_ddim[k] - y_b[k]));
    report.per_step_deviation.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
    y = std::move(y_ddim);
  }
  report.passed = report.max_deviation < 1e-9;
  return report;
}

}  // namespace iadb
