#include "pbnrl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pbnrl/detail/parallel.hpp"
#include "pbnrl/io.hpp"

namespace pbnrl {
namespace {

std::vector<NetworkState> initial_states(std::size_t n, const SweepOptions& options, bool& exhaustive) {
  std::vector<NetworkState> states;
  exhaustive = n <= options.max_enumerated_nodes && n < 63;
  if (exhaustive) {
    const std::uint64_t count = std::uint64_t{1} << n;
    states.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      states.push_back(NetworkState::from_index(i, n));
    }
  } else {
    Rng rng(options.seed, std::numeric_limits<std::uint64_t>::max());
    states.reserve(options.sample_states);
    for (std::size_t i = 0; i < options.sample_states; ++i) {
      states.push_back(NetworkState::random(n, rng));
    }
  }
  return states;
}

void require_attractor_task(const ControlTask& task, const char* op) {
  if (!task.attractor_mode()) {
    throw std::invalid_argument(std::string(op) + " needs an attractor-target task");
  }
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SuccessReport success_sweep(const Pbn& pbn, const ControlTask& task, const Policy& policy,
                            const SweepOptions& options) {
  require_attractor_task(task, "success_sweep");
  if (options.attempts_per_state < 1) {
    throw std::invalid_argument("success_sweep: attempts_per_state must be at least 1");
  }
  const std::size_t n = pbn.size();
  const std::size_t horizon = options.horizon.value_or(task.horizon);
  SuccessReport report;
  report.horizon = horizon;
  report.attempts_per_state = options.attempts_per_state;
  const auto states = initial_states(n, options, report.exhaustive);
  report.initial_states = states.size();

  const std::size_t attempts = options.attempts_per_state;
  std::vector<std::size_t> successes(states.size(), 0);
  std::vector<std::vector<std::size_t>> flips_hist(states.size());

  detail::parallel_for(states.size(), options.threads, [&](std::size_t k) {
    NetworkState next(n);
    auto& hist = flips_hist[k];
    hist.assign(horizon + 1, 0);
    for (std::size_t a = 0; a < attempts; ++a) {
      Rng rng(options.seed, static_cast<std::uint64_t>(k) * attempts + a);
      NetworkState s = states[k];
      std::size_t flips = 0;
      bool ok = task.is_desired(s);
      for (std::size_t t = 0; t < horizon && !ok; ++t) {
        const std::size_t node = action_node(task, policy(s));
        if (node != 0) {
          s.flip(node - 1);
          ++flips;
        }
        pbn.step_into(s, next, rng);
        std::swap(s, next);
        ok = task.is_desired(s);
      }
      successes[k] += ok ? 1U : 0U;
      ++hist[flips];
    }
  });

  report.perturbation_counts.assign(horizon + 1, 0);
  double flip_total = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    report.per_state.push_back({states[k], successes[k]});
    report.successes += successes[k];
    for (std::size_t f = 0; f <= horizon; ++f) {
      report.perturbation_counts[f] += flips_hist[k][f];
      flip_total += static_cast<double>(f * flips_hist[k][f]);
    }
  }
  report.attempts = states.size() * attempts;
  if (report.attempts > 0) {
    const double n_att = static_cast<double>(report.attempts);
    report.success_rate = static_cast<double>(report.successes) / n_att;
    report.standard_error = std::sqrt(report.success_rate * (1.0 - report.success_rate) / n_att);
    report.mean_perturbations = flip_total / n_att;
  }
  return report;
}

RandomBaselineReport random_perturbation_baseline(const Pbn& pbn, const ControlTask& task,
                                                  const SweepOptions& options, std::size_t max_steps) {
  require_attractor_task(task, "random_perturbation_baseline");
  const std::size_t n = pbn.size();
  bool exhaustive = true;
  const auto states = initial_states(n, options, exhaustive);
  const std::size_t attempts = options.attempts_per_state;
  const std::size_t actions = action_space_size(task);

  struct Totals {
    double steps = 0.0;
    double flips = 0.0;
    std::size_t censored = 0;
  };
  std::vector<Totals> per_state(states.size());
  detail::parallel_for(states.size(), options.threads, [&](std::size_t k) {
    NetworkState next(n);
    for (std::size_t a = 0; a < attempts; ++a) {
      Rng rng(options.seed, static_cast<std::uint64_t>(k) * attempts + a);
      NetworkState s = states[k];
      std::size_t t = 0;
      while (!task.is_desired(s) && t < max_steps) {
        const std::size_t node = action_node(task, static_cast<std::size_t>(rng.below(actions)));
        if (node != 0) {
          s.flip(node - 1);
          per_state[k].flips += 1.0;
        }
        pbn.step_into(s, next, rng);
        std::swap(s, next);
        ++t;
      }
      per_state[k].steps += static_cast<double>(t);
      per_state[k].censored += task.is_desired(s) ? 0U : 1U;
    }
  });

  RandomBaselineReport report;
  report.initial_states = states.size();
  report.attempts = states.size() * attempts;
  double steps = 0.0;
  double flips = 0.0;
  for (const auto& t : per_state) {
    steps += t.steps;
    flips += t.flips;
    report.censored += t.censored;
  }
  if (report.attempts > 0) {
    report.mean_steps = steps / static_cast<double>(report.attempts);
    report.mean_perturbations = flips / static_cast<double>(report.attempts);
  }
  return report;
}

SsdShiftReport ssd_shift(const Pbn& pbn, const ControlTask& task, const Policy& policy, std::size_t runs,
                         std::size_t steps, std::uint64_t seed, std::size_t threads) {
  if (task.attractor_mode()) {
    throw std::invalid_argument("ssd_shift needs a subset-target task");
  }
  const StatePredicate predicate = [&task](const NetworkState& s) { return task.is_desired(s); };
  MonteCarloOptions mc;
  mc.runs = runs;
  mc.steps_per_run = steps;
  mc.threads = threads;

  SsdShiftReport report;
  report.runs = runs;
  report.steps = steps;
  mc.seed = seed;
  report.uncontrolled = monte_carlo_ssd(pbn, mc, {}, predicate);
  mc.seed = seed + 1;
  report.controlled = monte_carlo_ssd(pbn, mc, policy_controller(policy, task), predicate);
  report.uncontrolled_mass = report.uncontrolled.predicate_mass;
  report.controlled_mass = report.controlled.predicate_mass;
  report.pooled_standard_error = std::sqrt(report.uncontrolled.predicate_mass_se * report.uncontrolled.predicate_mass_se +
                                           report.controlled.predicate_mass_se * report.controlled.predicate_mass_se);
  return report;
}

std::string render_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("render_line_chart: need matching, non-empty series");
  }
  constexpr double width = 640.0;
  constexpr double height = 400.0;
  constexpr double left = 70.0;
  constexpr double right = 20.0;
  constexpr double top = 40.0;
  constexpr double bottom = 50.0;
  auto [x_lo_it, x_hi_it] = std::minmax_element(x.begin(), x.end());
  auto [y_lo_it, y_hi_it] = std::minmax_element(y.begin(), y.end());
  double x_lo = *x_lo_it;
  double x_hi = *x_hi_it;
  double y_lo = *y_lo_it;
  double y_hi = *y_hi_it;
  if (x_hi <= x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi <= y_lo) {
    const double pad = std::max(std::abs(y_lo) * 0.1, 0.5);
    y_lo -= pad;
    y_hi += pad;
  }
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double v) { return top + (y_hi - v) / (y_hi - y_lo) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(title) << "</text>\n";
  svg << "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", top + plot_h) << "\" x2=\""
      << fmt("%.2f", left + plot_w) << "\" y2=\"" << fmt("%.2f", top + plot_h) << "\"/>\n";
  svg << "<line x1=\"" << fmt("%.2f", left) << "\" y1=\"" << fmt("%.2f", top) << "\" x2=\"" << fmt("%.2f", left)
      << "\" y2=\"" << fmt("%.2f", top + plot_h) << "\"/>\n";
  svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_lo + (x_hi - x_lo) * i / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * i / 4.0;
    svg << "<text x=\"" << fmt("%.2f", px(xv)) << "\" y=\"" << fmt("%.2f", top + plot_h + 16)
        << "\" text-anchor=\"middle\">" << fmt("%.6g", xv) << "</text>\n";
    svg << "<text x=\"" << fmt("%.2f", left - 6) << "\" y=\"" << fmt("%.2f", py(yv) + 4)
        << "\" text-anchor=\"end\">" << fmt("%.6g", yv) << "</text>\n";
  }
  svg << "<text x=\"" << fmt("%.2f", left + plot_w / 2) << "\" y=\"" << fmt("%.2f", height - 10)
      << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
  svg << "<text transform=\"translate(16 " << fmt("%.2f", top + plot_h / 2)
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape_xml(y_label) << "</text>\n";
  svg << "</g>\n<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    svg << (i ? " " : "") << fmt("%.2f", px(x[i])) << "," << fmt("%.2f", py(y[i]));
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

std::string render_histogram(const std::string& title, const std::vector<double>& probabilities) {
  if (probabilities.empty()) {
    throw std::invalid_argument("render_histogram: empty distribution");
  }
  constexpr double left = 70.0;
  constexpr double top = 40.0;
  constexpr double plot_w = 550.0;
  constexpr double plot_h = 310.0;
  const double y_hi = std::max(*std::max_element(probabilities.begin(), probabilities.end()), 1e-12);
  const double bar = plot_w / static_cast<double>(probabilities.size());

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  svg << "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << escape_xml(title) << "</text>\n<g fill=\"#1f77b4\">\n";
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double h = probabilities[i] / y_hi * plot_h;
    if (h <= 0.0) continue;
    svg << "<rect x=\"" << fmt("%.3f", left + bar * static_cast<double>(i)) << "\" y=\"" << fmt("%.3f", top + plot_h - h)
        << "\" width=\"" << fmt("%.3f", bar) << "\" height=\"" << fmt("%.3f", h) << "\"/>\n";
  }
  svg << "</g>\n<g stroke=\"black\" stroke-width=\"1\">\n";
  svg << "<line x1=\"70\" y1=\"350\" x2=\"620\" y2=\"350\"/>\n<line x1=\"70\" y1=\"40\" x2=\"70\" y2=\"350\"/>\n</g>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = static_cast<double>(probabilities.size()) * i / 4.0;
    const double yv = y_hi * i / 4.0;
    svg << "<text x=\"" << fmt("%.2f", left + plot_w * i / 4.0) << "\" y=\"366\" text-anchor=\"middle\">"
        << fmt("%.6g", xv) << "</text>\n";
    svg << "<text x=\"64\" y=\"" << fmt("%.2f", top + plot_h - plot_h * i / 4.0 + 4) << "\" text-anchor=\"end\">"
        << fmt("%.4g", yv) << "</text>\n";
  }
  svg << "<text x=\"345\" y=\"390\" text-anchor=\"middle\">state index</text>\n";
  svg << "<text transform=\"translate(16 195) rotate(-90)\" text-anchor=\"middle\">probability</text>\n</g>\n</svg>\n";
  return svg.str();
}

CurveFiles training_curves(const std::vector<MetricsRow>& metrics, const std::filesystem::path& dir,
                           const std::string& title) {
  if (metrics.empty()) {
    throw std::invalid_argument("training_curves: empty metrics log");
  }
  std::filesystem::create_directories(dir);
  std::vector<double> x;
  std::vector<double> perturbations;
  std::vector<double> reward;
  for (const auto& row : metrics) {
    x.push_back(static_cast<double>(row.index));
    perturbations.push_back(row.avg_perturbations);
    reward.push_back(row.avg_reward);
  }
  CurveFiles files{dir / "metrics.csv", dir / "avg_perturbations.svg", dir / "avg_reward.svg"};
  write_text_file(files.csv, metrics_csv(metrics));
  write_text_file(files.perturbations_svg,
                  render_line_chart(title + ": average perturbations", "epoch", "avg perturbations", x,
                                    perturbations));
  write_text_file(files.reward_svg, render_line_chart(title + ": average reward", "epoch", "avg reward", x, reward));
  return files;
}

}  // namespace pbnrl
