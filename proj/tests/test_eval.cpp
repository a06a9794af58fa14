#include <doctest.h>

#include <cmath>

#include "pbnrl/eval.hpp"
#include "pbnrl/fixtures.hpp"

using namespace pbnrl;

namespace {

/// Flips the lowest-numbered active node, steering towards all-zeros.
Policy clear_lowest(std::size_t n) {
  return [n](const NetworkState& s) -> std::size_t {
    for (std::size_t i = 0; i < n; ++i) {
      if (s.get(i)) return i + 1;
    }
    return 0;
  };
}

Policy noop() {
  return [](const NetworkState&) -> std::size_t { return 0; };
}

}  // namespace

TEST_CASE("success never drops with a longer horizon") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  SweepOptions opts;
  opts.attempts_per_state = 4;
  opts.seed = 3;
  opts.threads = 4;
  std::vector<SuccessReport> reports;
  for (std::size_t h : {3, 6, 11, 20}) {
    opts.horizon = h;
    reports.push_back(success_sweep(pbn, task, clear_lowest(10), opts));
  }
  for (std::size_t k = 1; k < reports.size(); ++k) {
    CHECK(reports[k].success_rate >= reports[k - 1].success_rate);
    for (std::size_t s = 0; s < reports[k].per_state.size(); ++s) {
      CHECK(reports[k].per_state[s].successes >= reports[k - 1].per_state[s].successes);
    }
  }
  CHECK(reports.back().initial_states == 1024);
  CHECK(reports.back().attempts == 4096);
  CHECK(reports.back().exhaustive);
}

TEST_CASE("success report statistics") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  SweepOptions opts;
  opts.attempts_per_state = 3;
  opts.seed = 1;
  const SuccessReport r = success_sweep(pbn, task, noop(), opts);
  CHECK(r.horizon == 11);
  CHECK(r.success_rate == doctest::Approx(static_cast<double>(r.successes) / r.attempts));
  CHECK(r.standard_error ==
        doctest::Approx(std::sqrt(r.success_rate * (1 - r.success_rate) / static_cast<double>(r.attempts))));
  // the desired state itself counts as an immediate success
  CHECK(r.per_state[0].initial == NetworkState(10));
  CHECK(r.per_state[0].successes == 3);
  // without intervention, the other fixed point never reaches all-zeros
  CHECK(r.per_state[512].successes == 0);
  std::size_t counted = 0;
  for (auto c : r.perturbation_counts) counted += c;
  CHECK(counted == r.attempts);
  CHECK(r.mean_perturbations == 0.0);
}

TEST_CASE("sweeps are thread independent") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  SweepOptions opts;
  opts.attempts_per_state = 2;
  opts.seed = 9;
  opts.threads = 1;
  const auto a = success_sweep(pbn, task, clear_lowest(10), opts);
  opts.threads = 5;
  const auto b = success_sweep(pbn, task, clear_lowest(10), opts);
  CHECK(a.successes == b.successes);
  CHECK(a.perturbation_counts == b.perturbation_counts);
}

TEST_CASE("large networks are swept over sampled initial states") {
  const Pbn pbn(fixture_synthetic28());
  ControlTask task = make_attractor_task(pbn, "zeros", {NetworkState(28)}, 10, {}, 0);
  SweepOptions opts;
  opts.attempts_per_state = 1;
  opts.sample_states = 300;
  opts.threads = 2;
  const auto r = success_sweep(pbn, task, noop(), opts);
  CHECK_FALSE(r.exhaustive);
  CHECK(r.initial_states == 300);
}

TEST_CASE("null controller leaves the steady state unchanged") {
  const Pbn pbn(fixture_synthetic28());
  const ControlTask task = task_subset_pirin(28);
  const SsdShiftReport r = ssd_shift(pbn, task, noop(), 300, 4000, 7, 4);
  CHECK(std::abs(r.shift()) <= 3 * r.pooled_standard_error);
  CHECK(r.uncontrolled.samples == 300 * 4000);
}

TEST_CASE("a sensible controller raises the desirable mass") {
  const Pbn pbn(fixture_synthetic28());
  const ControlTask task = task_subset_pirin(28);
  const Policy hold_pirin_off = [](const NetworkState& s) -> std::size_t { return s.get(0) ? 1 : 0; };
  const SsdShiftReport r = ssd_shift(pbn, task, hold_pirin_off, 100, 2000, 7, 4);
  CHECK(r.shift() > 3 * r.pooled_standard_error);
  CHECK_THROWS_AS(ssd_shift(pbn, task_n10(Pbn(fixture_n10())), noop(), 2, 10, 1), std::invalid_argument);
}

TEST_CASE("random perturbation baseline") {
  const Pbn pbn(fixture_n10());
  const ControlTask task = task_n10(pbn);
  SweepOptions opts;
  opts.attempts_per_state = 1;
  opts.seed = 2;
  opts.threads = 4;
  const auto r = random_perturbation_baseline(pbn, task, opts, 1000000);
  CHECK(r.initial_states == 1024);
  CHECK(r.censored == 0);
  CHECK(r.mean_steps > 1.0);
  CHECK(r.mean_perturbations < r.mean_steps);
  CHECK(r.mean_perturbations > 0.5 * r.mean_steps);
}

TEST_CASE("charts are well-formed SVG") {
  const std::string chart = render_line_chart("t", "epoch", "y", {0, 1, 2}, {3, 1, 2});
  CHECK(chart.rfind("<svg", 0) == 0);
  CHECK(chart.find("</svg>") != std::string::npos);
  CHECK(chart == render_line_chart("t", "epoch", "y", {0, 1, 2}, {3, 1, 2}));
  const std::string hist = render_histogram("h", std::vector<double>(128, 1.0 / 128));
  CHECK(hist.find("</svg>") != std::string::npos);
  CHECK_THROWS(training_curves({}, ".", "x"));
}
