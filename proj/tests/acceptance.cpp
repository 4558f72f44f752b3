// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cli.hpp"
#include "evcap/approx.hpp"
#include "evcap/bp.hpp"
#include "evcap/errors.hpp"
#include "evcap/formulation.hpp"
#include "evcap/generator.hpp"
#include "evcap/queueing.hpp"
#include "evcap/report.hpp"
#include "support.hpp"

using namespace evcap;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

// Fails the verdict with the first message only; later failures are counted.
class Check {
 public:
  void expect(bool cond, const std::string& msg) {
    if (cond) return;
    if (failures_++ == 0) first_ = msg;
  }
  Verdict verdict(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, std::to_string(failures_) + " failure(s), first: " + first_};
  }

 private:
  int failures_ = 0;
  std::string first_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

// Optima shared by the oracle, monotonicity and audit criteria.
struct Solved {
  Instance inst;
  test_support::Optimum opt;
};
std::vector<Solved> g_optima;

Verdict rho_closed_forms() {
  Check c;
  c.expect(std::abs(queueing::rho_alpha(1, 0, 0.9) - std::sqrt(0.1)) <= 1e-8, "rho(1,0,0.9) != sqrt(0.1)");
  c.expect(std::abs(queueing::rho_alpha(1, 1, 0.9) - std::cbrt(0.1)) <= 1e-8, "rho(1,1,0.9) != 0.1^(1/3)");
  int cases = 0;
  for (double alpha : {0.5, 0.9, 0.95}) {
    for (int m = 1; m <= 10; ++m) {
      for (int b = 0; b <= 5; ++b) {
        const double target = 1.0 / (1.0 - alpha);
        const double lhs = queueing::service_level_lhs(m, b, queueing::rho_alpha(m, b, alpha));
        c.expect(std::abs(lhs - target) <= 1e-8 * target,
                 fmt("L(%g,%g,rho) off by %g", m, b, lhs / target - 1.0));
        ++cases;
      }
    }
  }
  return c.verdict(std::to_string(cases) + " (m,b,alpha) cases");
}

Verdict surrogate_equivalence() {
  Check c;
  const double mu = 2.5;
  int cases = 0;
  for (double alpha : {0.8, 0.9}) {
    for (int s = 1; s <= 6; ++s) {
      for (int b = 0; b <= 3; ++b) {
        const double lambda = mu * queueing::rho_alpha(s, b, alpha);
        const auto at = queueing::mms_measures(lambda, mu, s, b);
        const auto above = queueing::mms_measures(lambda * 1.01, mu, s, b);
        c.expect(at.p_le_b >= alpha - 1e-6, fmt("s=%g b=%g: P=%g below alpha at the threshold", s, b, at.p_le_b));
        c.expect(above.p_le_b < alpha, fmt("s=%g b=%g: P=%g still meets alpha at 1.01x", s, b, above.p_le_b));
        ++cases;
      }
    }
  }
  return c.verdict(std::to_string(cases) + " (s,b,alpha) cases");
}

Verdict model_size() {
  Check c;
  for (std::uint64_t seed : {1, 7, 42}) {
    for (auto [mj, expected] : {std::pair{8, 1080}, std::pair{10, 1320}}) {
      const auto inst = generate(preset_params(Preset::Small, mj), seed);
      const int got = build_evcec(inst).model.num_binaries();
      c.expect(got == expected, fmt("M=%g: %g binaries, expected %g", mj, got, expected));
    }
  }
  return c.verdict("1080 and 1320 binaries for M=8 and M=10");
}

Verdict rounding_lemma() {
  Check c;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto inst = test_support::tiny_instance(seed, int(seed % 3));
    try {
      milp::MipLimits lim;
      lim.gap_tol = 1e-9;
      const auto r = approx::approximate(inst, lim);
      const auto rep = check_feasible(inst, r.deployment);
      c.expect(rep.feasible, "seed " + std::to_string(seed) + ": " +
                                 (rep.violations.empty() ? std::string("?") : rep.violations[0].describe()));
      c.expect(r.z_appr >= r.lb - 1e-9, "seed " + std::to_string(seed) + ": z_appr below lb");
      c.expect(r.gap_lb >= -1e-12 && r.gap_lb < 1.0, fmt("seed %g: gap_lb %g outside [0,1)", double(seed), r.gap_lb));
      worst = std::max(worst, r.gap_lb);
    } catch (const Error& e) {
      c.expect(false, "seed " + std::to_string(seed) + ": " + e.what());
    }
  }
  return c.verdict(fmt("100 instances, max gap_lb %.4f", worst));
}

Verdict oracle_equivalence() {
  Check c;
  double worst = 0.0;
  int cases = 0;
  for (int b = 0; b <= 2; ++b) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto inst = test_support::tiny_instance(seed, b);
      const auto opt = test_support::mip_optimum(inst);
      const std::string tag = "seed " + std::to_string(seed) + " b " + std::to_string(b);
      if (opt.status != milp::MipStatus::Optimal) {
        c.expect(false, tag + ": oracle status " + milp::to_string(opt.status));
        continue;
      }
      bp::Limits lim;
      lim.gap_tol = 1e-9;
      const auto r = bp::branch_and_price(inst, lim);
      c.expect(r.status == milp::MipStatus::Optimal, tag + ": bp status " + milp::to_string(r.status));
      const double rel = std::abs(r.z - opt.z) / std::max(1.0, std::abs(opt.z));
      c.expect(rel <= 1e-6, tag + fmt(": bp %.9g vs mip %.9g", r.z, opt.z));
      worst = std::max(worst, rel);
      ++cases;
      g_optima.push_back({std::move(inst), opt});
    }
  }
  return c.verdict(std::to_string(cases) + fmt(" instances, max relative difference %.2e", worst));
}

Verdict b_monotonicity() {
  Check c;
  int strict = 0;
  for (std::uint64_t seed = 21; seed <= 25; ++seed) {
    double prev = milp::kInf;
    for (int b = 0; b <= 3; ++b) {
      auto inst = test_support::tiny_instance(seed, b);
      const auto opt = test_support::mip_optimum(inst);
      if (opt.status != milp::MipStatus::Optimal) {
        c.expect(false, fmt("seed %g b %g: oracle not optimal", double(seed), b));
        break;
      }
      c.expect(opt.z <= prev + 1e-6 * std::max(1.0, prev), fmt("seed %g b %g: z rose to %.6g", double(seed), b, opt.z));
      if (opt.z < prev - 1e-6 * std::max(1.0, opt.z)) strict += prev < milp::kInf ? 1 : 0;
      prev = opt.z;
      g_optima.push_back({std::move(inst), opt});
    }
  }
  c.expect(strict > 0, "no strict decrease across the suite");
  return c.verdict(std::to_string(strict) + " strict decreases over 5 instances");
}

Verdict heuristic_quality() {
  Check c;
  cli::SolveOptions opts;
  double medium_max = 0.0;
  for (auto preset : {Preset::Small, Preset::Medium}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const auto inst = generate(preset_params(preset, 10), seed);
      const auto o = cli::run_algorithm(inst, "heuristic", opts);
      const std::string tag = std::string(preset == Preset::Small ? "small" : "medium") + " seed " + std::to_string(seed);
      c.expect(o.deployment.has_value() && check_feasible(inst, *o.deployment).feasible, tag + ": infeasible");
      if (preset == Preset::Medium) medium_max = std::max(medium_max, o.seconds);
    }
  }
  c.expect(medium_max < 5.0, fmt("medium run took %.2f s", medium_max));
  for (const auto& s : g_optima) {
    const auto o = cli::run_algorithm(s.inst, "heuristic", opts);
    c.expect(o.z >= s.opt.z - 1e-6 * std::max(1.0, s.opt.z), fmt("heuristic %.6g below optimum %.6g", o.z, s.opt.z));
  }
  return c.verdict("200 preset instances feasible, " + std::to_string(g_optima.size()) +
                   fmt(" oracle comparisons, medium max %.2f s", medium_max));
}

Verdict metric_arithmetic() {
  Check c;
  char buf[32];
  const auto a = report::compare_metrics(194.0, 1.0, 62.0, 1.0, 1.0);
  std::snprintf(buf, sizeof buf, "%.1f%%", a.ts_pct);
  c.expect(std::string(buf) == "68.0%", std::string("time saving printed as ") + buf);
  const auto b = report::compare_metrics(1.0, 68841.0, 1.0, 68159.0, 68159.0);
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * b.gap);
  c.expect(std::string(buf) == "-1.0%", std::string("gap printed as ") + buf);
  return c.verdict("68.0% and -1.0%");
}

Verdict dw_identities() {
  Check c;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto inst = test_support::tiny_instance(seed % 10 + 1, 0);
    inst.locations[seed % 6].x0 = true;
    inst.locations[seed % 6].y0 = int(seed % 3) + 1;
    const auto dep = test_support::random_monotone_deployment(inst, seed);
    const auto coeffs = bp::cost_coefficients(inst);
    double sum = -coeffs.psi;
    for (const auto& col : bp::columns_of(coeffs, dep)) sum += col.cost;
    c.expect(std::abs(sum - objective_value(inst, dep)) <= 1e-6, fmt("seed %g: telescoped %.9g", double(seed), sum));
  }
  long records = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    bp::Limits lim;
    lim.gap_tol = 1e-9;
    lim.warm_start = seed % 2 == 0;
    const auto r = bp::branch_and_price(test_support::tiny_instance(seed, int(seed % 3)), lim);
    std::map<int, double> last;  // per branch node
    for (const auto& rec : r.cg_log) {
      ++records;
      if (rec.lagrangian_lb) {
        c.expect(*rec.lagrangian_lb <= rec.rmp_value + 1e-6,
                 fmt("seed %g: lagrangian %.9g above rmp %.9g", double(seed), *rec.lagrangian_lb, rec.rmp_value));
      }
      auto it = last.find(rec.branch_node);
      if (it != last.end()) {
        c.expect(rec.rmp_value <= it->second + 1e-6 * std::max(1.0, std::abs(it->second)),
                 fmt("seed %g: rmp rose %.9g -> %.9g", double(seed), it->second, rec.rmp_value));
      }
      last[rec.branch_node] = rec.rmp_value;
    }
  }
  return c.verdict("50 telescoping checks, " + std::to_string(records) + " CG iterations");
}

Verdict service_audit() {
  Check c;
  long stations = 0;
  for (const auto& s : g_optima) {
    const auto rep = report::queue_report(s.inst, s.opt.dep);
    for (const auto& st : rep.stations) {
      ++stations;
      c.expect(st.measures.p_le_b >= s.inst.queue.alpha - 1e-6,
               fmt("station with %g posts at lambda %.6g: P=%.6g", st.posts, st.lambda, st.measures.p_le_b));
    }
  }
  c.expect(stations > 0, "no optima to audit");
  return c.verdict(std::to_string(stations) + " open stations over " + std::to_string(g_optima.size()) + " optima");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"rho closed forms and service-level identity", rho_closed_forms},
      {"surrogate equivalence with M/M/s", surrogate_equivalence},
      {"model size of the small preset", model_size},
      {"rounded relaxation is feasible and bounded", rounding_lemma},
      {"branch-and-price matches the MIP oracle", oracle_equivalence},
      {"optimal cost nonincreasing in b", b_monotonicity},
      {"heuristic feasibility, quality and speed", heuristic_quality},
      {"time-saving and gap arithmetic", metric_arithmetic},
      {"decomposition identities", dw_identities},
      {"service level of optima", service_audit},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    std::printf("%s %2d %s: %s (%.2f s)\n", v.ok ? "PASS" : "FAIL", index, name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += v.ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
