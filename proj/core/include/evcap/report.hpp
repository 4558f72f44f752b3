#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evcap/deployment.hpp"
#include "evcap/instance.hpp"
#include "evcap/queueing.hpp"

namespace evcap::report {

struct StationQueue {
  int node = 0;
  int loc = 0;
  int posts = 0;
  double lambda = 0.0;
  queueing::QueueMeasures measures;
};

/// Queue measures of every open station and their probability-weighted
/// averages (weights are node probabilities, closed stations excluded).
struct QueueReport {
  std::vector<StationQueue> stations;
  double avg_wait_min = 0.0;
  double avg_queue_len = 0.0;
  double min_p_le_b = 1.0;
  int unstable = 0;
  bool service_ok = true;  // every station reaches the service level
};

/// Evaluates the deployment as M/M/s queues with threshold `b` (the
/// instance's own threshold when omitted).
QueueReport queue_report(const Instance& inst, const Deployment& dep, std::optional<int> b = {});

struct Metrics {
  double ts_pct = 0.0;  // (t* - t) / t* * 100
  double gap = 0.0;     // (z - z*) / z
  double gap_lb = 0.0;  // (z - lb) / z
};

/// Throws DomainError unless t_star > 0 and z_alg != 0.
Metrics compare_metrics(double t_star, double z_star, double t_alg, double z_alg, double lb_alg);

/// One benchmark cell. Column order and names follow `csv_header()`.
struct Row {
  std::string instance_id;
  std::string algo;
  int m = 0;
  int b = 0;
  double alpha = 0.0;
  double t_s = 0.0;
  double z = 0.0;
  double lb = 0.0;
  double gap = 0.0;
  double ts_pct = 0.0;
  double avg_wait_min = 0.0;
  double avg_queue_len = 0.0;
  bool service_ok = true;

  friend bool operator==(const Row&, const Row&) = default;
};

std::vector<std::string> csv_header();

/// Rows sorted by (instance, M, b), stable among equal keys.
std::vector<Row> sorted(std::vector<Row> rows);

/// Header plus one line per row; reals use the shortest exact rendering so
/// parse_csv reproduces them bit for bit.
std::string render_csv(const std::vector<Row>& rows);

/// Throws ParseError on a wrong header, field count or number.
std::vector<Row> parse_csv(std::string_view text);

/// Rows whose objective rises when b grows, for the same instance, M and
/// algorithm. Each entry names the offending instance/algo pair.
std::vector<std::string> b_trend_violations(const std::vector<Row>& rows);

/// Aligned text table with an extra column flagging b-trend violations.
std::string render_text(const std::vector<Row>& rows);

}  // namespace evcap::report
