#include "evcap/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "evcap/errors.hpp"

namespace evcap::report {

namespace {

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

std::string exact(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double to_double(const std::string& s, int line, const char* field) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    // from_chars rejects "inf"/"nan" spellings produced for unbounded values.
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
    throw ParseError("bad number '" + s + "' in column " + field, line, field);
  }
  return v;
}

int to_int(const std::string& s, int line, const char* field) {
  int v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ParseError("bad integer '" + s + "' in column " + field, line, field);
  }
  return v;
}

}  // namespace

QueueReport queue_report(const Instance& inst, const Deployment& dep, std::optional<int> b) {
  const int threshold = b.value_or(inst.queue.b);
  const auto cov = coverage_sets(inst);
  QueueReport rep;
  double weight = 0.0;
  for (int n = 0; n < inst.num_nodes(); ++n) {
    const auto row = dep.open.row(sz(n));
    bool covered = true;
    for (int i = 0; i < inst.num_zones() && covered; ++i) {
      const auto& near = cov.locs_near[sz(n)][sz(i)];
      covered = std::any_of(near.begin(), near.end(), [&](int j) { return row[sz(j)] != 0; });
    }
    if (!covered) throw CoverageError("queue report needs every zone covered at node " + std::to_string(n));
    const auto lambda = demand_rates(inst, cov, row, n);
    const double phi = inst.tree[sz(n)].prob;
    for (int j = 0; j < inst.num_locations(); ++j) {
      if (!row[sz(j)]) continue;
      StationQueue st{n, j, dep.posts(sz(n), sz(j)), lambda[sz(j)], {}};
      st.measures = queueing::mms_measures(st.lambda, inst.queue.mu, st.posts, threshold);
      if (!st.measures.stable) {
        ++rep.unstable;
      } else {
        rep.avg_wait_min += phi * st.measures.wq_minutes();
        rep.avg_queue_len += phi * st.measures.lq;
        weight += phi;
      }
      rep.min_p_le_b = std::min(rep.min_p_le_b, st.measures.p_le_b);
      rep.stations.push_back(st);
    }
  }
  if (weight > 0.0) {
    rep.avg_wait_min /= weight;
    rep.avg_queue_len /= weight;
  }
  if (rep.unstable > 0) {
    rep.avg_wait_min = HUGE_VAL;
    rep.avg_queue_len = HUGE_VAL;
  }
  rep.service_ok = rep.unstable == 0 && rep.min_p_le_b >= inst.queue.alpha - 1e-6;
  return rep;
}

Metrics compare_metrics(double t_star, double z_star, double t_alg, double z_alg, double lb_alg) {
  if (!(t_star > 0.0)) throw DomainError("reference time must be positive");
  if (z_alg == 0.0) throw DomainError("objective must be nonzero");
  return {(t_star - t_alg) / t_star * 100.0, (z_alg - z_star) / z_alg, (z_alg - lb_alg) / z_alg};
}

std::vector<std::string> csv_header() {
  return {"instance_id", "algo", "M", "b", "alpha", "t_s", "z", "lb", "gap", "ts_pct",
          "avg_wait_min", "avg_queue_len", "service_ok"};
}

std::vector<Row> sorted(std::vector<Row> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.instance_id, a.m, a.b) < std::tie(b.instance_id, b.m, b.b);
  });
  return rows;
}

std::string render_csv(const std::vector<Row>& rows) {
  std::ostringstream os;
  const auto head = csv_header();
  for (std::size_t k = 0; k < head.size(); ++k) os << (k ? "," : "") << head[k];
  os << '\n';
  for (const auto& r : sorted(rows)) {
    os << r.instance_id << ',' << r.algo << ',' << r.m << ',' << r.b << ',' << exact(r.alpha) << ','
       << exact(r.t_s) << ',' << exact(r.z) << ',' << exact(r.lb) << ',' << exact(r.gap) << ','
       << exact(r.ts_pct) << ',' << exact(r.avg_wait_min) << ',' << exact(r.avg_queue_len) << ','
       << (r.service_ok ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<Row> parse_csv(std::string_view text) {
  std::vector<Row> rows;
  const auto head = csv_header();
  int line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto f = split(line);
    if (!header_seen) {
      if (f != head) throw ParseError("unexpected CSV header", line_no);
      header_seen = true;
      continue;
    }
    if (f.size() != head.size()) {
      throw ParseError("expected " + std::to_string(head.size()) + " fields, got " + std::to_string(f.size()), line_no);
    }
    Row r;
    r.instance_id = f[0];
    r.algo = f[1];
    r.m = to_int(f[2], line_no, "M");
    r.b = to_int(f[3], line_no, "b");
    r.alpha = to_double(f[4], line_no, "alpha");
    r.t_s = to_double(f[5], line_no, "t_s");
    r.z = to_double(f[6], line_no, "z");
    r.lb = to_double(f[7], line_no, "lb");
    r.gap = to_double(f[8], line_no, "gap");
    r.ts_pct = to_double(f[9], line_no, "ts_pct");
    r.avg_wait_min = to_double(f[10], line_no, "avg_wait_min");
    r.avg_queue_len = to_double(f[11], line_no, "avg_queue_len");
    r.service_ok = to_int(f[12], line_no, "service_ok") != 0;
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("missing CSV header", 1);
  return rows;
}

std::vector<std::string> b_trend_violations(const std::vector<Row>& rows) {
  // (instance, M, algo) -> objective by b
  std::map<std::tuple<std::string, int, std::string>, std::map<int, double>> series;
  for (const auto& r : rows) series[{r.instance_id, r.m, r.algo}][r.b] = r.z;
  std::vector<std::string> out;
  for (const auto& [key, by_b] : series) {
    double prev = HUGE_VAL;
    for (const auto& [b, z] : by_b) {
      if (z > prev + 1e-6 * std::max(1.0, std::abs(prev))) {
        out.push_back(std::get<0>(key) + "/" + std::get<2>(key) + " M=" + std::to_string(std::get<1>(key)) +
                      " b=" + std::to_string(b));
      }
      prev = z;
    }
  }
  return out;
}

std::string render_text(const std::vector<Row>& rows) {
  const auto ordered = sorted(rows);
  std::set<std::string> bad;
  for (const auto& v : b_trend_violations(ordered)) bad.insert(v);

  std::vector<std::vector<std::string>> cells;
  cells.push_back({"instance", "algo", "M", "b", "alpha", "t(s)", "z", "lb", "gap%", "TS%", "wait(min)",
                   "queue", "service", "b-trend"});
  for (const auto& r : ordered) {
    const std::string id = r.instance_id + "/" + r.algo + " M=" + std::to_string(r.m) + " b=" + std::to_string(r.b);
    cells.push_back({r.instance_id, r.algo, std::to_string(r.m), std::to_string(r.b), fixed(r.alpha, 2),
                     fixed(r.t_s, 2), fixed(r.z, 2), fixed(r.lb, 2), fixed(100.0 * r.gap, 1),
                     fixed(r.ts_pct, 1), fixed(r.avg_wait_min, 2), fixed(r.avg_queue_len, 2),
                     r.service_ok ? "ok" : "FAIL", bad.count(id) ? "RISE" : "ok"});
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      const auto pad = std::string(width[c] - row[c].size(), ' ');
      // Text columns left-aligned, numbers right-aligned.
      if (c < 2 || c >= 12) os << row[c] << pad;
      else os << pad << row[c];
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace evcap::report
