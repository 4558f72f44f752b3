#include "evcap/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evcap/errors.hpp"

namespace evcap {

namespace {

using json = nlohmann::ordered_json;

std::size_t sz(int v) { return static_cast<std::size_t>(v); }

class Reader {
 public:
  const json* field(const json& obj, const char* key, const std::string& path) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!obj.is_object()) throw ParseError(describe(path) + " must be an object", 0, path);
    const auto it = obj.find(key);
    if (it == obj.end()) {
      missing_.push_back("missing field " + where);
      return nullptr;
    }
    return &*it;
  }

  double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ParseError(describe(path) + " must be a number", 0, path);
    return v.get<double>();
  }

  int integer(const json& v, const std::string& path) {
    if (v.is_number_integer()) return v.get<int>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 1e9) return static_cast<int>(d);
    }
    throw ParseError(describe(path) + " must be an integer", 0, path);
  }

  bool boolean(const json& v, const std::string& path) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) return v.get<int>() == 1;
    throw ParseError(describe(path) + " must be a boolean", 0, path);
  }

  const json& array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ParseError(describe(path) + " must be an array", 0, path);
    return v;
  }

  std::vector<double> numbers(const json& v, const std::string& path) {
    std::vector<double> out;
    std::size_t k = 0;
    for (const auto& e : array(v, path)) out.push_back(number(e, path + "[" + std::to_string(k++) + "]"));
    return out;
  }

  // Reads obj[key] with `read` when present; records it as missing otherwise.
  template <typename T, typename F>
  void read(const json& obj, const char* key, const std::string& path, T& out, F&& conv) {
    if (const json* v = field(obj, key, path)) out = conv(*v, path.empty() ? key : path + "." + key);
  }

  const std::vector<std::string>& missing() const { return missing_; }

 private:
  static std::string describe(const std::string& path) {
    return path.empty() ? "document" : "field " + path;
  }
  std::vector<std::string> missing_;
};

int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

json to_json(const Instance& inst, bool with_seed) {
  json doc;
  json zones = json::array();
  for (const auto& z : inst.zones) zones.push_back({{"id", z.id}, {"a", z.a}});
  json locs = json::array();
  for (const auto& l : inst.locations) {
    locs.push_back({{"id", l.id}, {"m_max", l.m_max}, {"x0", l.x0}, {"y0", l.y0}});
  }
  json dist = json::array();
  for (std::size_t i = 0; i < inst.dist.rows(); ++i) {
    json row = json::array();
    for (double d : inst.dist.row(i)) row.push_back(d);
    dist.push_back(std::move(row));
  }
  json tree = json::array();
  for (const auto& n : inst.tree) {
    json node;
    node["id"] = n.id;
    node["parent"] = n.parent == kInitialState ? json(nullptr) : json(n.parent);
    node["prob"] = n.prob;
    node["w"] = n.w;
    node["bcoef"] = n.bcoef;
    node["theta"] = n.theta;
    node["radius"] = n.radius;
    node["cost_build"] = n.cost_build;
    node["cost_post"] = n.cost_post;
    node["cost_op_station"] = n.cost_op_station;
    node["cost_op_post"] = n.cost_op_post;
    tree.push_back(std::move(node));
  }
  doc["zones"] = std::move(zones);
  doc["locations"] = std::move(locs);
  doc["dist"] = std::move(dist);
  doc["tree"] = std::move(tree);
  doc["queue"] = {{"mu", inst.queue.mu}, {"alpha", inst.queue.alpha}, {"b", inst.queue.b}};
  if (with_seed && inst.seed) doc["seed"] = *inst.seed;
  return doc;
}

}  // namespace

Instance instance_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("syntax error at line " + std::to_string(line) + ": " + e.what(), line);
  }

  Reader rd;
  Instance inst;
  auto num = [&](const json& v, const std::string& p) { return rd.number(v, p); };
  auto integer = [&](const json& v, const std::string& p) { return rd.integer(v, p); };
  auto boolean = [&](const json& v, const std::string& p) { return rd.boolean(v, p); };
  auto nums = [&](const json& v, const std::string& p) { return rd.numbers(v, p); };

  if (const json* zones = rd.field(doc, "zones", "")) {
    std::size_t k = 0;
    for (const auto& z : rd.array(*zones, "zones")) {
      const std::string p = "zones[" + std::to_string(k++) + "]";
      Zone zone;
      rd.read(z, "id", p, zone.id, integer);
      rd.read(z, "a", p, zone.a, num);
      inst.zones.push_back(zone);
    }
  }
  if (const json* locs = rd.field(doc, "locations", "")) {
    std::size_t k = 0;
    for (const auto& l : rd.array(*locs, "locations")) {
      const std::string p = "locations[" + std::to_string(k++) + "]";
      Location loc;
      rd.read(l, "id", p, loc.id, integer);
      rd.read(l, "m_max", p, loc.m_max, integer);
      rd.read(l, "x0", p, loc.x0, boolean);
      rd.read(l, "y0", p, loc.y0, integer);
      inst.locations.push_back(loc);
    }
  }
  if (const json* dist = rd.field(doc, "dist", "")) {
    const auto& rows = rd.array(*dist, "dist");
    std::vector<std::vector<double>> values;
    std::size_t k = 0;
    for (const auto& row : rows) {
      values.push_back(rd.numbers(row, "dist[" + std::to_string(k++) + "]"));
    }
    const std::size_t cols = values.empty() ? 0 : values.front().size();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i].size() != cols) {
        throw ParseError("dist rows must all have the same length", 0, "dist[" + std::to_string(i) + "]");
      }
    }
    inst.dist = Grid<double>(values.size(), cols);
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) inst.dist(i, j) = values[i][j];
    }
  }
  if (const json* tree = rd.field(doc, "tree", "")) {
    std::size_t k = 0;
    for (const auto& n : rd.array(*tree, "tree")) {
      const std::string p = "tree[" + std::to_string(k++) + "]";
      ScenarioNode node;
      rd.read(n, "id", p, node.id, integer);
      if (const json* parent = rd.field(n, "parent", p)) {
        node.parent = parent->is_null() ? kInitialState : rd.integer(*parent, p + ".parent");
      }
      rd.read(n, "prob", p, node.prob, num);
      rd.read(n, "w", p, node.w, nums);
      rd.read(n, "bcoef", p, node.bcoef, nums);
      rd.read(n, "theta", p, node.theta, nums);
      rd.read(n, "radius", p, node.radius, nums);
      rd.read(n, "cost_build", p, node.cost_build, nums);
      rd.read(n, "cost_post", p, node.cost_post, nums);
      rd.read(n, "cost_op_station", p, node.cost_op_station, nums);
      rd.read(n, "cost_op_post", p, node.cost_op_post, nums);
      inst.tree.push_back(std::move(node));
    }
  }
  if (const json* queue = rd.field(doc, "queue", "")) {
    rd.read(*queue, "mu", "queue", inst.queue.mu, num);
    rd.read(*queue, "alpha", "queue", inst.queue.alpha, num);
    rd.read(*queue, "b", "queue", inst.queue.b, integer);
  }
  if (doc.is_object() && doc.contains("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_unsigned() && !s.is_number_integer()) throw ParseError("field seed must be an integer", 0, "seed");
    inst.seed = s.get<std::uint64_t>();
  }

  if (!rd.missing().empty()) throw ValidationError(rd.missing());
  validate(inst);
  return inst;
}

std::string instance_to_json(const Instance& inst) { return to_json(inst, true).dump(2) + "\n"; }

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open instance file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write instance file " + path.string());
  out << instance_to_json(inst);
  if (!out) throw Error("failed writing instance file " + path.string());
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k) {
    s[sz(k)] = kHex[h & 0xF];
    h >>= 4;
  }
  return s;
}

std::string instance_hash(const Instance& inst) { return fnv1a_hex(to_json(inst, false).dump()); }

}  // namespace evcap
