#include "skyway/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "skyway/error.hpp"

namespace skyway {

using nlohmann::json;

std::uint64_t mix_seed(std::uint64_t value) {
  value += 0x9e3779b97f4a7c15ULL;
  value = (value ^ (value >> 30)) * 0xbf58476d1ce4e5b9ULL;
  value = (value ^ (value >> 27)) * 0x94d049bb133111ebULL;
  return value ^ (value >> 31);
}

std::size_t ScenarioConfig::runs_per_point() const {
  auto runs = static_cast<std::size_t>(std::lround(0.1 * static_cast<double>(node_count)));
  return std::max<std::size_t>(1, runs);
}

std::vector<std::string> check_config(const ScenarioConfig& c) {
  std::vector<std::string> out;
  auto need = [&](bool ok, const char* what) {
    if (!ok) out.emplace_back(what);
  };
  need(c.node_count >= 10 && c.node_count <= 60, "node_count must lie in [10, 60]");
  need(c.pads_per_node >= 1, "pads_per_node must be >= 1");
  need(c.drone_count >= 50 && c.drone_count <= 80, "drone_count must lie in [50, 80]");
  need(c.request_count >= 1, "request_count must be >= 1");
  need(c.battery_rate > 0.0, "battery_rate must be > 0");
  need(c.failure_rate >= 0.10 && c.failure_rate <= 0.50, "failure_rate must lie in [0.10, 0.50]");
  need(c.area_km > 0.0, "area_km must be > 0");
  need(c.min_node_gap_km >= 0.0, "min_node_gap_km must be >= 0");
  need(c.max_segment_km > 0.0, "max_segment_km must be > 0");
  need(c.min_trip_fraction >= 0.0 && c.min_trip_fraction < 1.4, "min_trip_fraction must lie in [0, 1.4)");
  need(c.package_weight_min > 0.0 && c.package_weight_max >= c.package_weight_min,
       "package weights must satisfy 0 < min <= max");
  need(c.start_time_max >= 0.0, "start_time_max must be >= 0");
  need(c.hotspot_fraction >= 0.0 && c.hotspot_fraction <= 1.0, "hotspot_fraction must lie in [0, 1]");
  need(c.hotspot_utilization >= 0.0 && c.hotspot_utilization < 1.0, "hotspot_utilization must lie in [0, 1)");
  need(c.base_utilization >= 0.0 && c.base_utilization < 1.0, "base_utilization must lie in [0, 1)");
  need(c.booking_min_h > 0.0 && c.booking_max_h >= c.booking_min_h,
       "booking lengths must satisfy 0 < min <= max");
  need(c.wind.epochs >= 1, "wind.epochs must be >= 1");
  need(c.wind.epoch_hours > 0.0, "wind.epoch_hours must be > 0");
  need(c.wind.max_speed >= 0.0, "wind.max_speed must be >= 0");
  need(c.wind.bearing_drift >= 0.0, "wind.bearing_drift must be >= 0");
  need(c.calendar_shift_intensity >= 0.0 && c.calendar_shift_intensity <= 1.0,
       "calendar_shift_intensity must lie in [0, 1]");
  return out;
}

namespace {

// Portable draws: std distributions are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::size_t index(std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(unit() * static_cast<double>(n)));
  }
  double exponential(double mean) { return -mean * std::log1p(-unit()); }

private:
  std::mt19937_64 engine_;
};

struct Edge {
  NodeId a;
  NodeId b;
};

std::vector<Edge> knn_mst_edges(const std::vector<Point>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
  std::vector<Edge> edges;
  auto link = [&](std::size_t a, std::size_t b) {
    if (a == b || linked[a][b]) return;
    linked[a][b] = linked[b][a] = 1;
    edges.push_back(Edge{static_cast<NodeId>(std::min(a, b)), static_cast<NodeId>(std::max(a, b))});
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return distance(pts[i], pts[x]) < distance(pts[i], pts[y]);
    });
    std::size_t taken = 0;
    for (std::size_t j : order) {
      if (j == i) continue;
      if (taken++ == k) break;
      link(i, j);
    }
  }
  // Prim's tree repairs connectivity.
  std::vector<char> in_tree(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> parent(n, 0);
  best[0] = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (!in_tree[v] && (u == n || best[v] < best[u])) u = v;
    }
    in_tree[u] = 1;
    if (step > 0) link(parent[u], u);
    for (std::size_t v = 0; v < n; ++v) {
      double d = distance(pts[u], pts[v]);
      if (!in_tree[v] && d < best[v]) {
        best[v] = d;
        parent[v] = u;
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return edges;
}

void fill_background(PadCalendar& calendar, double utilization, double horizon, double lo, double hi,
                     Rng& rng) {
  if (utilization <= 0.0) return;
  const double kMeanBooking = 0.5 * (lo + hi);
  const double mean_gap = kMeanBooking * (1.0 - utilization) / utilization;
  for (std::size_t pad = 0; pad < calendar.pad_count(); ++pad) {
    double t = rng.uniform(0.0, kMeanBooking);
    while (t < horizon) {
      double length = rng.uniform(lo, hi);
      calendar.reserve_on(pad, t, t + length);
      t += length + rng.exponential(mean_gap) + 1e-3;
    }
  }
}

DroneSpec sample_drone(std::uint32_t id, Rng& rng) {
  // Archetypes around the DJI Matrice 200 V2 figures.
  struct Archetype {
    const char* name;
    double payload, minutes, speed, recharge;
  };
  static constexpr Archetype kArchetypes[] = {
      {"M200V2", 1.45, 24.0, 81.0, 2.24},
      {"Courier", 2.0, 30.0, 65.0, 2.6},
      {"Sprint", 1.0, 20.0, 95.0, 1.8},
  };
  const Archetype& a = kArchetypes[rng.index(std::size(kArchetypes))];
  DroneSpec d;
  d.id = id;
  d.name = std::string(a.name) + "-" + std::to_string(id);
  d.payload_capacity = a.payload * rng.uniform(0.85, 1.15);
  d.flight_time = a.minutes * rng.uniform(0.85, 1.15);
  d.speed = a.speed * rng.uniform(0.85, 1.15);
  d.flight_range = d.speed * d.flight_time / 60.0 * rng.uniform(0.85, 1.0);
  d.recharge_time_full = a.recharge * rng.uniform(0.85, 1.15);
  return d;
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  if (auto problems = check_config(config); !problems.empty()) {
    throw Error(Errc::config_invalid, problems.front());
  }
  Rng rng(mix_seed(config.seed));
  Scenario s;
  s.energy.base_rate = config.battery_rate;

  const std::size_t n = config.node_count;
  std::vector<Point> pts;
  std::vector<Edge> edges;
  constexpr int kLayoutAttempts = 200;
  bool usable = false;
  for (int attempt = 0; attempt < kLayoutAttempts && !usable; ++attempt) {
    pts.clear();
    int guard = 0;
    while (pts.size() < n) {
      Point p{rng.uniform(0.0, config.area_km), rng.uniform(0.0, config.area_km)};
      bool spaced = std::all_of(pts.begin(), pts.end(),
                                [&](Point q) { return distance(p, q) >= config.min_node_gap_km; });
      if (spaced) pts.push_back(p);
      if (++guard > 100000) throw Error(Errc::config_invalid, "area too small for node spacing");
    }
    edges = knn_mst_edges(pts, 3);
    usable = std::all_of(edges.begin(), edges.end(), [&](const Edge& e) {
      return distance(pts[e.a], pts[e.b]) <= config.max_segment_km;
    });
  }
  if (!usable) throw Error(Errc::config_invalid, "no layout keeps every segment within max_segment_km");

  for (Point p : pts) s.network.add_node(p, config.pads_per_node);
  for (const Edge& e : edges) s.network.add_segment(e.a, e.b);

  const double horizon = static_cast<double>(config.wind.epochs) * config.wind.epoch_hours;
  for (NodeId v = 0; v < n; ++v) {
    bool hotspot = rng.unit() < config.hotspot_fraction;
    fill_background(s.network.calendar(v),
                    hotspot ? config.hotspot_utilization : config.base_utilization, horizon,
                    config.booking_min_h, config.booking_max_h, rng);
  }

  for (std::uint32_t i = 0; i < config.drone_count; ++i) s.drones.push_back(sample_drone(i, rng));

  std::vector<WindEpoch> epochs;
  double heading = rng.uniform(0.0, 360.0);
  for (std::size_t e = 0; e < config.wind.epochs; ++e) {
    double speed = rng.uniform(0.0, config.wind.max_speed);
    epochs.push_back(WindEpoch{static_cast<double>(e) * config.wind.epoch_hours,
                               WindSample{speed, std::fmod(heading + 360.0, 360.0)}});
    heading = std::fmod(heading + rng.uniform(-config.wind.bearing_drift, config.wind.bearing_drift) + 360.0, 360.0);
  }
  s.wind = WindField(std::move(epochs));

  const double min_trip = config.min_trip_fraction * config.area_km;
  NodeId src = 0, dst = 0;
  double best = -1.0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto a = static_cast<NodeId>(rng.index(n));
    auto b = static_cast<NodeId>(rng.index(n));
    if (a == b) continue;
    double d = s.network.straight_line(a, b);
    if (d > best) {
      best = d;
      src = a;
      dst = b;
    }
    if (d >= min_trip) break;
  }
  s.request.source = src;
  s.request.destination = dst;
  s.request.package_weight = rng.uniform(config.package_weight_min, config.package_weight_max);
  s.request.start_time = rng.uniform(0.0, config.start_time_max);

  s.perturbation.failure_rate = config.failure_rate;
  s.perturbation.calendar_shift_intensity = config.calendar_shift_intensity;
  s.perturbation.seed = mix_seed(config.seed ^ 0x5eedULL);
  return s;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json drone_json(const DroneSpec& d) {
  return json{{"id", d.id},
              {"name", d.name},
              {"payload_capacity", d.payload_capacity},
              {"flight_time", d.flight_time},
              {"flight_range", d.flight_range},
              {"speed", d.speed},
              {"recharge_time_full", d.recharge_time_full}};
}

DroneSpec drone_from(const json& j) {
  DroneSpec d;
  d.id = j.at("id").get<std::uint32_t>();
  d.name = j.value("name", "DaaS_" + std::to_string(d.id));
  d.payload_capacity = j.at("payload_capacity").get<double>();
  d.flight_time = j.at("flight_time").get<double>();
  d.flight_range = j.at("flight_range").get<double>();
  d.speed = j.at("speed").get<double>();
  d.recharge_time_full = j.at("recharge_time_full").get<double>();
  if (auto problems = check_drone(d); !problems.empty()) {
    throw Error(Errc::config_invalid, "drone " + std::to_string(d.id) + ": " + problems.front());
  }
  return d;
}

std::vector<DroneSpec> drones_from(const json& arr) {
  std::vector<DroneSpec> out;
  for (const auto& j : arr) out.push_back(drone_from(j));
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::config_invalid, std::string("malformed JSON: ") + e.what());
  }
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::config_invalid, std::string("bad field: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::config_invalid) throw;
    throw Error(Errc::config_invalid, e.what());
  }
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json nodes = json::array();
  for (const Node& node : s.network.nodes()) {
    json pads = json::array();
    for (std::size_t p = 0; p < node.calendar.pad_count(); ++p) {
      json bookings = json::array();
      for (const Interval& iv : node.calendar.pad(p)) bookings.push_back({iv.start, iv.end});
      pads.push_back(bookings);
    }
    nodes.push_back({{"id", node.id},
                     {"x", node.position.x},
                     {"y", node.position.y},
                     {"pads", node.calendar.pad_count()},
                     {"occupancy", pads}});
  }
  json segments = json::array();
  for (const SkywaySegment& seg : s.network.segments()) segments.push_back({seg.a, seg.b});

  json drones = json::array();
  for (const DroneSpec& d : s.drones) drones.push_back(drone_json(d));

  json epochs = json::array();
  for (const WindEpoch& e : s.wind.epochs()) {
    epochs.push_back({{"start", e.start}, {"speed", e.sample.speed}, {"bearing", e.sample.bearing}});
  }

  json doc{
      {"network", {{"nodes", nodes}, {"segments", segments}}},
      {"drones", drones},
      {"wind", {{"epochs", epochs}}},
      {"request",
       {{"source", s.request.source},
        {"destination", s.request.destination},
        {"package_weight", s.request.package_weight},
        {"start_time", s.request.start_time}}},
      {"perturbation",
       {{"failure_rate", s.perturbation.failure_rate},
        {"max_early", s.perturbation.max_early},
        {"max_late", s.perturbation.max_late},
        {"calendar_shift_intensity", s.perturbation.calendar_shift_intensity},
        {"seed", s.perturbation.seed}}},
      {"energy",
       {{"base_rate", s.energy.base_rate},
        {"reference_distance", s.energy.reference_distance},
        {"reference_weight", s.energy.reference_weight},
        {"drone_equivalent_mass", s.energy.drone_equivalent_mass}}},
  };
  return doc.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json doc = parse(text);
  return guarded([&] {
    Scenario s;
    for (const char* section : {"network", "drones", "wind", "request"}) {
      if (!doc.contains(section)) throw Error(Errc::config_invalid, std::string("missing section ") + section);
    }
    const json& net = doc.at("network");
    const json& nodes = net.at("nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const json& jn = nodes[i];
      if (jn.value("id", i) != i) throw Error(Errc::config_invalid, "node ids must be 0..n-1 in order");
      auto pads = jn.value<std::size_t>("pads", 5);
      if (pads == 0) throw Error(Errc::config_invalid, "a node needs at least one pad");
      NodeId v = s.network.add_node(Point{jn.at("x").get<double>(), jn.at("y").get<double>()}, pads);
      if (jn.contains("occupancy")) {
        const json& occ = jn.at("occupancy");
        if (occ.size() > pads) throw Error(Errc::config_invalid, "occupancy lists more pads than exist");
        for (std::size_t p = 0; p < occ.size(); ++p) {
          for (const json& iv : occ[p]) {
            s.network.calendar(v).reserve_on(p, iv.at(0).get<double>(), iv.at(1).get<double>());
          }
        }
      }
    }
    for (const json& seg : net.at("segments")) {
      auto a = seg.at(0).get<NodeId>();
      auto b = seg.at(1).get<NodeId>();
      if (a >= s.network.size() || b >= s.network.size()) {
        throw Error(Errc::config_invalid, "segment refers to an unknown node");
      }
      s.network.add_segment(a, b);
    }

    s.drones = drones_from(doc.at("drones"));

    std::vector<WindEpoch> epochs;
    for (const json& e : doc.at("wind").at("epochs")) {
      epochs.push_back(WindEpoch{e.at("start").get<double>(),
                                 WindSample{e.at("speed").get<double>(), e.at("bearing").get<double>()}});
    }
    s.wind = epochs.empty() ? WindField() : WindField(std::move(epochs));

    const json& req = doc.at("request");
    s.request.source = req.at("source").get<NodeId>();
    s.request.destination = req.at("destination").get<NodeId>();
    s.request.package_weight = req.at("package_weight").get<double>();
    s.request.start_time = req.value("start_time", 0.0);
    if (s.request.source >= s.network.size() || s.request.destination >= s.network.size()) {
      throw Error(Errc::config_invalid, "request refers to an unknown node");
    }
    if (!(s.request.package_weight > 0.0)) throw Error(Errc::config_invalid, "package_weight must be > 0");

    if (doc.contains("perturbation")) {
      const json& p = doc.at("perturbation");
      s.perturbation.failure_rate = p.value("failure_rate", s.perturbation.failure_rate);
      s.perturbation.max_early = p.value("max_early", s.perturbation.max_early);
      s.perturbation.max_late = p.value("max_late", s.perturbation.max_late);
      s.perturbation.calendar_shift_intensity =
          p.value("calendar_shift_intensity", s.perturbation.calendar_shift_intensity);
      s.perturbation.seed = p.value("seed", s.perturbation.seed);
      if (auto problems = check_perturbation(s.perturbation); !problems.empty()) {
        throw Error(Errc::config_invalid, problems.front());
      }
    }
    if (doc.contains("energy")) {
      const json& e = doc.at("energy");
      s.energy.base_rate = e.value("base_rate", s.energy.base_rate);
      s.energy.reference_distance = e.value("reference_distance", s.energy.reference_distance);
      s.energy.reference_weight = e.value("reference_weight", s.energy.reference_weight);
      s.energy.drone_equivalent_mass = e.value("drone_equivalent_mass", s.energy.drone_equivalent_mass);
    }
    return s;
  });
}

std::vector<DroneSpec> catalog_from_json(const std::string& text) {
  json doc = parse(text);
  return guarded([&] { return drones_from(doc.is_array() ? doc : doc.at("drones")); });
}

std::string catalog_to_json(const std::vector<DroneSpec>& drones) {
  json arr = json::array();
  for (const DroneSpec& d : drones) arr.push_back(drone_json(d));
  return json{{"drones", arr}}.dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::io_error, "write failed for " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) { return scenario_from_json(read_text(path)); }

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text(path, scenario_to_json(scenario));
}

std::vector<DroneSpec> load_catalog(const std::filesystem::path& path) {
  return catalog_from_json(read_text(path));
}

}  // namespace skyway
