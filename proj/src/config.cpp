#include "swarmlab/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/region.hpp"

namespace swarm {

using nlohmann::json;

namespace {

// Typed access to one JSON object with pointer-anchored errors and
// rejection of unknown keys.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError((path_.empty() ? "/" : path_) + ": " + message);
  }
  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(path_ + "/" + key + ": " + message);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_.contains(key) && !node_.at(key).is_null();
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return number_at(key);
  }
  double number(const std::string& key) {
    if (!has(key)) fail(key, "required number is missing");
    return number_at(key);
  }
  std::optional<double> optional_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number_at(key);
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const auto& n = node_.at(key);
    if (!n.is_number_integer()) fail(key, "expected an integer");
    return n.get<int>();
  }
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& n = node_.at(key);
    if (!n.is_number_unsigned() && !(n.is_number_integer() && n.get<long long>() >= 0)) {
      fail(key, "expected a nonnegative integer");
    }
    return n.get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& n = node_.at(key);
    if (!n.is_boolean()) fail(key, "expected true or false");
    return n.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& n = node_.at(key);
    if (!n.is_string()) fail(key, "expected a string");
    return n.get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& n = node_.at(key);
    if (!n.is_array()) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t k = 0; k < n.size(); ++k) {
      if (!n[k].is_number()) fail(key + "/" + std::to_string(k), "expected a number");
      out.push_back(n[k].get<double>());
    }
    return out;
  }
  const json& child(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }
  std::string child_path(const std::string& key) const { return path_ + "/" + key; }

  void reject_unknown() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(path_ + "/" + key + ": unknown field");
    }
  }

 private:
  double number_at(const std::string& key) const {
    const auto& n = node_.at(key);
    if (n.is_string()) {
      const auto s = n.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    if (!n.is_number()) fail(key, "expected a number");
    return n.get<double>();
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

KernelConfig parse_kernel(const json& node, const std::string& path) {
  Reader r(node, path);
  KernelConfig k;
  k.family = r.string("family", k.family);
  k.argument = r.string("argument", "");
  if (!k.argument.empty() && k.argument != "distance" && k.argument != "squared_distance") {
    r.fail("argument", "expected distance or squared_distance");
  }
  if (k.family == "rational") {
    k.H = r.number("H", k.H);
    k.sigma = r.number("sigma", k.sigma);
    k.beta = r.number("beta", k.beta);
    if (!(k.H > 0.0)) r.fail("H", "must be positive");
    if (!(k.sigma > 0.0)) r.fail("sigma", "must be positive");
    if (!(k.beta >= 0.0)) r.fail("beta", "must be nonnegative");
  } else if (k.family == "indicator") {
    k.R = r.number("R");
    if (!(k.R > 0.0)) r.fail("R", "must be positive");
  } else if (k.family == "plateau") {
    k.M = r.number("M");
    k.R = r.number("R");
    k.tail_integral = r.number("tail_integral", k.tail_integral);
    if (!(k.M > 0.0)) r.fail("M", "must be positive");
    if (!(k.R > 0.0)) r.fail("R", "must be positive");
    if (!(k.tail_integral > 0.0)) r.fail("tail_integral", "must be positive");
  } else if (k.family == "tabulated") {
    k.r = r.numbers("r", {});
    k.a = r.numbers("a", {});
    if (k.r.size() < 2 || k.r.size() != k.a.size()) r.fail("r", "needs at least two nodes and one value per node");
  } else {
    r.fail("family", "unknown kernel family '" + k.family + "'");
  }
  r.reject_unknown();
  return k;
}

json kernel_json(const KernelConfig& k) {
  json j{{"family", k.family}};
  if (!k.argument.empty()) j["argument"] = k.argument;
  if (k.family == "rational") {
    j["H"] = k.H;
    j["sigma"] = k.sigma;
    j["beta"] = k.beta;
  } else if (k.family == "indicator") {
    j["R"] = k.R;
  } else if (k.family == "plateau") {
    j["M"] = k.M;
    j["R"] = k.R;
    j["tail_integral"] = k.tail_integral;
  } else if (k.family == "tabulated") {
    j["r"] = k.r;
    j["a"] = k.a;
  }
  return j;
}

json number_json(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

ModelConfig parse_model(const json& node, const std::string& path) {
  Reader r(node, path);
  ModelConfig m;
  m.type = r.string("type", m.type);
  if (m.type == "cucker_smale" || m.type == "perturbed_cs" || m.type == "cucker_dong") {
    if (r.has("kernel")) m.kernel = parse_kernel(r.child("kernel"), r.child_path("kernel"));
  }
  if (m.type == "cucker_smale") {
  } else if (m.type == "perturbed_cs") {
    m.alpha = r.number("alpha", 0.0);
    m.beta_coef = r.number("beta", 0.0);
    if (!(m.alpha >= 0.0)) r.fail("alpha", "must be nonnegative");
    if (!(m.beta_coef >= 0.0)) r.fail("beta", "must be nonnegative");
    if (r.has("deviation")) {
      Reader d(r.child("deviation"), r.child_path("deviation"));
      auto& dev = m.deviation;
      dev.type = d.string("type", dev.type);
      if (dev.type == "leader") {
        dev.p = d.optional_number("p");
        dev.q = d.number("q");
      } else if (dev.type == "structured") {
        if (d.has("phi")) dev.phi = parse_kernel(d.child("phi"), d.child_path("phi"));
        dev.eta_mode = d.string("eta_mode", dev.eta_mode);
        if (dev.eta_mode != "per_agent" && dev.eta_mode != "max_normalized") {
          d.fail("eta_mode", "expected per_agent or max_normalized");
        }
      } else if (dev.type == "local_average") {
        dev.R = d.number("R");
        if (!(dev.R >= 0.0)) d.fail("R", "must be nonnegative");
      } else if (dev.type != "zero" && dev.type != "self") {
        d.fail("type", "unknown deviation '" + dev.type + "'");
      }
      d.reject_unknown();
    }
  } else if (m.type == "cucker_dong") {
    m.repulsion = r.string("repulsion", m.repulsion);
    if (m.repulsion != "none" && m.repulsion != "power_law") r.fail("repulsion", "expected none or power_law");
    m.p = r.number("p", m.p);
    if (m.repulsion == "power_law" && !(m.p > 1.0)) r.fail("p", "repulsion exponent must exceed 1");
    m.lambda = r.number("lambda", 0.0);
    m.friction = r.numbers("friction", {});
    if (!(m.lambda >= 0.0)) r.fail("lambda", "must be nonnegative");
    for (double b : m.friction) {
      if (!(b >= 0.0 && b <= m.lambda)) r.fail("friction", "coefficients must lie in [0, lambda]");
    }
  } else if (m.type == "hegselmann_krause") {
    m.R = r.number("R");
    if (!(m.R > 0.0)) r.fail("R", "must be positive");
  } else if (m.type == "vicsek") {
    m.R = r.number("R");
    m.speed = r.number("speed", m.speed);
    if (!(m.R > 0.0)) r.fail("R", "must be positive");
    if (!(m.speed > 0.0)) r.fail("speed", "must be positive");
  } else if (m.type == "graph") {
    if (!r.has("weights")) r.fail("weights", "required matrix is missing");
    const auto& w = r.child("weights");
    if (!w.is_array()) r.fail("weights", "expected an array of rows");
    for (std::size_t i = 0; i < w.size(); ++i) {
      std::vector<double> row;
      if (!w[i].is_array() || w[i].size() != w.size()) r.fail("weights/" + std::to_string(i), "matrix must be square");
      for (const auto& c : w[i]) {
        if (!c.is_number() || c.get<double>() < 0.0) r.fail("weights/" + std::to_string(i), "weights must be nonnegative");
        row.push_back(c.get<double>());
      }
      m.weights.push_back(std::move(row));
    }
  } else if (m.type == "reduced_pair_cs") {
  } else if (m.type == "reduced_pair_cd") {
    m.beta = r.number("beta", m.beta);
    if (!(m.beta > 0.0)) r.fail("beta", "must be positive");
  } else {
    r.fail("type", "unknown model '" + m.type + "'");
  }
  r.reject_unknown();
  return m;
}

json model_json(const ModelConfig& m) {
  json j{{"type", m.type}};
  if (m.type == "cucker_smale" || m.type == "perturbed_cs" || m.type == "cucker_dong") j["kernel"] = kernel_json(m.kernel);
  if (m.type == "perturbed_cs") {
    j["alpha"] = m.alpha;
    j["beta"] = m.beta_coef;
    json d{{"type", m.deviation.type}};
    if (m.deviation.type == "leader") {
      if (m.deviation.p) d["p"] = *m.deviation.p;
      d["q"] = m.deviation.q;
    } else if (m.deviation.type == "structured") {
      d["phi"] = kernel_json(m.deviation.phi);
      d["eta_mode"] = m.deviation.eta_mode;
    } else if (m.deviation.type == "local_average") {
      d["R"] = number_json(m.deviation.R);
    }
    j["deviation"] = d;
  } else if (m.type == "cucker_dong") {
    j["repulsion"] = m.repulsion;
    j["p"] = m.p;
    j["lambda"] = m.lambda;
    j["friction"] = m.friction;
  } else if (m.type == "hegselmann_krause") {
    j["R"] = m.R;
  } else if (m.type == "vicsek") {
    j["R"] = m.R;
    j["speed"] = m.speed;
  } else if (m.type == "graph") {
    j["weights"] = m.weights;
  } else if (m.type == "reduced_pair_cd") {
    j["beta"] = m.beta;
  }
  return j;
}

ControlConfig parse_control(const json& node, const std::string& path) {
  Reader r(node, path);
  ControlConfig c;
  c.law = r.string("law", c.law);
  c.sample_hold_dt = r.number("sample_hold_dt", 0.0);
  if (!(c.sample_hold_dt >= 0.0)) r.fail("sample_hold_dt", "must be nonnegative");
  auto nonneg = [&](const char* key, double& field) {
    field = r.number(key);
    if (!(field >= 0.0)) r.fail(key, "must be nonnegative");
  };
  if (c.law == "none") {
  } else if (c.law == "total") {
    nonneg("alpha", c.alpha);
    nonneg("M", c.M);
  } else if (c.law == "sparse_cs") {
    nonneg("M", c.M);
  } else if (c.law == "sparse_cd") {
    nonneg("M", c.M);
    c.epsilon = r.optional_number("epsilon");
    if (c.epsilon && !(*c.epsilon >= 0.0)) r.fail("epsilon", "must be nonnegative");
    c.eta = r.number("eta", 0.0);
    if (!(c.eta >= 0.0)) r.fail("eta", "must be nonnegative");
  } else if (c.law == "leader") {
    nonneg("gamma", c.gamma);
    c.q = r.number("q");
    c.p = r.optional_number("p");
    const double p = c.p.value_or(c.q / (c.q - 1.0));
    if (!(c.q > 1.0 && p > 1.0) || std::isinf(c.q) || std::isinf(p) || std::abs(1.0 / p + 1.0 / c.q - 1.0) > 1e-12) {
      r.fail("q", "leader exponents need p, q > 1 finite with 1/p + 1/q = 1");
    }
  } else if (c.law == "structured") {
    nonneg("alpha", c.alpha);
    nonneg("beta", c.beta);
    if (r.has("phi")) c.phi = parse_kernel(r.child("phi"), r.child_path("phi"));
    c.eta_mode = r.string("eta_mode", c.eta_mode);
    if (c.eta_mode != "per_agent" && c.eta_mode != "max_normalized") {
      r.fail("eta_mode", "expected per_agent or max_normalized");
    }
  } else if (c.law == "local_average") {
    nonneg("gamma", c.gamma);
    nonneg("R", c.R);
  } else {
    r.fail("law", "unknown control law '" + c.law + "'");
  }
  r.reject_unknown();
  return c;
}

json control_json(const ControlConfig& c) {
  json j{{"law", c.law}, {"sample_hold_dt", c.sample_hold_dt}};
  if (c.law == "total") {
    j["alpha"] = c.alpha;
    j["M"] = c.M;
  } else if (c.law == "sparse_cs") {
    j["M"] = c.M;
  } else if (c.law == "sparse_cd") {
    j["M"] = c.M;
    if (c.epsilon) j["epsilon"] = *c.epsilon;
    j["eta"] = c.eta;
  } else if (c.law == "leader") {
    j["gamma"] = c.gamma;
    j["q"] = c.q;
    if (c.p) j["p"] = *c.p;
  } else if (c.law == "structured") {
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["phi"] = kernel_json(c.phi);
    j["eta_mode"] = c.eta_mode;
  } else if (c.law == "local_average") {
    j["gamma"] = c.gamma;
    j["R"] = number_json(c.R);
  }
  return j;
}

InitialConfig parse_initial(const json& node, const std::string& path) {
  Reader r(node, path);
  InitialConfig s;
  s.type = r.string("type", s.type);
  s.dim = r.integer("dim", s.dim);
  s.count = r.integer("count", s.count);
  if (s.dim < 1) r.fail("dim", "must be at least 1");
  if (s.count < 1) r.fail("count", "must be at least 1");
  const std::size_t n = static_cast<std::size_t>(s.dim) * s.count;
  if (s.type == "explicit") {
    s.x = r.numbers("x", {});
    s.v = r.numbers("v", {});
    s.heading = r.numbers("heading", {});
    if (s.x.size() != n) r.fail("x", "expected " + std::to_string(n) + " values (count x dim)");
    if (s.v.size() != n) r.fail("v", "expected " + std::to_string(n) + " values (count x dim)");
    if (!s.heading.empty() && s.heading.size() != static_cast<std::size_t>(s.count)) {
      r.fail("heading", "expected one angle per agent");
    }
  } else if (s.type == "random") {
    s.x_range = r.numbers("x_range", s.x_range);
    s.v_range = r.numbers("v_range", s.v_range);
    for (const char* key : {"x_range", "v_range"}) {
      const auto& range = std::string(key) == "x_range" ? s.x_range : s.v_range;
      if (range.size() != 2 || !(range[0] <= range[1])) r.fail(key, "expected [lo, hi] with lo <= hi");
    }
  } else if (s.type == "rescaled") {
    s.X0 = r.number("X0");
    s.V0 = r.number("V0");
    if (!(s.X0 >= 0.0)) r.fail("X0", "must be nonnegative");
    if (!(s.V0 >= 0.0)) r.fail("V0", "must be nonnegative");
  } else {
    r.fail("type", "expected explicit, random or rescaled");
  }
  r.reject_unknown();
  return s;
}

json initial_json(const InitialConfig& s) {
  json j{{"type", s.type}, {"dim", s.dim}, {"count", s.count}};
  if (s.type == "explicit") {
    j["x"] = s.x;
    j["v"] = s.v;
    if (!s.heading.empty()) j["heading"] = s.heading;
  } else if (s.type == "random") {
    j["x_range"] = s.x_range;
    j["v_range"] = s.v_range;
  } else {
    j["X0"] = s.X0;
    j["V0"] = s.V0;
  }
  return j;
}

SimConfig parse_sim(const json& node, const std::string& path) {
  Reader r(node, path);
  SimConfig c;
  c.h = r.number("h", c.h);
  c.t_end = r.number("t_end", c.t_end);
  c.record_stride = r.integer("record_stride", c.record_stride);
  c.stop_on_region_entry = r.boolean("stop_on_region_entry", c.stop_on_region_entry);
  c.release_control_on_region_entry = r.boolean("release_control_on_region_entry", c.release_control_on_region_entry);
  c.divergence_radius = r.number("divergence_radius", c.divergence_radius);
  c.collision_floor = r.number("collision_floor", c.collision_floor);
  c.stop_below_V = r.optional_number("stop_below_V");
  r.reject_unknown();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    r.fail(e.what());
  }
  return c;
}

json sim_json(const SimConfig& c) {
  json j{{"h", c.h},
         {"t_end", c.t_end},
         {"record_stride", c.record_stride},
         {"stop_on_region_entry", c.stop_on_region_entry},
         {"release_control_on_region_entry", c.release_control_on_region_entry},
         {"divergence_radius", c.divergence_radius},
         {"collision_floor", c.collision_floor}};
  if (c.stop_below_V) j["stop_below_V"] = *c.stop_below_V;
  return j;
}

AxisConfig parse_axis(const json& node, const std::string& path) {
  Reader r(node, path);
  AxisConfig a;
  a.min = r.number("min", a.min);
  a.max = r.number("max", a.max);
  a.n = r.integer("n", a.n);
  if (a.n < 1) r.fail("n", "must be at least 1");
  if (!(a.min >= 0.0)) r.fail("min", "must be nonnegative");
  if (a.n > 1 && !(a.max > a.min)) r.fail("max", "must exceed min");
  r.reject_unknown();
  return a;
}

RegionConfig parse_region(const json& node, const std::string& path) {
  Reader r(node, path);
  RegionConfig g;
  if (r.has("X0")) g.X0 = parse_axis(r.child("X0"), r.child_path("X0"));
  if (r.has("V0")) g.V0 = parse_axis(r.child("V0"), r.child_path("V0"));
  g.trials = r.integer("trials", g.trials);
  if (g.trials < 1) r.fail("trials", "must be at least 1");
  g.success_V = r.number("success_V", g.success_V);
  g.level = r.number("level", g.level);
  if (!(g.level > 0.0 && g.level < 1.0)) r.fail("level", "must lie in (0, 1)");
  g.jobs = r.integer("jobs", g.jobs);
  if (g.jobs < 1) r.fail("jobs", "must be at least 1");
  g.h = r.number("h", g.h);
  g.t_end = r.number("t_end", g.t_end);
  if (!(g.h > 0.0 && g.h <= g.t_end)) r.fail("h", "need 0 < h <= t_end");
  g.stop_below_V = r.number("stop_below_V", g.stop_below_V);
  if (r.has("boundaries")) {
    const auto& list = r.child("boundaries");
    if (!list.is_array()) r.fail("boundaries", "expected an array");
    for (std::size_t k = 0; k < list.size(); ++k) {
      Reader b(list[k], r.child_path("boundaries") + "/" + std::to_string(k));
      BoundaryConfig bc;
      bc.name = b.string("name", bc.name);
      if (bc.name == "local_average") {
        bc.strength = b.number("strength");
        bc.R = b.number("R");
        if (!(bc.strength >= 0.0)) b.fail("strength", "must be nonnegative");
        if (!(bc.R >= 0.0)) b.fail("R", "must be nonnegative");
      } else if (bc.name != "uncontrolled") {
        b.fail("name", "expected uncontrolled or local_average");
      }
      b.reject_unknown();
      g.boundaries.push_back(bc);
    }
  }
  r.reject_unknown();
  return g;
}

json region_json(const RegionConfig& g) {
  json j{{"X0", {{"min", g.X0.min}, {"max", g.X0.max}, {"n", g.X0.n}}},
         {"V0", {{"min", g.V0.min}, {"max", g.V0.max}, {"n", g.V0.n}}},
         {"trials", g.trials},
         {"success_V", g.success_V},
         {"level", g.level},
         {"jobs", g.jobs},
         {"h", g.h},
         {"t_end", g.t_end},
         {"stop_below_V", g.stop_below_V},
         {"boundaries", json::array()}};
  for (const auto& b : g.boundaries) {
    json e{{"name", b.name}};
    if (b.name == "local_average") {
      e["strength"] = b.strength;
      e["R"] = number_json(b.R);
    }
    j["boundaries"].push_back(e);
  }
  return j;
}

// Cross-block checks that need more than one block.
void check_consistency(const ScenarioConfig& c) {
  const auto& m = c.model;
  const auto& s = c.initial;
  if ((m.type == "reduced_pair_cs" || m.type == "reduced_pair_cd") && (s.dim != 1 || s.count != 1)) {
    throw ConfigError("/initial: reduced pair models use count = 1, dim = 1 (relative coordinates)");
  }
  if (m.type == "vicsek" && s.dim != 2) throw ConfigError("/initial/dim: the heading model is planar");
  if (m.type == "vicsek" && s.type == "explicit" && s.heading.empty()) {
    throw ConfigError("/initial/heading: the heading model needs one heading per agent");
  }
  if (m.type == "graph" && m.weights.size() != static_cast<std::size_t>(s.count)) {
    throw ConfigError("/model/weights: matrix size must equal /initial/count");
  }
  if (m.type == "cucker_dong" && m.friction.size() > 1 && m.friction.size() != static_cast<std::size_t>(s.count)) {
    throw ConfigError("/model/friction: give one coefficient or one per agent");
  }
  const bool cs = m.type == "cucker_smale";
  const auto& law = c.control.law;
  if (law == "sparse_cd" && m.type != "cucker_dong") throw ConfigError("/control/law: sparse_cd needs model cucker_dong");
  if (law != "none" && law != "sparse_cd" && !cs) {
    throw ConfigError("/control/law: " + law + " needs model cucker_smale");
  }
  if (c.region && !(cs || m.type == "perturbed_cs")) {
    throw ConfigError("/region: consensus grids need an alignment model");
  }
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
  Reader r(doc, "");
  ScenarioConfig c;
  c.seed = r.unsigned_integer("seed", 0);
  if (!r.has("model")) r.fail("model", "required block is missing");
  c.model = parse_model(r.child("model"), "/model");
  if (r.has("control")) c.control = parse_control(r.child("control"), "/control");
  if (!r.has("initial")) r.fail("initial", "required block is missing");
  c.initial = parse_initial(r.child("initial"), "/initial");
  if (r.has("sim")) c.sim = parse_sim(r.child("sim"), "/sim");
  if (r.has("output")) {
    Reader o(r.child("output"), "/output");
    c.output_dir = o.string("dir", c.output_dir);
    o.reject_unknown();
  }
  if (r.has("region")) c.region = parse_region(r.child("region"), "/region");
  r.reject_unknown();
  check_consistency(c);
  return c;
}

ScenarioConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(doc);
}

nlohmann::json load_config_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  const auto doc = load_config_json(path);
  try {
    return parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json to_json(const ScenarioConfig& c) {
  json j{{"seed", c.seed},
         {"model", model_json(c.model)},
         {"control", control_json(c.control)},
         {"initial", initial_json(c.initial)},
         {"sim", sim_json(c.sim)},
         {"output", {{"dir", c.output_dir}}}};
  if (c.region) j["region"] = region_json(*c.region);
  return j;
}

KernelSpec build_kernel(const KernelConfig& k, KernelArgument default_argument) {
  const auto arg = k.argument.empty()          ? default_argument
                   : k.argument == "distance" ? KernelArgument::distance
                                               : KernelArgument::squared_distance;
  if (k.family == "rational") return KernelSpec::rational(k.H, k.sigma, k.beta, arg);
  if (k.family == "indicator") return KernelSpec::indicator(k.R, arg);
  if (k.family == "plateau") return KernelSpec::plateau(k.M, k.R, k.tail_integral, arg);
  return KernelSpec::tabulated(k.r, k.a, arg);
}

ModelSpec build_model(const ScenarioConfig& cfg) {
  const auto& m = cfg.model;
  if (m.type == "cucker_smale") return CuckerSmaleModel{build_kernel(m.kernel, KernelArgument::distance)};
  if (m.type == "cucker_dong") {
    FrictionSpec b;
    if (!m.friction.empty()) b = FrictionSpec::constant(m.friction, m.lambda);
    b.lambda = m.lambda;
    return CuckerDongModel{build_kernel(m.kernel, KernelArgument::squared_distance),
                           m.repulsion == "power_law" ? RepulsionSpec::power_law(m.p) : RepulsionSpec::none(), b};
  }
  if (m.type == "hegselmann_krause") return HegselmannKrauseModel{m.R};
  if (m.type == "vicsek") return VicsekModel{m.R, m.speed};
  if (m.type == "reduced_pair_cs") return ReducedPairCs{};
  if (m.type == "reduced_pair_cd") return ReducedPairCd{m.beta};
  if (m.type == "graph") {
    auto w = m.weights;
    return GraphModel{[w](double, int i, int j) { return w[i][j]; }};
  }
  // perturbed_cs
  const auto& dev = m.deviation;
  PerturbationFn delta;
  if (dev.type == "zero") {
    delta = [](double, const AgentState& s) { return std::vector<double>(s.size(), 0.0); };
  } else if (dev.type == "self") {
    delta = [](double, const AgentState& s) { return perp_part(s.v, s.count, s.dim); };
  } else if (dev.type == "leader") {
    const double q = dev.q, p = dev.p.value_or(q / (q - 1.0));
    delta = [p, q](double, const AgentState& s) { return delta_leader(s, p, q); };
  } else if (dev.type == "structured") {
    const auto phi = build_kernel(dev.phi, KernelArgument::distance);
    const auto mode = dev.eta_mode == "max_normalized" ? EtaMode::max_normalized : EtaMode::per_agent;
    delta = [phi, mode](double, const AgentState& s) {
      return delta_structured(s, [&](double r) { return phi.at_distance(r); }, mode);
    };
  } else {
    const double R = dev.R;
    delta = [R](double, const AgentState& s) { return delta_local_average(s, R); };
  }
  const double alpha = m.alpha, beta = m.beta_coef;
  return PerturbedCsModel{build_kernel(m.kernel, KernelArgument::distance), [alpha](double) { return alpha; },
                          [beta](double) { return beta; }, delta};
}

ControlSpec build_control(const ScenarioConfig& cfg) {
  const auto& c = cfg.control;
  ControlSpec spec;
  spec.sample_hold_dt = c.sample_hold_dt;
  if (c.law == "total") {
    spec.law = TotalControl{c.alpha, c.M};
  } else if (c.law == "sparse_cs") {
    spec.law = SparseCsControl{c.M};
  } else if (c.law == "sparse_cd") {
    spec.law = SparseCdControl{c.M, c.epsilon, c.eta};
  } else if (c.law == "leader") {
    spec.law = LeaderControl{c.gamma, c.p.value_or(c.q / (c.q - 1.0)), c.q};
  } else if (c.law == "structured") {
    const auto phi = build_kernel(c.phi, KernelArgument::distance);
    spec.law = StructuredControl{c.alpha, c.beta, [phi](double r) { return phi.at_distance(r); },
                                 c.eta_mode == "max_normalized" ? EtaMode::max_normalized : EtaMode::per_agent};
  } else if (c.law == "local_average") {
    spec.law = LocalAverageControl{c.gamma, c.R};
  }
  return spec;
}

AgentState build_initial_state(const ScenarioConfig& cfg) {
  const auto& s = cfg.initial;
  AgentState state;
  if (s.type == "explicit") {
    state = AgentState(s.dim, s.count, s.x, s.v);
    state.heading = s.heading;
  } else {
    // a stream of its own, apart from the per-cell region streams
    auto rng = trial_generator(cfg.seed, ~std::uint64_t{0}, 0);
    if (s.type == "random") {
      state = AgentState(s.dim, s.count);
      auto draw = [&](const std::vector<double>& range) {
        return range[0] + (range[1] - range[0]) * 0.5 * (uniform_pm1(rng) + 1.0);
      };
      for (double& c : state.x) c = draw(s.x_range);
      for (double& c : state.v) c = draw(s.v_range);
    } else {
      state = draw_rescaled(s.count, s.dim, s.X0, s.V0, rng);
    }
    if (cfg.model.type == "vicsek") {
      state.heading.resize(static_cast<std::size_t>(s.count));
      for (double& h : state.heading) h = M_PI * uniform_pm1(rng);
    }
  }
  return state;
}

void set_numeric(nlohmann::json& doc, const std::string& dotted_path, double value) {
  if (dotted_path.empty()) throw ConfigError("empty parameter path");
  json* node = &doc;
  std::string pointer;
  std::stringstream parts(dotted_path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(parts, key, '.')) keys.push_back(key);
  for (std::size_t k = 0; k < keys.size(); ++k) {
    pointer += "/" + keys[k];
    if (!node->is_object()) throw ConfigError(pointer + ": parent is not an object");
    const bool last = k + 1 == keys.size();
    if (!node->contains(keys[k])) {
      if (!last) throw ConfigError(pointer + ": no such block");
      (*node)[keys[k]] = value;
      return;
    }
    node = &(*node)[keys[k]];
  }
  if (!node->is_number() && !node->is_null()) throw ConfigError(pointer + ": not a numeric field");
  *node = value;
}

}  // namespace swarm
