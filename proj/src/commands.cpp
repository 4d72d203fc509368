#include "swarmlab/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "swarmlab/config.hpp"
#include "swarmlab/csv.hpp"
#include "swarmlab/error.hpp"
#include "swarmlab/region.hpp"
#include "swarmlab/thresholds.hpp"

namespace swarm {

using nlohmann::json;

namespace {

json number_or_string(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::filesystem::path output_dir(const ScenarioConfig& cfg, const CommandOptions& options) {
  std::filesystem::path dir = options.out ? *options.out : std::filesystem::path(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

ScenarioConfig load_with_overrides(const json& doc, const std::filesystem::path& path, const CommandOptions& options) {
  ScenarioConfig cfg;
  try {
    cfg = parse_config(doc);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  if (options.seed) cfg.seed = *options.seed;
  if (options.jobs && cfg.region) cfg.region->jobs = *options.jobs;
  return cfg;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    body();
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const DimensionMismatch& e) {
    err << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "numerical fault: " << e.what() << '\n';
    return exit_numerical;
  }
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryRecord& rec) {
  std::vector<std::string> header{"t"};
  for (const char* prefix : {"x", "v"})
    for (int i = 0; i < rec.count; ++i)
      for (int k = 0; k < rec.dim; ++k) header.push_back(prefix + std::to_string(i) + "_" + std::to_string(k));
  const bool headings = !rec.states.empty() && !rec.states.front().heading.empty();
  if (headings)
    for (int i = 0; i < rec.count; ++i) header.push_back("theta" + std::to_string(i));
  header.insert(header.end(), {"X", "V"});
  const bool energy = !rec.E.empty();
  if (energy) header.push_back("E");
  header.insert(header.end(), {"control_norm", "active_agent"});

  CsvWriter csv(path, header);
  std::vector<std::string> row;
  for (std::size_t r = 0; r < rec.times.size(); ++r) {
    row.clear();
    row.push_back(format_double(rec.times[r]));
    const auto& s = rec.states[r];
    for (double c : s.x) row.push_back(format_double(c));
    for (double c : s.v) row.push_back(format_double(c));
    if (headings)
      for (double c : s.heading) row.push_back(format_double(c));
    row.push_back(format_double(rec.X[r]));
    row.push_back(format_double(rec.V[r]));
    if (energy) row.push_back(format_double(rec.E[r]));
    row.push_back(format_double(rec.control_norms[r]));
    row.push_back(std::to_string(rec.active_agent[r]));
    csv.row(row);
  }
}

// Diagnostics that depend on the model rather than on the record.
void add_model_diagnostics(json& summary, const ModelSpec& model, const ControlSpec& control, const AgentState& s0) {
  if (const auto* m = std::get_if<CuckerDongModel>(&model)) {
    const auto vartheta = cd_threshold_vartheta(m->a, s0.count);
    summary["vartheta"] = number_or_string(vartheta.as_double());
    if (const auto* c = std::get_if<SparseCdControl>(&control.law)) {
      const auto b = cd_condition_b_constant(s0, c->M, m->b.lambda, m->a, m->f);
      summary["condition_b"] = {{"c", b.c ? json(*b.c) : json(nullptr)}, {"satisfied", b.satisfied}};
    }
  } else if (const auto* m = std::get_if<CuckerSmaleModel>(&model)) {
    const auto fv = functionals_xv(s0);
    const auto cert = cs_region_check(fv.X, fv.V, m->a, s0.count);
    summary["initial_certificate"] = {{"threshold", number_or_string(cert.threshold.as_double())},
                                      {"inside", cert.inside}};
  }
}

}  // namespace

double fitted_decay_rate(const TrajectoryRecord& rec) {
  const auto& q = rec.E.empty() ? rec.V : rec.E;
  const double stop = rec.first_event(EventKind::region_entry).value_or(std::numeric_limits<double>::infinity());
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t k = 0; k < q.size() && rec.times[k] <= stop; ++k) {
    if (!(q[k] > 0.0)) break;
    const double t = rec.times[k], y = std::log(q[k]);
    n += 1;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double denom = n * stt - st * st;
  if (n < 2 || denom <= 0.0) return 0.0;
  return -(n * sty - st * sy) / denom;
}

json run_summary(const TrajectoryRecord& rec) {
  json events = json::array();
  for (const auto& e : rec.events) events.push_back({{"t", e.t}, {"kind", event_name(e.kind)}, {"detail", e.detail}});
  const auto entry = rec.first_event(EventKind::region_entry);
  json final_block{{"t", rec.final_time}, {"X", rec.final_X}, {"V", rec.final_V}};
  if (rec.final_E) {
    final_block["E"] = *rec.final_E;
    double kinetic = 0.0;
    for (double c : rec.final_state.v) kinetic += c * c;
    final_block["kinetic"] = kinetic;
  }
  json initial{{"X", rec.X.front()}, {"V", rec.V.front()}};
  if (!rec.E.empty()) initial["E"] = rec.E.front();
  return {{"model", rec.model},
          {"control", rec.control},
          {"count", rec.count},
          {"dim", rec.dim},
          {"events", events},
          {"region_entry_time", entry ? json(*entry) : json(nullptr)},
          {"initial", initial},
          {"final", final_block},
          {"admissible", rec.admissible},
          {"budget", number_or_string(rec.budget)},
          {"max_control_norm", rec.max_control_norm},
          {"decay_rate", fitted_decay_rate(rec)}};
}

int cmd_simulate(const std::filesystem::path& config, const CommandOptions& options, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_with_overrides(load_config_json(config), config, options);
    const auto model = build_model(cfg);
    const auto control = build_control(cfg);
    const auto state0 = build_initial_state(cfg);
    const auto rec = simulate(model, control, state0, cfg.sim);
    const auto dir = output_dir(cfg, options);
    write_trajectory(dir / "trajectory.csv", rec);
    auto summary = run_summary(rec);
    summary["seed"] = cfg.seed;
    add_model_diagnostics(summary, model, control, state0);
    write_json(dir / "summary.json", summary);
  });
}

int cmd_sweep(const std::filesystem::path& config, const std::string& param, const std::vector<double>& values,
              const CommandOptions& options, std::ostream& err) {
  return guarded(err, [&] {
    const auto doc = load_config_json(config);
    const auto base = load_with_overrides(doc, config, options);
    const auto dir = output_dir(base, options);
    CsvWriter csv(dir / "sweep.csv", {"value", "region_entry_time", "final_V", "final_E", "decay_rate", "admissible"});
    json summaries = json::array();
    for (double value : values) {
      auto variant = doc;
      set_numeric(variant, param, value);
      const auto cfg = load_with_overrides(variant, config, options);
      const auto model = build_model(cfg);
      const auto control = build_control(cfg);
      const auto state0 = build_initial_state(cfg);
      const auto rec = simulate(model, control, state0, cfg.sim);
      const auto entry = rec.first_event(EventKind::region_entry);
      csv.row({format_double(value), entry ? format_double(*entry) : "", format_double(rec.final_V),
               rec.final_E ? format_double(*rec.final_E) : "", format_double(fitted_decay_rate(rec)),
               rec.admissible ? "true" : "false"});
      auto summary = run_summary(rec);
      summary["value"] = value;
      add_model_diagnostics(summary, model, control, state0);
      summaries.push_back(summary);
    }
    write_json(dir / "sweep_summary.json", {{"param", param}, {"seed", base.seed}, {"runs", summaries}});
  });
}

int cmd_region(const std::filesystem::path& config, const CommandOptions& options, std::ostream& err) {
  return guarded(err, [&] {
    const auto cfg = load_with_overrides(load_config_json(config), config, options);
    if (!cfg.region) throw ConfigError(config.string() + ": /region: block is required for region runs");
    const auto& g = *cfg.region;
    TrialSetup setup{build_model(cfg), build_control(cfg), default_trial_config(), cfg.initial.count,
                     cfg.initial.dim, g.success_V};
    setup.cfg.h = g.h;
    setup.cfg.t_end = g.t_end;
    setup.cfg.stop_below_V = g.stop_below_V;
    const auto X0 = linspace(g.X0.min, g.X0.max, g.X0.n);
    const auto V0 = linspace(g.V0.min, g.V0.max, g.V0.n);
    const auto grid = probability_grid(X0, V0, setup, g.trials, cfg.seed, g.jobs);
    const auto dir = output_dir(cfg, options);

    CsvWriter csv(dir / "grid.csv", {"X0", "V0", "trials", "successes", "probability", "wilson_lo", "wilson_hi"});
    for (std::size_t i = 0; i < X0.size(); ++i) {
      for (std::size_t j = 0; j < V0.size(); ++j) {
        const auto& c = grid.cell(i, j);
        csv.row({format_double(X0[i]), format_double(V0[j]), std::to_string(c.trials), std::to_string(c.successes),
                 format_double(c.probability), format_double(c.wilson.lo), format_double(c.wilson.hi)});
      }
    }

    const KernelSpec* kernel = nullptr;
    if (const auto* m = std::get_if<CuckerSmaleModel>(&setup.model)) kernel = &m->a;
    if (const auto* m = std::get_if<PerturbedCsModel>(&setup.model)) kernel = &m->a;
    for (std::size_t k = 0; k < g.boundaries.size(); ++k) {
      const auto& b = g.boundaries[k];
      const auto curve = theoretical_boundary(X0, *kernel, cfg.initial.count, {b.strength, b.R});
      CsvWriter out(dir / ("boundary_" + std::to_string(k) + "_" + b.name + ".csv"), {"X0", "V0"});
      for (std::size_t i = 0; i < X0.size(); ++i) out.row({format_double(X0[i]), format_double(curve[i])});
    }

    CsvWriter contour(dir / "contour.csv", {"polyline", "vertex", "X0", "V0"});
    if (X0.size() > 1 && V0.size() > 1) {
      const auto lines = contour_extract(grid, g.level);
      for (std::size_t l = 0; l < lines.size(); ++l)
        for (std::size_t v = 0; v < lines[l].size(); ++v)
          contour.row({std::to_string(l), std::to_string(v), format_double(lines[l][v].X0),
                       format_double(lines[l][v].V0)});
    }
  });
}

}  // namespace swarm
