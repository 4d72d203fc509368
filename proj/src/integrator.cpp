#include "swarmlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "swarmlab/error.hpp"
#include "swarmlab/functionals.hpp"
#include "swarmlab/thresholds.hpp"

namespace swarm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double c) { return std::isfinite(c); });
}

bool is_vicsek(const ModelSpec& m) { return std::holds_alternative<VicsekModel>(m); }

bool is_alignment(const ModelSpec& m) {
  return std::holds_alternative<CuckerSmaleModel>(m) || std::holds_alternative<PerturbedCsModel>(m) ||
         std::holds_alternative<ReducedPairCs>(m);
}

bool is_attraction_repulsion(const ModelSpec& m) {
  return std::holds_alternative<CuckerDongModel>(m) || std::holds_alternative<ReducedPairCd>(m);
}

// Flat layout: positions, velocities, then headings for the planar heading model.
std::vector<double> pack(const AgentState& s) {
  std::vector<double> y;
  y.reserve(2 * s.size() + s.heading.size());
  y.insert(y.end(), s.x.begin(), s.x.end());
  y.insert(y.end(), s.v.begin(), s.v.end());
  y.insert(y.end(), s.heading.begin(), s.heading.end());
  return y;
}

void unpack(std::span<const double> y, AgentState& s, const ModelSpec& model) {
  const std::size_t n = s.size();
  std::copy(y.begin(), y.begin() + n, s.x.begin());
  std::copy(y.begin() + n, y.begin() + 2 * n, s.v.begin());
  if (const auto* m = std::get_if<VicsekModel>(&model)) {
    std::copy(y.begin() + 2 * n, y.end(), s.heading.begin());
    for (int i = 0; i < s.count; ++i) {
      s.v[2 * i] = m->speed * std::cos(s.heading[i]);
      s.v[2 * i + 1] = m->speed * std::sin(s.heading[i]);
    }
  }
}

// Region certificate of the alignment family, nullopt for models without one.
std::optional<bool> in_region(const ModelSpec& model, const AgentState& s, const SpreadFunctionals& fv,
                              std::optional<double> energy, const std::optional<Threshold>& vartheta) {
  if (const auto* m = std::get_if<CuckerSmaleModel>(&model)) return cs_region_check(fv.X, fv.V, m->a, s.count).inside;
  if (const auto* m = std::get_if<PerturbedCsModel>(&model)) return cs_region_check(fv.X, fv.V, m->a, s.count).inside;
  if (const auto* m = std::get_if<ReducedPairCs>(&model)) {
    return cs_region_check(fv.X, fv.V, reduced_pair_kernel(*m), 2).inside;
  }
  if (is_attraction_repulsion(model) && energy && vartheta) {
    return vartheta->is_infinite() || *energy <= vartheta->value() * (1.0 - 1e-12);
  }
  return std::nullopt;
}

int single_active_block(std::span<const double> u, int count, int dim) {
  int active = -1;
  for (int i = 0; i < count; ++i) {
    if (norm(u.subspan(static_cast<std::size_t>(i) * dim, dim)) > 0.0) {
      if (active >= 0) return -1;
      active = i;
    }
  }
  return active;
}

}  // namespace

void Rk4Stepper::step(const VectorField& f, double t, std::span<double> y, double h) {
  const std::size_t n = y.size();
  auto check = [&](const std::vector<double>& k, double ts) {
    if (!all_finite(k)) throw NumericalBlowup("non-finite derivative at t = " + std::to_string(ts), ts);
  };
  f(t, y, k1_);
  check(k1_, t);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
  f(t + 0.5 * h, tmp_, k2_);
  check(k2_, t + 0.5 * h);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
  f(t + 0.5 * h, tmp_, k3_);
  check(k3_, t + 0.5 * h);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
  f(t + h, tmp_, k4_);
  check(k4_, t + h);
  for (std::size_t i = 0; i < n; ++i) y[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  if (!all_finite(y)) throw NumericalBlowup("non-finite state at t = " + std::to_string(t + h), t + h);
}

std::vector<double> rk4_step(const VectorField& f, double t, std::span<const double> y, double h) {
  std::vector<double> out(y.begin(), y.end());
  Rk4Stepper(y.size()).step(f, t, out, h);
  return out;
}

void SimConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("step size h must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
  if (h > t_end) throw ConfigError("step size h must not exceed t_end");
  if (record_stride < 1) throw ConfigError("record_stride must be at least 1");
  if (!(divergence_radius > 0.0)) throw ConfigError("divergence_radius must be positive");
  if (!(collision_floor > 0.0)) throw ConfigError("collision_floor must be positive");
}

const char* event_name(EventKind kind) {
  switch (kind) {
    case EventKind::region_entry:
      return "region_entry";
    case EventKind::divergence:
      return "divergence";
    case EventKind::collision:
      return "collision";
    case EventKind::blowup:
      return "blowup";
    case EventKind::end:
      return "end";
  }
  return "unknown";
}

std::optional<double> TrajectoryRecord::first_event(EventKind kind) const {
  for (const auto& e : events)
    if (e.kind == kind) return e.t;
  return std::nullopt;
}

SpreadFunctionals model_functionals(const ModelSpec& model, const AgentState& state) {
  if (std::holds_alternative<ReducedPairCs>(model) || std::holds_alternative<ReducedPairCd>(model)) {
    return {state.x[0] * state.x[0] / 4.0, state.v[0] * state.v[0] / 4.0};
  }
  return functionals_xv(state);
}

std::optional<double> model_energy(const ModelSpec& model, const AgentState& state) {
  if (const auto* m = std::get_if<CuckerDongModel>(&model)) return total_energy(state, m->a, m->f);
  if (const auto* m = std::get_if<ReducedPairCd>(&model)) {
    // the lifted pair may pass through x = 0, where the energy is still finite
    const double x = state.x[0], v = state.v[0];
    return v * v / 2.0 + reduced_pair_kernel(*m).raw_integral(0.0, x * x);
  }
  return std::nullopt;
}

TrajectoryRecord simulate(const ModelSpec& model, const ControlSpec& control, const AgentState& state0,
                          const SimConfig& cfg) {
  cfg.validate();
  validate_model(model, state0);
  control.validate();

  const int N = state0.count, d = state0.dim;
  const std::size_t n = state0.size();
  const bool external = control.is_external();
  if (!std::holds_alternative<NoControl>(control.law)) {
    const bool sparse_cd = std::holds_alternative<SparseCdControl>(control.law);
    if (sparse_cd && !std::holds_alternative<CuckerDongModel>(model)) {
      throw ConfigError("control law sparse_cd needs the cucker_dong model");
    }
    if (!sparse_cd && !std::holds_alternative<CuckerSmaleModel>(model)) {
      throw ConfigError(std::string("control law ") + control_name(control) + " needs the cucker_smale model");
    }
  }

  AgentState state = state0;
  if (is_vicsek(model)) unpack(pack(state), state, model);

  const auto fv0 = model_functionals(model, state);
  const auto E0 = model_energy(model, state);
  std::optional<Threshold> vartheta;
  if (const auto* m = std::get_if<CuckerDongModel>(&model)) vartheta = cd_threshold_vartheta(m->a, N);
  if (const auto* m = std::get_if<ReducedPairCd>(&model)) vartheta = cd_threshold_vartheta(reduced_pair_kernel(*m), 2);

  // Resolved parameters of the external laws; bad values throw here, before any step.
  double cd_epsilon = 0.0;
  if (const auto* c = std::get_if<TotalControl>(&control.law)) {
    total_control(state, c->alpha, c->M, fv0.V);
  } else if (const auto* c = std::get_if<SparseCdControl>(&control.law)) {
    if (!(*E0 > 0.0)) throw ConfigError("sparse_cd needs positive initial energy");
    cd_epsilon = c->epsilon.value_or(c->M / *E0);
    sparse_control_cd_at_energy(state, *E0, c->M, *E0, cd_epsilon);
  }

  std::vector<double> u(n, 0.0);
  bool control_on = true;
  auto compute_external = [&](const AgentState& s, std::optional<double> energy) {
    std::visit(overloaded{
                   [&](const TotalControl& c) { u = total_control(s, c.alpha, c.M, fv0.V); },
                   [&](const SparseCsControl& c) { u = sparse_control_cs(s, c.M, std::get<CuckerSmaleModel>(model).a); },
                   [&](const SparseCdControl& c) { u = sparse_control_cd_at_energy(s, *energy, c.M, *E0, cd_epsilon); },
                   [&](const auto&) { std::fill(u.begin(), u.end(), 0.0); },
               },
               control.law);
  };

  const VectorField field = [&](double t, std::span<const double> y, std::span<double> dy) {
    const auto x = y.subspan(0, n);
    const auto v = y.subspan(n, n);
    auto dx = dy.subspan(0, n);
    auto dv = dy.subspan(n, n);
    std::fill(dy.begin(), dy.end(), 0.0);
    std::visit(
        overloaded{
            [&](const GraphModel& m) {
              const auto r = graph_rhs(t, v, N, d, m.g);
              std::copy(r.begin(), r.end(), dv.begin());
            },
            [&](const HegselmannKrauseModel& m) {
              const auto r = hk_rhs(v, N, d, m.R);
              std::copy(r.begin(), r.end(), dv.begin());
            },
            [&](const VicsekModel& m) {
              const auto r = vicsek_rhs(x, y.subspan(2 * n), m.R, m.speed);
              std::copy(r.dx.begin(), r.dx.end(), dx.begin());
              std::copy(r.dtheta.begin(), r.dtheta.end(), dy.begin() + 2 * n);
            },
            [&](const CuckerSmaleModel& m) {
              std::copy(v.begin(), v.end(), dx.begin());
              accel::alignment(x, v, N, d, m.a, dv);
              if (control_on) add_decentralized_feedback(control.law, x, v, N, d, dv);
            },
            [&](const PerturbedCsModel& m) {
              AgentState s(d, N, {x.begin(), x.end()}, {v.begin(), v.end()});
              const auto r = perturbed_cs_rhs(t, s, m.a, m.alpha(t), m.beta(t), m.delta);
              std::copy(r.dx.begin(), r.dx.end(), dx.begin());
              std::copy(r.dv.begin(), r.dv.end(), dv.begin());
            },
            [&](const CuckerDongModel& m) {
              std::copy(v.begin(), v.end(), dx.begin());
              accel::attraction_repulsion(t, x, v, N, d, m.a, m.f, m.b, dv);
            },
            [&](const ReducedPairCs&) {
              dx[0] = v[0];
              dv[0] = -v[0] / (1.0 + x[0] * x[0]);
            },
            [&](const ReducedPairCd& m) {
              dx[0] = v[0];
              dv[0] = -x[0] / std::pow(1.0 + x[0] * x[0], m.beta);
            },
        },
        model);
    if (external) {
      for (std::size_t k = 0; k < n; ++k) dv[k] += u[k];
    }
  };

  TrajectoryRecord rec;
  rec.model = model_name(model);
  rec.control = control_name(control);
  rec.count = N;
  rec.dim = d;
  rec.budget = control.budget();

  std::vector<double> feedback(n);
  auto record = [&](double t, const SpreadFunctionals& fv, std::optional<double> energy) {
    rec.times.push_back(t);
    rec.states.push_back(state);
    rec.X.push_back(fv.X);
    rec.V.push_back(fv.V);
    if (energy) rec.E.push_back(*energy);
    if (external) {
      feedback = u;
    } else {
      std::fill(feedback.begin(), feedback.end(), 0.0);
      if (control_on && std::holds_alternative<CuckerSmaleModel>(model)) {
        add_decentralized_feedback(control.law, state.x, state.v, N, d, feedback);
      }
    }
    rec.controls.push_back(feedback);
    rec.control_norms.push_back(block_norm_sum(feedback, N, d));
    rec.active_agent.push_back(single_active_block(feedback, N, d));
  };
  auto check_budget = [&] {
    const double total = block_norm_sum(u, N, d);
    rec.max_control_norm = std::max(rec.max_control_norm, total);
    if (total > rec.budget + 1e-9) rec.admissible = false;
  };

  auto y = pack(state);
  Rk4Stepper stepper(y.size());
  const long steps = std::max(1L, std::lround(cfg.t_end / cfg.h));
  const long hold = control.sample_hold_dt > 0.0 ? std::max(1L, std::lround(control.sample_hold_dt / cfg.h)) : 1L;

  SpreadFunctionals fv = fv0;
  std::optional<double> energy = E0;
  bool entered = false;
  auto note_region = [&](double t) {
    const auto inside = in_region(model, state, fv, energy, vartheta);
    if (entered || !inside || !*inside) return false;
    entered = true;
    rec.events.push_back({t, EventKind::region_entry, ""});
    if (cfg.release_control_on_region_entry) {
      control_on = false;
      std::fill(u.begin(), u.end(), 0.0);
    }
    return true;
  };

  if (external) {
    compute_external(state, energy);
    check_budget();
  }
  const bool entered_at_start = note_region(0.0);
  record(0.0, fv, energy);
  double t = 0.0;
  bool stopped = entered_at_start && cfg.stop_on_region_entry;
  if (cfg.stop_below_V && is_alignment(model) && fv.V <= *cfg.stop_below_V) stopped = true;
  bool recorded_last = true;

  for (long step = 1; step <= steps && !stopped; ++step) {
    if (external && control_on && (step - 1) % hold == 0 && step > 1) {
      compute_external(state, energy);
      check_budget();
    }
    const double t_next = static_cast<double>(step) * cfg.h;
    try {
      stepper.step(field, t, y, cfg.h);
      unpack(y, state, model);
      t = t_next;
      fv = model_functionals(model, state);
      if (is_attraction_repulsion(model)) {
        if (std::holds_alternative<CuckerDongModel>(model) && N > 1 && min_pair_distance(state) < cfg.collision_floor) {
          rec.events.push_back({t, EventKind::collision, "pairwise distance below collision floor"});
          stopped = true;
        } else {
          energy = model_energy(model, state);
        }
      }
    } catch (const NumericalBlowup& e) {
      rec.events.push_back({e.time(), EventKind::blowup, e.what()});
      stopped = true;
    } catch (const SingularConfiguration& e) {
      rec.events.push_back({t_next, EventKind::collision, e.what()});
      stopped = true;
    }
    if (stopped) break;

    for (int i = 0; i < N && !stopped; ++i) {
      if (norm(state.pos(i)) > cfg.divergence_radius) {
        rec.events.push_back({t, EventKind::divergence, "agent " + std::to_string(i) + " left the divergence radius"});
        stopped = true;
      }
    }
    if (note_region(t) && cfg.stop_on_region_entry) stopped = true;
    if (cfg.stop_below_V && is_alignment(model) && fv.V <= *cfg.stop_below_V) stopped = true;

    recorded_last = step % cfg.record_stride == 0 || stopped || step == steps;
    if (recorded_last) record(t, fv, energy);
  }
  if (!recorded_last) record(t, fv, energy);

  rec.events.push_back({t, EventKind::end, ""});
  rec.final_state = state;
  rec.final_time = t;
  rec.final_X = fv.X;
  rec.final_V = fv.V;
  rec.final_E = energy;
  return rec;
}

double conserved_quantity_check(const TrajectoryRecord& record, ConservedQuantity kind) {
  if (record.states.empty()) throw ConfigError("empty trajectory");
  double drift = 0.0;
  switch (kind) {
    case ConservedQuantity::mean_velocity: {
      const auto& s0 = record.states.front();
      const auto m0 = mean_vector(s0.v, s0.count, s0.dim);
      for (const auto& s : record.states) {
        const auto m = mean_vector(s.v, s.count, s.dim);
        double diff = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) diff += (m[k] - m0[k]) * (m[k] - m0[k]);
        drift = std::max(drift, std::sqrt(diff));
      }
      return drift;
    }
    case ConservedQuantity::energy:
      if (record.E.empty()) throw ConfigError("energy check needs an attraction-repulsion run");
      for (double e : record.E) drift = std::max(drift, std::abs(e - record.E.front()));
      return drift;
    case ConservedQuantity::arctan_invariant: {
      if (record.model != "reduced_pair_cs") throw ConfigError("arctan invariant needs the reduced pair alignment model");
      auto q = [](const AgentState& s) { return s.v[0] + std::atan(s.x[0]); };
      const double q0 = q(record.states.front());
      for (const auto& s : record.states) drift = std::max(drift, std::abs(q(s) - q0));
      return drift;
    }
  }
  return drift;
}

}  // namespace swarm
