#pragma once

// Scripted experiments. Each run_* returns named column series plus summary
// scalars that can be recomputed from those columns.

#include <Eigen/Dense>

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qdatabus/chain_model.hpp"
#include "qdatabus/effective_models.hpp"
#include "qdatabus/errors.hpp"
#include "qdatabus/experiment_config.hpp"
#include "qdatabus/gaussian_dynamics.hpp"
#include "qdatabus/numerics.hpp"
#include "qdatabus/single_excitation.hpp"

namespace qdatabus {

inline constexpr const char* kVersion = "0.1.0";

struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> values;  // one vector per column

  Series(std::string n, std::vector<std::string> cols)
      : name(std::move(n)), columns(std::move(cols)), values(columns.size()) {}

  void add_row(const std::vector<double>& row) {
    detail::require(row.size() == columns.size(), "row width does not match series '" + name + "'");
    for (std::size_t i = 0; i < row.size(); ++i) values[i].push_back(row[i]);
  }

  [[nodiscard]] std::size_t rows() const { return values.empty() ? 0 : values.front().size(); }

  [[nodiscard]] const std::vector<double>& column(const std::string& c) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == c) return values[i];
    throw ConfigError("series '" + name + "' has no column '" + c + "'");
  }
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::transfer;
  nlohmann::ordered_json config;
  std::vector<Series> series;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::vector<std::string> warnings;

  [[nodiscard]] const Series& get(const std::string& name) const {
    for (const auto& s : series)
      if (s.name == name) return s;
    throw ConfigError("result has no series '" + name + "'");
  }
};

// Entanglement between the receiver and the spectator c, relative to the
// initial sender/spectator entanglement, for a squeezed pair on (sender, c).
class TransferEvaluator {
 public:
  TransferEvaluator(const QuadraticHamiltonian& h, const std::string& sender,
                    const std::string& receiver, double squeezing)
      : propagator_(h),
        sender_(h.index_of(sender)),
        receiver_(h.index_of(receiver)),
        spectator_(h.index_of("c")) {
    detail::require(squeezing > 0.0, "transfer experiments need squeezing > 0");
    gamma0_ = two_mode_squeezed(squeezing, sender_, spectator_, h.labels).gamma;
    initial_ = pair_entanglement(sender_, 0.0);
  }

  [[nodiscard]] double initial() const { return initial_; }
  [[nodiscard]] double sender_entanglement(double t) const { return pair_entanglement(sender_, t); }
  [[nodiscard]] double receiver_entanglement(double t) const { return pair_entanglement(receiver_, t); }
  [[nodiscard]] double efficiency(double t) const { return receiver_entanglement(t) / initial_; }

 private:
  [[nodiscard]] double pair_entanglement(int mode, double t) const {
    const Eigen::MatrixXd s = propagator_.rows(t, {mode, spectator_});
    const Eigen::MatrixXd g = s * gamma0_ * s.transpose();
    const CovarianceState pair{{"x", "c"}, 0.5 * (g + g.transpose())};
    return log_negativity(pair, {"x"});
  }

  ChainPropagator propagator_;
  int sender_;
  int receiver_;
  int spectator_;
  Eigen::MatrixXd gamma0_;
  double initial_ = 0.0;
};

struct TransferCurve {
  std::vector<double> t;
  std::vector<double> efficiency;
  Extremum peak;
};

namespace detail {

inline ExperimentResult new_result(ExperimentKind kind, const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.kind = kind;
  r.config = config_to_json(cfg);
  return r;
}

inline void require_two_probe_transfer(const ChainSpec& spec) {
  require(spec.probes.size() == 2, "transfer experiments need exactly two probes (sender, receiver)");
  require(spec.include_decoupled_c, "transfer experiments need include_decoupled_c = true");
  require(spec.probes[0].site != spec.probes[1].site,
          "receiver must attach to a different site than the sender");
}

inline TransferCurve transfer_curve(const ChainSpec& spec, double squeezing, double t_max,
                                    int samples) {
  const auto h = attach_probes(spec);
  const TransferEvaluator eval(h, spec.probes[0].label, spec.probes[1].label, squeezing);
  TransferCurve curve;
  curve.t = linspace(0.0, t_max, samples);
  curve.efficiency.reserve(curve.t.size());
  for (double t : curve.t) curve.efficiency.push_back(eval.efficiency(t));
  curve.peak = refined_maximum(curve.t, curve.efficiency, [&](double t) { return eval.efficiency(t); });
  return curve;
}

inline nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline int wrap_site(int site, int ring_size) { return ((site - 1) % ring_size + ring_size) % ring_size + 1; }

}  // namespace detail

inline ExperimentResult run_transfer(const ExperimentConfig& cfg) {
  detail::require_two_probe_transfer(cfg.chain);
  const auto h = attach_probes(cfg.chain);
  const auto& sender = cfg.chain.probes[0].label;
  const auto& receiver = cfg.chain.probes[1].label;
  const TransferEvaluator eval(h, sender, receiver, cfg.squeezing);

  auto result = detail::new_result(ExperimentKind::transfer, cfg);
  Series curve("transfer", {"t", "entanglement_sender", "entanglement_receiver", "efficiency"});
  std::vector<double> eff;
  const auto grid = linspace(0.0, cfg.time.t_max, cfg.time.samples);
  for (double t : grid) {
    const double en_b = eval.receiver_entanglement(t);
    curve.add_row({t, eval.sender_entanglement(t), en_b, en_b / eval.initial()});
    eff.push_back(en_b / eval.initial());
  }
  const Extremum peak = refined_maximum(grid, eff, [&](double t) { return eval.efficiency(t); });
  const std::size_t g = argmax(eff);

  Series peak_series("peak", {"t", "efficiency"});
  peak_series.add_row({peak.x, peak.value});
  result.series.push_back(std::move(curve));
  result.series.push_back(std::move(peak_series));

  result.summary["initial_entanglement"] = eval.initial();
  result.summary["peak_time"] = peak.x;
  result.summary["peak_efficiency"] = peak.value;
  result.summary["grid_peak_time"] = grid[g];
  result.summary["grid_peak_efficiency"] = eff[g];
  if (g + 1 == grid.size())
    result.warnings.push_back("efficiency maximum sits at t_max; the window may be too short");
  return result;
}

namespace detail {

struct FirstPeak {
  double time = std::numeric_limits<double>::quiet_NaN();
  double height = std::numeric_limits<double>::quiet_NaN();
};

inline FirstPeak first_peak(const std::vector<double>& t, const std::vector<double>& v,
                            double min_prominence) {
  const auto i = first_prominent_peak(v, min_prominence);
  if (!i) return {};
  return {t[*i], v[*i]};
}

}  // namespace detail

// Exact chain against the resonant single-mode model, for the squeezed-pair
// entanglement ratio and the single-excitation population of the receiver.
inline ExperimentResult run_compare_approx(const ExperimentConfig& cfg) {
  const auto& spec = cfg.chain;
  detail::require_two_probe_transfer(spec);
  detail::require(!spec.disorder, "compare-approx needs an ordered ring");
  const auto& pa = spec.probes[0];
  const auto& pb = spec.probes[1];
  detail::require(pa.epsilon == pb.epsilon, "compare-approx needs equal probe couplings");
  detail::require(pa.epsilon > 0.0, "compare-approx needs epsilon > 0");
  detail::require(pa.detuning == pb.detuning, "compare-approx needs equal probe detunings");

  EffectiveQuadraticModel model;
  if (pa.detuning == 0.0) {
    model = approx_hamiltonian(spec.ring_size, pa.epsilon);
  } else {
    detail::require(pa.detuning == quarter_mode_detuning(spec.coupling),
                    "compare-approx supports detuning 0 (centre of mass) or 2c (quarter mode)");
    const int d = ((pb.site - pa.site) % spec.ring_size + spec.ring_size) % spec.ring_size;
    model = quarter_mode_hamiltonian(spec.ring_size, spec.coupling, pa.epsilon, d);
  }

  const auto h = attach_probes(spec);
  const TransferEvaluator exact(h, pa.label, pb.label, cfg.squeezing);
  const AmplitudeEvolver exact_amp(rwa_hopping_matrix(h));
  const auto exact_start = AmplitudeState::localized(h.labels, pa.label);
  const int exact_b = h.index_of(pb.label);

  const std::vector<std::string> eff_labels(model.labels.begin(), model.labels.end());
  const auto gamma0 = two_mode_squeezed(cfg.squeezing, "a", "c", eff_labels);
  const double eff_initial = log_negativity(reduce(gamma0, {"a", "c"}), {"a"});
  const AmplitudeEvolver eff_amp(HoppingMatrix{eff_labels, model.v_eff});
  const auto eff_start = AmplitudeState::localized(eff_labels, "a");

  auto result = detail::new_result(ExperimentKind::compare_approx, cfg);
  Series s("compare",
           {"t", "exact_efficiency", "approx_efficiency", "exact_population", "approx_population"});
  for (double t : linspace(0.0, cfg.time.t_max, cfg.time.samples)) {
    const auto evolved = evolve(gamma0, rotating_frame_propagator(model.v_eff, t));
    const double approx_en = log_negativity(reduce(evolved, {"b", "c"}), {"b"}) / eff_initial;
    const double exact_pop = std::norm(exact_amp.evolve(exact_start, t).psi(exact_b));
    const double approx_pop = std::norm(eff_amp.evolve(eff_start, t).psi(2));
    s.add_row({t, exact.efficiency(t), approx_en, exact_pop, approx_pop});
  }

  const auto& t = s.column("t");
  const double prom = cfg.sweep.min_prominence;
  const auto report = [&](const std::string& tag, const std::string& exact_col,
                          const std::string& approx_col) {
    const auto e = detail::first_peak(t, s.column(exact_col), prom);
    const auto a = detail::first_peak(t, s.column(approx_col), prom);
    if (!std::isfinite(e.time) || !std::isfinite(a.time))
      result.warnings.push_back("no prominent " + tag + " peak inside the window");
    result.summary[tag + "_exact_peak_time"] = detail::number_or_null(e.time);
    result.summary[tag + "_exact_peak_height"] = detail::number_or_null(e.height);
    result.summary[tag + "_approx_peak_time"] = detail::number_or_null(a.time);
    result.summary[tag + "_approx_peak_height"] = detail::number_or_null(a.height);
    result.summary[tag + "_time_mismatch"] = detail::number_or_null(std::abs(a.time - e.time) / e.time);
    result.summary[tag + "_height_mismatch"] = detail::number_or_null(std::abs(a.height - e.height));
  };
  report("entanglement", "exact_efficiency", "approx_efficiency");
  report("population", "exact_population", "approx_population");
  result.summary["model_target_mode"] = model.target_mode;
  result.summary["min_prominence"] = prom;
  result.series.push_back(std::move(s));
  return result;
}

// Three probes on the ring, one excitation starting on the first probe.
// tau = eps_1 t / 2.
inline ExperimentResult run_wstate(const ExperimentConfig& cfg) {
  const auto& spec = cfg.chain;
  detail::require(spec.probes.size() == 3, "wstate needs exactly three probes");
  detail::require(spec.probes[0].epsilon > 0.0, "wstate needs epsilon > 0 on the first probe");

  const auto h = attach_probes(spec);
  const AmplitudeEvolver evolver(rwa_hopping_matrix(h));
  const auto start = AmplitudeState::localized(h.labels, spec.probes[0].label);
  const WTarget target{cfg.w_target[0], cfg.w_target[1], cfg.w_target[2],
                       {spec.probes[0].label, spec.probes[1].label, spec.probes[2].label}};
  std::vector<int> probe_idx;
  for (const auto& p : spec.probes) probe_idx.push_back(h.index_of(p.label));
  const double eps = spec.probes[0].epsilon;

  auto result = detail::new_result(ExperimentKind::wstate, cfg);
  for (const auto& p : spec.probes)
    if (p.epsilon != eps) {
      result.warnings.push_back("probe couplings differ; tau uses the first probe's epsilon");
      break;
    }

  std::vector<std::string> cols{"t", "tau", "overlap", "overlap_phase_optimized", "fidelity",
                                "population_bus"};
  for (const auto& p : spec.probes) cols.push_back("population_" + p.label);
  cols.push_back("population_total");
  Series s("wstate", cols);

  const auto grid = linspace(0.0, cfg.time.t_max, cfg.time.samples);
  std::vector<double> overlap;
  double worst_total = 0.0;
  double worst_asym = 0.0;
  for (double t : grid) {
    const auto psi = evolver.evolve(start, t);
    const Eigen::VectorXd pop = site_populations(psi);
    const double bus = pop.head(spec.ring_size).sum();
    const double total = pop.sum();
    std::vector<double> row{t, eps * t / 2.0, w_overlap(psi, target),
                            phase_optimized_w_overlap(psi, target), w_fidelity(psi, target), bus};
    for (int i : probe_idx) row.push_back(pop(i));
    row.push_back(total);
    s.add_row(row);
    overlap.push_back(row[2]);
    worst_total = std::max(worst_total, std::abs(total - 1.0));
    worst_asym = std::max(worst_asym, std::abs(pop(probe_idx[1]) - pop(probe_idx[2])));
  }

  const auto overlap_at = [&](double t) { return w_overlap(evolver.evolve(start, t), target); };
  const Extremum peak = refined_maximum(grid, overlap, overlap_at);
  const auto psi_peak = evolver.evolve(start, peak.x);
  const Eigen::VectorXd pop_peak = site_populations(psi_peak);

  Series peak_series("peak", {"t", "tau", "overlap", "overlap_phase_optimized", "fidelity",
                              "population_bus"});
  peak_series.add_row({peak.x, eps * peak.x / 2.0, peak.value,
                       phase_optimized_w_overlap(psi_peak, target), w_fidelity(psi_peak, target),
                       pop_peak.head(spec.ring_size).sum()});

  result.summary["peak_overlap"] = peak.value;
  result.summary["peak_time"] = peak.x;
  result.summary["peak_tau"] = eps * peak.x / 2.0;
  result.summary["fidelity_at_peak"] = w_fidelity(psi_peak, target);
  result.summary["phase_optimized_at_peak"] = phase_optimized_w_overlap(psi_peak, target);
  result.summary["bus_population_at_peak"] = pop_peak.head(spec.ring_size).sum();
  result.summary["max_population_sum_error"] = worst_total;
  result.summary["max_receiver_asymmetry"] = worst_asym;
  result.series.push_back(std::move(s));
  result.series.push_back(std::move(peak_series));
  return result;
}

namespace detail {

// Ordered ring, sender at site 1, receiver antipodal; detuned onto M/4 in the
// quarter-mode regime.
inline ChainSpec scaling_chain(int ring_size, double coupling, double epsilon, Regime regime) {
  ChainSpec spec;
  spec.ring_size = ring_size;
  spec.coupling = coupling;
  spec.include_decoupled_c = true;
  const double detuning = regime == Regime::quarter_mode ? quarter_mode_detuning(coupling) : 0.0;
  spec.probes = {{"a", 1, epsilon, detuning}, {"b", 1 + ring_size / 2, epsilon, detuning}};
  return spec;
}

// Bisection for the first upward crossing of `level` inside [lo, hi].
inline double refine_crossing(const std::function<double(double)>& f, double lo, double hi,
                              double level) {
  for (int it = 0; it < 200 && hi - lo > 1e-9 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= level ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

inline ExperimentResult run_scaling(const ExperimentConfig& cfg) {
  const auto& sw = cfg.sweep;
  detail::require(sw.ring_sizes.size() >= 3, "power-law fit requires at least 3 points");
  const double c = cfg.chain.coupling;
  for (int m : sw.ring_sizes) {
    detail::require(m >= 3, "ring sizes must be at least 3");
    if (sw.regime == Regime::quarter_mode)
      detail::require(m % 4 == 0, "quarter-mode regime needs ring sizes divisible by 4");
  }

  auto result = detail::new_result(ExperimentKind::scaling, cfg);
  Series rows("scaling", {"ring_size", "epsilon", "t_max", "crossing_time", "reached",
                          "max_efficiency_scanned"});
  std::vector<double> fit_m, fit_t;
  for (int m : sw.ring_sizes) {
    const double bound = scaling_estimate(m, c, 1.0, sw.regime).loss_bound;
    const double eps = sw.epsilon_fraction * bound * c;
    const auto spec = detail::scaling_chain(m, c, eps, sw.regime);
    const double t_max = sw.window_factor * 2.0 * m / eps;
    const auto h = attach_probes(spec);
    const TransferEvaluator eval(h, "a", "b", cfg.squeezing);
    // A coarse grid can step over a narrow beat crest and report a later
    // crossing, so sample at least 8 points per period of the fastest
    // (sum-frequency) oscillation.
    const double omega_max = std::sqrt(numeric_normal_modes(h.potential).frequencies_squared.maxCoeff());
    const double max_step = std::numbers::pi / (4.0 * omega_max);
    const int samples = std::max(cfg.time.samples, static_cast<int>(std::ceil(t_max / max_step)) + 1);
    const auto grid = linspace(0.0, t_max, samples);

    double crossing = std::numeric_limits<double>::quiet_NaN();
    double best = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double e = eval.efficiency(grid[i]);
      best = std::max(best, e);
      if (e >= sw.threshold) {
        crossing = i == 0 ? grid[0]
                          : detail::refine_crossing([&](double t) { return eval.efficiency(t); },
                                                    grid[i - 1], grid[i], sw.threshold);
        break;
      }
    }
    const bool reached = std::isfinite(crossing);
    rows.add_row({static_cast<double>(m), eps, t_max, crossing, reached ? 1.0 : 0.0, best});
    if (reached) {
      fit_m.push_back(m);
      fit_t.push_back(crossing);
    } else {
      result.warnings.push_back("threshold not reached for M=" + std::to_string(m) +
                                "; excluded from the fit");
    }
  }

  result.summary["regime"] = detail::regime_name(sw.regime);
  result.summary["threshold"] = sw.threshold;
  result.summary["predicted_exponent"] = sw.regime == Regime::center_of_mass ? 2.5 : 1.5;
  result.summary["points_used"] = fit_m.size();
  if (fit_m.size() >= 3) {
    const auto fit = fit_power_law(fit_m, fit_t);
    result.summary["exponent"] = fit.exponent;
    result.summary["prefactor"] = fit.prefactor;
    result.summary["r_squared"] = fit.r_squared;
  } else {
    result.warnings.push_back("fewer than 3 ring sizes reached the threshold; no exponent fitted");
    result.summary["exponent"] = nullptr;
    result.summary["prefactor"] = nullptr;
    result.summary["r_squared"] = nullptr;
  }
  result.series.push_back(std::move(rows));
  return result;
}

inline ExperimentResult run_disorder(const ExperimentConfig& cfg) {
  detail::require_two_probe_transfer(cfg.chain);
  const auto& sw = cfg.sweep;
  const DisorderModel model = cfg.chain.disorder ? cfg.chain.disorder->model : DisorderModel::bond;

  auto result = detail::new_result(ExperimentKind::disorder, cfg);
  ChainSpec ordered = cfg.chain;
  ordered.disorder.reset();
  const auto reference =
      detail::transfer_curve(ordered, cfg.squeezing, cfg.time.t_max, cfg.time.samples).peak;

  Series runs("runs", {"spread", "seed", "efficiency", "peak_time"});
  Series stats("per_spread", {"spread", "median", "min", "max"});
  std::vector<double> medians;
  for (double spread : sw.spreads) {
    std::vector<double> eff;
    for (int i = 0; i < sw.seeds; ++i) {
      ChainSpec spec = cfg.chain;
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(i);
      spec.disorder = Disorder{model, spread, seed};
      const auto peak = detail::transfer_curve(spec, cfg.squeezing, cfg.time.t_max, cfg.time.samples).peak;
      runs.add_row({spread, static_cast<double>(seed), peak.value, peak.x});
      eff.push_back(peak.value);
    }
    const double med = median(eff);
    medians.push_back(med);
    stats.add_row({spread, med, *std::min_element(eff.begin(), eff.end()),
                   *std::max_element(eff.begin(), eff.end())});
  }

  bool monotone = true;
  for (std::size_t i = 1; i < medians.size(); ++i)
    if (sw.spreads[i] > sw.spreads[i - 1] && medians[i] > medians[i - 1]) monotone = false;

  result.summary["ordered_efficiency"] = reference.value;
  result.summary["ordered_peak_time"] = reference.x;
  result.summary["spreads"] = sw.spreads;
  result.summary["median_efficiency"] = medians;
  result.summary["median_non_increasing"] = monotone;
  result.series.push_back(std::move(runs));
  result.series.push_back(std::move(stats));
  return result;
}

// Transfer through mode M/4 at separations d (even) and d+1 (odd), plus the
// undetuned control at the odd separation.
inline ExperimentResult run_node_parity(const ExperimentConfig& cfg) {
  const auto& base = cfg.chain;
  detail::require(base.ring_size % 4 == 0, "node-parity needs a ring size divisible by 4");
  detail::require(!base.probes.empty(), "node-parity needs a sender probe");
  detail::require(base.include_decoupled_c, "node-parity needs include_decoupled_c = true");
  const int d = cfg.sweep.separation;
  detail::require(d > 0 && d % 2 == 0, "node-parity needs a positive even sweep.separation");
  detail::require(d + 1 < base.ring_size, "separation must fit on the ring");

  const Probe sender = base.probes[0];
  const double quarter = quarter_mode_detuning(base.coupling);
  const auto run = [&](int separation, double detuning) {
    ChainSpec spec = base;
    spec.probes = {sender, sender};
    spec.probes[0].detuning = detuning;
    spec.probes[1].label = sender.label == "b" ? "receiver" : "b";
    spec.probes[1].site = detail::wrap_site(sender.site + separation, base.ring_size);
    spec.probes[1].detuning = detuning;
    return detail::transfer_curve(spec, cfg.squeezing, cfg.time.t_max, cfg.time.samples).peak;
  };

  auto result = detail::new_result(ExperimentKind::node_parity, cfg);
  const auto even = run(d, quarter);
  const auto odd = run(d + 1, quarter);
  const auto control = run(d + 1, 0.0);

  Series s("parity", {"separation", "detuning", "efficiency", "peak_time"});
  s.add_row({static_cast<double>(d), quarter, even.value, even.x});
  s.add_row({static_cast<double>(d + 1), quarter, odd.value, odd.x});
  s.add_row({static_cast<double>(d + 1), 0.0, control.value, control.x});
  result.summary["even_efficiency"] = even.value;
  result.summary["odd_efficiency"] = odd.value;
  result.summary["control_efficiency"] = control.value;
  result.series.push_back(std::move(s));
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  switch (cfg.experiment) {
    case ExperimentKind::transfer: return run_transfer(cfg);
    case ExperimentKind::compare_approx: return run_compare_approx(cfg);
    case ExperimentKind::wstate: return run_wstate(cfg);
    case ExperimentKind::scaling: return run_scaling(cfg);
    case ExperimentKind::disorder: return run_disorder(cfg);
    case ExperimentKind::node_parity: return run_node_parity(cfg);
  }
  throw ConfigError("unhandled experiment kind");
}

}  // namespace qdatabus
