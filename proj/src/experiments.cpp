#include "dter/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "dter/csv.hpp"
#include "dter/error.hpp"
#include "dter/parallel.hpp"
#include "dter/rate_plan.hpp"

namespace dter {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

EnergyTunnel tunnel_for_trace(const SimConfig& cfg, const DataArrivalTrace& trace) {
  return plan_dter(cfg, build_data_tunnel(trace, cfg.data_capacity)).tunnel;
}

}  // namespace

StrategyComparison compare_strategies(const SimConfig& base, std::span<const Strategy> strategies,
                                      std::span<const std::uint64_t> seeds) {
  StrategyComparison out;
  std::size_t run_id = 0;
  for (Strategy s : strategies) {
    SimConfig cfg = base;
    cfg.strategy = s;
    const std::vector<SimResult> results = run_simulations(cfg, seeds);
    std::vector<double> es, eh, loss, req;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const SimResult& r = results[i];
      out.runs.push_back({run_id++, seeds[i], s, r.es_energy, r.eh_energy, r.loss_ratio,
                          r.request_count});
      es.push_back(r.es_energy);
      eh.push_back(r.eh_energy);
      loss.push_back(r.loss_ratio);
      req.push_back(static_cast<double>(r.request_count));
    }
    out.summary.push_back(
        {s, mean_of(es), std_of(es), mean_of(eh), mean_of(loss), std_of(loss), mean_of(req)});
  }
  return out;
}

void write_runs_csv(std::ostream& out, std::span<const RunRow> runs) {
  out << "run_id,seed,strategy,es_energy_J,eh_energy_J,loss_ratio,request_count\n";
  for (const auto& r : runs) {
    out << r.run_id << ',' << r.seed << ',' << to_string(r.strategy) << ','
        << csv_number(r.es_energy) << ',' << csv_number(r.eh_energy) << ','
        << csv_number(r.loss_ratio) << ',' << r.request_count << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const StrategySummary> summary) {
  out << "strategy,es_energy_mean_J,es_energy_std_J,eh_energy_mean_J,loss_ratio_mean,"
         "loss_ratio_std,request_count_mean\n";
  for (const auto& s : summary) {
    out << to_string(s.strategy) << ',' << csv_number(s.es_mean) << ',' << csv_number(s.es_std)
        << ',' << csv_number(s.eh_mean) << ',' << csv_number(s.loss_mean) << ','
        << csv_number(s.loss_std) << ',' << csv_number(s.requests_mean) << '\n';
  }
}

void write_curve_csv(std::ostream& out, const CumulativeCurve& curve) {
  out << "t_s,value\n";
  for (const auto& p : curve.points()) out << csv_number(p.time) << ',' << csv_number(p.value) << '\n';
}

ComparisonResult compare_online_offline(const ChargingCircuit& circuit,
                                        std::span<const TunnelPiece> pieces, double initial_energy,
                                        double level_step) {
  ComparisonResult res;
  if (pieces.empty()) return res;
  const OnlineSolution sol = plan_online(circuit, pieces);
  const OnlineRun online = run_online_tunnel(circuit, pieces, initial_energy, sol);
  res.online = online.schedule.total_es_cost;
  res.online_requests = online.schedule.requests.size();

  std::vector<PowerSegment> segments;
  double steepest = 0.0;
  for (const auto& p : pieces) {
    segments.push_back({p.start, p.end, p.slope});
    steepest = std::max(steepest, p.slope);
  }
  const PowerProfile profile = make_power_profile(std::move(segments));
  const EnergyTunnel tunnel = build_energy_tunnel(profile, circuit, initial_energy, sol.eb_hat);
  const double horizon = tunnel.horizon;
  const double dt = steepest > 0.0 ? level_step / steepest : horizon;
  const RequestSchedule offline = schedule_offline(make_grid(tunnel, dt, level_step), tunnel, circuit);
  res.optimal = schedule_cost(offline, circuit, tunnel);
  res.optimal_requests = offline.requests.size();
  res.delta_percent = res.optimal > 0.0 ? 100.0 * (res.online - res.optimal) / res.optimal : 0.0;
  return res;
}

std::vector<DeltaRow> single_tunnel_sweep(const ChargingCircuit& circuit, double slope,
                                          std::span<const double> horizons, double initial_energy,
                                          double level_step) {
  std::vector<DeltaRow> rows(horizons.size());
  parallel_for(horizons.size(), [&](std::size_t i) {
    const TunnelPiece piece{0.0, horizons[i], slope};
    const OnlineSolution sol = plan_online(circuit, std::span(&piece, 1));
    rows[i] = {horizons[i], slope, initial_energy, slope * horizons[i] / sol.er_hat,
               compare_online_offline(circuit, std::span(&piece, 1), initial_energy, level_step)};
  });
  return rows;
}

std::vector<TunnelPiece> random_pieces(std::size_t count, double mean_horizon, double mean_slope,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  // Box-Muller on the raw engine so draws are identical across standard libraries.
  auto positive_unit_gaussian = [&]() {
    for (;;) {
      const double z = std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * M_PI * uniform());
      if (1.0 + z > 0.0) return 1.0 + z;
    }
  };
  std::vector<TunnelPiece> pieces;
  const double mean_length = mean_horizon / static_cast<double>(count);
  double t = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double length = mean_length * positive_unit_gaussian();
    const double slope = mean_slope * positive_unit_gaussian();
    pieces.push_back({t, t + length, slope});
    t += length;
  }
  return pieces;
}

MultiTunnelCell multi_tunnel_cell(const ChargingCircuit& circuit, std::size_t pieces,
                                  double mean_horizon, double mean_slope,
                                  std::span<const std::uint64_t> seeds, double level_step) {
  MultiTunnelCell cell{mean_horizon, mean_slope, std::vector<double>(seeds.size()), 0.0};
  parallel_for(seeds.size(), [&](std::size_t i) {
    const auto tunnel = random_pieces(pieces, mean_horizon, mean_slope, seeds[i]);
    const OnlineSolution sol = plan_online(circuit, tunnel);
    cell.deltas[i] = compare_online_offline(circuit, tunnel, sol.eb_hat, level_step).delta_percent;
  });
  cell.mean_delta = mean_of(cell.deltas);
  return cell;
}

void write_delta_csv(std::ostream& out, std::span<const DeltaRow> rows) {
  out << "T_s,mean_slope_W,E0_J,alpha,online_J,optimal_J,delta_E_percent,online_requests,"
         "optimal_requests\n";
  for (const auto& r : rows) {
    out << csv_number(r.horizon) << ',' << csv_number(r.mean_slope) << ','
        << csv_number(r.initial_energy) << ',' << csv_number(r.alpha) << ','
        << csv_number(r.result.online) << ',' << csv_number(r.result.optimal) << ','
        << csv_number(r.result.delta_percent) << ',' << r.result.online_requests << ','
        << r.result.optimal_requests << '\n';
  }
}

DensityCell density_cell(const SimConfig& base, std::span<const std::uint64_t> seeds, double beta0,
                         double threshold, int max_iterations) {
  DensityCell cell{base.traffic.rate_lambda, base.circuit.capacitance(), base.horizon,
                   std::vector<double>(seeds.size())};
  parallel_for(seeds.size(), [&](std::size_t i) {
    const DataArrivalTrace trace = generate_traffic(base.traffic, base.horizon, seeds[i]);
    const EnergyTunnel tunnel = tunnel_for_trace(base, trace);
    cell.converged[i] =
        density_sweep(tunnel, base.circuit, beta0, threshold, max_iterations).converged_density;
  });
  return cell;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw Error(ErrorCode::ConfigInvalid, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

void write_density_cells_csv(std::ostream& out, std::span<const DensityCell> cells) {
  out << "lambda,C_farad,T_s,run,converged_beta\n";
  for (const auto& c : cells) {
    for (std::size_t i = 0; i < c.converged.size(); ++i) {
      out << csv_number(c.lambda) << ',' << csv_number(c.capacitance) << ','
          << csv_number(c.horizon) << ',' << i << ',' << csv_number(c.converged[i]) << '\n';
    }
  }
}

void write_density_cdf_csv(std::ostream& out, std::span<const DensityCell> cells) {
  out << "lambda,C_farad,T_s,beta,cdf\n";
  for (const auto& c : cells) {
    std::vector<double> v = c.converged;
    std::sort(v.begin(), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
      out << csv_number(c.lambda) << ',' << csv_number(c.capacitance) << ','
          << csv_number(c.horizon) << ',' << csv_number(v[i]) << ','
          << csv_number(static_cast<double>(i + 1) / static_cast<double>(v.size())) << '\n';
    }
  }
}

RequestTableRow request_table_row(const SimConfig& base, std::span<const std::uint64_t> seeds) {
  std::vector<double> freq(seeds.size()), er(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    const DataArrivalTrace trace = generate_traffic(base.traffic, base.horizon, seeds[i]);
    const EnergyTunnel tunnel = tunnel_for_trace(base, trace);
    const OnlineRun run = run_online_tunnel(base.circuit, tunnel.pieces, base.initial_energy);
    freq[i] = base.horizon > 0.0 ? static_cast<double>(run.schedule.requests.size()) / base.horizon : 0.0;
    er[i] = run.solution.er_hat;
  });
  return {base.traffic.rate_lambda, base.circuit.capacitance(), mean_of(er), mean_of(freq)};
}

void write_request_table_csv(std::ostream& out, std::span<const RequestTableRow> rows) {
  out << "lambda,C_farad,Er_hat_J,requests_per_s\n";
  for (const auto& r : rows) {
    out << csv_number(r.lambda) << ',' << csv_number(r.capacitance) << ','
        << csv_number(r.er_hat) << ',' << csv_number(r.requests_per_second) << '\n';
  }
}

}  // namespace dter
