#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dter/csv.hpp"
#include "dter/error.hpp"
#include "dter/experiments.hpp"
#include "dter/scenario.hpp"

namespace fs = std::filesystem;
using namespace dter;

namespace {

struct CommonArgs {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string trace;
};

AnchorMode anchor_of(const Scenario& sc) {
  const std::string a =
      sc.option<std::string>("anchor", sc.sim.anchor == AnchorMode::Lazy ? "lazy" : "deadline");
  if (a == "deadline") return AnchorMode::Deadline;
  if (a == "lazy") return AnchorMode::Lazy;
  Scenario::throw_invalid("scenario.anchor must be \"deadline\" or \"lazy\"");
}

Scenario load(const CommonArgs& args) {
  Scenario sc = args.config.empty() ? parse_scenario(nlohmann::json::object()) : load_scenario(args.config);
  if (args.seed) sc.seeds = {*args.seed};
  sc.sim.anchor = anchor_of(sc);
  sc.sim.grid_density = sc.option<double>("density", sc.sim.grid_density);
  return sc;
}

std::ofstream open_out(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out);
  const fs::path path = fs::path(args.out) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot write " + path.string());
  return out;
}

template <typename Fn>
void with_file(const CommonArgs& args, const std::string& name, Fn&& fn) {
  std::ofstream out = open_out(args, name);
  fn(out);
}

void write_json(const CommonArgs& args, const std::string& name, const nlohmann::json& doc) {
  open_out(args, name) << doc.dump(2) << '\n';
}

DataArrivalTrace trace_for(const Scenario& sc, const CommonArgs& args) {
  if (!args.trace.empty()) {
    std::ifstream in(args.trace);
    if (!in) throw Error(ErrorCode::ConfigInvalid, "cannot open trace " + args.trace);
    return read_trace_json(in, sc.sim.horizon);
  }
  const std::uint64_t seed = sc.seeds.empty() ? 1 : sc.seeds.front();
  return generate_traffic(sc.sim.traffic, sc.sim.horizon, seed);
}

EnergyTunnel energy_tunnel_for(const Scenario& sc, const DataArrivalTrace& trace) {
  return plan_dter(sc.sim, build_data_tunnel(trace, sc.sim.data_capacity)).tunnel;
}

void write_pieces_csv(std::ostream& out, const std::vector<TunnelPiece>& pieces) {
  out << "start_s,end_s,power_W\n";
  for (const auto& p : pieces) {
    out << csv_number(p.start) << ',' << csv_number(p.end) << ',' << csv_number(p.slope) << '\n';
  }
}

void cmd_solve_rate(const CommonArgs& args) {
  const Scenario sc = load(args);
  const DataArrivalTrace trace = trace_for(sc, args);
  const DataTunnel tunnel = build_data_tunnel(trace, sc.sim.data_capacity);
  const RatePlan plan = solve_optimal_rate(tunnel, sc.sim.anchor);
  const PlanDiagnostics diag = validate_plan(plan, tunnel);
  with_file(args, "plan.csv", [&](std::ostream& o) { write_plan_csv(o, plan); });
  with_file(args, "arrivals.csv", [&](std::ostream& o) { write_curve_csv(o, tunnel.upper); });
  const PowerProfile power = plan_to_power(plan, sc.sim.channel);
  with_file(args, "energy.csv", [&](std::ostream& o) { write_curve_csv(o, power.energy); });
  write_json(args, "summary.json",
             {{"packets", trace.events.size()},
              {"total_bytes", trace.total_bytes()},
              {"t_p_s", compute_t_p(trace, sc.sim.data_capacity, plan)},
              {"segments", plan.segments.size()},
              {"transmit_energy_J", power.energy.value_at(power.horizon())},
              {"feasible", diag.feasible(1e-9 * sc.sim.data_capacity)},
              {"structure_holds", diag.lemmas_hold()}});
}

void cmd_schedule(const CommonArgs& args) {
  const Scenario sc = load(args);
  const EnergyTunnel tunnel = energy_tunnel_for(sc, trace_for(sc, args));
  const double density = sc.sim.grid_density;
  const Grid grid = discretize(tunnel, density);
  const RequestSchedule schedule = schedule_offline(grid, tunnel, sc.sim.circuit);
  const double cost = schedule_cost(schedule, sc.sim.circuit, tunnel);
  with_file(args, "schedule.csv", [&](std::ostream& o) { write_schedule_csv(o, schedule); });
  with_file(args, "tunnel.csv", [&](std::ostream& o) { write_pieces_csv(o, tunnel.pieces); });
  write_json(args, "summary.json",
             {{"density", density},
              {"columns", grid.columns.size()},
              {"levels", grid.levels.size()},
              {"requests", schedule.requests.size()},
              {"es_energy_J", cost}});
}

void cmd_online(const CommonArgs& args) {
  const Scenario sc = load(args);
  std::vector<TunnelPiece> pieces;
  if (sc.options.contains("pieces")) {
    double t = 0.0;
    for (const auto& p : sc.options.at("pieces")) {
      const double len = p.at("length_s").get<double>();
      pieces.push_back({t, t + len, p.at("power_W").get<double>()});
      t += len;
    }
  } else {
    pieces = energy_tunnel_for(sc, trace_for(sc, args)).pieces;
  }
  const OnlineRun run = run_online_tunnel(sc.sim.circuit, pieces, sc.sim.initial_energy);
  with_file(args, "policy_trace.csv", [&](std::ostream& o) { write_policy_trace_csv(o, run.trace); });
  with_file(args, "schedule.csv", [&](std::ostream& o) { write_schedule_csv(o, run.schedule); });
  with_file(args, "tunnel.csv", [&](std::ostream& o) { write_pieces_csv(o, pieces); });
  write_json(args, "summary.json",
             {{"X", run.solution.X},
              {"Er_x_J", run.solution.er_x},
              {"Er_y_J", run.solution.er_y},
              {"Er_hat_J", run.solution.er_hat},
              {"Eb_hat_J", run.solution.eb_hat},
              {"requests", run.schedule.requests.size()},
              {"es_energy_J", run.schedule.total_es_cost},
              {"final_residual_J", run.final_residual}});
}

void cmd_simulate(const CommonArgs& args) {
  const Scenario sc = load(args);
  std::vector<Strategy> strategies;
  for (const auto& name : sc.option<std::vector<std::string>>(
           "strategies", {"dter-offline", "constant", "on-demand"})) {
    strategies.push_back(parse_strategy(name));
  }
  const StrategyComparison cmp = compare_strategies(sc.sim, strategies, sc.seeds);
  with_file(args, "runs.csv", [&](std::ostream& o) { write_runs_csv(o, cmp.runs); });
  with_file(args, "summary.csv", [&](std::ostream& o) { write_summary_csv(o, cmp.summary); });
  // Cumulative curves of the first seed for each strategy.
  for (Strategy s : strategies) {
    SimConfig cfg = sc.sim;
    cfg.strategy = s;
    const SimResult r = run_simulation(cfg, sc.seeds.front());
    const std::string name(to_string(s));
    with_file(args, "sent_" + name + ".csv", [&](std::ostream& o) { write_curve_csv(o, r.cumulative_sent); });
    with_file(args, "harvested_" + name + ".csv", [&](std::ostream& o) { write_curve_csv(o, r.cumulative_harvested); });
  }
}

std::vector<double> list_or(const Scenario& sc, const std::string& key, double fallback) {
  return sc.option<std::vector<double>>(key, {fallback});
}

void cmd_sweep_density(const CommonArgs& args) {
  const Scenario sc = load(args);
  const double beta0 = sc.option<double>("beta0", 5.25e7);
  const double threshold = sc.option<double>("threshold", 0.005);
  const int max_iter = sc.option<int>("max_iterations", 64);
  std::vector<DensityCell> cells;
  for (double lambda : list_or(sc, "lambdas", sc.sim.traffic.rate_lambda)) {
    for (double cap : list_or(sc, "capacitances", sc.sim.circuit.capacitance())) {
      for (double horizon : list_or(sc, "horizons", sc.sim.horizon)) {
        SimConfig cfg = sc.sim;
        cfg.traffic.rate_lambda = lambda;
        cfg.horizon = horizon;
        const ChargingCircuit& c = sc.sim.circuit;
        cfg.circuit = ChargingCircuit(c.resistance(), cap, c.max_voltage(), c.es_power(),
                                      c.request_overhead());
        cells.push_back(density_cell(cfg, sc.seeds, beta0, threshold, max_iter));
      }
    }
  }
  with_file(args, "density_runs.csv", [&](std::ostream& o) { write_density_cells_csv(o, cells); });
  with_file(args, "density_cdf.csv", [&](std::ostream& o) { write_density_cdf_csv(o, cells); });
  auto q = open_out(args, "density_q90.csv");
  q << "lambda,C_farad,T_s,beta_q90\n";
  for (const auto& c : cells) {
    q << csv_number(c.lambda) << ',' << csv_number(c.capacitance) << ',' << csv_number(c.horizon)
      << ',' << csv_number(quantile(c.converged, 0.9)) << '\n';
  }
}

std::vector<double> horizon_range(const Scenario& sc) {
  if (sc.options.contains("horizons")) return sc.option<std::vector<double>>("horizons", {});
  const double lo = sc.option<double>("T_min", 4.0);
  const double hi = sc.option<double>("T_max", 20.0);
  const double step = sc.option<double>("T_step", 0.05);
  if (!(step > 0.0) || hi < lo) Scenario::throw_invalid("need T_step > 0 and T_max >= T_min");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double t = lo + static_cast<double>(i) * step;
    if (t > hi + 1e-9 * step) break;
    out.push_back(t);
  }
  return out;
}

void cmd_compare(const CommonArgs& args) {
  const Scenario sc = load(args);
  const ChargingCircuit& circuit = sc.sim.circuit;
  const OnlineSolution ref = plan_online(circuit, {});
  const double level_step = sc.option<double>("level_step_J", ref.er_hat / 10.0);
  const std::string mode = sc.option<std::string>("mode", "single");
  if (mode == "single") {
    const double slope = sc.option<double>("slope_W", 2.0 * ref.er_hat);
    const auto horizons = horizon_range(sc);
    std::vector<DeltaRow> rows;
    for (double e0 : sc.option<std::vector<double>>("E0_J", {ref.eb_hat})) {
      const auto part = single_tunnel_sweep(circuit, slope, horizons, e0, level_step);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    with_file(args, "delta.csv", [&](std::ostream& o) { write_delta_csv(o, rows); });
  } else if (mode == "multi") {
    const auto count = sc.option<std::size_t>("piece_count", 3);
    auto out = open_out(args, "delta_multi.csv");
    out << "mean_T_s,mean_slope_W,runs,delta_E_mean_percent,delta_E_std_percent\n";
    for (double p : sc.option<std::vector<double>>("mean_slopes_W", {0.1e-9, 0.2e-9, 0.3e-9, 0.4e-9})) {
      for (double t : sc.option<std::vector<double>>("mean_horizons_s", {5.0, 15.0, 25.0, 35.0})) {
        const MultiTunnelCell cell = multi_tunnel_cell(circuit, count, t, p, sc.seeds, level_step);
        double var = 0.0;
        for (double d : cell.deltas) var += (d - cell.mean_delta) * (d - cell.mean_delta);
        const double sd = cell.deltas.size() > 1 ? std::sqrt(var / static_cast<double>(cell.deltas.size() - 1)) : 0.0;
        out << csv_number(t) << ',' << csv_number(p) << ',' << cell.deltas.size() << ','
            << csv_number(cell.mean_delta) << ',' << csv_number(sd) << '\n';
      }
    }
  } else if (mode == "table") {
    std::vector<RequestTableRow> rows;
    for (double lambda : sc.option<std::vector<double>>("lambdas", {0.25, 0.5, 1.0})) {
      for (double cap : sc.option<std::vector<double>>("capacitances", {1e-9, 2e-9, 4e-9})) {
        SimConfig cfg = sc.sim;
        cfg.traffic.rate_lambda = lambda;
        cfg.circuit = ChargingCircuit(circuit.resistance(), cap, circuit.max_voltage(),
                                      circuit.es_power(), circuit.request_overhead());
        rows.push_back(request_table_row(cfg, sc.seeds));
      }
    }
    with_file(args, "request_table.csv", [&](std::ostream& o) { write_request_table_csv(o, rows); });
  } else {
    Scenario::throw_invalid("scenario.mode must be single, multi or table");
  }
}

std::string defaults_text() {
  const Scenario sc = parse_scenario(nlohmann::json::object());
  const SimConfig& s = sc.sim;
  std::ostringstream o;
  o << "Scenario defaults (JSON key: value):\n"
    << "  circuit.R_ohm      " << s.circuit.resistance() << "\n"
    << "  circuit.C_farad    " << s.circuit.capacitance() << "\n"
    << "  circuit.Vm_volt    " << s.circuit.max_voltage() << "\n"
    << "  circuit.pes_watt   " << s.circuit.es_power() << "\n"
    << "  circuit.er_joule   " << s.circuit.request_overhead() << "\n"
    << "  channel.fd_hz      " << s.channel.carrier() << "\n"
    << "  channel.B_hz       " << s.channel.bandwidth() << "\n"
    << "  channel.N0_dbm_hz  " << s.channel.noise_density() << "\n"
    << "  channel.d_m        " << s.channel.distance() << "\n"
    << "  traffic.lambda     " << s.traffic.rate_lambda << " packets/s\n"
    << "  traffic.S_bytes    " << s.traffic.packet_bytes << "\n"
    << "  run.T_s            " << s.horizon << "\n"
    << "  run.Dm_bytes       " << s.data_capacity << "\n"
    << "  run.E0_joule       " << s.initial_energy << "\n"
    << "  run.seeds          1..70\n"
    << "  scenario.density   " << s.grid_density << " (schedule, simulate)\n"
    << "  scenario.anchor    " << (s.anchor == AnchorMode::Lazy ? "lazy" : "deadline") << "\n"
    << "  scenario.beta0     5.25e7, scenario.threshold 0.005 (sweep-density)\n"
    << "Exit codes: 0 success, 2 configuration error, 3 infeasible instance.\n";
  return o.str();
}

int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ConfigInvalid:
      return 2;
    case ErrorCode::PacketExceedsBuffer:
    case ErrorCode::InfeasibleTunnel:
    case ErrorCode::SlopeExceedsChargeBound:
    case ErrorCode::DensityTooLow:
    case ErrorCode::NoFeasiblePath:
    case ErrorCode::PowerAtOrAboveBound:
    case ErrorCode::InfeasibleOnline:
    case ErrorCode::CapacityExceeded:
    case ErrorCode::InfiniteChargeTime:
      return 3;
    default:
      return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy request scheduling for RF-powered sensors"};
  app.footer(defaults_text());
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    void (*run)(const CommonArgs&);
  };
  const Command commands[] = {
      {"solve-rate", "Minimum-energy transmission rate for one trace (plan.csv)", cmd_solve_rate},
      {"schedule", "Offline energy request schedule on a grid (schedule.csv)", cmd_schedule},
      {"online", "Threshold policy on the energy tunnel (policy_trace.csv)", cmd_online},
      {"simulate", "Strategy comparison over seeds (runs.csv, summary.csv)", cmd_simulate},
      {"sweep-density", "Converged grid density per seed (density_cdf.csv)", cmd_sweep_density},
      {"compare", "Online versus offline energy gap (delta.csv)", cmd_compare},
  };
  CommonArgs args;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", args.config, "JSON scenario file (defaults below when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", args.seed, "Run this seed only instead of run.seeds");
    if (std::string(c.name) == "solve-rate" || std::string(c.name) == "schedule" ||
        std::string(c.name) == "online") {
      sub->add_option("--trace", args.trace, "JSON arrival trace [{\"t\":s,\"bytes\":n}] instead of a generated one")
          ->check(CLI::ExistingFile);
    }
    sub->footer(defaults_text());
    subs.emplace_back(sub, &c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& [sub, cmd] : subs) {
      if (sub->parsed()) cmd->run(args);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
