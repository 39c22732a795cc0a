#include "dter/scenario.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "dter/csv.hpp"
#include "dter/error.hpp"

namespace dter {

using nlohmann::json;

void Scenario::throw_invalid(const std::string& what) { throw Error(ErrorCode::ConfigInvalid, what); }

std::vector<std::uint64_t> default_seeds() {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 70; ++s) seeds.push_back(s);
  return seeds;
}

namespace {

const json& section(const json& doc, const char* name, const std::set<std::string>& keys) {
  static const json empty = json::object();
  if (!doc.contains(name)) return empty;
  const json& s = doc.at(name);
  if (!s.is_object()) Scenario::throw_invalid(std::string(name) + " must be an object");
  for (const auto& [k, v] : s.items()) {
    if (!keys.count(k)) Scenario::throw_invalid("unknown key " + std::string(name) + "." + k);
  }
  return s;
}

double number(const json& s, const char* section, const char* key, double fallback) {
  if (!s.contains(key)) return fallback;
  const json& v = s.at(key);
  if (!v.is_number()) {
    Scenario::throw_invalid(std::string(section) + "." + key + " must be a number");
  }
  return v.get<double>();
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) Scenario::throw_invalid("scenario file must hold a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (k != "circuit" && k != "channel" && k != "traffic" && k != "run" && k != "scenario") {
      Scenario::throw_invalid("unknown top-level key " + k);
    }
  }
  Scenario sc;
  const ChargingCircuit ref = ChargingCircuit::reference();
  const json& c = section(doc, "circuit", {"R_ohm", "C_farad", "Vm_volt", "pes_watt", "er_joule"});
  sc.sim.circuit = ChargingCircuit(number(c, "circuit", "R_ohm", ref.resistance()),
                                   number(c, "circuit", "C_farad", ref.capacitance()),
                                   number(c, "circuit", "Vm_volt", ref.max_voltage()),
                                   number(c, "circuit", "pes_watt", ref.es_power()),
                                   number(c, "circuit", "er_joule", ref.request_overhead()));
  const ChannelModel ch = ChannelModel::reference();
  const json& k = section(doc, "channel", {"fd_hz", "B_hz", "N0_dbm_hz", "d_m"});
  sc.sim.channel = ChannelModel(number(k, "channel", "fd_hz", ch.carrier()),
                                number(k, "channel", "B_hz", ch.bandwidth()),
                                number(k, "channel", "N0_dbm_hz", ch.noise_density()),
                                number(k, "channel", "d_m", ch.distance()));
  const json& t = section(doc, "traffic", {"lambda", "S_bytes"});
  sc.sim.traffic.rate_lambda = number(t, "traffic", "lambda", sc.sim.traffic.rate_lambda);
  sc.sim.traffic.packet_bytes = number(t, "traffic", "S_bytes", sc.sim.traffic.packet_bytes);
  const json& r = section(doc, "run", {"T_s", "Dm_bytes", "E0_joule", "seeds"});
  sc.sim.horizon = number(r, "run", "T_s", sc.sim.horizon);
  sc.sim.data_capacity = number(r, "run", "Dm_bytes", sc.sim.data_capacity);
  sc.sim.initial_energy = number(r, "run", "E0_joule", sc.sim.initial_energy);
  if (r.contains("seeds")) {
    const json& s = r.at("seeds");
    if (!s.is_array()) Scenario::throw_invalid("run.seeds must be an array of integers");
    for (const auto& v : s) {
      if (!v.is_number_unsigned()) Scenario::throw_invalid("run.seeds must hold non-negative integers");
      sc.seeds.push_back(v.get<std::uint64_t>());
    }
  } else {
    sc.seeds = default_seeds();
  }
  if (doc.contains("scenario")) {
    if (!doc.at("scenario").is_object()) Scenario::throw_invalid("scenario must be an object");
    sc.options = doc.at("scenario");
  }
  sc.sim.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) Scenario::throw_invalid("cannot open scenario file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    Scenario::throw_invalid(path + ": " + e.what());
  }
  return parse_scenario(doc);
}

json scenario_to_json(const Scenario& sc) {
  const SimConfig& s = sc.sim;
  return json{
      {"circuit",
       {{"R_ohm", s.circuit.resistance()},
        {"C_farad", s.circuit.capacitance()},
        {"Vm_volt", s.circuit.max_voltage()},
        {"pes_watt", s.circuit.es_power()},
        {"er_joule", s.circuit.request_overhead()}}},
      {"channel",
       {{"fd_hz", s.channel.carrier()},
        {"B_hz", s.channel.bandwidth()},
        {"N0_dbm_hz", s.channel.noise_density()},
        {"d_m", s.channel.distance()}}},
      {"traffic", {{"lambda", s.traffic.rate_lambda}, {"S_bytes", s.traffic.packet_bytes}}},
      {"run",
       {{"T_s", s.horizon}, {"Dm_bytes", s.data_capacity}, {"E0_joule", s.initial_energy},
        {"seeds", sc.seeds}}},
      {"scenario", sc.options},
  };
}

DataArrivalTrace read_trace_json(std::istream& in, double horizon) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("trace: ") + e.what());
  }
  if (!doc.is_array()) throw Error(ErrorCode::ConfigInvalid, "trace must be a JSON array");
  DataArrivalTrace trace;
  trace.horizon = horizon;
  for (const auto& e : doc) {
    if (!e.is_object() || !e.contains("t") || !e.contains("bytes") || !e.at("t").is_number() ||
        !e.at("bytes").is_number_integer()) {
      throw Error(ErrorCode::ConfigInvalid, "trace entries need numeric \"t\" and integer \"bytes\"");
    }
    trace.events.push_back({e.at("t").get<double>(), static_cast<double>(e.at("bytes").get<std::int64_t>())});
  }
  trace.validate();
  return trace;
}

void write_plan_csv(std::ostream& out, const RatePlan& plan) {
  out << "start_s,end_s,rate_Bps\n";
  for (const auto& s : plan.segments) {
    out << csv_number(s.start) << ',' << csv_number(s.end) << ',' << csv_number(s.rate) << '\n';
  }
}

}  // namespace dter
