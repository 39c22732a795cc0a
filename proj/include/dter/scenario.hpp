#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "dter/rate_plan.hpp"
#include "dter/simulator.hpp"

namespace dter {

/// One JSON scenario file: physical defaults plus a free-form `scenario`
/// object read by the individual experiments. Missing keys keep the
/// reference defaults.
struct Scenario {
  SimConfig sim;
  std::vector<std::uint64_t> seeds;
  nlohmann::json options = nlohmann::json::object();

  /// Typed lookup in `options` with a default; throws ConfigInvalid on a type
  /// mismatch.
  template <typename T>
  T option(const std::string& key, const T& fallback) const {
    if (!options.contains(key)) return fallback;
    try {
      return options.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw_invalid("scenario." + key + ": " + e.what());
    }
  }

  [[noreturn]] static void throw_invalid(const std::string& what);
};

/// Seeds 1..70, the reference run count.
std::vector<std::uint64_t> default_seeds();

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& scenario);

/// Trace file: JSON array of {"t": seconds, "bytes": integer}.
DataArrivalTrace read_trace_json(std::istream& in, double horizon);

void write_plan_csv(std::ostream& out, const RatePlan& plan);

}  // namespace dter
