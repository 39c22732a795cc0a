#include <cmath>
#include <sstream>
#include <vector>

#include "../oracles/frozen_constants.hpp"
#include "doctest.h"
#include "dter/online.hpp"
#include "support.hpp"

using namespace dter;

namespace {

const ChargingCircuit kRef = ChargingCircuit::reference();

ChargingCircuit with_overhead(double overhead) { return {1e3, 2e-9, 2.0, 10.0, overhead}; }

}  // namespace

TEST_CASE("X equation roots") {
  CHECK(solve_X(0.0) == 1.0);
  for (RootMethod m : {RootMethod::Bisection, RootMethod::Newton}) {
    CHECK(rel_close(solve_X(2e-5, m), oracle::kX_2e_5, 1e-14));
    CHECK(rel_close(solve_X(1.6e-4, m), oracle::kX_1p6e_4, 1e-14));
    CHECK(rel_close(solve_X(1e-3, m), oracle::kX_1e_3, 1e-14));
    CHECK(rel_close(solve_X(0.1, m), oracle::kX_1e_1, 1e-14));
    CHECK(rel_close(solve_X(1e-9, m), oracle::kX_1e_9, 1e-12));
  }
  CHECK(rel_close(solve_X(kRef), oracle::kX_2e_5, 1e-14));
  for (double c : {1e-9, 2e-5, 1e-3, 0.1, 1.0}) {
    const double x = solve_X(c);
    CHECK(std::abs(x_equation(x, c)) < 1e-10 * std::max(c, 1e-6));
    // The root is flat for small c, so the methods agree to ~1e-12 only.
    CHECK(rel_close(solve_X(c, RootMethod::Newton), x, 1e-12));
  }
  CHECK(error_code_of([] { solve_X(-1.0); }) == ErrorCode::ConfigInvalid);
  CHECK(error_code_of([] { solve_X(1e7); }) == ErrorCode::BracketFailure);
}

TEST_CASE("X equation is non-increasing on the bracket (property)") {
  for (double c : {1e-9, 2e-5, 1e-3, 0.1}) {
    double prev = x_equation(1.0, c);
    CHECK(prev == c);
    for (double x = 1.0 + 1e-4; x < 4.0; x += 1e-3) {
      const double h = x_equation(x, c);
      CHECK(h <= prev);
      prev = h;
    }
  }
}

TEST_CASE("request size from X") {
  CHECK(request_size_from_X(kRef, 1.0) == 0.0);
  CHECK(rel_close(request_size_from_X(kRef, oracle::kX_2e_5), oracle::kErX, 1e-13));
  CHECK(request_size_from_X(kRef, std::numeric_limits<double>::infinity()) == kRef.energy_capacity());
  CHECK(request_size_from_X(kRef, 1e12) == doctest::Approx(kRef.energy_capacity()));
  CHECK(error_code_of([] { request_size_from_X(kRef, 0.5); }) == ErrorCode::ConfigInvalid);
}

TEST_CASE("charge-feasible request size") {
  const double pm = max_harvest_power(kRef);
  CHECK(rel_close(solve_charge_feasible_request(kRef, pm / 2), oracle::kErY_half, 1e-12));
  CHECK(rel_close(solve_charge_feasible_request(kRef, pm / 10), oracle::kErY_tenth, 1e-12));
  CHECK(rel_close(solve_charge_feasible_request(kRef, 0.99 * pm), oracle::kErY_0p99, 1e-10));
  CHECK(solve_charge_feasible_request(kRef, 1e-12) > 0.999999 * kRef.energy_capacity());
  CHECK(solve_charge_feasible_request(kRef, pm * (1 - 1e-9)) < 1e-12);
  CHECK(error_code_of([&] { solve_charge_feasible_request(kRef, pm); }) == ErrorCode::PowerAtOrAboveBound);
  CHECK(error_code_of([&] { solve_charge_feasible_request(kRef, 0.0); }) == ErrorCode::ConfigInvalid);
  double prev = kRef.energy_capacity();
  for (double f = 0.05; f < 1.0; f += 0.05) {
    const double e = solve_charge_feasible_request(kRef, f * pm);
    CHECK(e < prev);
    prev = e;
    const double em = kRef.energy_capacity();
    auto z = [&](double v) { return f * pm * kRef.time_constant() * std::log((em + v) / (em - v)) - v; };
    // Sign change across neighbouring doubles, up to evaluation noise.
    CHECK(z(std::nextafter(e, 0.0)) <= 1e-11 * em);
    CHECK(z(std::nextafter(e, em)) >= -1e-11 * em);
    // Below ~0.2 pm the root lies within a few ulps of Em.
    if (f >= 0.2) CHECK(std::abs(z(e)) < 1e-10 * em);
  }
}

TEST_CASE("turning power") {
  CHECK(rel_close(turning_power(kRef), oracle::kTurningPower, 1e-12));
  CHECK(rel_close(solve_charge_feasible_request(kRef, turning_power(kRef)), oracle::kErX, 1e-9));
  CHECK(turning_power(with_overhead(0.0)) == 0.0);
}

TEST_CASE("online solution at the defaults") {
  const std::vector<TunnelPiece> pieces{{0.0, 10.0, 0.2e-9}};
  const OnlineSolution s = plan_online(kRef, pieces);
  CHECK(rel_close(s.er_hat, oracle::kErX, 1e-13));
  CHECK(s.er_hat == s.er_x);
  CHECK(s.er_y == kRef.energy_capacity());
  CHECK(rel_close(s.eb_hat, oracle::kEbHat, 1e-13));
  REQUIRE(s.alpha.size() == 1);
  CHECK(rel_close(s.alpha[0], 10 * 0.2e-9 / oracle::kErX, 1e-13));

  // Half the harvest bound is still below the turning power at the defaults.
  const std::vector<TunnelPiece> half{{0.0, 1e-5, 0.5e-3}};
  CHECK(plan_online(kRef, half).er_hat == s.er_x);
  const std::vector<TunnelPiece> steep{{0.0, 1e-5, 0.9999e-3}};
  const OnlineSolution f = plan_online(kRef, steep);
  CHECK(f.er_y == solve_charge_feasible_request(kRef, 0.9999e-3));
  CHECK(f.er_y < f.er_x);
  CHECK(f.er_hat == f.er_y);
  // A large overhead pushes er_x above the cap at half the bound.
  const OnlineSolution big = plan_online(with_overhead(1e-3), half);
  CHECK(rel_close(big.er_y, oracle::kErY_half, 1e-12));
  CHECK(big.er_hat == std::min(big.er_x, big.er_y));
  const std::vector<TunnelPiece> too_steep{{0.0, 1.0, 1e-3}};
  CHECK(error_code_of([&] { plan_online(kRef, too_steep); }) == ErrorCode::PowerAtOrAboveBound);
}

TEST_CASE("vanishing overhead approaches tiny requests at Em/4 (property)") {
  const std::vector<TunnelPiece> pieces{{0.0, 10.0, 0.2e-9}};
  const double em = kRef.energy_capacity();
  double prev_er = std::numeric_limits<double>::infinity();
  double prev_eb = 0.0;
  for (double overhead : {0.4e-9, 1e-10, 1e-11, 1e-12, 1e-13, 1e-15, 1e-18}) {
    const OnlineSolution s = plan_online(with_overhead(overhead), pieces);
    CHECK(s.er_hat < prev_er);
    CHECK(s.eb_hat > prev_eb);
    CHECK(s.eb_hat < em / 4);
    prev_er = s.er_hat;
    prev_eb = s.eb_hat;
  }
  CHECK(prev_er < 1e-3 * em);
  CHECK(prev_eb == doctest::Approx(em / 4).epsilon(1e-3));
  const OnlineSolution zero = plan_online(with_overhead(0.0), pieces);
  CHECK(zero.er_hat == 0.0);
  CHECK(zero.eb_hat == em / 4);
}

TEST_CASE("slow consumption leaves the solution unchanged (property)") {
  const double turn = turning_power(kRef);
  const OnlineSolution base = plan_online(kRef, std::vector<TunnelPiece>{{0.0, 1.0, 1e-12}});
  for (double f : {1e-6, 1e-3, 0.1, 0.5, 0.999}) {
    for (double len : {1e-6, 1.0, 1e3}) {
      const OnlineSolution s = plan_online(kRef, std::vector<TunnelPiece>{{0.0, len, f * turn}});
      CHECK(s.er_hat == base.er_hat);
      CHECK(s.eb_hat == base.eb_hat);
    }
  }
  const double above = turn + 0.5 * (max_harvest_power(kRef) - turn);
  const OnlineSolution fast = plan_online(kRef, std::vector<TunnelPiece>{{0.0, 1.0, above}});
  CHECK(fast.er_hat < base.er_hat);
}

TEST_CASE("integer number of requests") {
  const OnlineSolution s = plan_online(kRef, std::vector<TunnelPiece>{{0.0, 1.0, 0.2e-9}});
  const double p = 0.2e-9;
  for (int k : {1, 2, 5, 21}) {
    const std::vector<TunnelPiece> pieces{{0.0, k * s.er_hat / p, p}};
    const OnlineRun run = run_online_tunnel(kRef, pieces, s.eb_hat);
    CHECK(run.schedule.requests.size() == static_cast<std::size_t>(k));
    for (const auto& r : run.schedule.requests) {
      CHECK(r.harvested == s.er_hat);
      CHECK(r.residual_before == doctest::Approx(s.eb_hat).epsilon(1e-9));
    }
    CHECK(run.final_residual == doctest::Approx(s.eb_hat).epsilon(1e-6));
  }
}

TEST_CASE("fractional alpha leaves half a request at the horizon") {
  const double p = 0.3e-9;
  const OnlineSolution s = plan_online(kRef, std::vector<TunnelPiece>{{0.0, 1.0, p}});
  const double alpha = 7.5;
  const std::vector<TunnelPiece> pieces{{0.0, alpha * s.er_hat / p, p}};
  const OnlineRun run = run_online_tunnel(kRef, pieces, s.eb_hat);
  CHECK(run.schedule.requests.size() == 8);
  CHECK(run.final_residual - s.eb_hat == doctest::Approx(0.5 * s.er_hat).epsilon(1e-6));
}

TEST_CASE("initial energy above the threshold is spent first") {
  const double p = 0.2e-9;
  const OnlineSolution s = plan_online(kRef, std::vector<TunnelPiece>{{0.0, 1.0, p}});
  const double e0 = 3e-9;
  const std::vector<TunnelPiece> pieces{{0.0, 40.0, p}};
  const OnlineRun run = run_online_tunnel(kRef, pieces, e0);
  REQUIRE_FALSE(run.schedule.requests.empty());
  CHECK(run.schedule.requests[0].time == doctest::Approx((e0 - s.eb_hat) / p).epsilon(1e-12));
  CHECK(run.schedule.requests[0].residual_before <= s.eb_hat);
  const double harvested = static_cast<double>(run.schedule.requests.size()) * s.er_hat;
  CHECK(run.final_residual == doctest::Approx(e0 + harvested - p * 40.0).epsilon(1e-9));
  CHECK(schedule_cost(run.schedule, kRef) == doctest::Approx(run.schedule.total_es_cost).epsilon(1e-15));
}

TEST_CASE("empty and zero-length pieces") {
  CHECK(run_online_tunnel(kRef, std::vector<TunnelPiece>{}, 1e-9).schedule.requests.empty());
  const std::vector<TunnelPiece> flat{{0.0, 0.0, 0.2e-9}, {0.0, 5.0, 0.0}};
  const OnlineRun run = run_online_tunnel(kRef, flat, 2e-9);
  CHECK(run.schedule.requests.empty());
  CHECK(run.final_residual == 2e-9);
}

TEST_CASE("multi-piece runs stay valid and log the policy") {
  const std::vector<TunnelPiece> pieces{{0.0, 3.0, 0.4e-9}, {3.0, 9.0, 0.05e-9}, {9.0, 12.0, 0.3e-9}};
  const OnlineRun run = run_online_tunnel(kRef, pieces, 0.0);
  const EnergyTunnel t = build_energy_tunnel(
      make_power_profile({{0.0, 3.0, 0.4e-9}, {3.0, 9.0, 0.05e-9}, {9.0, 12.0, 0.3e-9}}), kRef, 0.0);
  CHECK(schedule_cost(run.schedule, kRef, t) == doctest::Approx(run.schedule.total_es_cost).epsilon(1e-15));
  REQUIRE(run.trace.size() == run.schedule.requests.size());
  CHECK(run.trace.front().time == 0.0);
  CHECK(run.trace.front().requested == run.solution.eb_hat + run.solution.er_hat);
  for (std::size_t i = 1; i < run.trace.size(); ++i) {
    CHECK(run.trace[i].residual_before <= run.solution.eb_hat);
    CHECK(run.trace[i].requested == run.solution.er_hat);
  }
  std::ostringstream out;
  write_policy_trace_csv(out, run.trace);
  CHECK(out.str().rfind("t_s,residual_J,requested_J\n0,0,", 0) == 0);
}

TEST_CASE("consumption faster than the charge lockout is infeasible") {
  const double pm = max_harvest_power(kRef);
  const std::vector<TunnelPiece> pieces{{0.0, 1e-4, 0.9 * pm}};
  CHECK(error_code_of([&] { run_online_tunnel(kRef, pieces, 0.0); }) == ErrorCode::InfeasibleOnline);
}
