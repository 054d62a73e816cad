#include <cmath>
#include <string>

#include "edcho/protocols.hpp"

namespace edcho {

Eigen::VectorXd levant_derivative(const LevantState& state, std::span<const double> lambdas,
                                  double bound, double theta, double disturbance) {
  const auto m = state.sigma.size();
  if (m < 1) throw ProtocolError("differentiator chain needs at least one state");
  if (lambdas.size() != static_cast<std::size_t>(m)) {
    throw ProtocolError("expected " + std::to_string(m) + " lambdas, got " + std::to_string(lambdas.size()));
  }
  if (std::abs(disturbance) > bound) {
    throw ProtocolError("disturbance exceeds the declared bound");
  }
  const auto order = static_cast<double>(m);
  Eigen::VectorXd d(m);
  // Row 1 is driven by theta; every later row by the rate just computed above it.
  double reference = -theta;
  for (Eigen::Index row = 0; row < m; ++row) {
    const double mu = static_cast<double>(row + 1);
    const double exponent = (order - mu) / (order - mu + 1.0);
    const double next = row + 1 < m ? state.sigma(row + 1) : 0.0;
    d(row) = next - lambdas[static_cast<std::size_t>(row)] *
                        signum_power(state.sigma(row) - reference, exponent);
    reference = d(row);
  }
  d(m - 1) += disturbance;
  return d;
}

std::vector<double> default_levant_lambdas(int order, double bound) {
  if (order < 1 || order > 5) throw ProtocolError("default differentiator gains cover orders 1..5");
  if (!(bound > 0.0)) throw ProtocolError("disturbance bound must be positive");
  std::vector<double> out;
  for (int mu = 1; mu <= order; ++mu) {
    const int weight = order - mu + 1;
    out.push_back(kLevantBaseGains[order - mu] * std::pow(bound, 1.0 / weight));
  }
  return out;
}

LevantRun simulate_levant(const Eigen::VectorXd& initial, std::span<const double> lambdas,
                          double bound, const std::function<double(double)>& theta,
                          const std::function<double(double)>& disturbance, double dt,
                          double t_end, std::size_t record_stride) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw ProtocolError("dt and t_end must be positive");
  if (record_stride == 0) throw ProtocolError("record_stride must be >= 1");
  const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
  LevantRun run;
  LevantState state{initial, 0.0};
  for (std::size_t k = 0; k <= steps; ++k) {
    state.t = static_cast<double>(k) * dt;
    if (k % record_stride == 0) {
      run.times.push_back(state.t);
      run.sigma.push_back(state.sigma);
    }
    if (k == steps) break;
    const double th = theta ? theta(state.t) : 0.0;
    const double dist = disturbance ? disturbance(state.t) : 0.0;
    state.sigma += dt * levant_derivative(state, lambdas, bound, th, dist);
  }
  return run;
}

}  // namespace edcho
