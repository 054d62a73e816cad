#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edcho/graph.hpp"
#include "edcho/signals.hpp"

namespace edcho {

class ProtocolError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// |x|^alpha * sign(x), with sign(0) = 0 and alpha = 0 giving the plain sign.
inline double signum_power(double x, double alpha) {
  if (x == 0.0) return 0.0;
  const double mag = alpha == 0.0 ? 1.0 : std::pow(std::abs(x), alpha);
  return x > 0.0 ? mag : -mag;
}

/// Gains k_0..k_m of the high-order protocol plus the disturbance bound L.
struct ProtocolConfig {
  int order = 0;
  std::vector<double> gains;
  double bound = 0.0;

  void validate() const;
};

/// Levant-style parameters: k_0 and lambda_1..lambda_m.
struct GainDesign {
  std::vector<double> lambdas;
  double k0 = 1.0;
};

/// k_0 = k0, k_mu = lambda_mu * k_{mu-1}^((m-mu)/(m-mu+1)).
std::vector<double> design_gains(const GainDesign& design, int order);

/// Recovers (k0, lambdas) from a gain vector produced by design_gains.
GainDesign invert_gains(std::span<const double> gains);

/// Agent states at one instant: row i holds x_{i,0..m}.
struct SimState {
  Eigen::MatrixXd x;
  double t = 0.0;
};

/// Right-hand side of an agent network: writes dx for state x at time t.
using Dynamics = std::function<void(double t, const Eigen::MatrixXd& x, Eigen::MatrixXd& dx)>;

/// High-order exact consensus vector field. Only the first outputs
/// y_{i,0} = u_i - x_{i,0} cross edges.
Eigen::MatrixXd edcho_derivative(const SimState& state, const Graph& g, const ProtocolConfig& cfg,
                                 const SignalBank& bank);

/// Linear baseline: dx_i = k * sum_j a_ij (y_i - y_j).
Eigen::MatrixXd linear_derivative(const SimState& state, const Graph& g, double k,
                                  const SignalBank& bank);

/// First-order sliding-mode baseline, i.e. the m = 0 case of edcho_derivative.
Eigen::MatrixXd fosm_derivative(const SimState& state, const Graph& g, double k,
                                const SignalBank& bank);

/// Allocation-free closures over the three vector fields, for the integrator.
Dynamics make_edcho(const Graph& g, const ProtocolConfig& cfg, const SignalBank& bank);
Dynamics make_linear(const Graph& g, double k, const SignalBank& bank);
Dynamics make_fosm(const Graph& g, double k, const SignalBank& bank);

// ---------------------------------------------------------------------------
// Recursive exact differentiator error system.

struct LevantState {
  Eigen::VectorXd sigma;  // sigma_1..sigma_m
  double t = 0.0;
};

/// Derivative of the recursive error chain. `theta` perturbs the first row and
/// `disturbance` enters the last row; |disturbance| must not exceed `bound`.
Eigen::VectorXd levant_derivative(const LevantState& state, std::span<const double> lambdas,
                                  double bound, double theta, double disturbance);

/// Recursive-form differentiator gains for L = 1 (orders up to 5), listed
/// from the discontinuous row upwards.
inline constexpr double kLevantBaseGains[] = {1.1, 1.5, 2.0, 3.0, 5.0, 8.0};

/// lambda_1..lambda_m for the m-row chain, scaled for disturbance bound L:
/// lambda_mu = base[m-mu] * L^(1/(m-mu+1)).
std::vector<double> default_levant_lambdas(int order, double bound);

struct LevantRun {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> sigma;
};

/// Explicit Euler run of the error chain, recording every `record_stride` steps.
LevantRun simulate_levant(const Eigen::VectorXd& initial, std::span<const double> lambdas,
                          double bound, const std::function<double(double)>& theta,
                          const std::function<double(double)>& disturbance, double dt,
                          double t_end, std::size_t record_stride);

}  // namespace edcho
