#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "edcho/graph.hpp"
#include "edcho/protocols.hpp"
#include "edcho/signals.hpp"

namespace edcho {

/// Raised when the state stops being finite or leaves the |x| <= 1e12 box.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double last_valid_time)
      : std::runtime_error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const { return last_valid_time_; }

 private:
  double last_valid_time_;
};

class EngineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kDivergenceLimit = 1e12;

struct IntegratorConfig {
  double dt = 1e-5;
  double t0 = 0.0;
  double t_end = 20.0;
  std::size_t record_stride = 100;

  void validate() const;
  std::size_t steps() const;

  friend bool operator==(const IntegratorConfig&, const IntegratorConfig&) = default;
};

/// Recorded snapshots of one run. outputs[k] holds y_{i,mu} = u_i^(mu) - x_{i,mu}
/// and error_norms[k](mu) = ||P Y_mu|| at times[k].
struct Trace {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> states;
  std::vector<Eigen::MatrixXd> outputs;
  std::vector<Eigen::VectorXd> error_norms;

  std::size_t size() const { return times.size(); }
};

struct Metrics {
  std::optional<double> settling_time;
  Eigen::VectorXd terminal_error;      // per mu, max over the final 10% of the run
  Eigen::VectorXd conservation_drift;  // per mu, max_t |sum_i x_{i,mu}|
};

/// Y_mu = U^(mu)(t) - X_mu for mu = 0..cols-1.
Eigen::MatrixXd outputs_at(const Eigen::MatrixXd& x, const SignalBank& bank, double t);

/// Euclidean norm of the projected disagreement P*Y_mu for every column.
Eigen::VectorXd consensus_error(const Eigen::MatrixXd& x, const SignalBank& bank, double t);

/// Explicit Euler: x <- x + dt*f(t, x), with t_k = t0 + k*dt. Records step 0
/// and every record_stride-th step after it.
Trace integrate(const Dynamics& dynamics, const SignalBank& bank, const SimState& initial,
                const IntegratorConfig& cfg);

/// Earliest recorded t whose error norm ||Y~_0|| stays <= threshold from t to
/// the end of the trace, with at least `hold` of trace left after t.
std::optional<double> detect_settling(const Trace& trace, double threshold, double hold);

/// Max over the final 10% of recorded times, per mu.
Eigen::VectorXd terminal_error(const Trace& trace);

Metrics compute_metrics(const Trace& trace, double threshold, double hold);

/// 50*dt*(k0 + L)*n.
double default_settling_threshold(double dt, double k0, double bound, std::size_t n);

/// Rescaled-trajectory test of the error dynamics with zero references.
///
/// Run A starts from `initial`; run B starts from the state whose column mu
/// is scaled by eta^(m-mu+1). Both use step dt. The error dynamics map A's
/// trajectory at t onto B's at eta*t, so the return value
///   max_t ||S Y~^A(t) - Y~^B(eta t)|| / max_t ||S Y~^A(t)||
/// (S the column scaling, B interpolated linearly between steps) is pure
/// discretization error and vanishes as dt -> 0.
double homogeneity_check(const Graph& g, const ProtocolConfig& cfg, const SignalBank& bank,
                         const Eigen::MatrixXd& initial, double eta, double dt, double duration);

}  // namespace edcho
