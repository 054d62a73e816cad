#pragma once

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace edcho {

class SignalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SignalSpec;

/// a*cos(omega*t + phi)
struct Sinusoid {
  double amplitude = 0.0;
  double omega = 0.0;
  double phase = 0.0;
};

/// c0 + c1*t + ... + cd*t^d
struct Polynomial {
  std::vector<double> coeffs;
};

struct Constant {
  double value = 0.0;
};

struct SignalSum {
  std::vector<SignalSpec> parts;
};

/// Reference signal with closed-form derivatives of every order.
struct SignalSpec {
  std::variant<Sinusoid, Polynomial, Constant, SignalSum> kind;

  /// Throws SignalError when an invariant is violated (negative amplitude or
  /// frequency, empty coefficient list).
  void validate() const;
};

SignalSpec sinusoid(double amplitude, double omega, double phase);
SignalSpec polynomial(std::vector<double> coeffs);
SignalSpec constant(double value);
SignalSpec sum(std::vector<SignalSpec> parts);

/// Per-agent references plus the highest consensus derivative order m.
struct SignalBank {
  std::vector<SignalSpec> signals;
  int order = 0;

  std::size_t size() const { return signals.size(); }
};

/// Exact derivative of the given order at time t.
double eval_derivative(const SignalSpec& s, int order, double t);

/// Stacks u_i^(order)(t) for every agent.
Eigen::VectorXd eval_bank(const SignalBank& bank, int order, double t);

double average_derivative(const SignalBank& bank, int order, double t);

/// Supremum over t of |s^(order)(t)| when it is finite and known in closed
/// form; nullopt for polynomials whose derivative of this order is not
/// identically zero.
std::optional<double> derivative_amplitude_bound(const SignalSpec& s, int order);

/// True when the signal is identically zero.
bool is_zero_signal(const SignalSpec& s);

/// Bound L on |avg u^(m+1)(t) - u_i^(m+1)(t)| over [t0, t1].
///
/// Samples `samples` uniformly spaced instants and scales the observed max by
/// 1.05. When every signal has a closed-form derivative amplitude, also forms
/// (1/n) sum_j A_j + max_i A_i with A_j the amplitude of u_j^(m+1) and returns
/// the smaller of the two.
double disturbance_bound(const SignalBank& bank, double t0, double t1, int samples);

/// Checks that every column of the initial agent state sums to zero within tol.
bool satisfies_zero_sum(const Eigen::MatrixXd& initial, double tol = 1e-9);

}  // namespace edcho
