#include "edcho/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace edcho {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// d^k/dt^k t^j = j!/(j-k)! t^(j-k)
double falling_factorial(int j, int k) {
  double out = 1.0;
  for (int r = 0; r < k; ++r) out *= static_cast<double>(j - r);
  return out;
}

}  // namespace

void SignalSpec::validate() const {
  std::visit(Overloaded{
                 [](const Sinusoid& s) {
                   if (!(s.amplitude >= 0.0)) throw SignalError("sinusoid amplitude must be >= 0");
                   if (!(s.omega >= 0.0)) throw SignalError("sinusoid frequency must be >= 0");
                   if (!std::isfinite(s.phase)) throw SignalError("sinusoid phase must be finite");
                 },
                 [](const Polynomial& p) {
                   if (p.coeffs.empty()) throw SignalError("polynomial needs at least one coefficient");
                   for (double c : p.coeffs) {
                     if (!std::isfinite(c)) throw SignalError("polynomial coefficient must be finite");
                   }
                 },
                 [](const Constant& c) {
                   if (!std::isfinite(c.value)) throw SignalError("constant must be finite");
                 },
                 [](const SignalSum& s) {
                   if (s.parts.empty()) throw SignalError("sum needs at least one part");
                   for (const auto& p : s.parts) p.validate();
                 },
             },
             kind);
}

SignalSpec sinusoid(double amplitude, double omega, double phase) {
  SignalSpec s{Sinusoid{amplitude, omega, phase}};
  s.validate();
  return s;
}

SignalSpec polynomial(std::vector<double> coeffs) {
  SignalSpec s{Polynomial{std::move(coeffs)}};
  s.validate();
  return s;
}

SignalSpec constant(double value) { return SignalSpec{Constant{value}}; }

SignalSpec sum(std::vector<SignalSpec> parts) {
  SignalSpec s{SignalSum{std::move(parts)}};
  s.validate();
  return s;
}

double eval_derivative(const SignalSpec& s, int order, double t) {
  if (order < 0) throw SignalError("derivative order must be >= 0");
  return std::visit(
      Overloaded{
          [&](const Sinusoid& w) {
            const double shift = static_cast<double>(order % 4) * std::numbers::pi / 2.0;
            return w.amplitude * std::pow(w.omega, order) * std::cos(w.omega * t + w.phase + shift);
          },
          [&](const Polynomial& p) {
            const int degree = static_cast<int>(p.coeffs.size()) - 1;
            if (order > degree) return 0.0;
            // Horner on the differentiated coefficients.
            double acc = 0.0;
            for (int j = degree; j >= order; --j) {
              acc = acc * t + p.coeffs[static_cast<std::size_t>(j)] * falling_factorial(j, order);
            }
            return acc;
          },
          [&](const Constant& c) { return order == 0 ? c.value : 0.0; },
          [&](const SignalSum& sum_spec) {
            double acc = 0.0;
            for (const auto& part : sum_spec.parts) acc += eval_derivative(part, order, t);
            return acc;
          },
      },
      s.kind);
}

Eigen::VectorXd eval_bank(const SignalBank& bank, int order, double t) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(bank.size()));
  for (std::size_t i = 0; i < bank.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = eval_derivative(bank.signals[i], order, t);
  }
  return out;
}

double average_derivative(const SignalBank& bank, int order, double t) {
  if (bank.signals.empty()) throw SignalError("empty signal bank");
  double acc = 0.0;
  for (const auto& s : bank.signals) acc += eval_derivative(s, order, t);
  return acc / static_cast<double>(bank.size());
}

std::optional<double> derivative_amplitude_bound(const SignalSpec& s, int order) {
  return std::visit(
      Overloaded{
          [&](const Sinusoid& w) -> std::optional<double> {
            return w.amplitude * std::pow(w.omega, order);
          },
          [&](const Polynomial& p) -> std::optional<double> {
            const int degree = static_cast<int>(p.coeffs.size()) - 1;
            if (order > degree) return 0.0;
            if (order == degree) return std::abs(p.coeffs.back() * falling_factorial(degree, order));
            return std::nullopt;
          },
          [&](const Constant& c) -> std::optional<double> {
            return order == 0 ? std::abs(c.value) : 0.0;
          },
          [&](const SignalSum& sum_spec) -> std::optional<double> {
            double acc = 0.0;
            for (const auto& part : sum_spec.parts) {
              const auto b = derivative_amplitude_bound(part, order);
              if (!b) return std::nullopt;
              acc += *b;
            }
            return acc;
          },
      },
      s.kind);
}

bool is_zero_signal(const SignalSpec& s) {
  return std::visit(Overloaded{
                        [](const Sinusoid& w) { return w.amplitude == 0.0; },
                        [](const Polynomial& p) {
                          return std::all_of(p.coeffs.begin(), p.coeffs.end(),
                                             [](double c) { return c == 0.0; });
                        },
                        [](const Constant& c) { return c.value == 0.0; },
                        [](const SignalSum& sum_spec) {
                          return std::all_of(sum_spec.parts.begin(), sum_spec.parts.end(),
                                             [](const SignalSpec& p) { return is_zero_signal(p); });
                        },
                    },
                    s.kind);
}

double disturbance_bound(const SignalBank& bank, double t0, double t1, int samples) {
  if (bank.signals.empty()) throw SignalError("empty signal bank");
  if (samples < 2) throw SignalError("disturbance_bound needs at least 2 samples");
  if (!(t1 >= t0)) throw SignalError("disturbance_bound horizon must satisfy t1 >= t0");

  const int order = bank.order + 1;
  const auto n = static_cast<double>(bank.size());

  double sampled = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const Eigen::VectorXd u = eval_bank(bank, order, t);
    const double mean = u.mean();
    sampled = std::max(sampled, (u.array() - mean).abs().maxCoeff());
  }
  sampled *= 1.05;

  double mean_amp = 0.0;
  double max_amp = 0.0;
  for (const auto& s : bank.signals) {
    const auto b = derivative_amplitude_bound(s, order);
    if (!b) return sampled;
    mean_amp += *b / n;
    max_amp = std::max(max_amp, *b);
  }
  return std::min(sampled, mean_amp + max_amp);
}

bool satisfies_zero_sum(const Eigen::MatrixXd& initial, double tol) {
  if (initial.size() == 0) return true;
  return (initial.colwise().sum().array().abs() <= tol).all();
}

}  // namespace edcho
