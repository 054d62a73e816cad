#include "edcho/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace edcho {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw EngineError("dt must be positive");
  if (!std::isfinite(t0) || !std::isfinite(t_end) || !(t_end > t0)) {
    throw EngineError("t_end must be greater than t0");
  }
  if (dt > t_end - t0) throw EngineError("dt must not exceed the horizon");
  if (record_stride < 1) throw EngineError("record_stride must be >= 1");
}

std::size_t IntegratorConfig::steps() const {
  return static_cast<std::size_t>(std::llround((t_end - t0) / dt));
}

Eigen::MatrixXd outputs_at(const Eigen::MatrixXd& x, const SignalBank& bank, double t) {
  if (static_cast<std::size_t>(x.rows()) != bank.size()) {
    throw EngineError("state rows do not match signal count");
  }
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Eigen::Index mu = 0; mu < x.cols(); ++mu) {
    y.col(mu) = eval_bank(bank, static_cast<int>(mu), t) - x.col(mu);
  }
  return y;
}

namespace {

Eigen::VectorXd projected_norms(const Eigen::MatrixXd& y) {
  // P*v = v - mean(v)*1 per column.
  const Eigen::RowVectorXd means = y.colwise().mean();
  return (y.rowwise() - means).colwise().norm().transpose();
}

void check_state(const Eigen::MatrixXd& x, double last_valid_time) {
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double v = x.data()[k];
    if (!std::isfinite(v) || std::abs(v) > kDivergenceLimit) {
      std::ostringstream msg;
      msg << "state diverged after t = " << last_valid_time;
      throw DivergenceError(msg.str(), last_valid_time);
    }
  }
}

}  // namespace

Eigen::VectorXd consensus_error(const Eigen::MatrixXd& x, const SignalBank& bank, double t) {
  return projected_norms(outputs_at(x, bank, t));
}

Trace integrate(const Dynamics& dynamics, const SignalBank& bank, const SimState& initial,
                const IntegratorConfig& cfg) {
  cfg.validate();
  if (!initial.x.allFinite()) throw EngineError("initial state must be finite");
  const std::size_t steps = cfg.steps();

  Trace trace;
  const std::size_t records = steps / cfg.record_stride + 1;
  trace.times.reserve(records);
  trace.states.reserve(records);
  trace.outputs.reserve(records);
  trace.error_norms.reserve(records);

  Eigen::MatrixXd x = initial.x;
  Eigen::MatrixXd dx(x.rows(), x.cols());
  for (std::size_t k = 0;; ++k) {
    const double t = cfg.t0 + static_cast<double>(k) * cfg.dt;
    if (k % cfg.record_stride == 0) {
      Eigen::MatrixXd y = outputs_at(x, bank, t);
      trace.error_norms.push_back(projected_norms(y));
      trace.outputs.push_back(std::move(y));
      trace.states.push_back(x);
      trace.times.push_back(t);
    }
    if (k == steps) break;
    dynamics(t, x, dx);
    if (dx.rows() != x.rows() || dx.cols() != x.cols()) {
      throw EngineError("protocol returned a derivative of the wrong shape");
    }
    x.noalias() += cfg.dt * dx;
    check_state(x, t);
  }
  return trace;
}

std::optional<double> detect_settling(const Trace& trace, double threshold, double hold) {
  if (!(threshold > 0.0)) throw EngineError("settling threshold must be positive");
  if (!(hold > 0.0)) throw EngineError("settling hold must be positive");
  if (trace.size() == 0) throw EngineError("empty trace");
  const double start = trace.times.front();
  const double end = trace.times.back();
  if (hold > end - start) throw EngineError("settling hold is longer than the trace");

  std::size_t first_good = 0;
  for (std::size_t k = trace.size(); k-- > 0;) {
    if (!(trace.error_norms[k](0) <= threshold)) {
      first_good = k + 1;
      break;
    }
  }
  if (first_good >= trace.size()) return std::nullopt;
  const double t = trace.times[first_good];
  // Tolerate rounding in the recorded grid when checking the hold window.
  if (t + hold > end + 1e-9 * std::max(1.0, std::abs(end))) return std::nullopt;
  return t;
}

Eigen::VectorXd terminal_error(const Trace& trace) {
  if (trace.size() == 0) throw EngineError("empty trace");
  const double start = trace.times.front();
  const double cutoff = start + 0.9 * (trace.times.back() - start);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(trace.error_norms.front().size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (trace.times[k] + 1e-12 < cutoff) continue;
    out = out.cwiseMax(trace.error_norms[k]);
  }
  return out;
}

Metrics compute_metrics(const Trace& trace, double threshold, double hold) {
  Metrics m;
  m.settling_time = detect_settling(trace, threshold, hold);
  m.terminal_error = terminal_error(trace);
  m.conservation_drift = Eigen::VectorXd::Zero(trace.states.front().cols());
  for (const auto& x : trace.states) {
    m.conservation_drift = m.conservation_drift.cwiseMax(x.colwise().sum().cwiseAbs().transpose());
  }
  return m;
}

double default_settling_threshold(double dt, double k0, double bound, std::size_t n) {
  return 50.0 * dt * (k0 + bound) * static_cast<double>(n);
}

double homogeneity_check(const Graph& g, const ProtocolConfig& cfg, const SignalBank& bank,
                         const Eigen::MatrixXd& initial, double eta, double dt, double duration) {
  if (!(eta > 0.0 && eta <= 1.0)) throw EngineError("eta must lie in (0, 1]");
  if (!(dt > 0.0) || !(duration >= dt)) throw EngineError("need 0 < dt <= duration");
  for (const auto& s : bank.signals) {
    if (!is_zero_signal(s)) {
      throw EngineError("homogeneity holds only with identically zero reference signals");
    }
  }
  const int m = cfg.order;
  Eigen::VectorXd scale(m + 1);
  for (int mu = 0; mu <= m; ++mu) scale(mu) = std::pow(eta, m - mu + 1);

  Dynamics field = make_edcho(g, cfg, bank);
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  const std::size_t stride = std::max<std::size_t>(1, steps / 2000);

  // Run A covers [0, duration]; run B starts from the scaled state and is read
  // at eta*t, linearly interpolated between its two bracketing steps.
  Eigen::MatrixXd xa = initial;
  Eigen::MatrixXd b_now = initial * scale.asDiagonal();
  Eigen::MatrixXd b_next(b_now.rows(), b_now.cols());
  Eigen::MatrixXd da(xa.rows(), xa.cols());
  Eigen::MatrixXd db(b_now.rows(), b_now.cols());
  std::size_t b_index = 0;
  auto advance_b = [&]() {
    field(static_cast<double>(b_index) * dt, b_now, db);
    b_next = b_now + dt * db;
    check_state(b_next, static_cast<double>(b_index) * dt);
  };
  advance_b();

  auto projected = [&](const Eigen::MatrixXd& x, double t) {
    const Eigen::MatrixXd y = outputs_at(x, bank, t);
    return Eigen::MatrixXd(y.rowwise() - y.colwise().mean());
  };

  double worst = 0.0;
  double reference = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (k % stride == 0 || k == steps) {
      const double ta = static_cast<double>(k) * dt;
      // Position of eta*t on B's grid, in steps.
      const double target = eta * static_cast<double>(k);
      while (static_cast<double>(b_index + 1) <= target + 1e-9) {
        b_now = b_next;
        ++b_index;
        advance_b();
      }
      const double w = std::clamp(target - static_cast<double>(b_index), 0.0, 1.0);
      const Eigen::MatrixXd xb = (1.0 - w) * b_now + w * b_next;
      const Eigen::MatrixXd pa = projected(xa, ta) * scale.asDiagonal();
      const Eigen::MatrixXd pb = projected(xb, eta * ta);
      worst = std::max(worst, (pa - pb).norm());
      reference = std::max(reference, pa.norm());
    }
    if (k == steps) break;
    field(static_cast<double>(k) * dt, xa, da);
    xa.noalias() += dt * da;
    check_state(xa, static_cast<double>(k) * dt);
  }
  return reference == 0.0 ? 0.0 : worst / reference;
}

}  // namespace edcho
