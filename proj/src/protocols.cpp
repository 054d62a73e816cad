#include "edcho/protocols.hpp"

#include <cmath>
#include <string>

namespace edcho {

void ProtocolConfig::validate() const {
  if (order < 0) throw ProtocolError("protocol order must be >= 0");
  if (gains.size() != static_cast<std::size_t>(order) + 1) {
    throw ProtocolError("expected " + std::to_string(order + 1) + " gains, got " +
                        std::to_string(gains.size()));
  }
  for (double k : gains) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ProtocolError("gains must be positive and finite");
  }
  if (!(bound >= 0.0)) throw ProtocolError("disturbance bound must be >= 0");
}

std::vector<double> design_gains(const GainDesign& design, int order) {
  if (order < 0) throw ProtocolError("order must be >= 0");
  if (design.lambdas.size() != static_cast<std::size_t>(order)) {
    throw ProtocolError("expected " + std::to_string(order) + " lambdas, got " +
                        std::to_string(design.lambdas.size()));
  }
  if (!(design.k0 > 0.0)) throw ProtocolError("k0 must be positive");
  std::vector<double> gains{design.k0};
  for (int mu = 1; mu <= order; ++mu) {
    const double lambda = design.lambdas[static_cast<std::size_t>(mu - 1)];
    if (!(lambda > 0.0)) throw ProtocolError("lambdas must be positive");
    const double exponent = static_cast<double>(order - mu) / static_cast<double>(order - mu + 1);
    gains.push_back(lambda * std::pow(gains.back(), exponent));
  }
  return gains;
}

GainDesign invert_gains(std::span<const double> gains) {
  if (gains.empty()) throw ProtocolError("gain vector is empty");
  for (double k : gains)
    if (!(k > 0.0)) throw ProtocolError("gains must be positive");
  const int order = static_cast<int>(gains.size()) - 1;
  GainDesign out;
  out.k0 = gains[0];
  for (int mu = 1; mu <= order; ++mu) {
    const double exponent = static_cast<double>(order - mu) / static_cast<double>(order - mu + 1);
    out.lambdas.push_back(gains[static_cast<std::size_t>(mu)] /
                          std::pow(gains[static_cast<std::size_t>(mu - 1)], exponent));
  }
  return out;
}

namespace {

void check_dims(const Eigen::MatrixXd& x, std::size_t nodes, Eigen::Index cols) {
  if (x.rows() != static_cast<Eigen::Index>(nodes) || x.cols() != cols) {
    throw ProtocolError("state is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                        ", expected " + std::to_string(nodes) + "x" + std::to_string(cols));
  }
}

void check_bank(const Graph& g, const SignalBank& bank) {
  if (bank.size() != g.num_nodes()) {
    throw ProtocolError("signal count " + std::to_string(bank.size()) + " does not match node count " +
                        std::to_string(g.num_nodes()));
  }
}

class EdchoField {
 public:
  EdchoField(const Graph& g, const ProtocolConfig& cfg, const SignalBank& bank)
      : edges_(g.edges()), nodes_(g.num_nodes()), gains_(cfg.gains), bank_(bank) {
    cfg.validate();
    check_bank(g, bank);
    if (bank.order != cfg.order) {
      throw ProtocolError("signal bank order " + std::to_string(bank.order) +
                          " does not match protocol order " + std::to_string(cfg.order));
    }
    const int m = cfg.order;
    for (int mu = 0; mu <= m; ++mu) {
      exponents_.push_back(static_cast<double>(m - mu) / static_cast<double>(m + 1));
    }
    y0_.resize(static_cast<Eigen::Index>(nodes_));
  }

  void operator()(double t, const Eigen::MatrixXd& x, Eigen::MatrixXd& dx) {
    const auto cols = static_cast<Eigen::Index>(gains_.size());
    check_dims(x, nodes_, cols);
    dx.resize(x.rows(), cols);
    dx.leftCols(cols - 1) = x.rightCols(cols - 1);
    dx.col(cols - 1).setZero();
    for (std::size_t i = 0; i < nodes_; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      y0_(r) = eval_derivative(bank_.signals[i], 0, t) - x(r, 0);
    }
    for (const auto& e : edges_) {
      const auto a = static_cast<Eigen::Index>(e.from);
      const auto b = static_cast<Eigen::Index>(e.to);
      const double diff = y0_(a) - y0_(b);
      if (diff == 0.0) continue;
      for (Eigen::Index mu = 0; mu < cols; ++mu) {
        const double s = gains_[static_cast<std::size_t>(mu)] *
                         signum_power(diff, exponents_[static_cast<std::size_t>(mu)]);
        dx(a, mu) += s;
        dx(b, mu) -= s;
      }
    }
  }

 private:
  std::vector<Edge> edges_;
  std::size_t nodes_;
  std::vector<double> gains_;
  std::vector<double> exponents_;
  SignalBank bank_;
  Eigen::VectorXd y0_;
};

class LinearField {
 public:
  LinearField(const Graph& g, double k, const SignalBank& bank)
      : edges_(g.edges()), nodes_(g.num_nodes()), gain_(k), bank_(bank) {
    if (!(k > 0.0)) throw ProtocolError("linear gain must be positive");
    check_bank(g, bank);
    y0_.resize(static_cast<Eigen::Index>(nodes_));
  }

  void operator()(double t, const Eigen::MatrixXd& x, Eigen::MatrixXd& dx) {
    check_dims(x, nodes_, 1);
    dx.setZero(x.rows(), 1);
    for (std::size_t i = 0; i < nodes_; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      y0_(r) = eval_derivative(bank_.signals[i], 0, t) - x(r, 0);
    }
    for (const auto& e : edges_) {
      const auto a = static_cast<Eigen::Index>(e.from);
      const auto b = static_cast<Eigen::Index>(e.to);
      const double s = gain_ * (y0_(a) - y0_(b));
      dx(a, 0) += s;
      dx(b, 0) -= s;
    }
  }

 private:
  std::vector<Edge> edges_;
  std::size_t nodes_;
  double gain_;
  SignalBank bank_;
  Eigen::VectorXd y0_;
};

SignalBank as_order_zero(const SignalBank& bank) {
  SignalBank out = bank;
  out.order = 0;
  return out;
}

}  // namespace

Eigen::MatrixXd edcho_derivative(const SimState& state, const Graph& g, const ProtocolConfig& cfg,
                                 const SignalBank& bank) {
  check_dims(state.x, g.num_nodes(), static_cast<Eigen::Index>(cfg.order) + 1);
  EdchoField field(g, cfg, bank);
  Eigen::MatrixXd dx;
  field(state.t, state.x, dx);
  return dx;
}

Eigen::MatrixXd linear_derivative(const SimState& state, const Graph& g, double k,
                                  const SignalBank& bank) {
  check_dims(state.x, g.num_nodes(), 1);
  LinearField field(g, k, bank);
  Eigen::MatrixXd dx;
  field(state.t, state.x, dx);
  return dx;
}

Eigen::MatrixXd fosm_derivative(const SimState& state, const Graph& g, double k,
                                const SignalBank& bank) {
  return edcho_derivative(state, g, ProtocolConfig{0, {k}, 0.0}, as_order_zero(bank));
}

Dynamics make_edcho(const Graph& g, const ProtocolConfig& cfg, const SignalBank& bank) {
  return EdchoField(g, cfg, bank);
}

Dynamics make_linear(const Graph& g, double k, const SignalBank& bank) {
  return LinearField(g, k, bank);
}

Dynamics make_fosm(const Graph& g, double k, const SignalBank& bank) {
  return EdchoField(g, ProtocolConfig{0, {k}, 0.0}, as_order_zero(bank));
}

}  // namespace edcho
