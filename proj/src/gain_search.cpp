#include <cmath>

#include "edcho/scenario.hpp"

namespace edcho {

K0SearchResult search_k0(const Scenario& base, const GainDesign& design, int order,
                         std::size_t budget) {
  if (budget == 0) throw ProtocolError("no convergent k0 found within budget");
  if (!(design.k0 > 0.0)) throw ProtocolError("initial k0 must be positive");

  K0SearchResult result;
  double k0 = design.k0;
  for (std::size_t attempt = 0; attempt < budget; ++attempt, k0 *= 2.0) {
    GainDesign candidate = design;
    candidate.k0 = k0;
    ProtocolConfig cfg;
    cfg.order = order;
    cfg.gains = order == 0 ? std::vector<double>{k0} : design_gains(candidate, order);
    cfg.bound = base.bound;
    const Scenario s = with_protocol(base, EdchoProtocol{cfg});

    K0Attempt record;
    record.k0 = k0;
    try {
      const RunResult run = run_scenario(s);
      record.settling_time = run.metrics.settling_time;
      record.settled = run.metrics.settling_time.has_value();
      record.terminal_error0 = run.metrics.terminal_error(0);
    } catch (const DivergenceError&) {
      record.diverged = true;
    }
    result.attempts.push_back(record);
    if (record.settled) {
      result.k0 = k0;
      result.gains = cfg.gains;
      return result;
    }
  }
  throw ProtocolError("no convergent k0 found within budget");
}

}  // namespace edcho
