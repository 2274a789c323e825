#pragma once

namespace eecrmt {

// Monte Carlo frequency estimate of an upper-tail probability.
struct TailEstimate {
  double p_hat = 0;
  double std_error = 0;  // sqrt(p_hat (1 - p_hat) / reps)
  long long reps = 0;
};

}  // namespace eecrmt
