#pragma once

#include <limits>
#include <string>
#include <vector>

namespace ganlab {

// One checkpoint row of a training-dynamics run. Fields not measured by a
// given probe stay NaN and serialize as nan.
struct GradientProbe {
  long iteration = 0;
  double disc_loss = std::numeric_limits<double>::quiet_NaN();
  double accuracy = std::numeric_limits<double>::quiet_NaN();
  double gen_grad_norm = std::numeric_limits<double>::quiet_NaN();
  double grad_var = std::numeric_limits<double>::quiet_NaN();
  double grad_x_norm_real = std::numeric_limits<double>::quiet_NaN();
  double grad_x_norm_fake = std::numeric_limits<double>::quiet_NaN();
  double eps_hat = std::numeric_limits<double>::quiet_NaN();
  double m_hat = std::numeric_limits<double>::quiet_NaN();
};

// Iteration-indexed scalar measurements; serializes to CSV with the fixed
// header (iteration, disc_loss, accuracy, gen_grad_norm, grad_var,
// grad_x_norm_real, grad_x_norm_fake, eps_hat, m_hat) at full 17-digit
// precision so regression diffs are exact.
class MetricSeries {
 public:
  void push(const GradientProbe& row) { rows_.push_back(row); }
  const std::vector<GradientProbe>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const GradientProbe& front() const { return rows_.front(); }
  const GradientProbe& back() const { return rows_.back(); }

  std::string to_csv() const;
  void save_csv(const std::string& path) const;

 private:
  std::vector<GradientProbe> rows_;
};

// %.17g rendering used by every CSV writer in the lab.
std::string format_full(double v);

}  // namespace ganlab
