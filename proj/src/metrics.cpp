#include "ganlab/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ganlab {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string MetricSeries::to_csv() const {
  std::ostringstream out;
  out << "iteration,disc_loss,accuracy,gen_grad_norm,grad_var,"
         "grad_x_norm_real,grad_x_norm_fake,eps_hat,m_hat\n";
  for (const GradientProbe& r : rows_) {
    out << r.iteration << ',' << format_full(r.disc_loss) << ','
        << format_full(r.accuracy) << ',' << format_full(r.gen_grad_norm)
        << ',' << format_full(r.grad_var) << ','
        << format_full(r.grad_x_norm_real) << ','
        << format_full(r.grad_x_norm_fake) << ',' << format_full(r.eps_hat)
        << ',' << format_full(r.m_hat) << '\n';
  }
  return out.str();
}

void MetricSeries::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << to_csv();
}

}  // namespace ganlab
