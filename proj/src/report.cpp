#include "phibp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace phibp {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string duality_csv(const DualitySweep& sweep) {
  std::string out =
      "# config_id,r,K_tilde,log_lhs,log_rhs,residual,prob_lhs,prob_rhs\n";
  for (const DualityRow& row : sweep.rows) {
    out += std::to_string(row.config_id);
    out += ',';
    out += std::to_string(row.species);
    out += ',';
    out += std::to_string(row.fine_blocks);
    out += ',';
    out += format_double(row.log_lhs);
    out += ',';
    out += format_double(row.log_rhs);
    out += ',';
    out += format_double(row.residual);
    out += ',';
    out += format_double(std::exp(row.log_lhs));
    out += ',';
    out += format_double(std::exp(row.log_rhs));
    out += '\n';
  }
  return out;
}

std::string mc_csv(const McComparison& mc) {
  std::string out = "# statistic,chi2,dof,p_value,tv_distance\n";
  for (const McStatistic& s : mc.statistics) {
    out += s.name;
    out += ',';
    out += format_double(s.chi2);
    out += ',';
    out += std::to_string(s.dof);
    out += ',';
    out += format_double(s.p_value);
    out += ',';
    out += format_double(s.tv_distance);
    out += '\n';
  }
  return out;
}

std::string normalize_csv(
    std::span<const std::pair<std::string, double>> sums) {
  std::string out = "# law,sum,abs_error\n";
  for (const auto& [law, sum] : sums) {
    out += law;
    out += ',';
    out += format_double(sum);
    out += ',';
    out += format_double(std::abs(sum - 1.0));
    out += '\n';
  }
  return out;
}

}  // namespace phibp
