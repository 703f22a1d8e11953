#include "creg/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace creg::io {

namespace {

std::string meta_header(const Meta& meta) {
  std::string out;
  out += "# tool: creg ";
  out += kToolVersion;
  out += "\n# claim: " + meta.claim + "\n";
  out += "# config:";
  for (const auto& [k, v] : meta.config) out += " " + k + "=" + v;
  out += "\n";
  if (meta.has_seed) out += "# seed: " + std::to_string(meta.seed) + "\n";
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

std::string meta_json(const Meta& meta) {
  std::string out = "{\"tool\":\"creg " + std::string(kToolVersion) + "\"";
  out += ",\"claim\":\"" + json_escape(meta.claim) + "\"";
  out += ",\"config\":{";
  bool first = true;
  for (const auto& [k, v] : meta.config) {
    if (!first) out += ",";
    first = false;
    out += "\"" + json_escape(k) + "\":\"" + json_escape(v) + "\"";
  }
  out += "}";
  if (meta.has_seed) out += ",\"seed\":" + std::to_string(meta.seed);
  out += "}";
  return out;
}

}  // namespace

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::Csv;
  if (text == "json") return Format::Json;
  throw std::invalid_argument("format: expected csv or json, got '" + text +
                              "'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_width_csv(const WidthCurve& curve, const Meta& meta) {
  std::string out = meta_header(meta);
  if (curve.fixed_point)
    out += "# fixed_point: " + format_double(*curve.fixed_point) + "\n";
  out += "t,mean,stderr\n";
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    out += format_double(curve.t_grid[i]) + "," + format_double(curve.mean[i]) +
           "," + format_double(curve.stderr_[i]) + "\n";
  }
  return out;
}

std::string render_width_json(const WidthCurve& curve, const Meta& meta) {
  std::string out = "{\"meta\":" + meta_json(meta);
  out += ",\"reps\":" + std::to_string(curve.reps);
  out += ",\"sigma\":" + format_double(curve.sigma);
  if (curve.fixed_point)
    out += ",\"fixed_point\":" + format_double(*curve.fixed_point);
  out += ",\"rows\":[";
  for (std::size_t i = 0; i < curve.t_grid.size(); ++i) {
    if (i) out += ",";
    out += "{\"t\":" + format_double(curve.t_grid[i]) +
           ",\"mean\":" + format_double(curve.mean[i]) +
           ",\"stderr\":" + format_double(curve.stderr_[i]) + "}";
  }
  out += "]}";
  return out;
}

namespace {

double quantile_of(const RiskReport& r, double p) {
  for (const auto& [q, v] : r.quantiles)
    if (std::abs(q - p) < 1e-12) return v;
  return std::nan("");
}

}  // namespace

std::string render_risk_csv(const std::vector<RiskReport>& cells,
                            const Meta& meta, const RateFit* fit,
                            bool regret) {
  std::string out = meta_header(meta);
  if (fit)
    out += "# fit: slope=" + format_double(fit->slope) +
           " intercept=" + format_double(fit->intercept) +
           " r2=" + format_double(fit->r_squared) + "\n";
  out += "n,mean_loss,stderr,q50,q90,q99";
  if (regret) out += ",regret_mean,regret_stderr,offset,range_term";
  out += ",failures\n";
  for (const auto& r : cells) {
    out += std::to_string(r.signal.n) + "," + format_double(r.mean_loss) +
           "," + format_double(r.stderr_) + "," +
           format_double(quantile_of(r, 0.5)) + "," +
           format_double(quantile_of(r, 0.9)) + "," +
           format_double(quantile_of(r, 0.99));
    if (regret) {
      out += "," + format_double(r.regret_mean.value_or(std::nan(""))) + "," +
             format_double(r.regret_stderr.value_or(std::nan(""))) + "," +
             format_double(r.offset.value_or(std::nan(""))) + "," +
             format_double(r.range_term.value_or(std::nan("")));
    }
    out += "," + std::to_string(r.failures) + "\n";
  }
  return out;
}

std::string render_risk_json(const std::vector<RiskReport>& cells,
                             const Meta& meta, const RateFit* fit,
                             bool regret) {
  std::string out = "{\"meta\":" + meta_json(meta);
  if (fit)
    out += ",\"fit\":{\"slope\":" + format_double(fit->slope) +
           ",\"intercept\":" + format_double(fit->intercept) +
           ",\"r2\":" + format_double(fit->r_squared) + "}";
  out += ",\"rows\":[";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& r = cells[i];
    if (i) out += ",";
    out += "{\"n\":" + std::to_string(r.signal.n) +
           ",\"mean_loss\":" + format_double(r.mean_loss) +
           ",\"stderr\":" + format_double(r.stderr_) +
           ",\"q50\":" + format_double(quantile_of(r, 0.5)) +
           ",\"q90\":" + format_double(quantile_of(r, 0.9)) +
           ",\"q99\":" + format_double(quantile_of(r, 0.99));
    if (regret && r.regret_mean) {
      out += ",\"regret_mean\":" + format_double(*r.regret_mean) +
             ",\"regret_stderr\":" + format_double(*r.regret_stderr) +
             ",\"offset\":" + format_double(*r.offset) +
             ",\"range_term\":" + format_double(*r.range_term);
    }
    out += ",\"failures\":" + std::to_string(r.failures) + "}";
  }
  out += "]}";
  return out;
}

std::string render_entropy_csv(const std::vector<EntropyEstimate>& rows,
                               const Meta& meta) {
  std::string out = meta_header(meta);
  out += "n,B,epsilon,packing_count,net_count\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n) + "," + format_double(r.B) + "," +
           format_double(r.epsilon) + "," + std::to_string(r.packing_count) +
           "," + std::to_string(r.net_count) + "\n";
  }
  return out;
}

std::string render_entropy_json(const std::vector<EntropyEstimate>& rows,
                                const Meta& meta) {
  std::string out = "{\"meta\":" + meta_json(meta) + ",\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i) out += ",";
    out += "{\"n\":" + std::to_string(r.n) + ",\"B\":" + format_double(r.B) +
           ",\"epsilon\":" + format_double(r.epsilon) +
           ",\"packing_count\":" + std::to_string(r.packing_count) +
           ",\"net_count\":" + std::to_string(r.net_count) + "}";
  }
  out += "]}";
  return out;
}

std::string render_projection_csv(const Sequence& input,
                                  const Sequence& output, const Meta& meta,
                                  double kkt_residual) {
  std::string out = meta_header(meta);
  out += "# kkt_residual: " + format_double(kkt_residual) + "\n";
  out += "index,input,output\n";
  for (std::size_t i = 0; i < input.size(); ++i) {
    out += std::to_string(i + 1) + "," + format_double(input[i]) + "," +
           format_double(output[i]) + "\n";
  }
  return out;
}

std::string render_projection_json(const Sequence& input,
                                   const Sequence& output, const Meta& meta,
                                   double kkt_residual) {
  std::string out = "{\"meta\":" + meta_json(meta);
  out += ",\"kkt_residual\":" + format_double(kkt_residual);
  out += ",\"rows\":[";
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (i) out += ",";
    out += "{\"index\":" + std::to_string(i + 1) +
           ",\"input\":" + format_double(input[i]) +
           ",\"output\":" + format_double(output[i]) + "}";
  }
  out += "]}";
  return out;
}

std::string render_truncation_csv(const Sequence& theta, const Sequence& ref,
                                  const TruncationResult& result,
                                  const Meta& meta) {
  std::string out = meta_header(meta);
  out += "# level: " + format_double(result.level) +
         " lower: " + format_double(result.lower_clamp) +
         " upper: " + format_double(result.upper_clamp) +
         " m1: " + std::to_string(result.m1) +
         " m2: " + std::to_string(result.m2) + "\n";
  out += "theta,theta_star,theta_prime\n";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    out += format_double(theta[i]) + "," + format_double(ref[i]) + "," +
           format_double(result.truncated[i]) + "\n";
  }
  return out;
}

std::string render_truncation_json(const Sequence& theta, const Sequence& ref,
                                   const TruncationResult& result,
                                   const Meta& meta) {
  std::string out = "{\"meta\":" + meta_json(meta);
  out += ",\"level\":" + format_double(result.level);
  out += ",\"m1\":" + std::to_string(result.m1);
  out += ",\"m2\":" + std::to_string(result.m2);
  out += ",\"rows\":[";
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (i) out += ",";
    out += "{\"theta\":" + format_double(theta[i]) +
           ",\"theta_star\":" + format_double(ref[i]) +
           ",\"theta_prime\":" + format_double(result.truncated[i]) + "}";
  }
  out += "]}";
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("grid: empty specification");
  std::vector<double> grid;
  if (text.find(':') != std::string::npos) {
    // start:stop:xFactor
    std::istringstream in(text);
    std::string start_s, stop_s, factor_s;
    if (!std::getline(in, start_s, ':') || !std::getline(in, stop_s, ':') ||
        !std::getline(in, factor_s))
      throw std::invalid_argument("grid '" + text +
                                  "': expected start:stop:xFactor");
    if (factor_s.empty() || factor_s[0] != 'x')
      throw std::invalid_argument("grid '" + text +
                                  "': factor must look like x2 or x1.5");
    double start, stop, factor;
    try {
      start = std::stod(start_s);
      stop = std::stod(stop_s);
      factor = std::stod(factor_s.substr(1));
    } catch (const std::exception&) {
      throw std::invalid_argument("grid '" + text + "': bad number");
    }
    if (!(start > 0) || !(stop >= start) || !(factor > 1))
      throw std::invalid_argument(
          "grid '" + text + "': need 0 < start <= stop and factor > 1");
    for (double v = start; v <= stop * (1 + 1e-12); v *= factor)
      grid.push_back(v);
  } else {
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        grid.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw std::invalid_argument("grid '" + text + "': bad number '" +
                                    item + "'");
      }
    }
    if (grid.empty()) throw std::invalid_argument("grid: no values");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (grid[i] <= grid[i - 1])
        throw std::invalid_argument("grid '" + text + "': must be increasing");
  }
  return grid;
}

std::vector<int> parse_int_grid(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_grid(text)) {
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 * std::max(1.0, std::abs(v)))
      throw std::invalid_argument("grid '" + text + "': non-integer value " +
                                  format_double(v));
    out.push_back(static_cast<int>(r));
  }
  return out;
}

bool is_geometric(const std::vector<double>& grid) {
  if (grid.size() < 3) return true;
  const double ratio = grid[1] / grid[0];
  for (std::size_t i = 2; i < grid.size(); ++i)
    if (std::abs(grid[i] / grid[i - 1] - ratio) > 1e-9 * ratio) return false;
  return true;
}

Sequence read_sequence_csv(std::istream& in) {
  Sequence out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    // accept "value" or "index,value"; skip a header line
    const auto comma = line.find(',');
    std::string cell =
        comma == std::string::npos ? line : line.substr(comma + 1);
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      if (out.empty()) continue;  // tolerate one header row
      throw std::invalid_argument("sequence csv: bad value '" + cell + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("sequence csv: no values");
  return out;
}

std::string write_sequence_csv(const Sequence& x) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out += std::to_string(i + 1) + "," + format_double(x[i]) + "\n";
  return out;
}

}  // namespace creg::io
