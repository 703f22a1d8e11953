#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "creg/covering.hpp"
#include "creg/risk.hpp"
#include "creg/truncation.hpp"
#include "creg/types.hpp"
#include "creg/width.hpp"

namespace creg::io {

/// Provenance block embedded in every output file: tool version, the run's
/// claim tag, the fully resolved configuration, and the seed.
struct Meta {
  std::string claim;
  std::vector<std::pair<std::string, std::string>> config;  // ordered
  std::uint64_t seed = 0;
  bool has_seed = false;
};

enum class Format { Csv, Json };

Format parse_format(const std::string& text);

/// 17 significant digits, locale independent.
std::string format_double(double v);

std::string render_width_csv(const WidthCurve& curve, const Meta& meta);
std::string render_width_json(const WidthCurve& curve, const Meta& meta);

std::string render_risk_csv(const std::vector<RiskReport>& cells,
                            const Meta& meta, const RateFit* fit = nullptr,
                            bool regret = false);
std::string render_risk_json(const std::vector<RiskReport>& cells,
                             const Meta& meta, const RateFit* fit = nullptr,
                             bool regret = false);

std::string render_entropy_csv(const std::vector<EntropyEstimate>& rows,
                               const Meta& meta);
std::string render_entropy_json(const std::vector<EntropyEstimate>& rows,
                                const Meta& meta);

std::string render_projection_csv(const Sequence& input,
                                  const Sequence& output, const Meta& meta,
                                  double kkt_residual);
std::string render_projection_json(const Sequence& input,
                                   const Sequence& output, const Meta& meta,
                                   double kkt_residual);

std::string render_truncation_csv(const Sequence& theta, const Sequence& ref,
                                  const TruncationResult& result,
                                  const Meta& meta);
std::string render_truncation_json(const Sequence& theta, const Sequence& ref,
                                   const TruncationResult& result,
                                   const Meta& meta);

/// Geometric grid "start:stop:xFactor" (e.g. "64:4096:x2"), or an explicit
/// comma list. Throws std::invalid_argument naming the offending part.
std::vector<double> parse_grid(const std::string& text);
std::vector<int> parse_int_grid(const std::string& text);

/// True when the grid ratios are constant within 1e-9 (geometric).
bool is_geometric(const std::vector<double>& grid);

/// Reads one sequence from CSV text: either one value per line or
/// index,value rows; '#' lines are ignored.
Sequence read_sequence_csv(std::istream& in);
std::string write_sequence_csv(const Sequence& x);

}  // namespace creg::io
