#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "concord/simulation.hpp"
#include "concord/table.hpp"

namespace concord {

enum class RatingsFormat { matrix, long_format };

/// Parsed rating data plus the label mappings used to build it. Category
/// labels are mapped to indices by first appearance and echoed in reports.
struct IngestedRatings {
  std::variant<ContingencyTable, MultiRaterTable> data;
  std::vector<std::string> categories;  // empty for matrix input
  std::vector<std::string> raters;      // empty for matrix input

  bool is_contingency() const { return std::holds_alternative<ContingencyTable>(data); }
  const ContingencyTable& contingency() const { return std::get<ContingencyTable>(data); }
  const MultiRaterTable& multi_rater() const { return std::get<MultiRaterTable>(data); }
};

/// Reads a ratings file. `matrix` is a CSV of K x K integer counts; `long`
/// has header subject,rater,category. Two raters per subject yield a
/// ContingencyTable; a constant R >= 2 raters otherwise yields a
/// MultiRaterTable. Diagnostics carry line numbers.
IngestedRatings ingest_ratings(const std::string& path, RatingsFormat format);

IngestedRatings ingest_ratings_text(const std::string& text, RatingsFormat format);

/// Parses a JSON simulation config into one SimConfig per grid cell, in
/// Table-6 row order (K outer, n middle, kappa inner). Accepts either a
/// `grid` object with K/n/kappa lists or scalar K/n/kappa keys for a single
/// scenario. Unknown keys are errors with key-path diagnostics.
std::vector<SimConfig> parse_config(const std::string& path);

std::vector<SimConfig> parse_config_text(const std::string& text);

}  // namespace concord
