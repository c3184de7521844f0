#include "concord/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace concord {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::vector<std::pair<long, std::string>> nonempty_lines(const std::string& text) {
  std::vector<std::pair<long, std::string>> lines;
  long line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = trim(std::string_view(text).substr(start, end - start));
    ++line_no;
    if (!line.empty()) lines.emplace_back(line_no, std::move(line));
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::int64_t parse_count(const std::string& field, long line) {
  std::int64_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IngestError("non-integer count '" + field + "'", line);
  }
  if (value < 0) throw IngestError("negative count '" + field + "'", line);
  return value;
}

IngestedRatings ingest_matrix(const std::string& text) {
  const auto lines = nonempty_lines(text);
  if (lines.empty()) throw IngestError("empty ratings file", 0);
  const int K = static_cast<int>(lines.size());
  std::vector<std::int64_t> counts;
  counts.reserve(static_cast<std::size_t>(K) * K);
  for (const auto& [line_no, line] : lines) {
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != K) {
      throw IngestError("matrix row has " + std::to_string(fields.size()) +
                        " entries, expected " + std::to_string(K) +
                        " (table must be square)", line_no);
    }
    for (const std::string& f : fields) counts.push_back(parse_count(f, line_no));
  }
  if (K < 2) throw IngestError("matrix input needs at least a 2x2 table", lines.front().first);
  try {
    return IngestedRatings{ContingencyTable(K, std::move(counts)), {}, {}};
  } catch (const InvalidArgument& e) {
    throw IngestError(e.what(), 0);
  }
}

struct LongRecord {
  long line;
  std::string subject;
  std::string rater;
  std::string category;
};

IngestedRatings ingest_long(const std::string& text) {
  const auto lines = nonempty_lines(text);
  if (lines.empty()) throw IngestError("empty ratings file", 0);
  {
    const std::vector<std::string> header = split_fields(lines.front().second);
    if (header.size() != 3 || lower(header[0]) != "subject" || lower(header[1]) != "rater" ||
        lower(header[2]) != "category") {
      throw IngestError("long format needs header 'subject,rater,category'",
                        lines.front().first);
    }
  }
  std::vector<LongRecord> records;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [line_no, line] = lines[i];
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 3) {
      throw IngestError("long-format row needs 3 fields, got " + std::to_string(f.size()),
                        line_no);
    }
    if (f[0].empty() || f[1].empty() || f[2].empty()) {
      throw IngestError("long-format row has an empty field", line_no);
    }
    records.push_back(LongRecord{line_no, f[0], f[1], f[2]});
  }
  if (records.empty()) throw IngestError("long-format file has no data rows", 0);

  // First-appearance index maps; the category mapping is echoed in reports.
  std::vector<std::string> subjects, raters, categories;
  std::map<std::string, int> subject_idx, rater_idx, category_idx;
  auto index_of = [](std::map<std::string, int>& m, std::vector<std::string>& order,
                     const std::string& key) {
    auto it = m.find(key);
    if (it != m.end()) return it->second;
    const int idx = static_cast<int>(order.size());
    m.emplace(key, idx);
    order.push_back(key);
    return idx;
  };

  struct SubjectRatings {
    std::vector<std::pair<int, int>> by_rater;  // (rater index, category index)
    long first_line = 0;
  };
  std::vector<SubjectRatings> data;
  for (const LongRecord& r : records) {
    const int s = index_of(subject_idx, subjects, r.subject);
    const int rater = index_of(rater_idx, raters, r.rater);
    const int cat = index_of(category_idx, categories, r.category);
    if (s == static_cast<int>(data.size())) data.push_back(SubjectRatings{{}, r.line});
    for (const auto& [existing, _] : data[s].by_rater) {
      if (existing == rater) {
        throw IngestError("duplicate rating by rater '" + r.rater + "' for subject '" +
                          r.subject + "'", r.line);
      }
    }
    data[s].by_rater.emplace_back(rater, cat);
  }
  const int K = static_cast<int>(categories.size());
  if (K < 2) throw IngestError("need at least 2 distinct categories", records.front().line);

  const std::size_t R = data.front().by_rater.size();
  for (std::size_t s = 1; s < data.size(); ++s) {
    if (data[s].by_rater.size() != R) {
      throw IngestError("varying raters per subject: '" + subjects[0] + "' has " +
                        std::to_string(R) + ", '" + subjects[s] + "' has " +
                        std::to_string(data[s].by_rater.size()), data[s].first_line);
    }
  }
  if (R < 2) throw IngestError("each subject needs at least 2 ratings", records.front().line);

  if (R == 2 && raters.size() == 2) {
    // Two fixed raters: contingency table with rater[0] on rows.
    std::vector<std::int64_t> counts(static_cast<std::size_t>(K) * K, 0);
    for (std::size_t s = 0; s < data.size(); ++s) {
      int row = -1, col = -1;
      for (const auto& [rater, cat] : data[s].by_rater) {
        if (rater == 0) row = cat;
        else col = cat;
      }
      if (row < 0 || col < 0) {
        throw IngestError("subject '" + subjects[s] + "' is missing one of the two raters",
                          data[s].first_line);
      }
      counts[static_cast<std::size_t>(row) * K + col] += 1;
    }
    return IngestedRatings{ContingencyTable(K, std::move(counts)), categories, raters};
  }

  std::vector<std::int64_t> rows(data.size() * static_cast<std::size_t>(K), 0);
  for (std::size_t s = 0; s < data.size(); ++s) {
    for (const auto& [rater, cat] : data[s].by_rater) {
      (void)rater;
      rows[s * static_cast<std::size_t>(K) + cat] += 1;
    }
  }
  return IngestedRatings{MultiRaterTable(K, static_cast<int>(R), std::move(rows)),
                         categories, raters};
}

}  // namespace

IngestedRatings ingest_ratings_text(const std::string& text, RatingsFormat format) {
  return format == RatingsFormat::matrix ? ingest_matrix(text) : ingest_long(text);
}

IngestedRatings ingest_ratings(const std::string& path, RatingsFormat format) {
  return ingest_ratings_text(read_file(path), format);
}

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& what, const std::string& path) {
  throw ConfigError(what, path);
}

void check_known_keys(const json& obj, const std::vector<std::string>& known,
                      const std::string& prefix) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      bad_key("unknown key '" + key + "'", prefix + key);
    }
  }
}

std::vector<json> as_list(const json& v) {
  if (v.is_array()) return std::vector<json>(v.begin(), v.end());
  return {v};
}

int parse_K(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad_key("K must be an integer", path);
  const auto k = v.get<std::int64_t>();
  if (k < 2) bad_key("K must be >= 2", path);
  return static_cast<int>(k);
}

std::int64_t parse_n(const json& v, const std::string& path) {
  if (!v.is_number_integer()) bad_key("n must be an integer", path);
  const auto n = v.get<std::int64_t>();
  if (n < 2) bad_key("n must be >= 2", path);
  return n;
}

double parse_kappa(const json& v, const std::string& path) {
  if (!v.is_number()) bad_key("kappa must be a number", path);
  const double k = v.get<double>();
  if (!(k > -1.0 && k <= 1.0)) bad_key("kappa must lie in (-1, 1]", path);
  return k;
}

}  // namespace

std::vector<SimConfig> parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "$");
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object", "$");
  check_known_keys(root, {"grid", "K", "n", "kappa", "marginals", "seed", "replicates",
                          "degenerate_policy"},
                   "");

  std::vector<int> Ks;
  std::vector<std::int64_t> ns;
  std::vector<double> kappas;
  if (root.contains("grid")) {
    if (root.contains("K") || root.contains("n") || root.contains("kappa")) {
      bad_key("use either 'grid' or scalar K/n/kappa, not both", "grid");
    }
    const json& grid = root["grid"];
    if (!grid.is_object()) bad_key("grid must be an object", "grid");
    check_known_keys(grid, {"K", "n", "kappa"}, "grid.");
    for (const char* key : {"K", "n", "kappa"}) {
      if (!grid.contains(key)) bad_key(std::string("missing grid key '") + key + "'",
                                       "grid." + std::string(key));
    }
    std::size_t idx = 0;
    for (const json& v : as_list(grid["K"])) {
      Ks.push_back(parse_K(v, "grid.K[" + std::to_string(idx++) + "]"));
    }
    idx = 0;
    for (const json& v : as_list(grid["n"])) {
      ns.push_back(parse_n(v, "grid.n[" + std::to_string(idx++) + "]"));
    }
    idx = 0;
    for (const json& v : as_list(grid["kappa"])) {
      kappas.push_back(parse_kappa(v, "grid.kappa[" + std::to_string(idx++) + "]"));
    }
    if (Ks.empty() || ns.empty() || kappas.empty()) bad_key("grid lists must be nonempty", "grid");
  } else {
    for (const char* key : {"K", "n", "kappa"}) {
      if (!root.contains(key)) bad_key(std::string("missing key '") + key + "'", key);
    }
    Ks.push_back(parse_K(root["K"], "K"));
    ns.push_back(parse_n(root["n"], "n"));
    kappas.push_back(parse_kappa(root["kappa"], "kappa"));
  }

  std::int64_t replicates = 10000;
  if (root.contains("replicates")) {
    if (!root["replicates"].is_number_integer()) bad_key("replicates must be an integer", "replicates");
    replicates = root["replicates"].get<std::int64_t>();
    if (replicates < 2) bad_key("replicates must be >= 2", "replicates");
  }
  std::uint64_t seed = 0;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_integer() && !root["seed"].is_number_unsigned()) {
      bad_key("seed must be an integer", "seed");
    }
    seed = root["seed"].get<std::uint64_t>();
  }
  DegeneratePolicy policy = DegeneratePolicy::redraw;
  if (root.contains("degenerate_policy")) {
    const std::string p = root["degenerate_policy"].is_string()
                              ? root["degenerate_policy"].get<std::string>()
                              : std::string();
    if (p == "redraw") policy = DegeneratePolicy::redraw;
    else if (p == "drop") policy = DegeneratePolicy::drop;
    else bad_key("degenerate_policy must be 'redraw' or 'drop'", "degenerate_policy");
  }
  std::optional<std::vector<double>> marginals;
  if (root.contains("marginals")) {
    if (!root["marginals"].is_array()) bad_key("marginals must be a list", "marginals");
    std::vector<double> m;
    std::size_t idx = 0;
    for (const json& v : root["marginals"]) {
      if (!v.is_number()) bad_key("marginals entries must be numbers",
                                  "marginals[" + std::to_string(idx) + "]");
      m.push_back(v.get<double>());
      ++idx;
    }
    for (int K : Ks) {
      if (static_cast<int>(m.size()) != K) {
        bad_key("marginals has " + std::to_string(m.size()) + " entries but the grid uses K=" +
                std::to_string(K), "marginals");
      }
    }
    marginals = std::move(m);
  }

  // Deterministic row order: K outer, n middle, kappa inner.
  std::vector<SimConfig> configs;
  configs.reserve(Ks.size() * ns.size() * kappas.size());
  for (int K : Ks) {
    for (std::int64_t n : ns) {
      for (double kappa : kappas) {
        SimConfig cfg;
        cfg.scenario.K = K;
        cfg.scenario.n = n;
        cfg.scenario.kappa_target = kappa;
        cfg.scenario.marginals = marginals;
        cfg.replicates = replicates;
        cfg.seed = seed;
        cfg.policy = policy;
        try {
          cfg.validate();
        } catch (const InvalidArgument& e) {
          throw ConfigError(e.what(), "grid");
        }
        configs.push_back(std::move(cfg));
      }
    }
  }
  return configs;
}

std::vector<SimConfig> parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path, "$");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace concord
