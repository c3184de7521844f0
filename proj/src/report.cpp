#include "concord/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "concord/errors.hpp"

namespace concord {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

const char* kCsvHeader =
    "K,n,kappa,V_E_hat,V_standin,VA_exact,V_bar,VA_bar,"
    "rel_V,rel_VA,rel_Vbar,rel_VAbar,degenerate_count,used_replicates";

std::string optional_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string("na");
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& field, long line) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IngestError("bad numeric field '" + field + "' in report CSV", line);
  }
  return value;
}

std::int64_t parse_int(const std::string& field, long line) {
  std::int64_t value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw IngestError("bad integer field '" + field + "' in report CSV", line);
  }
  return value;
}

std::optional<double> parse_optional(const std::string& field, long line) {
  if (field == "na") return std::nullopt;
  return parse_double(field, line);
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return std::string(buf);
}

}  // namespace

std::string report_to_csv(const SimulationReport& report) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const SimulationCell& c : report.cells) {
    out += std::to_string(c.K);
    out += ',';
    out += std::to_string(c.n);
    out += ',';
    out += format_double(c.kappa_target);
    out += ',';
    out += format_double(c.v_e_hat);
    out += ',';
    out += format_double(c.v_exact);
    out += ',';
    out += format_double(c.va_exact);
    out += ',';
    out += format_double(c.v_bar);
    out += ',';
    out += format_double(c.va_bar);
    out += ',';
    out += optional_field(c.rel_v);
    out += ',';
    out += optional_field(c.rel_va);
    out += ',';
    out += optional_field(c.rel_vbar);
    out += ',';
    out += optional_field(c.rel_vabar);
    out += ',';
    out += std::to_string(c.degenerate_count);
    out += ',';
    out += std::to_string(c.used_replicates);
    out += '\n';
  }
  return out;
}

SimulationReport report_from_csv(std::string_view csv) {
  SimulationReport report;
  long line_no = 0;
  std::size_t start = 0;
  bool saw_header = false;
  while (start < csv.size()) {
    std::size_t end = csv.find('\n', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kCsvHeader) throw IngestError("unexpected report CSV header", line_no);
      saw_header = true;
      continue;
    }
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 14) {
      throw IngestError("report CSV row has " + std::to_string(f.size()) +
                        " fields, expected 14", line_no);
    }
    SimulationCell c;
    c.K = static_cast<int>(parse_int(f[0], line_no));
    c.n = parse_int(f[1], line_no);
    c.kappa_target = parse_double(f[2], line_no);
    c.v_e_hat = parse_double(f[3], line_no);
    c.v_exact = parse_double(f[4], line_no);
    c.va_exact = parse_double(f[5], line_no);
    c.v_bar = parse_double(f[6], line_no);
    c.va_bar = parse_double(f[7], line_no);
    c.rel_v = parse_optional(f[8], line_no);
    c.rel_va = parse_optional(f[9], line_no);
    c.rel_vbar = parse_optional(f[10], line_no);
    c.rel_vabar = parse_optional(f[11], line_no);
    c.degenerate_count = parse_int(f[12], line_no);
    c.used_replicates = parse_int(f[13], line_no);
    report.cells.push_back(c);
  }
  if (!saw_header) throw IngestError("empty report CSV", 0);
  report.summary = summarize_cells(report.cells);
  return report;
}

namespace {

nlohmann::json cell_to_json(const SimulationCell& c) {
  nlohmann::json j;
  j["K"] = c.K;
  j["n"] = c.n;
  j["kappa_target"] = c.kappa_target;
  j["v_e_hat"] = c.v_e_hat;
  j["v_exact"] = c.v_exact;
  j["va_exact"] = c.va_exact;
  j["v_bar"] = c.v_bar;
  j["va_bar"] = c.va_bar;
  j["degenerate_count"] = c.degenerate_count;
  j["used_replicates"] = c.used_replicates;
  j["rel_v"] = c.rel_v ? nlohmann::json(*c.rel_v) : nlohmann::json(nullptr);
  j["rel_va"] = c.rel_va ? nlohmann::json(*c.rel_va) : nlohmann::json(nullptr);
  j["rel_vbar"] = c.rel_vbar ? nlohmann::json(*c.rel_vbar) : nlohmann::json(nullptr);
  j["rel_vabar"] = c.rel_vabar ? nlohmann::json(*c.rel_vabar) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string report_to_json(const SimulationReport& report) {
  nlohmann::json j;
  j["cells"] = nlohmann::json::array();
  for (const SimulationCell& c : report.cells) j["cells"].push_back(cell_to_json(c));
  nlohmann::json s;
  const GridSummary& g = report.summary;
  s["rel_v_pct"] = g.rel_v_pct ? nlohmann::json(*g.rel_v_pct) : nlohmann::json(nullptr);
  s["rel_va_pct"] = g.rel_va_pct ? nlohmann::json(*g.rel_va_pct) : nlohmann::json(nullptr);
  s["rel_vbar_pct"] = g.rel_vbar_pct ? nlohmann::json(*g.rel_vbar_pct) : nlohmann::json(nullptr);
  s["rel_vabar_pct"] =
      g.rel_vabar_pct ? nlohmann::json(*g.rel_vabar_pct) : nlohmann::json(nullptr);
  s["cells_included"] = g.cells_included;
  j["summary"] = s;
  return j.dump(2) + "\n";
}

std::string report_to_text(const SimulationReport& report) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%3s %5s %6s | %9s %9s %9s %9s %9s | %6s %6s\n", "K", "n",
                "kappa", "V_E_hat", "V_std-in", "VA_exact", "V_bar", "VA_bar", "degen",
                "used");
  out << buf;
  out << std::string(92, '-') << "\n";
  for (const SimulationCell& c : report.cells) {
    std::snprintf(buf, sizeof(buf), "%3d %5lld %6.2f | %9s %9s %9s %9s %9s | %6lld %6lld\n",
                  c.K, static_cast<long long>(c.n), c.kappa_target, fixed4(c.v_e_hat).c_str(),
                  fixed4(c.v_exact).c_str(), fixed4(c.va_exact).c_str(),
                  fixed4(c.v_bar).c_str(), fixed4(c.va_bar).c_str(),
                  static_cast<long long>(c.degenerate_count),
                  static_cast<long long>(c.used_replicates));
    out << buf;
  }
  out << "\n";
  out << "V_E_hat:   sample variance (denominator N-1) of the unbiased-variant kappas\n";
  out << "V_std-in:  delta-engine variance of the kappa_CU functional (numeric stand-in)\n";
  out << "VA_exact:  squared transformation slope times the closed-form base variance\n";
  out << "V_bar/VA_bar: averages of the per-sample plug-in estimates\n";
  const GridSummary& g = report.summary;
  if (g.rel_v_pct) {
    std::snprintf(buf, sizeof(buf),
                  "summary (over %lld cells): rel_V %.2f%%, rel_VA %.2f%%, "
                  "rel_Vbar %.2f%%, rel_VAbar %.2f%%\n",
                  static_cast<long long>(g.cells_included), *g.rel_v_pct, *g.rel_va_pct,
                  *g.rel_vbar_pct, *g.rel_vabar_pct);
    out << buf;
  } else {
    out << "summary: not applicable (no cell with positive empirical variance)\n";
  }
  return out.str();
}

}  // namespace concord
