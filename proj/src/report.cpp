#include "slk/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "slk/grid.hpp"

namespace slk {
namespace {

using nlohmann::json;

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw InvalidArgument("report: bad number " + s);
  }
  return j.get<double>();
}

std::string csv_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void VerificationReport::finalize() {
  global_pass = true;
  for (const auto& r : records) global_pass = global_pass && r.pass;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const VerificationReport& r) {
  json records = json::array();
  for (const auto& a : r.records)
    records.push_back({{"audit_id", a.audit_id},
                       {"field_id", a.field_id},
                       {"alpha", num(a.alpha)},
                       {"beta", num(a.beta)},
                       {"lhs", num(a.lhs)},
                       {"rhs", num(a.rhs)},
                       {"constant", num(a.constant)},
                       {"pass", a.pass},
                       {"score", num(a.score)},
                       {"seconds", num(a.seconds)},
                       {"note", a.note},
                       {"config_hash", a.config_hash}});
  json rows = json::array();
  for (const auto& row : r.table.rows) {
    json jr = json::array();
    for (double v : row) jr.push_back(num(v));
    rows.push_back(jr);
  }
  return {{"toolkit", "slk"},
          {"version", r.version},
          {"command", r.command},
          {"config", r.config},
          {"config_hash", r.config_hash},
          {"records", records},
          {"table", {{"columns", r.table.columns}, {"rows", rows}}},
          {"global_pass", r.global_pass},
          {"timestamp", r.timestamp}};
}

VerificationReport report_from_json(const json& j) {
  try {
    VerificationReport r;
    r.version = j.at("version").get<std::string>();
    r.command = j.at("command").get<std::string>();
    r.config = j.at("config");
    r.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& a : j.at("records")) {
      AuditRecord x;
      x.audit_id = a.at("audit_id").get<std::string>();
      x.field_id = a.at("field_id").get<std::string>();
      x.alpha = num(a.at("alpha"));
      x.beta = num(a.at("beta"));
      x.lhs = num(a.at("lhs"));
      x.rhs = num(a.at("rhs"));
      x.constant = num(a.at("constant"));
      x.pass = a.at("pass").get<bool>();
      x.score = num(a.at("score"));
      x.seconds = num(a.at("seconds"));
      x.note = a.at("note").get<std::string>();
      x.config_hash = a.at("config_hash").get<std::string>();
      r.records.push_back(std::move(x));
    }
    r.table.columns = j.at("table").at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("table").at("rows")) {
      std::vector<double> v;
      for (const auto& e : row) v.push_back(num(e));
      r.table.rows.push_back(std::move(v));
    }
    r.global_pass = j.at("global_pass").get<bool>();
    r.timestamp = j.at("timestamp").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("report: malformed document: ") + e.what());
  }
}

json report_body(const VerificationReport& r) {
  json j = to_json(r);
  j.erase("timestamp");
  for (auto& a : j["records"]) a.erase("seconds");
  return j;
}

std::string body_hash(const VerificationReport& r) { return fnv1a_hex(report_body(r).dump()); }

ReportFormat parse_format(const std::string& s) {
  if (s == "json" || s == "structured") return ReportFormat::structured;
  if (s == "csv" || s == "table") return ReportFormat::table;
  throw InvalidArgument("unknown report format: " + s);
}

std::string emit(const VerificationReport& r, ReportFormat f) {
  if (f == ReportFormat::structured) return to_json(r).dump(2) + "\n";
  std::ostringstream os;
  os << kCsvHeader << "\n";
  for (const auto& a : r.records)
    os << csv_text(a.audit_id) << ',' << csv_text(a.field_id) << ',' << csv_num(a.alpha) << ',' << csv_num(a.beta)
       << ',' << csv_num(a.lhs) << ',' << csv_num(a.rhs) << ',' << csv_num(a.constant) << ','
       << (a.pass ? "true" : "false") << ',' << csv_num(a.score) << ',' << csv_num(a.seconds) << "\n";
  return os.str();
}

void emit_to_file(const VerificationReport& r, ReportFormat f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot write report to " + path);
  os << emit(r, f);
  if (!os) throw InvalidArgument("cannot write report to " + path);
}

std::string emit_table(const Table& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_text(t.columns[i]);
  os << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_num(row[i]);
    os << "\n";
  }
  return os.str();
}

}  // namespace slk
