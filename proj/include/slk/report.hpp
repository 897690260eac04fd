#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace slk {

inline constexpr const char* kToolkitVersion = "0.3.0";

struct AuditRecord {
  std::string audit_id;
  std::string field_id;
  double alpha = 0.0;
  double beta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  bool pass = false;
  double score = 0.0;
  /// Wall-clock runtime; excluded from the report body like the timestamp.
  double seconds = 0.0;
  std::string note;
  std::string config_hash;

  bool operator==(const AuditRecord&) const = default;
};

/// Plot-ready numeric table (density samples, scaling series, ...).
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  bool operator==(const Table&) const = default;
};

struct VerificationReport {
  std::string command;
  std::string version = kToolkitVersion;
  nlohmann::json config = nlohmann::json::object();
  std::string config_hash;
  std::vector<AuditRecord> records;
  Table table;
  bool global_pass = true;
  std::string timestamp;

  /// Recomputes global_pass as the conjunction of record passes.
  void finalize();
  bool operator==(const VerificationReport&) const = default;
};

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

/// Non-finite doubles are written as the strings "inf", "-inf" and "nan".
nlohmann::json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);
/// Everything except the timestamp and per-record runtimes.
nlohmann::json report_body(const VerificationReport& r);
std::string body_hash(const VerificationReport& r);

enum class ReportFormat { structured, table };
ReportFormat parse_format(const std::string& s);
std::string emit(const VerificationReport& r, ReportFormat f);
void emit_to_file(const VerificationReport& r, ReportFormat f, const std::string& path);
/// Writes the numeric table as comma-separated values.
std::string emit_table(const Table& t);

inline constexpr const char* kCsvHeader = "audit_id,field_id,alpha,beta,lhs,rhs,constant,pass,score,seconds";

}  // namespace slk
