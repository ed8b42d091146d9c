#include "toeplitz_forge/cli/records.hpp"

#include <ostream>

#include "json.hpp"

namespace toeplitz_forge::cli {
namespace {

using Json = nlohmann::ordered_json;

Json base(const char* kind) {
  Json j;
  j["schema"] = kRecordSchema;
  j["kind"] = kind;
  return j;
}

Json vector_json(const LatticeVector& v) {
  Json a = Json::array();
  for (const auto& c : v.coords()) a.push_back(c.get_str(10));
  return a;
}

Json sides_json(const std::vector<Integer>& sides) {
  Json a = Json::array();
  for (const auto& c : sides) a.push_back(c.get_str(10));
  return a;
}

void emit(std::ostream& out, const Json& j) { out << j.dump() << '\n'; }

}  // namespace

void RecordWriter::certificate(int level, const std::string& name, const std::string& verdict,
                               const std::string& detail) {
  Json j = base("certificate");
  j["level"] = level;
  j["name"] = name;
  j["verdict"] = verdict;
  j["detail"] = detail;
  emit(out_, j);
}

void RecordWriter::check(const std::string& name, bool passed, bool skipped, const std::string& detail) {
  Json j = base("check");
  j["name"] = name;
  j["status"] = skipped ? "skipped" : passed ? "pass" : "fail";
  j["detail"] = detail;
  emit(out_, j);
}

void RecordWriter::block(const SymbolBlock& block, std::size_t index) {
  Json j = base("block");
  j["level"] = block.level;
  j["index"] = index;
  j["lower"] = vector_json(block.domain.lower());
  j["sides"] = sides_json(block.domain.sides());
  j["letters"] = block.letters;
  emit(out_, j);
}

void RecordWriter::census_summary(const Census& census, const std::string& certified) {
  Json j = base("census");
  j["level"] = census.level();
  j["window_level"] = census.window_level();
  j["positions"] = census.positions().get_str(10);
  j["blocks"] = census.size();
  j["certified_count"] = certified;
  emit(out_, j);
}

void RecordWriter::frequency(int t, int s, std::size_t row, std::size_t column, const LatticeVector& position,
                             const Rational& value) {
  Json j = base("frequency");
  j["t"] = t;
  j["s"] = s;
  j["row"] = row;
  j["column"] = column;
  j["column_position"] = vector_json(position);
  j["ap"] = to_string(value);
  emit(out_, j);
}

void RecordWriter::letter(const LatticeVector& g, Letter letter, int min_zero_level) {
  Json j = base("letter");
  j["point"] = vector_json(g);
  j["letter"] = letter;
  j["min_zero_level"] = min_zero_level;
  emit(out_, j);
}

void RecordWriter::patch(const Patch& p) {
  Json j = base("patch");
  j["lower"] = vector_json(p.box.lower());
  j["sides"] = sides_json(p.box.sides());
  j["letters"] = p.letters;
  emit(out_, j);
}

void RecordWriter::error(const std::string& kind, const std::string& message, int exit_code) {
  Json j = base("error");
  j["error"] = kind;
  j["message"] = message;
  j["exit_code"] = exit_code;
  emit(out_, j);
}

void RecordWriter::summary(const std::string& command, bool passed, std::size_t checks, std::size_t failed) {
  Json j = base("summary");
  j["command"] = command;
  j["passed"] = passed;
  j["checks"] = checks;
  j["failed"] = failed;
  emit(out_, j);
}

}  // namespace toeplitz_forge::cli
