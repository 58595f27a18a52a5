#include "infodemic/csv.hpp"

#include "infodemic/errors.hpp"

namespace infodemic::csv {

std::optional<Row> Reader::next() {
  int c = in_.get();
  if (c == EOF) return std::nullopt;
  record_line_ = line_;
  Row row;
  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  for (;; c = in_.get()) {
    if (quoted) {
      if (c == EOF) throw DataError("unterminated quoted field starting on line " + std::to_string(record_line_));
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(static_cast<char>(c));
      }
      continue;
    }
    if (c == EOF || c == '\n') {
      if (c == '\n') ++line_;
      if (!field.empty() && field.back() == '\r' && !field_started_quoted) field.pop_back();
      row.push_back(std::move(field));
      return row;
    }
    if (c == '\r' && in_.peek() == '\n') continue;
    if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else if (c == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else {
      field.push_back(static_cast<char>(c));
    }
  }
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string join(const Row& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace infodemic::csv
