#pragma once

#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infodemic::csv {

using Row = std::vector<std::string>;

// Incremental RFC-4180 reader: quoted fields may contain commas, doubled
// quotes and line breaks. CRLF and LF line endings are both accepted.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next record, or nullopt at end of input. Throws DataError on an
  // unterminated quoted field.
  std::optional<Row> next();

  // 1-based physical line where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Quotes a field only when it contains a delimiter, quote or line break.
std::string escape(std::string_view field);

std::string join(const Row& fields);

}  // namespace infodemic::csv
