#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace neurolex {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace jsonl {

// Calls `fn(record, line_number)` for every non-blank line. Parse failures
// and exceptions thrown by `fn` are rethrown as DataError naming the file
// and 1-based line number.
void for_each(const std::filesystem::path& path,
              const std::function<void(const Json&, std::size_t)>& fn);

std::vector<Json> read_all(const std::filesystem::path& path);

// Line-oriented writer: one compact record per line, LF endings.
class Writer {
 public:
  explicit Writer(const std::filesystem::path& path);

  template <typename J>
  void write(const J& record) {
    out_ << record.dump() << '\n';
  }

  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

template <typename J>
void write_all(const std::filesystem::path& path, const std::vector<J>& records) {
  Writer w(path);
  for (const auto& r : records) w.write(r);
  w.close();
}

}  // namespace jsonl

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Field accessors raising DataError with the field name.
const Json& require_field(const Json& obj, const char* key);
std::string require_string(const Json& obj, const char* key);

}  // namespace neurolex
