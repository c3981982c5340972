#include "neurolex/jsonl.hpp"

#include <sstream>

#include "neurolex/error.hpp"

namespace neurolex {

namespace jsonl {

void for_each(const std::filesystem::path& path,
              const std::function<void(const Json&, std::size_t)>& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": invalid JSON: " + e.what());
    }
    try {
      fn(record, line_no);
    } catch (const DataError& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    } catch (const Json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": schema error: " + e.what());
    }
  }
}

std::vector<Json> read_all(const std::filesystem::path& path) {
  std::vector<Json> out;
  for_each(path, [&](const Json& j, std::size_t) { out.push_back(j); });
  return out;
}

Writer::Writer(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw DataError("cannot write " + path.string());
}

void Writer::close() {
  out_.flush();
  if (!out_) throw DataError("write failed: " + path_.string());
  out_.close();
}

}  // namespace jsonl

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

const Json& require_field(const Json& obj, const char* key) {
  if (!obj.is_object()) throw DataError("record is not a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) throw DataError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::string require_string(const Json& obj, const char* key) {
  const Json& v = require_field(obj, key);
  if (!v.is_string()) throw DataError(std::string("field \"") + key + "\" must be a string");
  return v.get<std::string>();
}

}  // namespace neurolex
