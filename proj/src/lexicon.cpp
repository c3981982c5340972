#include "neurolex/lexicon.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "neurolex/corpus.hpp"
#include "neurolex/error.hpp"
#include "neurolex/text.hpp"

#ifndef NEUROLEX_DATA_DIR
#define NEUROLEX_DATA_DIR "data"
#endif

namespace neurolex::lexicon {

namespace {

constexpr std::pair<TermCategory, std::string_view> kCategoryNames[] = {
    {TermCategory::kLaterality, "LATERALITY"},   {TermCategory::kLocalization, "LOCALIZATION"},
    {TermCategory::kPattern, "PATTERN"},         {TermCategory::kFrequency, "FREQUENCY"},
    {TermCategory::kNegationCue, "NEGATION_CUE"}, {TermCategory::kGeneral, "GENERAL"},
};

bool boundary_before(std::string_view text, std::size_t pos) {
  if (pos == 0 || pos >= text.size()) return true;
  return !text::is_word_byte(static_cast<unsigned char>(text[pos - 1])) ||
         !text::is_word_byte(static_cast<unsigned char>(text[pos]));
}

bool boundary_after(std::string_view text, std::size_t end) {
  if (end == 0 || end >= text.size()) return true;
  return !text::is_word_byte(static_cast<unsigned char>(text[end])) ||
         !text::is_word_byte(static_cast<unsigned char>(text[end - 1]));
}

}  // namespace

std::string_view to_string(TermCategory c) {
  for (const auto& [k, name] : kCategoryNames) {
    if (k == c) return name;
  }
  return "GENERAL";
}

TermCategory parse_category(std::string_view name) {
  const std::string upper = text::to_upper(text::trim(name));
  for (const auto& [k, n] : kCategoryNames) {
    if (n == upper) return k;
  }
  throw DataError("unknown term category \"" + std::string(name) + "\"");
}

std::uint32_t SurfaceMatcher::child(std::uint32_t node, unsigned char byte) const {
  auto it = edges_.find((static_cast<std::uint64_t>(node) << 8) | byte);
  return it == edges_.end() ? 0 : it->second;
}

void SurfaceMatcher::add(std::string_view surface, std::size_t value) {
  if (surface.empty()) return;
  std::uint32_t node = 0;
  for (unsigned char c : surface) {
    const std::uint64_t key = (static_cast<std::uint64_t>(node) << 8) | c;
    auto it = edges_.find(key);
    if (it == edges_.end()) {
      const auto next = static_cast<std::uint32_t>(terminal_.size());
      terminal_.push_back(-1);
      edges_.emplace(key, next);
      node = next;
    } else {
      node = it->second;
    }
  }
  if (terminal_[node] < 0) terminal_[node] = static_cast<std::int64_t>(value);
}

std::vector<SurfaceMatcher::Hit> SurfaceMatcher::find_all(std::string_view text) const {
  std::vector<Hit> hits;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (!boundary_before(text, pos)) {
      ++pos;
      continue;
    }
    std::uint32_t node = 0;
    std::size_t best_len = 0;
    std::int64_t best_value = -1;
    for (std::size_t i = pos; i < text.size(); ++i) {
      node = child(node, static_cast<unsigned char>(text::ascii_lower(text[i])));
      if (node == 0) break;
      if (terminal_[node] >= 0 && boundary_after(text, i + 1)) {
        best_len = i + 1 - pos;
        best_value = terminal_[node];
      }
    }
    if (best_value >= 0) {
      hits.push_back({pos, best_len, static_cast<std::size_t>(best_value)});
      pos += best_len;
    } else {
      ++pos;
    }
  }
  return hits;
}

std::string normalize_surface(std::string_view s) {
  return text::to_lower(text::collapse_spaces(corpus::normalize_text(s)));
}

Lexicon::Lexicon(std::vector<TermEntry> entries) : entries_(std::move(entries)) {
  for (EntryId id = 0; id < entries_.size(); ++id) {
    TermEntry& e = entries_[id];
    e.canonical = std::string(text::trim(e.canonical));
    if (e.canonical.empty()) throw DataError("lexicon entry with empty canonical form");
    std::vector<std::string> surfaces;
    surfaces.push_back(normalize_surface(e.canonical));
    for (const std::string& s : e.surfaces) {
      std::string n = normalize_surface(s);
      if (n.empty()) throw DataError("empty surface in lexicon entry \"" + e.canonical + "\"");
      if (std::find(surfaces.begin(), surfaces.end(), n) == surfaces.end()) {
        surfaces.push_back(std::move(n));
      }
    }
    e.surfaces = std::move(surfaces);
    for (const std::string& s : e.surfaces) {
      if (surface_index_.emplace(s, id).second) matcher_.add(s, id);
    }
  }
}

std::optional<EntryId> Lexicon::lookup(std::string_view surface) const {
  auto it = surface_index_.find(normalize_surface(surface));
  if (it == surface_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> Lexicon::canonicalize(std::string_view value) const {
  if (auto id = lookup(value)) return entries_[*id].canonical;
  return std::nullopt;
}

std::filesystem::path default_lexicon_path() {
  return std::filesystem::path(NEUROLEX_DATA_DIR) / "lexicon" / "starter_lexicon.jsonl";
}

Lexicon parse_lexicon(std::string_view content, bool tsv, const std::string& origin) {
  std::vector<TermEntry> entries;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  for (const std::string& raw : text::split(content, '\n')) {
    ++line_no;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    TermEntry e;
    try {
      if (tsv) {
        const std::vector<std::string> cols = text::split(line, '\t');
        if (cols.size() < 3) throw DataError("expected 4 tab-separated columns");
        if (text::to_lower(cols[2]) == "category") continue;  // header
        e.canonical = cols[0];
        for (const std::string& s : text::split(cols[1], '|')) {
          if (!text::trim(s).empty()) e.surfaces.push_back(s);
        }
        e.category = parse_category(cols[2]);
        if (cols.size() > 3 && !text::trim(cols[3]).empty()) {
          e.definition = std::string(text::trim(cols[3]));
        }
      } else {
        const Json j = Json::parse(line);
        e.canonical = require_string(j, "canonical");
        for (const Json& s : require_field(j, "surfaces")) e.surfaces.push_back(s.get<std::string>());
        e.category = parse_category(require_string(j, "category"));
        if (j.contains("definition") && j.at("definition").is_string()) {
          e.definition = j.at("definition").get<std::string>();
        }
      }
    } catch (const DataError& err) {
      throw DataError(where + err.what());
    } catch (const Json::exception& err) {
      throw DataError(where + err.what());
    }
    entries.push_back(std::move(e));
    lines.push_back(line_no);
  }

  Lexicon lex(std::move(entries));
  const ValidationReport report = validate_lexicon(lex);
  if (!report.duplicates.empty()) {
    const DuplicateSurface& d = report.duplicates.front();
    throw DataError(origin + ": duplicate surface \"" + d.surface + "\" in entries \"" +
                    lex.entry(d.first).canonical + "\" (line " + std::to_string(lines[d.first]) +
                    ") and \"" + lex.entry(d.second).canonical + "\" (line " +
                    std::to_string(lines[d.second]) + ")");
  }
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  const std::string content = read_file(path);
  const bool tsv = path.extension() == ".tsv";
  return parse_lexicon(content, tsv, path.string());
}

std::vector<TermMatch> find_terms(std::string_view text, const Lexicon& lexicon) {
  std::vector<TermMatch> out;
  for (const auto& hit : lexicon.matcher().find_all(text)) {
    out.push_back({hit.offset, hit.length, hit.value,
                   text::to_lower(text.substr(hit.offset, hit.length))});
  }
  return out;
}

ValidationReport validate_lexicon(const Lexicon& lexicon) {
  ValidationReport report;
  std::map<std::string, EntryId> owner;
  std::map<TermCategory, std::size_t> per_category;
  for (EntryId id = 0; id < lexicon.size(); ++id) {
    const TermEntry& e = lexicon.entry(id);
    ++per_category[e.category];
    if (!e.definition || text::trim(*e.definition).empty()) report.missing_definitions.push_back(id);
    for (const std::string& s : e.surfaces) {
      auto [it, inserted] = owner.emplace(s, id);
      if (!inserted && it->second != id) report.duplicates.push_back({s, it->second, id});
    }
  }
  for (TermCategory c : kRequiredCategories) {
    if (per_category[c] == 0) report.empty_categories.push_back(c);
  }
  return report;
}

std::string ValidationReport::to_text(const Lexicon& lexicon) const {
  std::ostringstream os;
  os << "entries: " << lexicon.size() << "\n";
  os << "duplicate surfaces: " << duplicates.size() << "\n";
  for (const auto& d : duplicates) {
    os << "  \"" << d.surface << "\" in \"" << lexicon.entry(d.first).canonical << "\" and \""
       << lexicon.entry(d.second).canonical << "\"\n";
  }
  os << "empty categories: " << empty_categories.size() << "\n";
  for (TermCategory c : empty_categories) os << "  " << to_string(c) << "\n";
  os << "entries without definition: " << missing_definitions.size() << "\n";
  return os.str();
}

Json ValidationReport::to_json(const Lexicon& lexicon) const {
  Json dups = Json::array();
  for (const auto& d : duplicates) {
    dups.push_back({{"surface", d.surface},
                    {"first", lexicon.entry(d.first).canonical},
                    {"second", lexicon.entry(d.second).canonical}});
  }
  Json empty = Json::array();
  for (TermCategory c : empty_categories) empty.push_back(to_string(c));
  Json missing = Json::array();
  for (EntryId id : missing_definitions) missing.push_back(lexicon.entry(id).canonical);
  return {{"entries", lexicon.size()},
          {"duplicates", dups},
          {"empty_categories", empty},
          {"missing_definitions", missing}};
}

Json to_json(const TermEntry& entry) {
  Json j = {{"canonical", entry.canonical},
            {"surfaces", entry.surfaces},
            {"category", to_string(entry.category)}};
  if (entry.definition) j["definition"] = *entry.definition;
  return j;
}

}  // namespace neurolex::lexicon
