#include "neurolex/corpus.hpp"

#include <algorithm>
#include <regex>

#include "neurolex/error.hpp"
#include "neurolex/text.hpp"

namespace neurolex::corpus {

namespace {

constexpr std::pair<SectionKind, std::string_view> kKindNames[] = {
    {SectionKind::kFindings, "FINDINGS"},       {SectionKind::kImpression, "IMPRESSION"},
    {SectionKind::kHistory, "HISTORY"},         {SectionKind::kMedications, "MEDICATIONS"},
    {SectionKind::kTechnique, "TECHNIQUE"},     {SectionKind::kOther, "OTHER"},
};

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one code point from valid UTF-8.
char32_t decode_at(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = b0 >= 0xF0 ? 4 : b0 >= 0xE0 ? 3 : 2;
  char32_t cp = b0 & (0x3F >> (len - 1));
  for (int k = 1; k < len; ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  }
  i += len;
  return cp;
}

// Maps typographic punctuation and exotic spaces to ASCII. Newlines are
// kept (CR and CRLF become LF); other control characters become spaces.
std::string map_characters(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t cp = decode_at(s, i);
    switch (cp) {
      case U'\r':
        out.push_back('\n');
        if (i < s.size() && s[i] == '\n') ++i;
        continue;
      case U'\n':
        out.push_back('\n');
        continue;
      case 0x2018: case 0x2019: case 0x201A: case 0x201B: case 0x2032:
        out.push_back('\'');
        continue;
      case 0x201C: case 0x201D: case 0x201E: case 0x201F: case 0x2033:
        out.push_back('"');
        continue;
      case 0x2010: case 0x2011: case 0x2012: case 0x2013: case 0x2014:
      case 0x2015: case 0x2212:
        out.push_back('-');
        continue;
      case 0x2026:
        out.append("...");
        continue;
      case 0x200B: case 0x200C: case 0x200D: case 0x2060: case 0xFEFF:
        continue;
      default:
        break;
    }
    if (cp < 0x20 || cp == 0x7F || cp == 0x85 || cp == 0xA0 ||
        (cp >= 0x2000 && cp <= 0x200A) || cp == 0x2028 || cp == 0x2029 ||
        cp == 0x202F || cp == 0x205F || cp == 0x3000 || cp == 0x1680) {
      // Tabs and other separators all collapse later.
      out.push_back(cp == 0x2028 || cp == 0x2029 ? '\n' : ' ');
      continue;
    }
    append_utf8(out, cp);
  }
  return out;
}

// Character-level canonicalisation shared by normalize_text and the
// segmenter: UTF-8 repair, punctuation mapping, NFC.
NormalizeResult canonical_characters(std::string_view raw) {
  text::Utf8Repair repaired = text::repair_utf8(raw);
  std::string mapped = map_characters(repaired.text);
  mapped = text::to_nfc(mapped);
  // NFC can surface singleton decompositions of mapped characters.
  mapped = map_characters(mapped);
  return {std::move(mapped), repaired.invalid_sequences};
}

bool is_closing_punct(char c) {
  return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?';
}

// Whitespace collapse plus removal of spaces before closing punctuation.
std::string tidy_line(std::string_view line) {
  const std::string collapsed = text::collapse_spaces(line);
  std::string out;
  out.reserve(collapsed.size());
  for (std::size_t i = 0; i < collapsed.size(); ++i) {
    if (collapsed[i] == ' ' && i + 1 < collapsed.size() &&
        is_closing_punct(collapsed[i + 1])) {
      continue;
    }
    out.push_back(collapsed[i]);
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  return text::split(s, '\n');
}

// Joins already-tidied lines into paragraphs: blank lines delimit.
std::string assemble_paragraphs(const std::vector<std::string>& lines) {
  std::vector<std::string> paragraphs;
  std::string current;
  for (const auto& raw_line : lines) {
    const std::string line = text::collapse_spaces(raw_line);
    if (line.empty()) {
      if (!current.empty()) paragraphs.push_back(tidy_line(current));
      current.clear();
      continue;
    }
    if (!current.empty()) current.push_back(' ');
    current.append(line);
  }
  if (!current.empty()) paragraphs.push_back(tidy_line(current));
  return text::join(paragraphs, "\n\n");
}

std::string upper_heading_key(std::string_view heading) {
  return text::to_upper(text::collapse_spaces(heading));
}

}  // namespace

std::string_view to_string(SectionKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "OTHER";
}

SectionKind parse_section_kind(std::string_view name) {
  const std::string upper = text::to_upper(text::trim(name));
  for (const auto& [k, n] : kKindNames) {
    if (n == upper) return k;
  }
  throw DataError("unknown section kind \"" + std::string(name) + "\"");
}

std::string Paragraph::id() const {
  return report_id + ":" + std::string(to_string(section)) + ":" + std::to_string(index);
}

NormalizeResult normalize_text_checked(std::string_view raw) {
  NormalizeResult chars = canonical_characters(raw);
  chars.text = assemble_paragraphs(split_lines(chars.text));
  return chars;
}

std::string normalize_text(std::string_view raw) {
  return normalize_text_checked(raw).text;
}

ScrubResult scrub_phi(std::string_view input) {
  static const std::string kMonths =
      "(?:Jan(?:uary)?|Feb(?:ruary)?|Mar(?:ch)?|Apr(?:il)?|May|June?|July?|"
      "Aug(?:ust)?|Sep(?:t(?:ember)?)?|Oct(?:ober)?|Nov(?:ember)?|Dec(?:ember)?)";
  static const std::vector<std::regex> kDates = {
      std::regex(R"(\b\d{1,2}/\d{1,2}/(?:\d{4}|\d{2})\b)"),
      std::regex(R"(\b\d{1,2}-\d{1,2}-(?:\d{4}|\d{2})\b)"),
      std::regex(R"(\b\d{4}-\d{1,2}-\d{1,2}\b)"),
      std::regex(R"(\b\d{1,2}\.\d{1,2}\.\d{4}\b)"),
      std::regex("\\b" + kMonths + R"(\.? \d{1,2}(?:st|nd|rd|th)?,? \d{4}\b)"),
      std::regex(R"(\b\d{1,2}(?:st|nd|rd|th)? )" + kMonths + R"(\.?,? \d{4}\b)"),
  };
  static const std::regex kId(
      R"(\b(?:MRN|MR|Medical Record(?: Number)?|Patient ID|ID|Acct|Account|Accession)(?: ?(?:#|No\.?|Number))?:? ?#? ?\d{6,}\b)",
      std::regex::icase);
  static const std::regex kName(
      R"(\b(?:Dr|Mr|Mrs|Ms|Prof)\.? [A-Z][A-Za-z'-]+(?: [A-Z][A-Za-z'-]+)?)");

  ScrubResult out{std::string(input), 0};
  const auto apply = [&](const std::regex& re, std::string_view placeholder) {
    std::string result;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(out.text.begin(), out.text.end(), re);
         it != std::sregex_iterator(); ++it) {
      result.append(out.text, last, static_cast<std::size_t>(it->position()) - last);
      result.append(placeholder);
      last = static_cast<std::size_t>(it->position() + it->length());
      ++out.redactions;
    }
    result.append(out.text, last, std::string::npos);
    out.text = std::move(result);
  };
  for (const auto& re : kDates) apply(re, kDatePlaceholder);
  apply(kId, kIdPlaceholder);
  apply(kName, kNamePlaceholder);
  return out;
}

SegmentConfig SegmentConfig::defaults() {
  SegmentConfig c;
  const std::pair<const char*, SectionKind> table[] = {
      {"FINDINGS", SectionKind::kFindings},
      {"EEG FINDINGS", SectionKind::kFindings},
      {"DESCRIPTION", SectionKind::kFindings},
      {"DESCRIPTION OF THE RECORD", SectionKind::kFindings},
      {"DESCRIPTION OF RECORD", SectionKind::kFindings},
      {"RESULTS", SectionKind::kFindings},
      {"IMPRESSION", SectionKind::kImpression},
      {"INTERPRETATION", SectionKind::kImpression},
      {"CONCLUSION", SectionKind::kImpression},
      {"CONCLUSIONS", SectionKind::kImpression},
      {"SUMMARY", SectionKind::kImpression},
      {"CLINICAL CORRELATION", SectionKind::kImpression},
      {"HISTORY", SectionKind::kHistory},
      {"CLINICAL HISTORY", SectionKind::kHistory},
      {"INDICATION", SectionKind::kHistory},
      {"REASON FOR STUDY", SectionKind::kHistory},
      {"REASON FOR REFERRAL", SectionKind::kHistory},
      {"MEDICATIONS", SectionKind::kMedications},
      {"MEDICATION", SectionKind::kMedications},
      {"CURRENT MEDICATIONS", SectionKind::kMedications},
      {"TECHNIQUE", SectionKind::kTechnique},
      {"METHODS", SectionKind::kTechnique},
      {"RECORDING TECHNIQUE", SectionKind::kTechnique},
  };
  for (const auto& [heading, kind] : table) c.headings.emplace(heading, kind);
  c.dropped = {SectionKind::kHistory, SectionKind::kMedications};
  return c;
}

std::optional<std::pair<std::string, std::string>> match_heading(std::string_view line) {
  // ^[A-Z][A-Z /&-]{2,40}:
  if (line.empty() || line[0] < 'A' || line[0] > 'Z') return std::nullopt;
  std::size_t k = 1;
  while (k < line.size() && k <= 41) {
    const char c = line[k];
    if (c == ':') break;
    if (!((c >= 'A' && c <= 'Z') || c == ' ' || c == '/' || c == '&' || c == '-')) {
      return std::nullopt;
    }
    ++k;
  }
  if (k >= line.size() || line[k] != ':' || k < 3) return std::nullopt;
  return std::make_pair(std::string(text::trim(line.substr(0, k))),
                        std::string(text::trim(line.substr(k + 1))));
}

SegmentResult segment_report(const RawReport& raw, const SegmentConfig& config) {
  if (raw.id.empty()) throw DataError("report id must be non-empty");
  if (text::trim(raw.text).empty()) throw DataError("report " + raw.id + " has empty text");

  const NormalizeResult chars = canonical_characters(raw.text);
  SegmentResult result;
  result.invalid_sequences = chars.invalid_sequences;
  result.report.id = raw.id;

  struct Pending {
    SectionKind kind;
    std::string heading;  // empty for the preamble
    std::vector<std::string> lines;
    std::size_t redactions = 0;
  };
  std::vector<Pending> blocks;
  blocks.push_back({SectionKind::kOther, "", {}, 0});

  for (const std::string& line_raw : split_lines(chars.text)) {
    std::string line = tidy_line(line_raw);
    std::size_t redactions = 0;
    if (config.scrub) {
      ScrubResult s = scrub_phi(line);
      line = std::move(s.text);
      redactions = s.redactions;
    }
    if (auto heading = match_heading(line)) {
      const std::string key = upper_heading_key(heading->first);
      auto it = config.headings.find(key);
      const SectionKind kind = it == config.headings.end() ? SectionKind::kOther : it->second;
      blocks.push_back({kind, heading->first, {}, redactions});
      if (!heading->second.empty()) blocks.back().lines.push_back(heading->second);
      continue;
    }
    blocks.back().lines.push_back(std::move(line));
    blocks.back().redactions += redactions;
  }

  for (std::size_t b = 0; b < blocks.size(); ++b) {
    Pending& block = blocks[b];
    std::string body = assemble_paragraphs(block.lines);
    const bool preamble = b == 0;
    if (preamble && body.empty()) continue;
    if (!preamble && config.dropped.count(block.kind)) {
      result.dropped.push_back({block.kind, block.heading, std::move(body)});
      continue;
    }
    result.report.sections.push_back({block.kind, std::move(body)});
    result.report.redaction_count += block.redactions;
    if (!preamble) result.headings.push_back(block.heading);
  }
  if (result.report.sections.empty()) {
    // Every section was dropped; keep the invariant of a non-empty list.
    result.report.sections.push_back({SectionKind::kOther, ""});
  }
  return result;
}

std::vector<Paragraph> split_paragraphs(const Report& report) {
  std::vector<Paragraph> out;
  std::map<SectionKind, std::size_t> next_index;
  for (const Section& section : report.sections) {
    std::size_t start = 0;
    const std::string& t = section.text;
    while (start <= t.size()) {
      std::size_t end = t.find("\n\n", start);
      if (end == std::string::npos) end = t.size();
      std::string piece = text::collapse_spaces(std::string_view(t).substr(start, end - start));
      if (!piece.empty()) {
        out.push_back({report.id, section.kind, next_index[section.kind]++, std::move(piece)});
      }
      start = end + 2;
    }
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view paragraph) {
  static const std::set<std::string> kAbbrev = {
      "dr", "mr", "mrs", "ms", "prof", "e.g", "i.e", "vs", "approx", "no", "fig", "st", "etc"};
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < paragraph.size(); ++i) {
    const char c = paragraph[i];
    if (c != '.' && c != '!' && c != '?') continue;
    const bool at_end = i + 1 == paragraph.size();
    if (!at_end) {
      if (paragraph[i + 1] != ' ' || i + 2 >= paragraph.size()) continue;
      const char next = paragraph[i + 2];
      const bool opener = (next >= 'A' && next <= 'Z') || (next >= '0' && next <= '9') ||
                          next == '[' || next == '"' || next == '(';
      if (!opener) continue;
      if (c == '.') {
        std::size_t w = i;
        while (w > start && paragraph[w - 1] != ' ') --w;
        const std::string word = text::to_lower(paragraph.substr(w, i - w));
        if (kAbbrev.count(word)) continue;
      }
    }
    const std::string_view sentence = text::trim(paragraph.substr(start, i + 1 - start));
    if (!sentence.empty()) out.emplace_back(sentence);
    start = i + 1;
  }
  const std::string_view tail = text::trim(paragraph.substr(std::min(start, paragraph.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

Json to_json(const Report& report) {
  Json sections = Json::array();
  for (const Section& s : report.sections) {
    sections.push_back({{"kind", to_string(s.kind)}, {"text", s.text}});
  }
  return {{"id", report.id}, {"sections", sections}, {"redactions", report.redaction_count}};
}

Report report_from_json(const Json& j) {
  Report r;
  r.id = require_string(j, "id");
  for (const Json& s : require_field(j, "sections")) {
    r.sections.push_back({parse_section_kind(require_string(s, "kind")), require_string(s, "text")});
  }
  if (j.contains("redactions")) r.redaction_count = j.at("redactions").get<std::size_t>();
  return r;
}

Json to_json(const Paragraph& p) {
  return {{"report_id", p.report_id},
          {"section", to_string(p.section)},
          {"index", p.index},
          {"text", p.text}};
}

Paragraph paragraph_from_json(const Json& j) {
  Paragraph p;
  p.report_id = require_string(j, "report_id");
  p.section = parse_section_kind(require_string(j, "section"));
  p.index = require_field(j, "index").get<std::size_t>();
  p.text = require_string(j, "text");
  if (p.text.empty()) throw DataError("paragraph " + p.id() + " has empty text");
  return p;
}

std::vector<RawReport> read_raw_reports(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  std::vector<RawReport> out;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) out.push_back({f.stem().string(), read_file(f), {}});
  } else if (path.extension() == ".jsonl") {
    jsonl::for_each(path, [&](const Json& j, std::size_t) {
      RawReport r{require_string(j, "id"), require_string(j, "text"), {}};
      if (j.contains("meta") && j.at("meta").is_object()) {
        for (const auto& [k, v] : j.at("meta").items()) {
          r.source_meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
        }
      }
      out.push_back(std::move(r));
    });
  } else {
    out.push_back({path.stem().string(), read_file(path), {}});
  }
  std::set<std::string> seen;
  for (const auto& r : out) {
    if (r.id.empty()) throw DataError("report with empty id in " + path.string());
    if (!seen.insert(r.id).second) throw DataError("duplicate report id " + r.id);
  }
  return out;
}

std::vector<Paragraph> read_paragraphs(const std::filesystem::path& path) {
  std::vector<Paragraph> out;
  jsonl::for_each(path, [&](const Json& j, std::size_t) { out.push_back(paragraph_from_json(j)); });
  return out;
}

}  // namespace neurolex::corpus
