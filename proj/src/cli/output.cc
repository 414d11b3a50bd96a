#include "cli/output.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "json.hpp"

namespace rrt::cli {
namespace {

std::string JsonString(std::string_view s) {
  return nlohmann::json(std::string(s)).dump();
}

std::string JsonValue(const Value& v) {
  if (std::holds_alternative<std::monostate>(v)) return "null";
  if (const auto* s = std::get_if<std::string>(&v)) return JsonString(*s);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* f = std::get_if<Fixed>(&v)) {
    if (!std::isfinite(f->value)) return "null";
  }
  return RenderValue(v);
}

}  // namespace

std::optional<Format> ParseFormat(std::string_view name) {
  if (name == "table") return Format::kTable;
  if (name == "csv") return Format::kCsv;
  if (name == "records") return Format::kRecords;
  return std::nullopt;
}

std::string FormatFixed(double value, int decimals) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::fixed, decimals);
  std::string s(buf.data(), end);
  if (s.front() == '-' &&
      s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

std::string RenderValue(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "none"; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Fixed& f) const {
      return FormatFixed(f.value, f.decimals);
    }
  };
  return std::visit(Visitor{}, v);
}

void Render(const std::vector<Section>& sections, Format format, std::ostream& os) {
  bool first_section = true;
  for (const Section& section : sections) {
    if (format == Format::kRecords) {
      for (const Record& rec : section.records) {
        os << "{\"record\":" << JsonString(section.name);
        for (const auto& [key, value] : rec.fields) {
          os << ',' << JsonString(key) << ':' << JsonValue(value);
        }
        os << "}\n";
      }
      continue;
    }
    if (section.records.empty()) continue;
    if (!first_section) os << '\n';
    first_section = false;

    const auto& keys = section.records.front().fields;
    std::vector<std::vector<std::string>> cells;
    cells.emplace_back();
    for (const auto& kv : keys) cells.back().push_back(kv.first);
    for (const Record& rec : section.records) {
      cells.emplace_back();
      for (const auto& kv : rec.fields) cells.back().push_back(RenderValue(kv.second));
    }

    if (format == Format::kCsv) {
      for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
          if (c) os << ',';
          os << row[c];
        }
        os << '\n';
      }
      continue;
    }

    std::vector<std::size_t> width(keys.size(), 0);
    for (const auto& row : cells) {
      for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
        width[c] = std::max(width[c], row[c].size());
      }
    }
    for (const auto& row : cells) {
      std::string line;
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) line += "  ";
        line += row[c];
        if (c + 1 < row.size() && c < width.size()) {
          line.append(width[c] - row[c].size(), ' ');
        }
      }
      os << line << '\n';
    }
  }
}

}  // namespace rrt::cli
