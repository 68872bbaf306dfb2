#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "rsel/errors.hpp"
#include "rsel/harness.hpp"

namespace rsel {
namespace {

constexpr std::string_view kCurveHeader = "policy,budget,pcs,eoc,design,alloc_frac";
constexpr std::string_view kTableHeader = "policy,target_pcs,budget";
constexpr std::string_view kNotReached = "not reached";

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_number(const std::string& s, const std::filesystem::path& path, std::size_t line) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

PolicyKind parse_policy_field(const std::string& s, const std::filesystem::path& path,
                              std::size_t line) {
  const auto k = parse_policy(s);
  if (!k) throw IoError(path.string() + ":" + std::to_string(line) + ": unknown policy '" + s + "'");
  return *k;
}

// Lines after the expected header.
std::vector<std::string> body_lines(const std::filesystem::path& path, std::string_view header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::string line;
  if (!std::getline(in, line) || line != header)
    throw IoError("'" + path.string() + "' does not start with header '" + std::string(header) + "'");
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

}  // namespace

void write_csv(std::span<const CurveRow> rows, const std::filesystem::path& path) {
  std::vector<CurveRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(), [](const CurveRow& a, const CurveRow& b) {
    const auto pa = to_string(a.policy), pb = to_string(b.policy);
    if (pa != pb) return pa < pb;
    if (a.budget != b.budget) return a.budget < b.budget;
    return a.design.value_or(0) < b.design.value_or(0);
  });
  auto out = open_out(path);
  out << kCurveHeader << '\n';
  for (const auto& r : sorted) {
    out << to_string(r.policy) << ',' << r.budget << ',' << fmt_double(r.pcs) << ','
        << fmt_double(r.eoc) << ',';
    if (r.design) out << *r.design;
    out << ',';
    if (r.alloc_frac) out << fmt_double(*r.alloc_frac);
    out << '\n';
  }
  finish(out, path);
}

void write_csv(std::span<const TargetBudgetRow> rows, const std::filesystem::path& path) {
  std::vector<TargetBudgetRow> sorted(rows.begin(), rows.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TargetBudgetRow& a, const TargetBudgetRow& b) {
                     const auto pa = to_string(a.policy), pb = to_string(b.policy);
                     if (pa != pb) return pa < pb;
                     return a.target_pcs < b.target_pcs;
                   });
  auto out = open_out(path);
  out << kTableHeader << '\n';
  for (const auto& r : sorted) {
    out << to_string(r.policy) << ',' << fmt_double(r.target_pcs) << ',';
    if (r.budget) {
      out << *r.budget;
    } else {
      out << kNotReached;
    }
    out << '\n';
  }
  finish(out, path);
}

std::vector<CurveRow> read_curve_csv(const std::filesystem::path& path) {
  std::vector<CurveRow> rows;
  std::size_t line_no = 1;
  for (const auto& line : body_lines(path, kCurveHeader)) {
    ++line_no;
    const auto f = split(line);
    if (f.size() != 6)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 6 fields");
    CurveRow r;
    r.policy = parse_policy_field(f[0], path, line_no);
    r.budget = parse_number<std::int64_t>(f[1], path, line_no);
    r.pcs = parse_number<double>(f[2], path, line_no);
    r.eoc = parse_number<double>(f[3], path, line_no);
    if (!f[4].empty()) r.design = parse_number<std::size_t>(f[4], path, line_no);
    if (!f[5].empty()) r.alloc_frac = parse_number<double>(f[5], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

std::vector<TargetBudgetRow> read_table_csv(const std::filesystem::path& path) {
  std::vector<TargetBudgetRow> rows;
  std::size_t line_no = 1;
  for (const auto& line : body_lines(path, kTableHeader)) {
    ++line_no;
    const auto f = split(line);
    if (f.size() != 3)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    TargetBudgetRow r{parse_policy_field(f[0], path, line_no),
                      parse_number<double>(f[1], path, line_no), std::nullopt};
    if (f[2] != kNotReached) r.budget = parse_number<std::int64_t>(f[2], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace rsel
