#include "exotest/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "exotest/error.hpp"

namespace exotest {
namespace {

constexpr std::array<std::string_view, 5> kColumns = {"y", "delta", "x", "w", "z"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

void check_observation(const Observation& o) {
  if (!std::isfinite(o.y) || !(o.y > 0.0))
    throw std::invalid_argument("follow-up time must be positive and finite");
  if (o.delta != 0 && o.delta != 1) throw std::invalid_argument("delta must be 0 or 1");
  if (o.x < 0 || o.w < 0 || o.z < 0)
    throw std::invalid_argument("level codes must be non-negative");
}

std::vector<Level> distinct(const std::vector<Observation>& obs, Level Observation::*field) {
  std::set<Level> levels;
  for (const auto& o : obs) levels.insert(o.*field);
  return {levels.begin(), levels.end()};
}

}  // namespace

std::string to_string(const Cell& cell) {
  auto part = [](Level v) { return v == kAnyLevel ? std::string("*") : std::to_string(v); };
  return "(x=" + part(cell.x) + ",w=" + part(cell.w) + ",z=" + part(cell.z) + ")";
}

Cell cell_of(const Observation& obs, Scheme scheme) {
  switch (scheme) {
    case Scheme::kXZ: return {obs.x, kAnyLevel, obs.z};
    case Scheme::kXW: return {obs.x, obs.w, kAnyLevel};
    case Scheme::kXWZ: return {obs.x, obs.w, obs.z};
  }
  return {};
}

Dataset::Dataset(std::vector<Observation> observations) : observations_(std::move(observations)) {
  if (observations_.empty()) throw std::invalid_argument("dataset has no observations");
  for (const auto& o : observations_) check_observation(o);
  levels_x_ = distinct(observations_, &Observation::x);
  levels_w_ = distinct(observations_, &Observation::w);
  levels_z_ = distinct(observations_, &Observation::z);
}

double Dataset::censoring_rate() const noexcept {
  std::size_t censored = 0;
  for (const auto& o : observations_) censored += o.delta == 0;
  return static_cast<double>(censored) / static_cast<double>(observations_.size());
}

Dataset parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::vector<Observation> rows;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < kColumns.size() ||
          !std::equal(kColumns.begin(), kColumns.end(), fields.begin()))
        throw ParseError(line_no, "expected header 'y,delta,x,w,z'");
      have_header = true;
      continue;
    }
    if (fields.size() < kColumns.size())
      throw ParseError(line_no, "expected 5 fields, found " + std::to_string(fields.size()));

    Observation o;
    if (!parse_number(fields[0], o.y) || !std::isfinite(o.y))
      throw ParseError(line_no, "follow-up time is not a finite number");
    if (!(o.y > 0.0)) throw ParseError(line_no, "non-positive follow-up time");
    if (!parse_number(fields[1], o.delta) || (o.delta != 0 && o.delta != 1))
      throw ParseError(line_no, "delta must be 0 or 1");
    const std::array<Level*, 3> codes = {&o.x, &o.w, &o.z};
    for (std::size_t k = 0; k < codes.size(); ++k) {
      if (!parse_number(fields[2 + k], *codes[k]) || *codes[k] < 0)
        throw ParseError(line_no, std::string(kColumns[2 + k]) +
                                      " must be a non-negative integer code");
    }
    rows.push_back(o);
  }
  if (!have_header) throw ParseError(0, "empty input");
  if (rows.empty()) throw ParseError(0, "no observations after header");
  return Dataset(std::move(rows));
}

Dataset read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string to_csv(const Dataset& data) {
  std::string out = "y,delta,x,w,z\n";
  for (const auto& o : data.observations()) {
    out += format_double(o.y);
    out += ',' + std::to_string(o.delta) + ',' + std::to_string(o.x) + ',' +
           std::to_string(o.w) + ',' + std::to_string(o.z) + '\n';
  }
  return out;
}

namespace {

std::vector<CellSummary> summarize(const Dataset& data, Scheme scheme) {
  std::map<Cell, std::pair<std::size_t, std::size_t>> tally;  // count, censored
  for (const auto& o : data.observations()) {
    auto& [count, censored] = tally[cell_of(o, scheme)];
    ++count;
    censored += o.delta == 0;
  }
  std::vector<CellSummary> out;
  out.reserve(tally.size());
  for (const auto& [cell, t] : tally)
    out.push_back({cell, t.first, static_cast<double>(t.second) / static_cast<double>(t.first)});
  return out;
}

}  // namespace

CellTable cell_audit(const Dataset& data) { return summarize(data, Scheme::kXWZ); }

std::string to_csv(const CellTable& table) {
  auto code = [](Level v) { return v == kAnyLevel ? std::string("*") : std::to_string(v); };
  std::string out = "x,w,z,count,censoring_rate\n";
  for (const auto& row : table) {
    out += code(row.cell.x) + ',' + code(row.cell.w) + ',' + code(row.cell.z) + ',' +
           std::to_string(row.count) + ',' +
           format_double(row.censoring_rate) + '\n';
  }
  return out;
}

std::vector<CellSummary> min_cell_check(const Dataset& data, std::size_t threshold) {
  std::vector<CellSummary> small;
  for (const Scheme scheme : {Scheme::kXZ, Scheme::kXWZ}) {
    for (const auto& row : summarize(data, scheme))
      if (row.count < threshold) small.push_back(row);
  }
  return small;
}

}  // namespace exotest
