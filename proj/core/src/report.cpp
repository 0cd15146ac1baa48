#include "sausage/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "sausage/error.hpp"

namespace sausage {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string witness_hash(const Eigen::VectorXd& witness) {
  Eigen::Index arg = 0;
  if (witness.size() > 0) witness.cwiseAbs().maxCoeff(&arg);
  const double sign = witness.size() > 0 && witness(arg) < 0.0 ? -1.0 : 1.0;
  std::string text;
  char buffer[32];
  for (Eigen::Index i = 0; i < witness.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.12g,", sign * witness(i) + 0.0);
    text += buffer;
  }
  return hex64(fnv1a(text));
}

std::string domain_hash(std::span<const Vertex> domain) {
  std::string text;
  for (Vertex v : domain) text += std::to_string(v) + ",";
  return hex64(fnv1a(text));
}

CsvTable::CsvTable(std::vector<std::pair<std::string, Type>> columns) : columns_(std::move(columns)) {}

CsvTable& CsvTable::row() {
  if (!rows_.empty() && rows_.back().size() != columns_.size()) {
    throw InvalidArgument("CsvTable: previous row is incomplete");
  }
  rows_.emplace_back();
  return *this;
}

void CsvTable::push(std::string text, Type type) {
  if (rows_.empty()) throw InvalidArgument("CsvTable: cell before row()");
  auto& current = rows_.back();
  if (current.size() >= columns_.size()) throw InvalidArgument("CsvTable: too many cells");
  const Type expected = columns_[current.size()].second;
  if (expected != type && !(expected == Type::kFloat && type == Type::kInt)) {
    throw InvalidArgument("CsvTable: wrong type for column " + columns_[current.size()].first);
  }
  current.push_back(std::move(text));
}

CsvTable& CsvTable::cell(double value) {
  push(format_number(value), Type::kFloat);
  return *this;
}

CsvTable& CsvTable::cell(long long value) {
  push(std::to_string(value), Type::kInt);
  return *this;
}

CsvTable& CsvTable::cell(bool value) {
  push(value ? "true" : "false", Type::kBool);
  return *this;
}

CsvTable& CsvTable::cell(const std::string& value) {
  std::string quoted = value;
  if (value.find_first_of(",\"\n") != std::string::npos) {
    quoted = "\"";
    for (char c : value) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    quoted += '"';
  }
  push(std::move(quoted), Type::kString);
  return *this;
}

void CsvTable::write(std::ostream& out) const {
  static const char* names[] = {"int", "float", "string", "bool"};
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    out << (i ? "," : "") << columns_[i].first << ':' << names[static_cast<int>(columns_[i].second)];
  }
  out << '\n';
  for (const auto& r : rows_) {
    if (r.size() != columns_.size()) throw InvalidArgument("CsvTable: incomplete row");
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

std::string CsvTable::str() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void write_dense_grid(std::ostream& out, const Eigen::MatrixXd& grid) {
  if (grid.rows() > 200) throw ResourceLimitError("dense grid export is limited to 200 vertices");
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) out << (j ? " " : "") << format_number(grid(i, j));
    out << '\n';
  }
}

}  // namespace sausage
