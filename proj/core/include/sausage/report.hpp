#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sausage/space.hpp"

namespace sausage {

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t value);

/// Shortest round-trip text for a double ("%.17g"; "inf", "-inf", "nan").
std::string format_number(double value);

/// Hash of an eigenfunction witness, after normalising its sign so the
/// largest-magnitude entry is positive and rounding to 12 significant digits.
std::string witness_hash(const Eigen::VectorXd& witness);

/// Hash of a vertex set.
std::string domain_hash(std::span<const Vertex> domain);

/// A CSV table with a typed header `name:type`.
class CsvTable {
 public:
  enum class Type { kInt, kFloat, kString, kBool };

  explicit CsvTable(std::vector<std::pair<std::string, Type>> columns);

  /// Starts a row; cells must follow in column order.
  CsvTable& row();
  CsvTable& cell(double value);
  CsvTable& cell(long long value);
  CsvTable& cell(std::size_t value) { return cell(static_cast<long long>(value)); }
  CsvTable& cell(int value) { return cell(static_cast<long long>(value)); }
  CsvTable& cell(bool value);
  CsvTable& cell(const std::string& value);
  CsvTable& cell(const char* value) { return cell(std::string(value)); }

  std::size_t rows() const { return rows_.size(); }
  void write(std::ostream& out) const;
  std::string str() const;

 private:
  void push(std::string text, Type type);

  std::vector<std::pair<std::string, Type>> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/// Dense kernel grid `h(x, y)` rows, one line per x, for spaces of at most
/// 200 vertices.
void write_dense_grid(std::ostream& out, const Eigen::MatrixXd& grid);

}  // namespace sausage
