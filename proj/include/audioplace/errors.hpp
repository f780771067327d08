#pragma once

#include <stdexcept>
#include <string>

namespace audioplace {

/// Malformed or invalid input data. `where` names the file and, when known,
/// the row/column or JSON path.
class InputError : public std::runtime_error {
 public:
  InputError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Raised when row/column coordinates are known (matrix CSV parsing).
class MatrixCellError : public InputError {
 public:
  MatrixCellError(const std::string& source, int row, int column, const std::string& what)
      : InputError(source + ":row " + std::to_string(row) +
                       (column >= 0 ? ",col " + std::to_string(column) : std::string{}),
                   what),
        row_(row),
        column_(column) {}

  int row() const { return row_; }
  /// -1 when the error concerns the whole row.
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

/// No assignment satisfies the placement constraints.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace audioplace
