#pragma once

#include <string>
#include <variant>
#include <vector>

namespace hp {

/// Shortest decimal representation that reads back to the same double.
std::string format_double(double v);

/// Column table serialized as RFC-4180 CSV with a header row.
class Table {
public:
    using Cell = std::variant<double, long long, std::string>;

    Table() = default;
    explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add_row(std::vector<Cell> row);
    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    /// Numeric column values (strings become NaN).
    std::vector<double> column(const std::string& name) const;
    std::string to_csv() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

std::string csv_escape(const std::string& field);

} // namespace hp
