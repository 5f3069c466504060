#include "hp/table.hpp"

#include "hp/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace hp {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

void Table::add_row(std::vector<Cell> row) {
    require(row.size() == columns_.size(), "table row has the wrong number of cells");
    rows_.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
    std::size_t idx = columns_.size();
    for (std::size_t i = 0; i < columns_.size(); ++i)
        if (columns_[i] == name) idx = i;
    require(idx < columns_.size(), "table has no column '" + name + "'");
    std::vector<double> out;
    for (const auto& row : rows_) {
        const auto& c = row[idx];
        if (const auto* d = std::get_if<double>(&c)) out.push_back(*d);
        else if (const auto* i = std::get_if<long long>(&c)) out.push_back(static_cast<double>(*i));
        else out.push_back(std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + csv_escape(columns_[i]);
    out += "\r\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            const auto& c = row[i];
            if (const auto* d = std::get_if<double>(&c)) out += format_double(*d);
            else if (const auto* n = std::get_if<long long>(&c)) out += std::to_string(*n);
            else out += csv_escape(std::get<std::string>(c));
        }
        out += "\r\n";
    }
    return out;
}

} // namespace hp
