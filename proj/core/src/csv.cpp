#include "timepar/csv.hpp"

#include <cstdio>
#include <ostream>

namespace timepar {

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void CsvWriter::header(std::initializer_list<std::string> columns)
{
    row();
    for (const auto& c : columns) {
        add(c);
    }
    end();
}

CsvWriter& CsvWriter::row()
{
    first_ = true;
    return *this;
}

void CsvWriter::separator()
{
    if (!first_) {
        out_ << ',';
    }
    first_ = false;
}

CsvWriter& CsvWriter::add(double value)
{
    separator();
    out_ << format_double(value);
    return *this;
}

CsvWriter& CsvWriter::add(int value)
{
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::add(long value)
{
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::add(long long value)
{
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::add(const std::string& value)
{
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::add(bool value)
{
    separator();
    out_ << (value ? "true" : "false");
    return *this;
}

CsvWriter& CsvWriter::add(const std::optional<double>& value)
{
    separator();
    if (value) {
        out_ << format_double(*value);
    }
    return *this;
}

void CsvWriter::end()
{
    out_ << '\n';
}

}  // namespace timepar
