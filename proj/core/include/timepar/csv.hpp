#pragma once

#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>

namespace timepar {

/// Minimal CSV emitter: '.' decimal separator, doubles with 17 significant
/// digits so values round-trip exactly.
class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(std::initializer_list<std::string> columns);

    CsvWriter& row();
    CsvWriter& add(double value);
    CsvWriter& add(int value);
    CsvWriter& add(long value);
    CsvWriter& add(long long value);
    CsvWriter& add(const std::string& value);
    CsvWriter& add(const char* value) { return add(std::string(value)); }
    CsvWriter& add(bool value);
    /// Empty cell when unset.
    CsvWriter& add(const std::optional<double>& value);
    void end();

private:
    void separator();

    std::ostream& out_;
    bool first_ = true;
};

/// Shortest text of `value` with 17 significant digits.
std::string format_double(double value);

}  // namespace timepar
