#include "mmlpca/csv.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <string_view>
#include <vector>

namespace mmlpca {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view field) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

DataMatrix read_csv(std::istream& in) {
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::size_t line_no = 0;
    bool seen_first = false;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        std::vector<double> parsed;
        parsed.reserve(fields.size());
        std::optional<std::size_t> bad;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (auto v = parse_number(fields[i])) {
                parsed.push_back(*v);
            } else if (!bad) {
                bad = i;
            }
        }
        if (!seen_first) {
            seen_first = true;
            cols = fields.size();
            if (bad) continue;
        }
        if (bad) {
            throw Error(ErrorCode::InvalidData, "line " + std::to_string(line_no) + ", field " +
                                                    std::to_string(*bad + 1) + ": not a number");
        }
        if (fields.size() != cols) {
            throw Error(ErrorCode::InvalidData, "line " + std::to_string(line_no) + ": expected " +
                                                    std::to_string(cols) + " fields, got " +
                                                    std::to_string(fields.size()));
        }
        values.insert(values.end(), parsed.begin(), parsed.end());
        ++rows;
    }
    if (in.bad()) throw Error(ErrorCode::InvalidData, "read error");
    if (rows == 0) throw Error(ErrorCode::InvalidData, "no data rows");

    DataMatrix out(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) out(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cols + c];
    }
    return out;
}

DataMatrix read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidData, "cannot open " + path);
    return read_csv(in);
}

}  // namespace mmlpca
