#include "stockcast/data/io.hpp"

#include "stockcast/error.hpp"
#include "stockcast/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

namespace stockcast::data {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() &&
           (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) {
        return false;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_volume(std::string_view s, std::int64_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc{} && ptr == s.data() + s.size()) {
        return true;
    }
    // Some exports write volume as 1234.0.
    double v = 0.0;
    if (!parse_double(s, v) || v != std::floor(v) || std::abs(v) > 9.0e18) {
        return false;
    }
    out = static_cast<std::int64_t>(v);
    return true;
}

std::size_t find_column(const std::vector<std::string_view>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), std::string_view{name});
    if (it == header.end()) {
        throw Error(ErrorKind::Schema, "missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

PriceSeries read_csv(std::istream& in, const CsvSchema& schema, std::string symbol) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorKind::Schema, "empty input, expected a header row");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
    }
    const auto header = split_fields(line);
    const std::size_t c_date = find_column(header, schema.date);
    const std::size_t c_open = find_column(header, schema.open);
    const std::size_t c_high = find_column(header, schema.high);
    const std::size_t c_low = find_column(header, schema.low);
    const std::size_t c_close = find_column(header, schema.close);
    const std::size_t c_volume = find_column(header, schema.volume);
    const std::size_t width = std::max({c_date, c_open, c_high, c_low, c_close, c_volume}) + 1;

    PriceSeries series{std::move(symbol), {}};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_fields(line);
        auto row_error = [&](const std::string& what) {
            return Error(ErrorKind::Row, "line " + std::to_string(line_no) + ": " + what);
        };
        if (fields.size() < width) {
            throw row_error("expected at least " + std::to_string(width) + " fields, got " +
                            std::to_string(fields.size()));
        }
        Bar bar;
        const auto date = Date::parse(fields[c_date]);
        if (!date) {
            throw row_error("unparseable date '" + std::string(fields[c_date]) + "'");
        }
        bar.date = *date;
        const std::pair<std::size_t, double*> prices[] = {
            {c_open, &bar.open}, {c_high, &bar.high}, {c_low, &bar.low}, {c_close, &bar.close}};
        for (const auto& [col, dst] : prices) {
            if (!parse_double(fields[col], *dst)) {
                throw row_error("unparseable price '" + std::string(fields[col]) + "' in column '" +
                                std::string(header[col]) + "'");
            }
        }
        if (!parse_volume(fields[c_volume], bar.volume)) {
            throw row_error("unparseable volume '" + std::string(fields[c_volume]) + "'");
        }
        series.bars.push_back(bar);
    }

    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const Bar& a, const Bar& b) { return a.date < b.date; });
    validate(series);
    return series;
}

PriceSeries load_csv(const std::filesystem::path& path, const CsvSchema& schema,
                     std::string symbol) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    if (symbol.empty()) {
        symbol = path.stem().string();
    }
    return read_csv(in, schema, std::move(symbol));
}

std::vector<Date> read_calendar(std::istream& in) {
    std::vector<Date> days;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) {
            continue;
        }
        const auto d = Date::parse(text);
        if (!d) {
            throw Error(ErrorKind::Row, "calendar line " + std::to_string(line_no) +
                                            ": unparseable date '" + std::string(text) + "'");
        }
        if (!days.empty() && !(days.back() < *d)) {
            throw Error(ErrorKind::Validation, "calendar line " + std::to_string(line_no) +
                                                   ": dates must be strictly ascending");
        }
        days.push_back(*d);
    }
    return days;
}

std::vector<Date> load_calendar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open " + path.string());
    }
    return read_calendar(in);
}

void write_csv(std::ostream& out, const PriceSeries& series) {
    out << "Date,Open,High,Low,Close,Volume\n";
    for (const auto& b : series.bars) {
        out << b.date.to_string() << ',' << format_double(b.open) << ',' << format_double(b.high)
            << ',' << format_double(b.low) << ',' << format_double(b.close) << ',' << b.volume
            << '\n';
    }
}

}  // namespace stockcast::data
