#include "gapboot/od_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "gapboot/errors.hpp"

namespace gapboot {

namespace {

constexpr const char* header = "day,slot,o1,o2,o3,o4,o5,o6,o7,d1,d2,d3,d4,d5,d6,d7";

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <typename T>
T parse_field(const std::string& field, std::size_t line, const char* what) {
    T value{};
    const auto* end = field.data() + field.size();
    const auto res = std::from_chars(field.data(), end, value);
    if (field.empty() || res.ec != std::errc{} || res.ptr != end) {
        throw DataError("line " + std::to_string(line) + ": cannot parse " + what + " '" + field + "'");
    }
    return value;
}

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

ODDataset read_od_csv(std::istream& in, std::size_t slots) {
    std::string line;
    std::size_t line_no = 0;
    bool seen_header = false;
    std::vector<ODRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;
        if (!seen_header) {
            std::string compact;
            for (char c : line) {
                if (c != ' ') compact += c;
            }
            if (compact != header) throw DataError("line " + std::to_string(line_no) + ": expected header '" + header + "'");
            seen_header = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 16) {
            throw DataError("line " + std::to_string(line_no) + ": expected 16 fields, found " +
                            std::to_string(fields.size()));
        }
        ODRecord r;
        r.day = parse_field<std::size_t>(fields[0], line_no, "day");
        r.slot = parse_field<std::size_t>(fields[1], line_no, "slot");
        for (int i = 0; i < od_ramps; ++i) {
            r.origins[i] = parse_field<double>(fields[2 + i], line_no, "origin volume");
            r.destinations[i] = parse_field<double>(fields[9 + i], line_no, "destination volume");
        }
        records.push_back(r);
    }
    if (!seen_header) throw DataError("OD input is empty");
    return ODDataset(std::move(records), slots);
}

void write_od_csv(const ODDataset& data, std::ostream& out) {
    out << header << '\n';
    for (const auto& r : data.records()) {
        out << r.day << ',' << r.slot;
        for (double v : r.origins) out << ',' << format_number(v);
        for (double v : r.destinations) out << ',' << format_number(v);
        out << '\n';
    }
}

void write_od_results(const ODAnalysis& analysis, std::ostream& out) {
    out << "param,estimate,std_gb1,std_gb2\n";
    for (int a = 0; a < od_params; ++a) {
        out << od_param_name(a) << ',' << format_number(analysis.theta_hat(a)) << ','
            << format_number(analysis.se_gb1(a)) << ',' << format_number(analysis.se_gb2(a)) << '\n';
    }
}

}  // namespace gapboot
