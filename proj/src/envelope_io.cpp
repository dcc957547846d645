#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "cyclores/errors.hpp"
#include "cyclores/pulse.hpp"

namespace cyclores {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(std::string_view field, std::size_t line_no) {
    const std::string text(trim(field));
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || (errno == ERANGE && std::abs(v) == HUGE_VAL))
        throw InvalidInput("envelope CSV line " + std::to_string(line_no) + ": bad number '" + text + "'");
    return v;
}

}  // namespace

std::vector<EnvelopeSample> read_envelope_csv(std::istream& in) {
    std::vector<EnvelopeSample> samples;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
            throw InvalidInput("envelope CSV line " + std::to_string(line_no) + ": expected two columns");
        const auto first = trim(row.substr(0, comma));
        const auto second = trim(row.substr(comma + 1));
        if (!header_seen) {
            if (first != "tau_seconds" || second != "A_gauss_cm")
                throw InvalidInput("envelope CSV must start with header 'tau_seconds,A_gauss_cm'");
            header_seen = true;
            continue;
        }
        samples.push_back({parse_number(first, line_no), parse_number(second, line_no)});
    }
    if (!header_seen) throw InvalidInput("envelope CSV is empty");
    return samples;
}

std::vector<EnvelopeSample> read_envelope_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open envelope file '" + path + "'");
    return read_envelope_csv(in);
}

}  // namespace cyclores
