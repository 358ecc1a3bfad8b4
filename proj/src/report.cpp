#include "phonolab/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace phonolab {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {
// RFC-4180-style quoting: quote only when the cell needs it.
std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}
}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns) : ncols_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i)
        text_ += (i ? "," : "") + csv_quote(columns[i]);
    text_ += "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != ncols_) throw ConfigError("csv: wrong cell count");
    for (std::size_t i = 0; i < cells.size(); ++i)
        text_ += (i ? "," : "") + csv_quote(cells[i]);
    text_ += "\n";
}

void CsvWriter::row_numbers(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double v : cells) s.push_back(format_full(v));
    row(s);
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw ConfigError("cannot create directory " + path + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string report_header(std::uint64_t config_hash, std::uint64_t seed) {
    std::ostringstream os;
    os << "# tool = " << kToolVersion << "\n";
    os << "# config_hash = " << config_hash << "\n";
    os << "# seed = " << seed << "\n";
    return os.str();
}

}  // namespace phonolab
