// Report output helpers: deterministic CSV and text emission (full-precision
// numbers, no timestamps) so identical configs reproduce byte-identical
// report directories.
#pragma once

#include <string>
#include <vector>

#include "phonolab/grid.hpp"

namespace phonolab {

inline constexpr const char* kToolVersion = "phonolab 0.1.0";

std::string format_full(double v);  // %.17g

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void row(const std::vector<std::string>& cells);
    void row_numbers(const std::vector<double>& cells);
    const std::string& text() const { return text_; }

private:
    std::size_t ncols_;
    std::string text_;
};

void ensure_directory(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Header block stamped on every emitted file: tool version, config hash, seed.
std::string report_header(std::uint64_t config_hash, std::uint64_t seed);

}  // namespace phonolab
