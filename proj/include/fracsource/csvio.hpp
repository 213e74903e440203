#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracsource/errors.hpp"

namespace fracsource::csvio {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

// Comma-separated, '.' decimal, header row, 17 significant digits (full
// binary64 round trip). The file is written to a temporary sibling and
// renamed into place.
void write_csv(const std::filesystem::path& path, const Table& table);

Table read_csv(const std::filesystem::path& path);

// Atomic small-file text write (same temp-and-rename contract).
void write_text(const std::filesystem::path& path, const std::string& content);

} // namespace fracsource::csvio
