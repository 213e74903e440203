#include "fracsource/csvio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fracsource::csvio {

namespace {

void rename_into_place(const std::filesystem::path& tmp, const std::filesystem::path& path) {
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IOError("rename " + tmp.string() + " -> " + path.string() + ": " + ec.message());
    }
}

} // namespace

void write_csv(const std::filesystem::path& path, const Table& table) {
    if (table.header.size() != table.columns.size()) {
        throw ValidationError("write_csv: header/column count mismatch");
    }
    size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
    for (const auto& c : table.columns) {
        if (c.size() != rows) throw ValidationError("write_csv: ragged columns");
    }
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw IOError("cannot open " + tmp.string() + " for writing");
        for (size_t j = 0; j < table.header.size(); ++j) {
            os << (j ? "," : "") << table.header[j];
        }
        os << "\n";
        char buf[40];
        for (size_t i = 0; i < rows; ++i) {
            for (size_t j = 0; j < table.columns.size(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", table.columns[j][i]);
                os << (j ? "," : "") << buf;
            }
            os << "\n";
        }
        if (!os) throw IOError("write failed on " + tmp.string());
    }
    rename_into_place(tmp, path);
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IOError("cannot open " + path.string());
    Table table;
    std::string line;
    if (!std::getline(is, line)) throw ParseError(path.string() + ": empty file");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) table.header.push_back(cell);
    }
    table.columns.assign(table.header.size(), {});
    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        size_t j = 0;
        while (std::getline(ss, cell, ',')) {
            if (j >= table.columns.size()) {
                throw ParseError(path.string() + ":" + std::to_string(lineno) + ": extra column");
            }
            try {
                table.columns[j].push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(path.string() + ":" + std::to_string(lineno) +
                                 ": bad number '" + cell + "'");
            }
            ++j;
        }
        if (j != table.columns.size()) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": missing column");
        }
    }
    return table;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw IOError("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw IOError("write failed on " + tmp.string());
    }
    rename_into_place(tmp, path);
}

} // namespace fracsource::csvio
