#include "kdvduo/csv.hpp"

#include <cstdio>

namespace kdvduo {

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing");
}

void CsvWriter::header(const std::vector<std::string>& names) {
    columns_ = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out_ << ',';
        out_ << names[i];
    }
    out_ << "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (columns_ && values.size() != columns_) throw IoError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << format(values[i]);
    }
    out_ << "\r\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (columns_ && values.size() != columns_) throw IoError("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out_ << ',';
        out_ << values[i];
    }
    out_ << "\r\n";
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace kdvduo
