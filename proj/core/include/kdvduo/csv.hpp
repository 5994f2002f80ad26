#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kdvduo/errors.hpp"

namespace kdvduo {

/// RFC 4180 CSV writer with deterministic number formatting (%.17g, CRLF
/// line endings). Values never need quoting here; header fields are written
/// verbatim.
class CsvWriter {
  public:
    explicit CsvWriter(const std::filesystem::path& path);

    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);

    static std::string format(double v);

  private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

}  // namespace kdvduo
