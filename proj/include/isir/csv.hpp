#pragma once

#include <string>
#include <vector>

namespace isir {

// Minimal CSV surface: numeric tables with a fixed header, written with
// deterministic formatting and read back by the bundled reader.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void write_csv(const CsvTable& table, const std::string& path);
CsvTable read_csv(const std::string& path);

}  // namespace isir
