#pragma once

// CSV dialect shared by the CLI and the harness: comma separated, '.' decimal point, one
// header row, any number of leading '#' metadata lines. Complex columns come in re/im pairs
// named <name>_re, <name>_im.

#include <iosfwd>
#include <string>
#include <vector>

#include "ces/types.hpp"

namespace ces {

struct CsvTable {
  std::vector<std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Shortest text that reads back to the same double.
std::string format_double(double v);

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);
void write_csv(std::ostream& out, const CsvTable& t);
void write_csv_file(const std::string& path, const CsvTable& t);

DataMatrix to_data(const CsvTable& t);
/// Pairs consecutive columns as (re, im).
CDataMatrix to_complex_data(const CsvTable& t);

CsvTable from_data(const DataMatrix& d, std::vector<std::string> meta = {}, const std::string& prefix = "x");
CsvTable from_complex_data(const CDataMatrix& d, std::vector<std::string> meta = {}, const std::string& prefix = "x");

/// Dense matrix with columns c1..cn.
CsvTable from_matrix(const Matrix& m, std::vector<std::string> meta = {});

}  // namespace ces
