#include "ces/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ces {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) {
    // from_chars rejects "inf"/"nan" spellings written by some tools; fall back to strtod.
    char* e2 = nullptr;
    v = std::strtod(s.c_str(), &e2);
    if (s.empty() || e2 != s.c_str() + s.size()) {
      std::ostringstream os;
      os << "csv: cannot parse '" << s << "' at data row " << row + 1 << ", column " << col + 1;
      throw std::invalid_argument(os.str());
    }
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s[0] == '#') {
      if (!have_header) t.meta.push_back(trim(s.substr(1)));
      continue;
    }
    if (!have_header) {
      t.header = split(s);
      have_header = true;
      continue;
    }
    const auto cells = split(s);
    if (cells.size() != t.header.size()) {
      std::ostringstream os;
      os << "csv: data row " << t.rows.size() + 1 << " has " << cells.size() << " cells, header has "
         << t.header.size();
      throw std::invalid_argument(os.str());
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) row[j] = parse_cell(cells[j], t.rows.size(), j);
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("csv: no header row");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& t) {
  for (const auto& m : t.meta) out << "# " << m << '\n';
  for (std::size_t j = 0; j < t.header.size(); ++j) out << (j ? "," : "") << t.header[j];
  out << '\n';
  for (const auto& r : t.rows) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << format_double(r[j]);
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_csv(out, t);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

DataMatrix to_data(const CsvTable& t) {
  DataMatrix d(t.rows.size(), t.header.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.header.size(); ++j) d(i, j) = t.rows[i][j];
  return d;
}

CDataMatrix to_complex_data(const CsvTable& t) {
  if (t.header.size() % 2) throw std::invalid_argument("csv: complex data needs an even number of columns");
  const std::size_t m = t.header.size() / 2;
  CDataMatrix d(t.rows.size(), m);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < m; ++j) d(i, j) = Complex(t.rows[i][2 * j], t.rows[i][2 * j + 1]);
  return d;
}

CsvTable from_data(const DataMatrix& d, std::vector<std::string> meta, const std::string& prefix) {
  CsvTable t;
  t.meta = std::move(meta);
  for (Eigen::Index j = 0; j < d.cols(); ++j) t.header.push_back(prefix + std::to_string(j + 1));
  t.rows.resize(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) t.rows[i].assign(d.row(i).data(), d.row(i).data() + d.cols());
  return t;
}

CsvTable from_complex_data(const CDataMatrix& d, std::vector<std::string> meta, const std::string& prefix) {
  CsvTable t;
  t.meta = std::move(meta);
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    t.header.push_back(prefix + std::to_string(j + 1) + "_re");
    t.header.push_back(prefix + std::to_string(j + 1) + "_im");
  }
  t.rows.resize(d.rows());
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    auto& r = t.rows[i];
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      r.push_back(d(i, j).real());
      r.push_back(d(i, j).imag());
    }
  }
  return t;
}

CsvTable from_matrix(const Matrix& m, std::vector<std::string> meta) {
  CsvTable t;
  t.meta = std::move(meta);
  for (Eigen::Index j = 0; j < m.cols(); ++j) t.header.push_back("c" + std::to_string(j + 1));
  t.rows.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.rows[i].push_back(m(i, j));
  return t;
}

}  // namespace ces
