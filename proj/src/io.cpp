#include "trellip/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace trellip {

namespace {

std::string trim(const std::string& s) {
  auto b = s.begin(), e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  return out;
}

double parse_double(const std::string& cell) {
  std::string t = trim(cell);
  std::string low = t;
  std::transform(low.begin(), low.end(), low.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (low == "inf" || low == "+inf" || low == "infinity")
    return std::numeric_limits<double>::infinity();
  if (low == "-inf" || low == "-infinity")
    return -std::numeric_limits<double>::infinity();
  try {
    std::size_t pos = 0;
    const double v = std::stod(t, &pos);
    if (pos != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw IoError("cannot parse number: '" + cell + "'");
  }
}

bool is_numeric_row(const std::vector<std::string>& cells) {
  for (const auto& c : cells) {
    try {
      parse_double(c);
    } catch (const IoError&) {
      return false;
    }
  }
  return !cells.empty();
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values, int precision) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (std::size_t j = 0; j < header.size(); ++j)
    out << (j ? "," : "") << header[j];
  out << '\n';
  char buf[64];
  for (long i = 0; i < values.rows(); ++i) {
    for (long j = 0; j < values.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.*g", precision, values(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file: " + path);
  CsvTable table;
  std::vector<std::vector<double>> rows;
  auto first = split_commas(line);
  if (is_numeric_row(first)) {
    std::vector<double> r;
    for (const auto& c : first) r.push_back(parse_double(c));
    rows.push_back(std::move(r));
    for (std::size_t j = 0; j < first.size(); ++j)
      table.header.push_back("c" + std::to_string(j + 1));
  } else {
    table.header = first;
  }
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (cells.size() != table.header.size())
      throw IoError("ragged CSV row in " + path);
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(parse_double(c));
    rows.push_back(std::move(r));
  }
  table.values.resize(static_cast<long>(rows.size()),
                      static_cast<long>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      table.values(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
  return table;
}

std::vector<double> parse_number_list(const std::string& text) {
  if (!text.empty() && text[0] == '@') {
    const CsvTable t = read_csv(text.substr(1));
    std::vector<double> out;
    for (long i = 0; i < t.values.rows(); ++i)
      for (long j = 0; j < t.values.cols(); ++j) out.push_back(t.values(i, j));
    return out;
  }
  std::vector<double> out;
  for (const auto& cell : split_commas(text)) out.push_back(parse_double(cell));
  return out;
}

SclDataset read_scl_csv(const std::string& path) {
  const CsvTable t = read_csv(path);
  auto col = [&](const std::string& name) {
    for (std::size_t j = 0; j < t.header.size(); ++j)
      if (t.header[j] == name) return static_cast<long>(j);
    throw IoError("missing column '" + name + "' in " + path);
  };
  const long cx = col("x"), cy = col("y"), cv = col("v"), clo = col("lower"),
             chi = col("upper"), cc = col("cens");
  const long m = t.values.rows();
  SclDataset data;
  data.coords.resize(m, 2);
  data.design = Eigen::MatrixXd::Ones(m, 1);
  data.v_lower.resize(m);
  data.v_upper.resize(m);
  data.observed.resize(m);
  data.cens.resize(m);
  for (long i = 0; i < m; ++i) {
    data.coords(i, 0) = t.values(i, cx);
    data.coords(i, 1) = t.values(i, cy);
    data.observed[i] = t.values(i, cv);
    data.v_lower[i] = t.values(i, clo);
    data.v_upper[i] = t.values(i, chi);
    const double c = t.values(i, cc);
    if (c != 0.0 && c != 1.0)
      throw IoError("cens column must be 0 or 1 in " + path);
    data.cens[i] = c == 1.0;
  }
  data.validate();
  return data;
}

}  // namespace trellip
