#ifndef TRELLIP_IO_HPP
#define TRELLIP_IO_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "trellip/scl.hpp"

namespace trellip {

// Writes a CSV with the given header names; 17 significant digits by
// default (round-trips doubles exactly), 6 in compact mode.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values, int precision = 17);

// Reads a numeric CSV with a single header line.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};
CsvTable read_csv(const std::string& path);

// Parses a comma list of doubles; accepts "inf"/"-inf" (and "Inf" variants).
// A leading '@' reads the numbers from a CSV file instead (all cells, row
// major, header optional).
std::vector<double> parse_number_list(const std::string& text);

// SCL dataset CSV with columns x,y,v,lower,upper,cens (cens in {0,1});
// v is the observed response where cens=0, lower/upper the censoring
// interval where cens=1. The design matrix is the intercept column.
SclDataset read_scl_csv(const std::string& path);

}  // namespace trellip

#endif  // TRELLIP_IO_HPP
