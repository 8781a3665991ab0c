#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "edpm/errors.hpp"
#include "edpm/model.hpp"

namespace edpm {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-numeric cell '" << cell << "' at data row " << row << ", column " << col + 1;
    throw DomainError(msg.str());
  }
  return v;
}

}  // namespace

Dataset parse_dataset_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DomainError("dataset CSV is empty");
  const auto header = split_row(line);
  if (header.size() < 2 || header[0] != "y") {
    throw DomainError("dataset CSV header must start with 'y' followed by x1..xp");
  }
  for (std::size_t l = 1; l < header.size(); ++l) {
    if (header[l] != "x" + std::to_string(l)) {
      throw DomainError("dataset CSV header column " + std::to_string(l + 1) + " must be 'x" +
                        std::to_string(l) + "'");
    }
  }
  const std::size_t p = header.size() - 1;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_row(line);
    if (cells.size() != header.size()) {
      throw DomainError("dataset CSV row " + std::to_string(rows + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) values.push_back(parse_cell(cells[c], rows + 1, c));
    ++rows;
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < rows; ++i) {
    y[static_cast<Eigen::Index>(i)] = values[i * (p + 1)];
    for (std::size_t l = 0; l < p; ++l) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = values[i * (p + 1) + 1 + l];
    }
  }
  return Dataset(std::move(y), std::move(X));
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open dataset '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_dataset_csv(buffer.str());
}

std::string format_dataset_csv(const Dataset& data) {
  std::ostringstream out;
  out << "y";
  for (std::size_t l = 1; l <= data.p(); ++l) out << ",x" << l;
  out << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    out << data.y[i];
    for (Eigen::Index l = 0; l < data.X.cols(); ++l) out << ',' << data.X(i, l);
    out << '\n';
  }
  return out.str();
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw IoError("cannot write dataset '" + path + "'");
  file << format_dataset_csv(data);
  if (!file) throw IoError("failed writing dataset '" + path + "'");
}

}  // namespace edpm
