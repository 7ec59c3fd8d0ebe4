// SPDX-License-Identifier: Apache-2.0
#include "phaseid/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace phaseid::pipeline {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, size_t line, size_t col) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": bad number '" + cell + "'");
  if (!std::isfinite(v))
    throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                     std::to_string(col) + ": non-finite value");
  return v;
}

}  // namespace

std::string format_double(double v) {
  // %.17g is exact for doubles; fall back from shorter forms when they
  // round-trip so files stay readable.
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return buf;
}

LoadResult load_dataset(const std::string& voltage_csv_path,
                        const std::string& labels_csv_path) {
  std::ifstream in(voltage_csv_path);
  if (!in) throw IoError("load_dataset: cannot open '" + voltage_csv_path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw ParseError("parse error at line 1: empty voltage file");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "customer_id")
    throw ParseError("parse error at line 1: expected 'customer_id' header");
  const size_t t = header.size() - 1;
  if (t == 0) throw ParseError("parse error at line 1: no time columns");

  LoadResult res;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != t + 1)
      throw ParseError("parse error at line " + std::to_string(line_no) +
                       ": expected " + std::to_string(t + 1) + " fields, got " +
                       std::to_string(cells.size()));
    ids.push_back(cells[0]);
    std::vector<double> row(t);
    std::vector<size_t> missing;
    double sum = 0.0;
    size_t present = 0;
    for (size_t j = 0; j < t; ++j) {
      if (cells[j + 1].empty()) {
        missing.push_back(j);
        continue;
      }
      row[j] = parse_cell(cells[j + 1], line_no, j + 2);
      sum += row[j];
      ++present;
    }
    if (present == 0)
      throw ParseError("parse error at line " + std::to_string(line_no) +
                       ": every cell is missing");
    const double mean = sum / static_cast<double>(present);
    for (size_t j : missing) row[j] = mean;
    res.imputed_cells += missing.size();
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("load_dataset: no customer rows");

  res.data.n_customers = rows.size();
  res.data.n_timesteps = t;
  res.data.voltages = Matrix(rows.size(), t);
  for (size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), res.data.voltages.row(i));

  if (!labels_csv_path.empty()) {
    std::ifstream lin(labels_csv_path);
    if (!lin) throw IoError("load_dataset: cannot open '" + labels_csv_path + "'");
    std::string lline;
    if (!std::getline(lin, lline))
      throw ParseError("parse error at line 1: empty labels file");
    const auto lheader = split_csv_line(lline);
    if (lheader.size() != 2 || lheader[0] != "customer_id" || lheader[1] != "phase")
      throw ParseError("parse error at line 1: expected 'customer_id,phase' header");
    std::unordered_map<std::string, circuit::PhaseLabel> by_id;
    size_t lno = 1;
    while (std::getline(lin, lline)) {
      ++lno;
      if (lline.empty()) continue;
      const auto cells = split_csv_line(lline);
      if (cells.size() != 2)
        throw ParseError("parse error at line " + std::to_string(lno) +
                         ": expected 2 fields");
      by_id[cells[0]] = circuit::phase_from_string(cells[1]);
    }
    if (by_id.size() != ids.size())
      throw IdMismatch("load_dataset: label file has " + std::to_string(by_id.size()) +
                       " ids, voltages have " + std::to_string(ids.size()));
    res.data.labels.resize(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) {
      const auto it = by_id.find(ids[i]);
      if (it == by_id.end())
        throw IdMismatch("load_dataset: no label for customer id '" + ids[i] + "'");
      res.data.labels[i] = it->second;
    }
  }
  return res;
}

void save_voltages_csv(const VoltageDataset& data, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_voltages_csv: cannot open '" + path + "'");
  os << "customer_id";
  for (size_t j = 0; j < data.n_timesteps; ++j) os << ",t" << j;
  os << '\n';
  for (size_t i = 0; i < data.n_customers; ++i) {
    os << i;
    for (size_t j = 0; j < data.n_timesteps; ++j)
      os << ',' << format_double(data.voltages(i, j));
    os << '\n';
  }
  if (!os) throw IoError("save_voltages_csv: write failed");
}

void save_labels_csv(const VoltageDataset& data, const std::string& path) {
  if (!data.has_labels()) throw NoLabels("save_labels_csv: dataset has no labels");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_labels_csv: cannot open '" + path + "'");
  os << "customer_id,phase\n";
  for (size_t i = 0; i < data.n_customers; ++i)
    os << i << ',' << circuit::to_string(data.labels[i]) << '\n';
  if (!os) throw IoError("save_labels_csv: write failed");
}

SymMatrix load_covariance_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("load_covariance_csv: cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    std::vector<double> row(cells.size());
    for (size_t j = 0; j < cells.size(); ++j)
      row[j] = parse_cell(cells[j], line_no, j + 1);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("load_covariance_csv: empty file");
  const size_t n = rows.size();
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n)
      throw ParseError("load_covariance_csv: row " + std::to_string(i + 1) +
                       " has " + std::to_string(rows[i].size()) + " fields, expected " +
                       std::to_string(n));
    std::copy(rows[i].begin(), rows[i].end(), m.row(i));
  }
  return SymMatrix::from_matrix(m, 1e-9);
}

void save_covariance_csv(const SymMatrix& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_covariance_csv: cannot open '" + path + "'");
  for (size_t i = 0; i < m.n; ++i) {
    for (size_t j = 0; j < m.n; ++j) {
      if (j) os << ',';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
  if (!os) throw IoError("save_covariance_csv: write failed");
}

}  // namespace phaseid::pipeline
