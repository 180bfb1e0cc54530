#include "fbent/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace fbent::io {

using nlohmann::json;

Matrix parse_matrix_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "malformed JSON at byte " << e.byte << ": " << e.what();
    throw FormatError(os.str());
  }
  if (!doc.is_object()) throw FormatError("matrix file must hold a JSON object");
  if (!doc.contains("n_modes") || !doc["n_modes"].is_number_integer())
    throw FormatError("matrix file: missing integer field 'n_modes'");
  const auto n = doc["n_modes"].get<long long>();
  if (n < 1) throw FormatError("matrix file: 'n_modes' must be positive");
  if (doc.contains("ordering") && doc["ordering"] != "qpqp")
    throw FormatError("matrix file: only ordering 'qpqp' is supported");
  if (!doc.contains("data") || !doc["data"].is_array()) throw FormatError("matrix file: missing array field 'data'");
  const auto dim = static_cast<std::size_t>(2 * n);
  const auto& data = doc["data"];
  if (data.size() != dim * dim) {
    std::ostringstream os;
    os << "matrix file: 'data' has " << data.size() << " entries, expected " << dim * dim;
    throw FormatError(os.str());
  }
  std::vector<double> values;
  values.reserve(data.size());
  for (std::size_t k = 0; k < data.size(); ++k) {
    if (!data[k].is_number()) {
      std::ostringstream os;
      os << "matrix file: 'data' entry " << k << " is not a number";
      throw FormatError(os.str());
    }
    values.push_back(data[k].get<double>());
  }
  return Matrix::from_row_major(dim, dim, values);
}

Matrix read_matrix_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open matrix file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_matrix_json(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

std::string matrix_to_json(const Matrix& m) {
  if (!m.square() || m.rows() % 2 != 0) throw ShapeError("matrix_to_json: matrix must be 2N x 2N");
  json doc;
  doc["n_modes"] = m.rows() / 2;
  doc["ordering"] = "qpqp";
  doc["data"] = std::vector<double>(m.data().begin(), m.data().end());
  return doc.dump(2);
}

void write_matrix_json(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path + "'");
  out << matrix_to_json(m) << '\n';
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

void write_row(std::ostream& os, const SweepRow& r) {
  os << format_number(r.chi) << ',' << format_number(r.nu_free) << ',' << format_number(r.nu_local) << ','
     << format_number(r.nu_bound) << ',' << format_number(r.mu1_star) << ',' << r.status << '\n';
}

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) write_row(os, r);
}

void write_combined_sweep_csv(std::ostream& os,
                              const std::vector<std::pair<std::string, std::vector<SweepRow>>>& runs) {
  os << "bipartition," << kSweepHeader << '\n';
  for (const auto& [label, rows] : runs)
    for (const auto& r : rows) {
      os << label << ',';
      write_row(os, r);
    }
}

}  // namespace fbent::io
