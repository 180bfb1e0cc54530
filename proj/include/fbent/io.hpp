// Matrix JSON files and sweep CSV output.
//
// Matrix schema: {"n_modes": N, "ordering": "qpqp", "data": [2N*2N reals, row-major]}.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbent/linalg.hpp"
#include "fbent/parametric.hpp"

namespace fbent::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Matrix parse_matrix_json(const std::string& text);
Matrix read_matrix_json(const std::string& path);

std::string matrix_to_json(const Matrix& m);
void write_matrix_json(const std::string& path, const Matrix& m);

inline constexpr const char* kSweepHeader = "chi,nu_free,nu_local,nu_bound,mu1_star,status";

/// 12 significant digits.
std::string format_number(double v);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Same columns with a leading "bipartition" column.
void write_combined_sweep_csv(std::ostream& os, const std::vector<std::pair<std::string, std::vector<SweepRow>>>& runs);

}  // namespace fbent::io
