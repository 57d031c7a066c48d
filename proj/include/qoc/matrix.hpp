#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qoc/types.hpp"

namespace qoc {

constexpr double kHermitianTol = 1e-12;
constexpr double kUnitaryTol = 1e-10;

bool is_power_of_two(Eigen::Index n);

/// Frobenius norm of X†X - I.
double unitarity_error(const CMatrix& x);

/// Max elementwise |H - H†|.
double hermiticity_error(const CMatrix& h);

/// A validated Hermitian matrix of power-of-two dimension.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  /// Throws std::invalid_argument unless m is square with power-of-two
  /// dimension and Hermitian within kHermitianTol elementwise.
  explicit HermitianOperator(CMatrix m);

  static HermitianOperator zero(Eigen::Index dim);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool is_zero() const { return zero_; }

 private:
  CMatrix m_;
  bool zero_ = true;
};

/// Dense complex matrix wire format:
///   {"dim": n, "re": [[...]], "im": [[...]]}
/// row-major, lossless round-trip.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

void save_matrix(const CMatrix& m, const std::string& path);
CMatrix load_matrix(const std::string& path);

}  // namespace qoc
