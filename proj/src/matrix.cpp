#include "qoc/matrix.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qoc {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

double unitarity_error(const CMatrix& x) {
  return (x.adjoint() * x - CMatrix::Identity(x.rows(), x.cols())).norm();
}

double hermiticity_error(const CMatrix& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

HermitianOperator::HermitianOperator(CMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw std::invalid_argument("HermitianOperator: matrix must be square");
  }
  if (!is_power_of_two(m_.rows())) {
    throw std::invalid_argument("HermitianOperator: dimension must be a power of two, got " +
                                std::to_string(m_.rows()));
  }
  if (hermiticity_error(m_) > kHermitianTol) {
    std::ostringstream os;
    os << "HermitianOperator: matrix is not Hermitian (max |H - H^dag| = "
       << hermiticity_error(m_) << ")";
    throw std::invalid_argument(os.str());
  }
  zero_ = m_.isZero(0.0);
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
  return HermitianOperator(CMatrix::Zero(dim, dim));
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row_re = nlohmann::json::array();
    nlohmann::json row_im = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row_re.push_back(m(i, j).real());
      row_im.push_back(m(i, j).imag());
    }
    re.push_back(std::move(row_re));
    im.push_back(std::move(row_im));
  }
  return nlohmann::json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  const auto dim = j.at("dim").get<Eigen::Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != dim || static_cast<Eigen::Index>(im.size()) != dim) {
    throw std::invalid_argument("matrix_from_json: row count does not match dim");
  }
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& row_re = re.at(i);
    const auto& row_im = im.at(i);
    if (static_cast<Eigen::Index>(row_re.size()) != dim ||
        static_cast<Eigen::Index>(row_im.size()) != dim) {
      throw std::invalid_argument("matrix_from_json: column count does not match dim");
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      m(i, k) = Complex(row_re.at(k).get<double>(), row_im.at(k).get<double>());
    }
  }
  return m;
}

void save_matrix(const CMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_matrix: cannot open " + path);
  out << matrix_to_json(m).dump(2) << "\n";
}

CMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_matrix: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return matrix_from_json(j);
}

}  // namespace qoc
