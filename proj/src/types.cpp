#include "dppbound/types.hpp"

namespace dppbound {

PointSet::PointSet(std::initializer_list<std::initializer_list<double>> rows) {
  const Index n = static_cast<Index>(rows.size());
  const Index dim = n == 0 ? 1 : static_cast<Index>(rows.begin()->size());
  if (dim < 1) throw InputError("PointSet: dimension must be >= 1");
  coords_.resize(n, dim);
  Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Index>(row.size()) != dim)
      throw InputError("PointSet: all points must have the same dimension");
    Index d = 0;
    for (double v : row) coords_(i, d++) = v;
    ++i;
  }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows, Index dim) {
  Matrix m(static_cast<Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Index>(rows[i].size()) != dim)
      throw InputError("PointSet: all points must have the same dimension");
    for (Index d = 0; d < dim; ++d) m(static_cast<Index>(i), d) = rows[i][d];
  }
  return PointSet(std::move(m));
}

void PointSet::append(const Vector& p) {
  if (p.size() != dim()) throw InputError("PointSet::append: dimension mismatch");
  coords_.conservativeResize(coords_.rows() + 1, Eigen::NoChange);
  coords_.row(coords_.rows() - 1) = p.transpose();
}

PointSet PointSet::subset(const std::vector<Index>& rows) const {
  Matrix m(static_cast<Index>(rows.size()), dim());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= size()) throw InputError("PointSet::subset: index out of range");
    m.row(static_cast<Index>(i)) = coords_.row(rows[i]);
  }
  return PointSet(std::move(m));
}

PointSet PointSet::concat(const PointSet& other) const {
  if (other.dim() != dim()) throw InputError("PointSet::concat: dimension mismatch");
  Matrix m(size() + other.size(), dim());
  m.topRows(size()) = coords_;
  m.bottomRows(other.size()) = other.coords_;
  return PointSet(std::move(m));
}

}  // namespace dppbound
