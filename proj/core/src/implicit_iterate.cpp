#include <algorithm>

#include "tnare/errors.hpp"
#include "tnare/structured_linalg.hpp"

namespace tnare {

namespace {
constexpr Index kRowPanel = 512;
constexpr Index kPanelCols = 8;

void count_update(FlopModel* flops, const Eigen::MatrixXd& x, Index rank) {
  if (flops && rank > 0)
    flops->add(Kernel::implicit_apply,
               4.0 * static_cast<double>(x.rows()) * static_cast<double>(rank) * static_cast<double>(x.cols()));
}
}  // namespace

void ImplicitIterate::push_update(Eigen::MatrixXd u, Eigen::MatrixXd v) {
  if (u.rows() != size() || v.rows() != size() || u.cols() != v.cols())
    throw InvalidInput("ImplicitIterate::push_update: update blocks must be n x m");
  updates_.emplace_back(std::move(u), std::move(v));
}

Eigen::MatrixXd ImplicitIterate::apply(const Eigen::MatrixXd& x, bool transpose,
                                       FlopModel* flops) const {
  if (x.rows() != size()) throw InvalidInput("ImplicitIterate::apply: block row count != n");
  if (flops) flops->add_implicit_block_application();
  // Each level keeps about three n x cols blocks alive. Fixed-width column
  // panels keep that inside L2 for n in the thousands.
  if (x.cols() <= kPanelCols) return apply_level(level(), x, transpose, flops);
  Eigen::MatrixXd y(x.rows(), x.cols());
  for (Index j = 0; j < x.cols(); j += kPanelCols) {
    const Index w = std::min(kPanelCols, x.cols() - j);
    y.middleCols(j, w) = apply_level(level(), x.middleCols(j, w), transpose, flops);
  }
  return y;
}

Eigen::MatrixXd ImplicitIterate::apply_level(int lvl, const Eigen::MatrixXd& x, bool transpose,
                                             FlopModel* flops) const {
  if (lvl == 0) return base_.apply(x, transpose, flops);
  if (x.cols() == 0) return x;
  // E_k x = E_{k-1}(E_{k-1} x) + U (V^T x);  E_k^T x = E_{k-1}^T(E_{k-1}^T x) + V (U^T x)
  Eigen::MatrixXd y = apply_level(lvl - 1, apply_level(lvl - 1, x, transpose, flops), transpose,
                                  flops);
  const auto& [u, v] = updates_[static_cast<std::size_t>(lvl - 1)];
  if (u.cols() > 0) {
    const auto& outer = transpose ? v : u;
    const auto& inner = transpose ? u : v;
    // Row panels, as in BaseOperator::apply: u and v are tall and thin and
    // are swept 2^(k - lvl) times per application.
    const Index n = x.rows();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(inner.cols(), x.cols());
    for (Index i = 0; i < n; i += kRowPanel) {
      const Index h = std::min(kRowPanel, n - i);
      w.noalias() += inner.middleRows(i, h).transpose().lazyProduct(x.middleRows(i, h));
    }
    for (Index i = 0; i < n; i += kRowPanel) {
      const Index h = std::min(kRowPanel, n - i);
      y.middleRows(i, h).noalias() += outer.middleRows(i, h).lazyProduct(w);
    }
    count_update(flops, x, u.cols());
  }
  return y;
}

}  // namespace tnare
