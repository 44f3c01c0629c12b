#include "tnare/flop_model.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>

namespace tnare {

std::string_view kernel_label(Kernel k) {
  switch (k) {
    case Kernel::core_products: return "core_products";
    case Kernel::implicit_apply: return "implicit_apply";
    case Kernel::rank_updates: return "rank_updates";
    case Kernel::orthogonalization: return "orthogonalization";
    case Kernel::factor_assembly: return "factor_assembly";
    case Kernel::initialization: return "initialization";
    case Kernel::svd: return "svd";
    case Kernel::residual: return "residual";
  }
  return "unknown";
}

double FlopSnapshot::step_flops() const {
  return total_flops() - (*this)[Kernel::svd] - (*this)[Kernel::residual];
}

double FlopSnapshot::total_flops() const {
  return std::accumulate(flops.begin(), flops.end(), 0.0);
}

void FlopModel::add_base_applications(std::uint64_t columns, double flops_per_column) {
  current_.base_applications += columns;
  base_columns_ += columns;
  base_flops_ += static_cast<double>(columns) * flops_per_column;
}

FlopSnapshot FlopModel::snapshot(int k) {
  FlopSnapshot out = current_;
  out.k = k;
  history_.push_back(out);
  current_ = FlopSnapshot{};
  return out;
}

FlopSnapshot FlopModel::close_initialization() {
  init_ = current_;
  init_.k = -1;
  current_ = FlopSnapshot{};
  return init_;
}

FlopSnapshot FlopModel::flop_snapshot(int k) const {
  for (const auto& s : history_)
    if (s.k == k) return s;
  FlopSnapshot empty;
  empty.k = k;
  return empty;
}

double FlopModel::c_gamma(double n) const {
  if (base_columns_ == 0 || n <= 0.0) return 0.0;
  return base_flops_ / (static_cast<double>(base_columns_) * n);
}

void write_flop_csv(std::ostream& os, const std::vector<FlopSnapshot>& history) {
  os << "k,kernel,count\n";
  os << std::setprecision(17);
  for (const auto& s : history) {
    for (int i = 0; i < kKernelCount; ++i)
      os << s.k << ',' << kernel_label(static_cast<Kernel>(i)) << ',' << s.flops[i] << '\n';
    os << s.k << ",base_applications," << s.base_applications << '\n';
    os << s.k << ",implicit_block_applications," << s.implicit_block_applications << '\n';
  }
}

}  // namespace tnare
