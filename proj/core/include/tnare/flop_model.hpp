#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace tnare {

/// Work categories of one doubling step. The first six are the step kernels;
/// svd and residual are tracked separately and are not part of step_flops().
enum class Kernel : int {
  core_products = 0,   // small Gram/cross products feeding the core update
  implicit_apply,      // E_k, F_k (or transposes) applied to factor blocks
  rank_updates,        // E_{1,k+1}, F_{1,k+1}
  orthogonalization,   // block Gram-Schmidt + QR of the new directions
  factor_assembly,     // [Q, Q^] U for the truncated factors
  initialization,      // solves and QRs building the k = 0 factors
  svd,                 // SVD of the small assembled core
  residual,            // low-rank residual evaluation
};

inline constexpr int kKernelCount = 8;

std::string_view kernel_label(Kernel k);

/// Flop and event totals for one iteration.
struct FlopSnapshot {
  int k = 0;
  std::array<double, kKernelCount> flops{};
  /// Base-operator (E_0, F_0 or transposes) column applications.
  std::uint64_t base_applications = 0;
  /// Calls to apply an implicit iterate to a factor block.
  std::uint64_t implicit_block_applications = 0;

  double operator[](Kernel kernel) const { return flops[static_cast<int>(kernel)]; }
  /// Sum over the step kernels (everything except svd and residual).
  double step_flops() const;
  double total_flops() const;
};

/// Counts arithmetic per kernel during one solve.
///
/// Counters only increase. snapshot() closes the current iteration and
/// returns the totals accumulated since the previous snapshot. Not
/// thread-safe; a model belongs to exactly one solve.
class FlopModel {
 public:
  void add(Kernel kernel, double flops) { current_.flops[static_cast<int>(kernel)] += flops; }
  void add_base_applications(std::uint64_t columns, double flops_per_column);
  void add_implicit_block_application() { ++current_.implicit_block_applications; }

  /// Closes iteration k and starts a fresh one.
  FlopSnapshot snapshot(int k);
  /// Closes the setup phase (before the first doubling step). Kept apart
  /// from the per-iteration history.
  FlopSnapshot close_initialization();
  const FlopSnapshot& initialization() const { return init_; }

  /// Totals for iteration k (already closed), or a zero snapshot.
  FlopSnapshot flop_snapshot(int k) const;
  const std::vector<FlopSnapshot>& history() const { return history_; }
  const FlopSnapshot& pending() const { return current_; }

  /// Measured c_gamma: counted flops of one base application divided by n.
  double c_gamma(double n) const;

 private:
  FlopSnapshot current_;
  FlopSnapshot init_;
  std::vector<FlopSnapshot> history_;
  double base_flops_ = 0.0;
  std::uint64_t base_columns_ = 0;
};

/// CSV with columns k,kernel,count. Event counters are written with the
/// labels base_applications and implicit_block_applications.
void write_flop_csv(std::ostream& os, const std::vector<FlopSnapshot>& history);

}  // namespace tnare
