#include <gtest/gtest.h>

#include <sstream>

#include "tnare/flop_model.hpp"

namespace tnare {
namespace {

TEST(FlopModel, StartsAtZero) {
  FlopModel fm;
  EXPECT_EQ(fm.pending().total_flops(), 0.0);
  EXPECT_EQ(fm.pending().base_applications, 0u);
  EXPECT_TRUE(fm.history().empty());
  EXPECT_EQ(fm.c_gamma(10.0), 0.0);
}

TEST(FlopModel, SnapshotClosesIteration) {
  FlopModel fm;
  fm.add(Kernel::core_products, 10.0);
  fm.add(Kernel::svd, 5.0);
  fm.add(Kernel::residual, 3.0);
  fm.add_base_applications(4, 7.0 * 8);
  fm.add_implicit_block_application();
  const FlopSnapshot s = fm.snapshot(0);
  EXPECT_EQ(s.k, 0);
  EXPECT_EQ(s[Kernel::core_products], 10.0);
  EXPECT_EQ(s.step_flops(), 10.0);
  EXPECT_EQ(s.total_flops(), 18.0);
  EXPECT_EQ(s.base_applications, 4u);
  EXPECT_EQ(s.implicit_block_applications, 1u);
  EXPECT_EQ(fm.pending().total_flops(), 0.0);

  fm.add(Kernel::rank_updates, 2.0);
  fm.snapshot(1);
  EXPECT_EQ(fm.history().size(), 2u);
  EXPECT_EQ(fm.flop_snapshot(1)[Kernel::rank_updates], 2.0);
  EXPECT_EQ(fm.flop_snapshot(1)[Kernel::core_products], 0.0);
  EXPECT_EQ(fm.flop_snapshot(7).total_flops(), 0.0);
  EXPECT_EQ(fm.flop_snapshot(7).k, 7);
}

TEST(FlopModel, InitializationKeptApart) {
  FlopModel fm;
  fm.add(Kernel::initialization, 100.0);
  const FlopSnapshot init = fm.close_initialization();
  EXPECT_EQ(init.k, -1);
  EXPECT_EQ(fm.initialization()[Kernel::initialization], 100.0);
  EXPECT_TRUE(fm.history().empty());
  EXPECT_EQ(fm.pending().total_flops(), 0.0);
}

TEST(FlopModel, CGammaFromBaseApplications) {
  FlopModel fm;
  fm.add_base_applications(3, 7.0 * 16);
  fm.snapshot(0);
  fm.add_base_applications(5, 7.0 * 16);
  EXPECT_DOUBLE_EQ(fm.c_gamma(16.0), 7.0);
}

TEST(FlopModel, CsvLayout) {
  FlopModel fm;
  fm.add(Kernel::implicit_apply, 1.5);
  fm.add_base_applications(2, 1.0);
  fm.snapshot(0);
  std::ostringstream os;
  write_flop_csv(os, fm.history());
  const std::string text = os.str();
  EXPECT_EQ(text.rfind("k,kernel,count\n", 0), 0u);
  EXPECT_NE(text.find("0,implicit_apply,1.5\n"), std::string::npos);
  EXPECT_NE(text.find("0,base_applications,2\n"), std::string::npos);
  EXPECT_NE(text.find("0,implicit_block_applications,0\n"), std::string::npos);
  int lines = 0;
  for (char ch : text) lines += ch == '\n';
  EXPECT_EQ(lines, 1 + kKernelCount + 2);
}

TEST(FlopModel, KernelLabels) {
  EXPECT_EQ(kernel_label(Kernel::core_products), "core_products");
  EXPECT_EQ(kernel_label(Kernel::residual), "residual");
}

}  // namespace
}  // namespace tnare
