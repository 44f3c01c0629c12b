#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "tnare/errors.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {
namespace {

TEST(InstanceIo, RoundTripIsExact) {
  const TransportParams p{0.9, 0.1, 37};
  const Quadrature q = gauss_legendre(37);
  std::stringstream ss;
  write_instance(ss, p, q);
  const InstanceFile f = read_instance(ss);
  EXPECT_EQ(f.params.n, 37);
  EXPECT_EQ(f.params.c, 0.9);
  EXPECT_EQ(f.params.alpha, 0.1);
  EXPECT_EQ(f.quad.omega, q.omega);
  EXPECT_EQ(f.quad.weights, q.weights);
}

TEST(InstanceIo, ScalarFileContents) {
  std::stringstream ss;
  write_instance(ss, TransportParams{0.5, 0.0, 1}, gauss_legendre(1));
  const std::string text = ss.str();
  EXPECT_NE(text.find("tnare-instance 1"), std::string::npos);
  EXPECT_NE(text.find("\n0.5 1\n"), std::string::npos);
}

TEST(InstanceIo, LargeFileWeightsSumToOne) {
  const auto path = std::filesystem::temp_directory_path() / "tnare_io_4096.txt";
  write_instance_file(path.string(), TransportParams{0.5, 0.5, 4096}, gauss_legendre(4096));
  const InstanceFile f = read_instance_file(path.string());
  std::filesystem::remove(path);
  EXPECT_EQ(f.quad.size(), 4096);
  EXPECT_NEAR(f.quad.weights.sum(), 1.0, 1e-14);
}

TEST(InstanceIo, CommentsIgnored) {
  std::stringstream ss("# made by hand\ntnare-instance 1\nn 2\n# nodes follow\nc 0.5\nalpha 0.5\n"
                       "0.75 0.5\n0.25 0.5\n");
  const InstanceFile f = read_instance(ss);
  EXPECT_EQ(f.quad.omega(0), 0.75);
  EXPECT_EQ(f.quad.weights(1), 0.5);
}

TEST(InstanceIo, RejectsMalformedInput) {
  auto parse = [](const std::string& text) {
    std::stringstream ss(text);
    return read_instance(ss);
  };
  EXPECT_THROW(parse(""), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 2\nn 1\nc 0.5\nalpha 0\n0.5 1\n"), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 1\nn 2\nc 0.5\nalpha 0\n0.5 1\n"), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 1\nn 1\nc 0.5\nalpha 1.5\n0.5 1\n"), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 1\nn 1\nc 0.5\nalpha 0\n0.5 0.9\n"), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 1\nn 2\nc 0.5\nalpha 0\n0.25 0.5\n0.75 0.5\n"), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 1\nn 1\nc 0.5\nalpha 0\n0.5 1 7\n"), InvalidInput);
  EXPECT_THROW(parse("tnare-instance 1\nn 1\nc 0.5\nalpha 0\n0.5 1\n0.4 1\n"), InvalidInput);
  EXPECT_THROW(read_instance_file("/nonexistent/instance.txt"), InvalidInput);
}

}  // namespace
}  // namespace tnare
