#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "tnare/errors.hpp"
#include "tnare/transport_problem.hpp"

namespace tnare {

namespace {

constexpr const char* kMagic = "tnare-instance";
constexpr int kVersion = 1;

// Next line that is neither blank nor a comment.
bool next_line(std::istream& is, std::string& line, int& lineno) {
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

bool only_space_left(std::istringstream& ls) {
  std::string extra;
  return !(ls >> extra);
}

template <typename T>
T keyed_value(std::istream& is, const std::string& key, int& lineno) {
  std::string line;
  if (!next_line(is, line, lineno)) throw InvalidInput("instance file: missing field '" + key + "'");
  std::istringstream ls(line);
  std::string got;
  T value{};
  if (!(ls >> got >> value) || got != key || !only_space_left(ls)) {
    throw InvalidInput("instance file line " + std::to_string(lineno) + ": expected '" + key +
                       " <value>'");
  }
  return value;
}

}  // namespace

void write_instance(std::ostream& os, const TransportParams& params, const Quadrature& quad) {
  params.validate();
  quad.validate();
  if (quad.size() != params.n) throw InvalidInput("write_instance: quadrature size != n");
  os << kMagic << ' ' << kVersion << '\n';
  os << std::setprecision(17);
  os << "n " << params.n << '\n';
  os << "c " << params.c << '\n';
  os << "alpha " << params.alpha << '\n';
  for (Index i = 0; i < quad.size(); ++i) os << quad.omega[i] << ' ' << quad.weights[i] << '\n';
}

InstanceFile read_instance(std::istream& is) {
  int lineno = 0;
  std::string line;
  if (!next_line(is, line, lineno)) throw InvalidInput("instance file is empty");
  {
    std::istringstream ls(line);
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != kMagic)
      throw InvalidInput("instance file: missing 'tnare-instance <version>' header");
    if (version != kVersion)
      throw InvalidInput("instance file: unsupported version " + std::to_string(version));
  }
  InstanceFile out;
  const auto n = keyed_value<long long>(is, "n", lineno);
  if (n < 1) throw InvalidInput("instance file: n must be positive");
  out.params.n = static_cast<Index>(n);
  out.params.c = keyed_value<double>(is, "c", lineno);
  out.params.alpha = keyed_value<double>(is, "alpha", lineno);
  out.params.validate();

  out.quad.omega.resize(out.params.n);
  out.quad.weights.resize(out.params.n);
  for (Index i = 0; i < out.params.n; ++i) {
    if (!next_line(is, line, lineno))
      throw InvalidInput("instance file: expected " + std::to_string(out.params.n) +
                         " node lines, found " + std::to_string(i));
    std::istringstream ls(line);
    if (!(ls >> out.quad.omega[i] >> out.quad.weights[i]) || !only_space_left(ls))
      throw InvalidInput("instance file line " + std::to_string(lineno) +
                         ": expected '<omega> <weight>'");
  }
  if (next_line(is, line, lineno))
    throw InvalidInput("instance file line " + std::to_string(lineno) + ": trailing data");
  out.quad.validate();
  return out;
}

void write_instance_file(const std::string& path, const TransportParams& params,
                         const Quadrature& quad) {
  std::ofstream os(path);
  if (!os) throw InvalidInput("cannot open '" + path + "' for writing");
  write_instance(os, params, quad);
  if (!os) throw InvalidInput("write to '" + path + "' failed");
}

InstanceFile read_instance_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidInput("cannot open instance file '" + path + "'");
  return read_instance(is);
}

}  // namespace tnare
