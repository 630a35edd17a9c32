#pragma once

#include <cstdint>
#include <string>

#include "diraclap/operators.hpp"

namespace diraclap {

/// 64-byte little-endian header of the binary operator dump, followed by
/// rows * cols (re, im) float64 pairs in row-major order.
struct OperatorDumpHeader {
  char magic[4] = {'D', 'L', 'A', 'P'};
  std::uint32_t version = 1;
  std::int32_t n = 0;
  std::int32_t spinor_dim = 0;
  std::int32_t points_per_axis = 0;
  std::int32_t branch = 0;  // 0 outgoing, 1 incoming
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  double L = 0.0;
  double h = 0.0;
  std::uint8_t padding[8] = {};
};
static_assert(sizeof(OperatorDumpHeader) == 64);

void write_operator_dump(const std::string& path, const KernelOperator& op);

struct OperatorDump {
  OperatorDumpHeader header;
  CMatrix matrix;
};

OperatorDump read_operator_dump(const std::string& path);

}  // namespace diraclap
