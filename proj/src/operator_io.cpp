#include "diraclap/operator_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace diraclap {

void write_operator_dump(const std::string& path, const KernelOperator& op) {
  OperatorDumpHeader hdr;
  hdr.n = op.grid().n;
  hdr.spinor_dim = op.spinor_dim();
  hdr.points_per_axis = op.grid().points_per_axis;
  hdr.branch = op.branch() == Branch::Outgoing ? 0 : 1;
  hdr.rows = op.matrix().rows();
  hdr.cols = op.matrix().cols();
  hdr.L = op.grid().L;
  hdr.h = op.grid().h();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(&hdr), sizeof(hdr));
  std::vector<double> row(2 * hdr.cols);
  for (Eigen::Index i = 0; i < hdr.rows; ++i) {
    for (Eigen::Index j = 0; j < hdr.cols; ++j) {
      row[2 * j] = op.matrix()(i, j).real();
      row[2 * j + 1] = op.matrix()(i, j).imag();
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
  }
  if (!out) throw NumericalError("short write to '" + path + "'");
}

OperatorDump read_operator_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  OperatorDump dump;
  in.read(reinterpret_cast<char*>(&dump.header), sizeof(dump.header));
  if (!in || std::memcmp(dump.header.magic, "DLAP", 4) != 0) throw ValidationError("'" + path + "' is not a DLAP dump");
  const auto& h = dump.header;
  dump.matrix.resize(h.rows, h.cols);
  std::vector<double> row(2 * h.cols);
  for (Eigen::Index i = 0; i < h.rows; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    if (!in) throw ValidationError("'" + path + "' is truncated");
    for (Eigen::Index j = 0; j < h.cols; ++j) dump.matrix(i, j) = cplx(row[2 * j], row[2 * j + 1]);
  }
  return dump;
}

}  // namespace diraclap
