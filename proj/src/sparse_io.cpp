#include "ctrecov/sparse.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ctrecov {

void write_matrix_market(const SparseMat& m, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
  std::fprintf(f, "%ld %ld %ld\n", static_cast<long>(m.rows()),
               static_cast<long>(m.cols()), static_cast<long>(m.nonZeros()));
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMat::InnerIterator it(m, k); it; ++it) {
      std::fprintf(f, "%ld %ld %.17g\n", static_cast<long>(it.row()) + 1,
                   static_cast<long>(it.col()) + 1, it.value());
    }
  }
  std::fclose(f);
}

SparseMat read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw InvalidArgument("empty Matrix Market file: " + path);
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" ||
        format != "coordinate" || field != "real" || symmetry != "general")
      throw InvalidArgument("unsupported Matrix Market header: " + line);
  }
  long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> rows >> cols >> nnz))
      throw InvalidArgument("bad size line: " + line);
    break;
  }
  if (rows < 0 || cols < 0 || nnz < 0)
    throw InvalidArgument("missing size line in " + path);
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(nnz));
  long seen = 0;
  while (seen < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    long i, j;
    double v;
    std::istringstream ss(line);
    if (!(ss >> i >> j >> v)) throw InvalidArgument("bad entry line: " + line);
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw InvalidArgument("entry out of range: " + line);
    trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    ++seen;
  }
  if (seen != nnz)
    throw InvalidArgument("expected " + std::to_string(nnz) + " entries, got " +
                          std::to_string(seen));
  SparseMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

}  // namespace ctrecov
