#include "seqbmi/conic.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

namespace seqbmi {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* cbf_cone(ConeType c) {
  switch (c) {
    case ConeType::Zero: return "L=";
    case ConeType::Nonneg: return "L+";
    case ConeType::Soc: return "Q";
    case ConeType::RotatedSoc: return "QR";
    case ConeType::Psd: return "";
  }
  return "";
}

// Lower-triangle (row >= col) source row of PSD entry in the block's image.
Index psd_source(const ConeBlock& b, Index row, Index col) {
  const Index i = col;
  const Index j = row;
  return b.layout == PsdLayout::Svec ? svec_index(b.dim, i, j) : j * b.dim + i;
}

}  // namespace

void write_cbf(std::ostream& out, const ConicProgram& prog) {
  std::vector<const ConeBlock*> scalar;
  std::vector<const ConeBlock*> psd;
  for (const auto& b : prog.blocks) (b.cone == ConeType::Psd ? psd : scalar).push_back(&b);

  out << "VER\n3\n\n";
  out << "OBJSENSE\nMIN\n\n";
  out << "VAR\n" << prog.nvars << " 1\nF " << prog.nvars << "\n\n";

  if (!psd.empty()) {
    out << "PSDCON\n" << psd.size() << "\n";
    for (const auto* b : psd) out << b->dim << "\n";
    out << "\n";
  }

  Index total = 0;
  for (const auto* b : scalar) total += b->rows();
  if (!scalar.empty()) {
    out << "CON\n" << total << " " << scalar.size() << "\n";
    for (const auto* b : scalar) out << cbf_cone(b->cone) << " " << b->rows() << "\n";
    out << "\n";
  }

  std::vector<std::pair<Index, double>> obj;
  for (Index j = 0; j < prog.nvars; ++j) {
    if (prog.objective[j] != 0.0) obj.emplace_back(j, prog.objective[j]);
  }
  if (!obj.empty()) {
    out << "OBJACOORD\n" << obj.size() << "\n";
    for (const auto& [j, v] : obj) out << j << " " << num(v) << "\n";
    out << "\n";
  }
  if (prog.constant != 0.0) out << "OBJBCOORD\n" << num(prog.constant) << "\n\n";

  std::vector<std::tuple<Index, Index, double>> a;
  std::vector<std::pair<Index, double>> bvec;
  Index base = 0;
  for (const auto* b : scalar) {
    for (Index r = 0; r < b->rows(); ++r) {
      std::map<Index, double> row;
      for (SparseMatrix::InnerIterator it(b->map, r); it; ++it) row[it.col()] += it.value();
      for (const auto& [j, v] : row) {
        if (v != 0.0) a.emplace_back(base + r, j, v);
      }
      if (b->offset[r] != 0.0) bvec.emplace_back(base + r, b->offset[r]);
    }
    base += b->rows();
  }
  if (!a.empty()) {
    out << "ACOORD\n" << a.size() << "\n";
    for (const auto& [i, j, v] : a) out << i << " " << j << " " << num(v) << "\n";
    out << "\n";
  }
  if (!bvec.empty()) {
    out << "BCOORD\n" << bvec.size() << "\n";
    for (const auto& [i, v] : bvec) out << i << " " << num(v) << "\n";
    out << "\n";
  }

  std::vector<std::tuple<std::size_t, Index, Index, Index, double>> hc;
  std::vector<std::tuple<std::size_t, Index, Index, double>> dc;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const ConeBlock& b = *psd[k];
    std::map<std::tuple<Index, Index, Index>, double> h;
    for (Index row = 0; row < b.dim; ++row) {
      for (Index col = 0; col <= row; ++col) {
        const Index src = psd_source(b, row, col);
        for (SparseMatrix::InnerIterator it(b.map, src); it; ++it) h[{it.col(), row, col}] += it.value();
        if (b.offset[src] != 0.0) dc.emplace_back(k, row, col, b.offset[src]);
      }
    }
    for (const auto& [key, v] : h) {
      if (v != 0.0) hc.emplace_back(k, std::get<0>(key), std::get<1>(key), std::get<2>(key), v);
    }
  }
  if (!hc.empty()) {
    out << "HCOORD\n" << hc.size() << "\n";
    for (const auto& [k, j, r, c, v] : hc) out << k << " " << j << " " << r << " " << c << " " << num(v) << "\n";
    out << "\n";
  }
  if (!dc.empty()) {
    out << "DCOORD\n" << dc.size() << "\n";
    for (const auto& [k, r, c, v] : dc) out << k << " " << r << " " << c << " " << num(v) << "\n";
    out << "\n";
  }
}

}  // namespace seqbmi
