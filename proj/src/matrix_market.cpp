#include "specoarse/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "specoarse/error.hpp"

namespace specoarse {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

MarketFile read_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line)) throw InputError(where(path, lineno) + "empty file");
  std::istringstream header(lower(line));
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%matrixmarket" || object != "matrix" || format != "coordinate") {
    throw InputError(where(path, lineno) + "expected '%%MatrixMarket matrix coordinate ...'");
  }
  MarketFile out;
  if (field == "pattern") {
    out.pattern = true;
  } else if (field != "real" && field != "integer" && field != "double") {
    throw InputError(where(path, lineno) + "unsupported field '" + field + "'");
  }
  if (symmetry == "symmetric") {
    out.symmetric = true;
  } else if (symmetry != "general") {
    throw InputError(where(path, lineno) + "unsupported symmetry '" + symmetry + "'");
  }

  // comments, then the size line
  long long rows = -1, cols = -1, nnz = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '%') {
      const std::string tag = "%unit_exponent:";
      if (line.compare(0, tag.size(), tag) == 0) {
        try {
          std::size_t used = 0;
          const std::string rest = line.substr(tag.size());
          out.unit_exponent = std::stoi(rest, &used);
          if (rest.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw InputError(where(path, lineno) + "malformed unit_exponent comment");
        }
      }
      continue;
    }
    std::istringstream size(line);
    if (!(size >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0) {
      throw InputError(where(path, lineno) + "malformed size line");
    }
    break;
  }
  if (rows < 0) throw InputError(path.string() + ": missing size line");
  if (out.symmetric && rows != cols) throw InputError(path.string() + ": symmetric file must be square");

  std::map<std::pair<Index, Index>, std::size_t> seen;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz) * (out.symmetric ? 2 : 1));
  long long read = 0;
  while (read < nnz && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    double v = 1.0;
    if (!(entry >> i >> j) || (!out.pattern && !(entry >> v))) {
      throw InputError(where(path, lineno) + "malformed entry");
    }
    if (i < 1 || j < 1 || i > rows || j > cols) {
      throw InputError(where(path, lineno) + "index out of range");
    }
    Index r = i - 1, c = j - 1;
    if (out.symmetric && r < c) std::swap(r, c);
    if (!seen.emplace(std::make_pair(r, c), lineno).second) {
      throw InputError(where(path, lineno) + "duplicate entry (" + std::to_string(i) + ", " +
                       std::to_string(j) + ")");
    }
    triplets.emplace_back(r, c, v);
    if (out.symmetric && r != c) triplets.emplace_back(c, r, v);
    ++read;
  }
  if (read < nnz) throw InputError(path.string() + ": expected " + std::to_string(nnz) + " entries, found " + std::to_string(read));

  out.matrix.resize(rows, cols);
  out.matrix.setFromTriplets(triplets.begin(), triplets.end());
  canonicalize(out.matrix);
  return out;
}

SparseSymMatrix read_sym_matrix(const std::filesystem::path& path) {
  MarketFile f = read_market(path);
  try {
    return SparseSymMatrix::from_matrix(std::move(f.matrix), f.unit_exponent);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

DiagonalMass read_mass(const std::filesystem::path& path) {
  const MarketFile f = read_market(path);
  if (f.matrix.rows() != f.matrix.cols()) throw InputError(path.string() + ": mass matrix must be square");
  Vector d = Vector::Zero(f.matrix.rows());
  for (Index j = 0; j < f.matrix.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(f.matrix, j); it; ++it) {
      if (it.row() != j) {
        throw InputError(path.string() + ": mass matrix has off-diagonal entry (" +
                         std::to_string(it.row() + 1) + ", " + std::to_string(j + 1) + ")");
      }
      if (it.value() < 0.0) {
        throw InputError(path.string() + ": negative mass entry at " + std::to_string(j + 1));
      }
      d[j] = it.value();
    }
  }
  return DiagonalMass(std::move(d), f.unit_exponent);
}

SparsityPattern read_pattern(const std::filesystem::path& path) {
  return SparsityPattern::of(read_market(path).matrix);
}

void write_market(const SparseSymMatrix& a, const std::filesystem::path& path) {
  auto out = open_out(path);
  const auto& m = a.matrix();
  Index lower_nnz = 0;
  for (Index j = 0; j < m.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) lower_nnz += it.row() >= j;
  }
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << "%unit_exponent: " << a.unit_exponent() << "\n";
  out << m.rows() << " " << m.cols() << " " << lower_nnz << "\n";
  for (Index j = 0; j < m.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
      if (it.row() >= j) out << it.row() + 1 << " " << j + 1 << " " << format_value(it.value()) << "\n";
    }
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void write_market(const DiagonalMass& m, const std::filesystem::path& path) {
  auto out = open_out(path);
  Index nnz = 0;
  for (Index i = 0; i < m.dim(); ++i) nnz += m[i] != 0.0;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << "%unit_exponent: " << m.unit_exponent() << "\n";
  out << m.dim() << " " << m.dim() << " " << nnz << "\n";
  for (Index i = 0; i < m.dim(); ++i) {
    if (m[i] != 0.0) out << i + 1 << " " << i + 1 << " " << format_value(m[i]) << "\n";
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void write_market(const SparseMatrix& a, const std::filesystem::path& path, int unit_exponent) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << "%unit_exponent: " << unit_exponent << "\n";
  out << a.rows() << " " << a.cols() << " " << a.nonZeros() << "\n";
  for (Index j = 0; j < a.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      out << it.row() + 1 << " " << j + 1 << " " << format_value(it.value()) << "\n";
    }
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void write_pattern(const SparsityPattern& p, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate pattern general\n";
  out << p.rows() << " " << p.cols() << " " << p.nonzeros() << "\n";
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j : p.row(i)) out << i + 1 << " " << j + 1 << "\n";
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

}  // namespace specoarse
