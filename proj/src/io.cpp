#include "signrec/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "signrec/errors.hpp"

namespace signrec {

namespace {

void fail(const std::filesystem::path& path, const std::string& what) {
  throw ParameterError(path.string() + ": " + what);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::filesystem::path& path, const std::string& s,
                    std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0'))
    fail(path, "line " + std::to_string(line_no) + ": bad number '" + s + "'");
  if (!std::isfinite(v))
    fail(path, "line " + std::to_string(line_no) + ": non-finite value");
  return v;
}

void put_u64_le(std::ofstream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64_le(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

constexpr char kMagic[4] = {'S', 'R', 'X', '1'};

}  // namespace

std::string format_double(double x) {
  char buf[40];
  // %.17g always round-trips; prefer the shorter %.15g / %.16g when they do.
  for (int prec : {15, 16, 17}) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) return buf;
  }
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const Mat& m) {
  if (!m.allFinite()) fail(path, "refusing to write non-finite entries");
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    out << (j ? ",c" : "c") << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) fail(path, "write failed");
}

Mat read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  const std::size_t p = split_csv_line(line).size();
  if (p == 0) fail(path, "empty header");

  std::vector<double> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != p)
      fail(path, "line " + std::to_string(line_no) + ": expected " +
                     std::to_string(p) + " fields, got " +
                     std::to_string(fields.size()));
    for (const auto& f : fields) data.push_back(parse_double(path, f, line_no));
  }
  if (data.empty()) fail(path, "no data rows");
  const auto n = static_cast<Eigen::Index>(data.size() / p);
  Mat m(n, static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = data[static_cast<std::size_t>(i) * p +
                     static_cast<std::size_t>(j)];
  return m;
}

void write_matrix_srx(const std::filesystem::path& path, const Mat& m) {
  if (!m.allFinite()) fail(path, "refusing to write non-finite entries");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out.write(kMagic, 4);
  put_u64_le(out, static_cast<std::uint64_t>(m.rows()));
  put_u64_le(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      unsigned char b[8];
      for (int t = 0; t < 8; ++t)
        b[t] = static_cast<unsigned char>(bits >> (8 * t));
      out.write(reinterpret_cast<const char*>(b), 8);
    }
  }
  if (!out) fail(path, "write failed");
}

Mat read_matrix_srx(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    fail(path, "not a matrix file (bad magic)");
  std::uint64_t n = get_u64_le(in);
  std::uint64_t p = get_u64_le(in);
  if (!in || n == 0 || p == 0 || n > (1u << 24) || p > (1u << 24))
    fail(path, "bad matrix dimensions in header");
  Mat m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < p; ++j) {
      unsigned char b[8];
      in.read(reinterpret_cast<char*>(b), 8);
      if (!in) fail(path, "truncated data section");
      std::uint64_t bits = 0;
      for (int t = 0; t < 8; ++t)
        bits |= static_cast<std::uint64_t>(b[t]) << (8 * t);
      double v;
      std::memcpy(&v, &bits, 8);
      if (!std::isfinite(v)) fail(path, "non-finite entry");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  return m;
}

Mat read_matrix_auto(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  in.close();
  if (std::memcmp(magic, kMagic, 4) == 0) return read_matrix_srx(path);
  return read_matrix_csv(path);
}

void write_matrix_auto(const std::filesystem::path& path, const Mat& m) {
  if (path.extension() == ".srx")
    write_matrix_srx(path, m);
  else
    write_matrix_csv(path, m);
}

void write_vector_csv(const std::filesystem::path& path, const Vec& v,
                      const std::string& label) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << label << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out << format_double(v[i]) << '\n';
  if (!out) fail(path, "write failed");
}

Vec read_vector_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  std::vector<double> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    data.push_back(parse_double(path, line, line_no));
  }
  if (data.empty()) fail(path, "no data rows");
  return Eigen::Map<Vec>(data.data(), static_cast<Eigen::Index>(data.size()));
}

void write_sign_csv(const std::filesystem::path& path, const SignVector& s) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "sign\n";
  for (Eigen::Index i = 0; i < s.values.size(); ++i)
    out << s.values[i] << '\n';
  if (!out) fail(path, "write failed");
}

SignVector read_sign_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  std::vector<int> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    double v = parse_double(path, line, line_no);
    if (v != -1.0 && v != 0.0 && v != 1.0)
      fail(path, "line " + std::to_string(line_no) +
                     ": sign entries must be -1, 0 or 1");
    data.push_back(static_cast<int>(v));
  }
  if (data.empty()) fail(path, "no data rows");
  Eigen::VectorXi v(static_cast<Eigen::Index>(data.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = data[static_cast<std::size_t>(i)];
  return make_sign_vector(v);
}

void write_solution_csv(std::ostream& out, const SolverSolution& sol) {
  out << "# objective=" << format_double(sol.objective) << '\n'
      << "# residual_norm2_sq=" << format_double(sol.residual_norm2_sq) << '\n'
      << "# iterations=" << sol.iterations << '\n'
      << "# kkt_gap=" << format_double(sol.kkt_gap) << '\n'
      << "# lambda_or_R=" << format_double(sol.lambda_or_R) << '\n'
      << "index,estimate\n";
  for (Eigen::Index i = 0; i < sol.estimate.size(); ++i)
    out << i << ',' << format_double(sol.estimate[i]) << '\n';
}

void write_solution_csv(const std::filesystem::path& path,
                        const SolverSolution& sol) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << "# objective=" << format_double(sol.objective) << '\n'
      << "# residual_norm2_sq=" << format_double(sol.residual_norm2_sq) << '\n'
      << "# iterations=" << sol.iterations << '\n'
      << "# kkt_gap=" << format_double(sol.kkt_gap) << '\n'
      << "# lambda_or_R=" << format_double(sol.lambda_or_R) << '\n'
      << "index,estimate\n";
  for (Eigen::Index i = 0; i < sol.estimate.size(); ++i)
    out << i << ',' << format_double(sol.estimate[i]) << '\n';
  if (!out) fail(path, "write failed");
}

}  // namespace signrec
