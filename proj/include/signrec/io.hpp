#pragma once

#include <filesystem>
#include <string>

#include "signrec/solvers.hpp"
#include "signrec/types.hpp"

namespace signrec {

// Text format: one header line of column labels, then comma-separated rows,
// '.' decimal point, values written with enough digits to round-trip.
void write_matrix_csv(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_csv(const std::filesystem::path& path);

// Binary format: magic "SRX1", then n and p as little-endian uint64, then
// n*p doubles in row-major order.
void write_matrix_srx(const std::filesystem::path& path, const Mat& m);
Mat read_matrix_srx(const std::filesystem::path& path);

// Dispatches on the file's magic bytes, falling back to the text reader.
Mat read_matrix_auto(const std::filesystem::path& path);
void write_matrix_auto(const std::filesystem::path& path, const Mat& m);

void write_vector_csv(const std::filesystem::path& path, const Vec& v,
                      const std::string& label = "value");
Vec read_vector_csv(const std::filesystem::path& path);

void write_sign_csv(const std::filesystem::path& path, const SignVector& s);
SignVector read_sign_csv(const std::filesystem::path& path);

// Solution file: '#' diagnostic header lines, then "index,estimate" rows.
void write_solution_csv(const std::filesystem::path& path,
                        const SolverSolution& sol);
void write_solution_csv(std::ostream& out, const SolverSolution& sol);

// Shortest decimal representation that round-trips a double.
std::string format_double(double x);

}  // namespace signrec
