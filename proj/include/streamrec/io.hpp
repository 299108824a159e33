#pragma once

// CSV files: UTF-8, header row, '.' decimal separator, doubles written with 17
// significant digits so they read back exactly.

#include <map>
#include <string>
#include <vector>

#include "streamrec/linalg.hpp"
#include "streamrec/measurement.hpp"
#include "streamrec/stream_solver.hpp"

namespace streamrec {

std::string format_double(double v);

/// Header `t,y`.
SampleStream read_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path, const SampleStream& samples);
std::string samples_csv(const SampleStream& samples);

/// Header `k,n,alpha_star`, n 1-based.
std::string coefficients_csv(const std::map<long, Vector>& coefficients);
std::map<long, Vector> read_coefficients_csv(const std::string& path);

/// Header `k,K,n,alpha`.
std::string estimates_csv(const EstimateHistory& history);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace streamrec
