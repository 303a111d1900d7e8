#pragma once

#include <span>
#include <string>
#include <vector>

namespace tcmap::csv {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal representation that round-trips the binary64 value.
std::string format_double(double v);

std::string schema_row();

// Writes rows as-is; the caller assembles cells. Kept dumb on purpose so
// byte-stable output only depends on the cell strings.
std::string join_row(std::span<const std::string> cells);

}  // namespace tcmap::csv

namespace tcmap::svg {

// Static log-log scatter with a fitted line, written as a standalone SVG.
void write_loglog_plot(const std::string& path, std::span<const double> xs,
                       std::span<const double> ys, double fit_slope,
                       double fit_intercept, const std::string& title,
                       const std::string& xlabel, const std::string& ylabel);

}  // namespace tcmap::svg
