#pragma once

// Measured correlation curves and their CSV form:
//
//   # comment lines start with '#'
//   delta_p,R[,sigma_R]
//   0.25,-0.31,0.02
//
// Decimal point only, no locale. Rows are sorted by delta_p on ingestion.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paircorr {

struct DataPoint {
    double delta_p = 0.0;
    double r = 0.0;
    std::optional<double> sigma_r; ///< measurement uncertainty of r, > 0
};

struct Dataset {
    std::vector<DataPoint> points;
    std::string label;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    /// Least-squares weight of point i: 1 / sigma_R^2 if given, else 1.
    double weight(std::size_t i) const;

    /// Throws DomainError unless delta_p is positive and strictly
    /// increasing, r finite and every sigma_R positive.
    void validate() const;
};

/// Parses the CSV format above. Malformed rows raise ParseError with the
/// 1-based line number; duplicate delta_p values are rejected.
Dataset read_dataset(std::istream& in, std::string label = {});
Dataset read_dataset_file(const std::filesystem::path& path);

/// Writes the CSV format; the sigma_R column is emitted only if every point has one.
void write_dataset(std::ostream& out, const Dataset& data);

/// One message per point with r < -1. Such values cannot come from the model
/// but are kept, since measurement noise produces them.
std::vector<std::string> advisory_warnings(const Dataset& data);

/// Shortest decimal representation that round-trips (std::to_chars).
std::string format_number(double value);

/// std::from_chars on the whole of `text` (surrounding blanks allowed).
std::optional<double> parse_number(std::string_view text);

} // namespace paircorr
