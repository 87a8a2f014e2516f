#pragma once

#include <map>
#include <string>
#include <vector>

namespace sidelink::l2s {

// BLER(SNR, velocity) lookup table, the link-to-system interface.
// Rows are velocities, columns follow the SNR grid.
struct L2sTable {
    std::vector<double> snr_grid_db;
    std::vector<double> velocities_kmh;
    std::vector<std::vector<double>> bler;      // isotonic, used by lookup
    std::vector<std::vector<double>> bler_raw;  // as measured (optional)
    std::map<std::string, std::string> metadata;
    bool monotonicity_warning = false;  // set by load when a row increases

    void validate() const;

    // Indices of rows violating non-increasing order (on `bler`).
    std::vector<std::size_t> non_monotone_rows() const;
};

// Piecewise-linear interpolation in log10(BLER) over SNR. Zeros are floored
// at 1e-6 for the log step and results below 1e-6 return 0. SNR below the
// grid clamps to the first column; above the grid returns 0. Velocity snaps
// to the nearest grid row, ties toward the lower velocity.
double lookup(const L2sTable& table, double snr_db, double velocity_kmh);

// Self-describing JSON, 9 significant digits.
void save(const L2sTable& table, const std::string& path);
L2sTable load(const std::string& path);

std::string to_json_string(const L2sTable& table);
L2sTable from_json_string(const std::string& text);

}  // namespace sidelink::l2s
