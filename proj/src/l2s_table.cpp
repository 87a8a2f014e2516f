#include "sidelink/l2s/table.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sidelink::l2s {

namespace {

constexpr double kLogFloor = 1e-6;

double round9(double v) {
    if (v == 0.0) return 0.0;
    std::ostringstream ss;
    ss.precision(9);
    ss << v;
    return std::stod(ss.str());
}

}  // namespace

void L2sTable::validate() const {
    if (snr_grid_db.empty() || velocities_kmh.empty()) throw std::invalid_argument("l2s: empty table");
    for (std::size_t i = 1; i < snr_grid_db.size(); ++i)
        if (snr_grid_db[i] <= snr_grid_db[i - 1]) throw std::invalid_argument("l2s: SNR grid must increase");
    if (bler.size() != velocities_kmh.size()) throw std::invalid_argument("l2s: row count mismatch");
    for (const auto& row : bler) {
        if (row.size() != snr_grid_db.size()) throw std::invalid_argument("l2s: column count mismatch");
        for (double v : row)
            if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("l2s: BLER outside [0,1]");
    }
}

std::vector<std::size_t> L2sTable::non_monotone_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < bler.size(); ++r)
        for (std::size_t c = 1; c < bler[r].size(); ++c)
            if (bler[r][c] > bler[r][c - 1] + 1e-12) {
                out.push_back(r);
                break;
            }
    return out;
}

double lookup(const L2sTable& table, double snr_db, double velocity_kmh) {
    table.validate();

    std::size_t row = 0;
    double best = std::abs(table.velocities_kmh[0] - velocity_kmh);
    for (std::size_t r = 1; r < table.velocities_kmh.size(); ++r) {
        double d = std::abs(table.velocities_kmh[r] - velocity_kmh);
        if (d < best - 1e-12) {  // strict improvement keeps ties on the lower velocity
            best = d;
            row = r;
        }
    }
    const auto& grid = table.snr_grid_db;
    const auto& vals = table.bler[row];

    if (snr_db <= grid.front()) return vals.front();
    if (snr_db >= grid.back()) return snr_db > grid.back() ? 0.0 : vals.back();

    std::size_t hi = 1;
    while (grid[hi] < snr_db) ++hi;
    std::size_t lo = hi - 1;
    double t = (snr_db - grid[lo]) / (grid[hi] - grid[lo]);
    double la = std::log10(std::max(vals[lo], kLogFloor));
    double lb = std::log10(std::max(vals[hi], kLogFloor));
    double v = std::pow(10.0, la + t * (lb - la));
    return v < kLogFloor ? 0.0 : v;
}

std::string to_json_string(const L2sTable& table) {
    nlohmann::ordered_json j;
    j["snr_grid_db"] = table.snr_grid_db;
    j["velocities_kmh"] = table.velocities_kmh;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.bler) {
        auto r = nlohmann::ordered_json::array();
        for (double v : row) r.push_back(round9(v));
        rows.push_back(r);
    }
    j["bler"] = rows;
    if (!table.bler_raw.empty()) {
        auto raws = nlohmann::ordered_json::array();
        for (const auto& row : table.bler_raw) {
            auto r = nlohmann::ordered_json::array();
            for (double v : row) r.push_back(round9(v));
            raws.push_back(r);
        }
        j["bler_raw"] = raws;
    }
    j["metadata"] = table.metadata;
    return j.dump(2) + "\n";
}

L2sTable from_json_string(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("l2s parse error: ") + e.what());
    }
    L2sTable t;
    for (const char* key : {"snr_grid_db", "velocities_kmh", "bler"})
        if (!j.contains(key)) throw std::runtime_error(std::string("l2s parse error: missing section '") + key + "'");
    t.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    t.velocities_kmh = j.at("velocities_kmh").get<std::vector<double>>();
    t.bler = j.at("bler").get<std::vector<std::vector<double>>>();
    if (j.contains("bler_raw")) t.bler_raw = j.at("bler_raw").get<std::vector<std::vector<double>>>();
    if (j.contains("metadata"))
        for (auto& [k, v] : j.at("metadata").items()) t.metadata[k] = v.get<std::string>();
    t.validate();
    t.monotonicity_warning = !t.non_monotone_rows().empty();
    return t;
}

void save(const L2sTable& table, const std::string& path) {
    table.validate();
    std::ofstream f(path);
    if (!f) throw std::runtime_error("l2s save: cannot open " + path);
    f << to_json_string(table);
}

L2sTable load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("l2s load: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return from_json_string(ss.str());
}

}  // namespace sidelink::l2s
