#pragma once

#include <atomic>
#include <string>

#include "sidelink/l2s/table.hpp"
#include "sidelink/ll/campaign.hpp"
#include "sidelink/sl/engine.hpp"

namespace sidelink::cli {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
    uint64_t seed = 1;
    ll::CampaignConfig ll;
    sl::ScenarioConfig sl;
    sl::PrrSweep sweep;

    RunConfig();
};

// JSON round trip for the run configuration. Parsing accepts partial
// documents: absent fields keep their defaults. Parse errors carry the
// offending key in the message.
RunConfig parse_config(const std::string& json_text);
std::string dump_config(const RunConfig& cfg);

// FNV-1a over the canonical dump; embedded in every artifact.
std::string config_hash(const RunConfig& cfg);

// ISO-8601 UTC timestamp; honours SOURCE_DATE_EPOCH for reproducible output.
std::string artifact_date();

// Artifact writers. Paths are created inside `out_dir` (must exist).
void write_bler_csv(const std::string& path, const std::vector<ll::BlerPoint>& points);
void write_bler_plot(const std::string& path, const ll::CampaignConfig& cfg, const ll::SweepResult& sweep);
void write_prr_csv(const std::string& path, const std::vector<sl::SweepPoint>& points);
void write_prr_plot(const std::string& path, const std::vector<sl::SweepPoint>& points);

// Builds the L2S table from a finished sweep, embedding run metadata.
l2s::L2sTable make_table(const RunConfig& cfg, const ll::SweepResult& sweep);

// Cooperative interrupt flag set by the signal handler.
std::atomic<bool>& interrupt_flag();

}  // namespace sidelink::cli
