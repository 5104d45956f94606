// Campaign orchestration: one runner per experiment, a shard ledger for
// resumable replica batches, and the JSON run report.
//
// Report layout (stable key order):
//   config    : full echo of the parsed configuration
//   campaign  : name
//   metrics   : array of {name, value, stderr?, provenance{module, op, seed}}
//   seed_ledger : {master_seed, campaign_tag, stream rule}
//   artifacts : [{file, checksum}]
//   wall_seconds, status ("ok" | "check-failed" | "error")
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ichaos/config.hpp"
#include "ichaos/io.hpp"

namespace ichaos {

// Exit codes surfaced by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;
inline constexpr int kExitCheckFailed = 2;

std::uint64_t campaign_tag_of(Campaign c);

// Tracks completed replica shards in <dir>/manifest.json.  A shard counts as
// done when the manifest lists it and the recorded artifact checksum still
// matches the file on disk; --resume skips those shards.
class ShardLedger {
  public:
    ShardLedger(std::string dir, std::string campaign, bool resume);

    bool completed(const std::string& shard_id) const;
    void record(const std::string& shard_id, const std::string& artifact_file);
    void flush() const;

    const std::string& dir() const { return dir_; }

  private:
    std::string dir_;
    std::string manifest_path_;
    Json entries_;
};

struct RunReport {
    Json document;
    int exit_code = kExitOk;
};

// Dispatches on cfg.experiment, times the run, assembles the report, and
// writes <out>/report.json plus campaign artifacts.  Runtime errors are
// caught and folded into the report (exit code 1).
RunReport run_campaign(const ExperimentConfig& cfg, bool resume);

// Per-campaign entry points (used directly by tests); each returns the
// metrics array and writes its CSV artifacts under cfg.output_dir.
Json run_moments(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_scaling(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_lil(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_fastpoints(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_tail(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_besov(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_whitenoise(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_constant_a(const ExperimentConfig& cfg, ShardLedger& ledger);
Json run_sample_field(const ExperimentConfig& cfg, ShardLedger& ledger);

}  // namespace ichaos
