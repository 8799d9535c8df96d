#pragma once

// Text formats: dataset CSV, partition/factor JSON config, the model file,
// grid and sample CSV, SVG rendering and JSON reports. Every number is
// written so that it reads back to the same double.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hvrfif/construction.hpp"
#include "hvrfif/evaluator.hpp"
#include "hvrfif/smoothness.hpp"
#include "hvrfif/stability.hpp"

namespace hvrfif {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

/// Header `x,y,z`, one node per row.
ExtendedDataset parse_dataset_csv(std::string_view text);
ExtendedDataset read_dataset_csv(const std::filesystem::path& path);

struct ModelConfig {
  PartitionSpec partition;
  std::vector<RegionFactorSpecs> factors;
};

/// `domains` are node-index pairs, `gamma` is 1-based, `orientation` holds
/// "increasing"/"decreasing", and each of `factors.s/sp/st/stp` is a list
/// of {family, params[, lipschitz]} with one entry per region (or a single
/// entry shared by all regions).
ModelConfig parse_config_json(std::string_view text, std::size_t regions);
ModelConfig read_config(const std::filesystem::path& path, std::size_t regions);

RifsModel build_model(const ExtendedDataset& data, const ModelConfig& config);

std::string model_to_json(const RifsModel& model);
/// Reassembles the model and checks the stored connection matrix against
/// the rebuilt one.
RifsModel model_from_json(std::string_view text);

/// Columns x,f1,f2 with x in user coordinates.
std::string grid_to_csv(const EvaluationGrid& grid, AbscissaScale scale);
/// Reads a grid written by grid_to_csv back onto the unit interval.
EvaluationGrid grid_from_csv(std::string_view text, AbscissaScale scale);

/// Columns x,f1,f2,region (1-based, 0 for nodes).
std::string samples_to_csv(const OrbitSampleSet& samples, AbscissaScale scale);

/// Fixed 800x400 viewport: f1 as a polyline, nodes marked, ticks at the
/// node abscissas.
std::string render_svg(const EvaluationGrid& grid, const RifsModel& model);

std::string smoothness_to_json(const SmoothnessReport& report, const std::optional<HolderEstimate>& estimate);

struct TrialSummary {
  int bound_id = 0;
  std::uint64_t seed = 0;
  Magnitudes magnitudes;
  std::size_t violations = 0;
};

std::string stability_to_json(const TrialSummary& summary, const std::vector<StabilityReport>& rows);

}  // namespace hvrfif
