#pragma once

// JSON documents for threshold sets and fitted models.
//
// Thresholds: [{"covariate": name, "cuts": [..]}, ...]
// Model: {"format": "filterlr-model", "version": 1, "intercept", "lambda",
//         "thresholds", "column_means", "theta", "B", "convergence"}
// Doubles are written in shortest round-trip form, so a save/load cycle
// reproduces every coefficient bit for bit.

#include <filesystem>
#include <string>

#include "filterlr/fused_logistic.hpp"
#include "filterlr/thresholds.hpp"

namespace filterlr {

inline constexpr const char* kModelFormat = "filterlr-model";
inline constexpr int kModelVersion = 1;

std::string thresholds_to_json(const ThresholdSet& thresholds);
ThresholdSet thresholds_from_json(const std::string& text);
void save_thresholds(const ThresholdSet& thresholds, const std::filesystem::path& path);
ThresholdSet load_thresholds(const std::filesystem::path& path);

std::string model_to_json(const FilterModel& model);
/// Parses and validates a model document; throws ValidationError on schema
/// or consistency errors.
FilterModel model_from_json(const std::string& text);
void save_model(const FilterModel& model, const std::filesystem::path& path);
FilterModel load_model(const std::filesystem::path& path);

/// Whole file as a string; throws RuntimeError if it cannot be read.
std::string read_text(const std::filesystem::path& path);
/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace filterlr
