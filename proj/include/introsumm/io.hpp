#pragma once

#include <map>
#include <string>
#include <vector>

#include "introsumm/evalstat.hpp"
#include "introsumm/model.hpp"
#include "introsumm/oracle.hpp"

namespace introsumm {

/// Provenance header: {"_meta": {...}} as the first line of an artifact.
/// Readers skip any line carrying a "_meta" key.
std::string make_meta_line(const std::string& subcommand,
                           const std::map<std::string, std::string>& config,
                           const std::vector<std::string>& input_paths);

std::uint64_t hash_file(const std::string& path);

void write_labels(const std::string& path, const std::map<std::string, LabelSet>& labels,
                  const std::string& meta_line);
std::map<std::string, LabelSet> read_labels(const std::string& path);

void write_predictions(const std::string& path, const std::vector<Prediction>& predictions,
                       const std::string& meta_line);
std::vector<Prediction> read_predictions(const std::string& path);

void write_train_log(const std::string& path, const std::vector<TrainLogEntry>& log,
                     const std::string& meta_line);

}  // namespace introsumm
