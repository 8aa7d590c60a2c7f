#pragma once

#include <string>
#include <vector>

#include "mflda/classify.hpp"
#include "mflda/fd_model.hpp"
#include "mflda/metrics.hpp"
#include "mflda/scatter.hpp"
#include "mflda/simgen.hpp"
#include "mflda/sparse.hpp"
#include "mflda/tuning.hpp"
#include "mflda/types.hpp"

namespace mflda {

// Doubles are written with 17 significant digits so a round trip is
// bit exact; lines end with '\n'. Fields must not contain commas.
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& what);

// Long-format observations: subject_id,time,feature,value[,class].
// An empty or absent class column leaves the subject unlabeled.
FunctionalDataSet read_long_csv(const std::string& path);
void write_long_csv(const std::string& path, const FunctionalDataSet& data);

void write_truth_csv(const std::string& path, const GroundTruth& truth,
                     const std::vector<std::string>& feature_names,
                     int n_groups);

void write_predictions_csv(const std::string& path,
                           const std::vector<std::string>& subject_ids,
                           const std::vector<int>& labels,
                           const std::vector<std::string>& class_names,
                           const std::vector<Prediction>& preds);

void write_scores_csv(const std::string& path,
                      const std::vector<std::string>& subject_ids,
                      const Vector& grid, const ScoreSet& scores);

void write_selected_csv(const std::string& path,
                        const std::vector<std::string>& feature_names,
                        const SelectionProfile& profile);

void write_tuning_csv(const std::string& path, const TuneResult& result);

void write_metrics_csv(const std::string& path, const EvaluationReport& report);

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm,
                         const std::vector<std::string>& class_names);

// Binary scatter dump: magic "MFSC", three little-endian uint32 fields
// (p, T, mode), then row-major float64 payloads for the between scatter and
// the within scatter. Time-dependent mode stores one pT-by-pT pair;
// time-independent mode stores T consecutive p-by-p blocks per scatter.
void write_scatter_binary(const std::string& path, const ScatterPair& scatter);
ScatterPair read_scatter_binary(const std::string& path);

}  // namespace mflda
