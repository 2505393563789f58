#ifndef FRAMESUB_IO_HPP
#define FRAMESUB_IO_HPP

#include <string>

#include <json.hpp>

#include "framesub/bss.hpp"
#include "framesub/fourier.hpp"
#include "framesub/frame.hpp"
#include "framesub/recovery.hpp"

namespace framesub {

// Frame CSV: header "m=<int>,M=<int>", then M rows of 2m reals (re,im pairs).
// The JSON mirror carries {"m", "M", "rows": [[re, im, ...], ...]}.
// Complex storage is interleaved (re, im) per entry in every format.

FrameMatrix read_frame_csv(const std::string& path);
void write_frame_csv(const std::string& path, const FrameMatrix& frame);

FrameMatrix frame_from_json(const nlohmann::json& j);
nlohmann::json frame_to_json(const FrameMatrix& frame);
FrameMatrix read_frame_json(const std::string& path);
void write_frame_json(const std::string& path, const FrameMatrix& frame);

// Reads either format, keyed on the ".json" suffix.
FrameMatrix read_frame_auto(const std::string& path);

// Node CSV: d real columns per row, optional trailing weight column.
NodeSet read_nodes_csv(const std::string& path, Index dimension);
void write_nodes_csv(const std::string& path, const NodeSet& nodes);

// Samples CSV: one "re,im" row per node.
CVector read_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path, const CVector& values);

nlohmann::json bounds_to_json(const FrameBounds& bounds);
nlohmann::json subframe_to_json(const WeightedSubframe& sub);

// Run report shared by all subsampling strategies; strategy-specific fields
// are merged in by the caller.
nlohmann::json bss_report_json(const BssResult& result, Index frame_count, Index dimension,
                               double b, double delta);

nlohmann::json experiment_report_json(const ExperimentReport& report);
std::string experiment_report_csv(const std::vector<ExperimentReport>& reports);

nlohmann::json recovery_report_json(const RecoveryReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace framesub

#endif  // FRAMESUB_IO_HPP
