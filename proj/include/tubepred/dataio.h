/* Copyright 2026 The Tubepred Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/


// File formats.
//
// Detections: JSON lines, one micro-tube per line:
//   {"video": "v0001", "t": 1, "delta": 1, "horizon": [0, 5, 3],
//    "tube": [8 coords], "pred": [4 * (1 + n) coords, optional],
//    "scores": [C + 1 probabilities, background first]}
// Boxes are absolute pixels, x_min y_min x_max y_max.
//
// Manifest: one JSON document
//   {"classes": [...], "videos": [{"id": ..., "num_frames": T,
//    "frame": [w, h], "tubes": [{"class": c, "start_frame": f,
//    "boxes": [[x_min, y_min, x_max, y_max], ...]}]}]}
//
// Tubes: one JSON document
//   {"videos": [{"id": ..., "num_frames": T, "observed_frame": t,
//    "tubes": [{"class": c, "score": s, "detected": {"start": f, "boxes": [...]},
//               "predicted": {"start": f, "boxes": [...]}}]}]}
//
// Report CSV, header `metric,delta,observed_pct,class,value`: per cell one
// row per class (by class id, class column holds the class name) followed by
// a row whose class column is `mean`.
//
// Sweep CSV, header `model,metric,delta,observed_pct,value`: mean values only.

#ifndef TUBEPRED_DATAIO_H_
#define TUBEPRED_DATAIO_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "tubepred/dataset.h"
#include "tubepred/evaluation.h"
#include "tubepred/tube.h"

namespace tubepred {

// Malformed input. what() reads "<source>:<line>: <message>" for line-based
// formats and "<source>: <path>: <message>" for documents.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, int line, const std::string& message);
  ParseError(std::string source, const std::string& location,
             const std::string& message);

  const std::string& source() const { return source_; }
  // 1-based line, 0 for document formats.
  int line() const { return line_; }

 private:
  std::string source_;
  int line_ = 0;
};

// Reads a detection file. Records keep file order and each video's records
// must have non-decreasing t.
std::vector<DetectionRecord> ReadDetections(std::istream& in,
                                            const std::string& source = "<stream>");
std::vector<DetectionRecord> ReadDetections(const std::filesystem::path& path);
void WriteDetections(std::ostream& out, std::span<const DetectionRecord> records);
void WriteDetections(const std::filesystem::path& path,
                     std::span<const DetectionRecord> records);

DatasetManifest ReadManifest(std::istream& in, const std::string& source = "<stream>");
DatasetManifest ReadManifest(const std::filesystem::path& path);
void WriteManifest(std::ostream& out, const DatasetManifest& manifest);
void WriteManifest(const std::filesystem::path& path, const DatasetManifest& manifest);

// Linked (and optionally completed) tubes of one video.
struct VideoTubes {
  std::string id;
  int num_frames = 0;
  int observed_frame = 0;
  std::vector<ActionTube> tubes;
};

// Member micro-tubes are not serialized.
void WriteTubes(std::ostream& out, std::span<const VideoTubes> videos);
void WriteTubes(const std::filesystem::path& path, std::span<const VideoTubes> videos);
std::vector<VideoTubes> ReadTubes(std::istream& in, const std::string& source = "<stream>");

void WriteReport(std::ostream& out, const EvalReport& report);
void WriteReport(const std::filesystem::path& path, const EvalReport& report);
EvalReport ReadReport(std::istream& in, const std::string& source = "<stream>");

struct SweepRow {
  std::string model;
  MetricKind metric = MetricKind::kOnline;
  std::string delta;
  int observed_pct = 0;
  double value = 0.0;
};

// Mean rows of the figure metrics (accuracy, online-mAP, p-mAP, c-mAP) at
// thresholds 0.2, 0.5, 0.75 and avg.
std::vector<SweepRow> SweepRows(const std::string& model, const EvalReport& report);
void WriteSweep(std::ostream& out, std::span<const SweepRow> rows);
void WriteSweep(const std::filesystem::path& path, std::span<const SweepRow> rows);

}  // namespace tubepred

#endif  // TUBEPRED_DATAIO_H_
