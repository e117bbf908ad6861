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


#include "tubepred/dataio.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tubepred {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kScoreSumTolerance = 1e-6;

std::ifstream OpenInput(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::ofstream OpenOutput(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  }
  return out;
}

// Reads JSON numbers and arrays while reporting failures at a location.
class Reader {
 public:
  explicit Reader(std::function<void(const std::string&)> fail)
      : fail_(std::move(fail)) {}

  const json& Field(const json& obj, const char* key) const {
    if (!obj.is_object()) fail_("expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail_(fmt::format("missing field '{}'", key));
    return *it;
  }

  double Real(const json& value, const std::string& what) const {
    if (!value.is_number()) fail_(fmt::format("{} must be a number", what));
    const double v = value.get<double>();
    if (!std::isfinite(v)) fail_(fmt::format("{} must be finite", what));
    return v;
  }

  int Integer(const json& value, const std::string& what) const {
    if (!value.is_number_integer()) {
      fail_(fmt::format("{} must be an integer", what));
    }
    return value.get<int>();
  }

  std::vector<double> Reals(const json& value, const std::string& what) const {
    if (!value.is_array()) fail_(fmt::format("{} must be an array", what));
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& v : value) out.push_back(Real(v, what));
    return out;
  }

  BoundingBox Box(std::span<const double> c, const std::string& what) const {
    const BoundingBox box{c[0], c[1], c[2], c[3]};
    if (!box.valid()) fail_(fmt::format("{} has x_max < x_min or y_max < y_min", what));
    return box;
  }

  BoundingBox Box(const json& value, const std::string& what) const {
    const auto c = Reals(value, what);
    if (c.size() != 4) fail_(fmt::format("{} needs 4 coordinates", what));
    return Box(std::span<const double>(c), what);
  }

  [[noreturn]] void Fail(const std::string& message) const {
    fail_(message);
    throw std::logic_error("unreachable");
  }

 private:
  std::function<void(const std::string&)> fail_;
};

template <typename Json>
Json BoxJson(const BoundingBox& b) {
  return Json::array({b.x_min, b.y_min, b.x_max, b.y_max});
}

void CheckContiguous(const FrameBoxes& boxes, const char* what) {
  if (boxes.empty()) return;
  if (boxes.rbegin()->first - boxes.begin()->first + 1 !=
      static_cast<int>(boxes.size())) {
    throw std::invalid_argument(fmt::format("{} frames are not contiguous", what));
  }
}

ordered_json SegmentJson(const FrameBoxes& boxes) {
  ordered_json seg = ordered_json::object();
  seg["start"] = boxes.empty() ? 0 : boxes.begin()->first;
  ordered_json arr = ordered_json::array();
  for (const auto& [f, box] : boxes) arr.push_back(BoxJson<ordered_json>(box));
  seg["boxes"] = std::move(arr);
  return seg;
}

FrameBoxes ReadSegment(const Reader& r, const json& seg, const std::string& what) {
  FrameBoxes out;
  const int start = r.Integer(r.Field(seg, "start"), what + ".start");
  const json& boxes = r.Field(seg, "boxes");
  if (!boxes.is_array()) r.Fail(what + ".boxes must be an array");
  int f = start;
  for (const auto& b : boxes) out[f++] = r.Box(b, what + " box");
  return out;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

ParseError::ParseError(std::string source, int line, const std::string& message)
    : std::runtime_error(fmt::format("{}:{}: {}", source, line, message)),
      source_(std::move(source)),
      line_(line) {}

ParseError::ParseError(std::string source, const std::string& location,
                       const std::string& message)
    : std::runtime_error(fmt::format("{}: {}: {}", source, location, message)),
      source_(std::move(source)) {}

std::vector<DetectionRecord> ReadDetections(std::istream& in,
                                            const std::string& source) {
  std::vector<DetectionRecord> records;
  std::map<std::string, int> last_t;
  int score_count = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fail = [&](const std::string& msg) {
      throw ParseError(source, line_no, msg);
    };
    const Reader r(fail);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(fmt::format("invalid JSON ({})", e.what()));
    }

    DetectionRecord rec;
    const json& video = r.Field(doc, "video");
    if (!video.is_string() || video.get<std::string>().empty()) {
      fail("video must be a non-empty string");
    }
    rec.video = video.get<std::string>();
    auto& det = rec.detection;
    det.t = r.Integer(r.Field(doc, "t"), "t");
    det.delta = r.Integer(r.Field(doc, "delta"), "delta");
    if (det.t < 1) fail("t must be >= 1");
    if (det.delta < 1) fail("delta must be >= 1");

    const json& horizon = r.Field(doc, "horizon");
    if (!horizon.is_array() || horizon.size() != 3) {
      fail("horizon must be [past_offset, future_step, num_future]");
    }
    rec.horizon = {r.Integer(horizon[0], "horizon"), r.Integer(horizon[1], "horizon"),
                   r.Integer(horizon[2], "horizon")};
    try {
      rec.horizon.Validate();
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }

    const auto tube = r.Reals(r.Field(doc, "tube"), "tube");
    if (tube.size() != 8) {
      fail(fmt::format("micro-tube needs 8 coordinates, got {}", tube.size()));
    }
    det.boxes = {r.Box(std::span(tube).first(4), "tube box at t"),
                 r.Box(std::span(tube).last(4), "tube box at t + delta")};

    if (const auto it = doc.find("pred"); it != doc.end()) {
      const auto pred = r.Reals(*it, "pred");
      const std::size_t want = 4 * static_cast<std::size_t>(rec.horizon.payload_boxes());
      if (!pred.empty() && pred.size() != want) {
        fail(fmt::format("prediction needs {} coordinates for horizon {}, got {}",
                         want, rec.horizon.Tag(), pred.size()));
      }
      for (std::size_t k = 0; k < pred.size(); k += 4) {
        det.predictions.push_back(r.Box(std::span(pred).subspan(k, 4), "prediction box"));
      }
    }

    det.class_scores = r.Reals(r.Field(doc, "scores"), "scores");
    if (det.class_scores.size() < 2) fail("scores need background plus one class");
    double sum = 0.0;
    for (double s : det.class_scores) {
      if (s < 0.0) fail("scores must be non-negative");
      sum += s;
    }
    if (std::abs(sum - 1.0) > kScoreSumTolerance) {
      fail(fmt::format("scores sum to {}, expected 1", sum));
    }
    if (score_count >= 0 && static_cast<int>(det.class_scores.size()) != score_count) {
      fail("score count differs from earlier records");
    }
    score_count = static_cast<int>(det.class_scores.size());

    if (const auto it = last_t.find(rec.video); it != last_t.end() && det.t < it->second) {
      fail(fmt::format("t = {} after t = {} for video '{}'", det.t, it->second,
                       rec.video));
    }
    last_t[rec.video] = det.t;
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<DetectionRecord> ReadDetections(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  return ReadDetections(in, path.string());
}

void WriteDetections(std::ostream& out, std::span<const DetectionRecord> records) {
  for (const auto& rec : records) {
    const auto& det = rec.detection;
    ordered_json doc;
    doc["video"] = rec.video;
    doc["t"] = det.t;
    doc["delta"] = det.delta;
    doc["horizon"] = {rec.horizon.past_offset, rec.horizon.future_step,
                      rec.horizon.num_future};
    const auto& a = det.boxes.first;
    const auto& b = det.boxes.second;
    doc["tube"] = {a.x_min, a.y_min, a.x_max, a.y_max,
                   b.x_min, b.y_min, b.x_max, b.y_max};
    if (!det.predictions.empty()) {
      ordered_json pred = ordered_json::array();
      for (const auto& p : det.predictions) {
        pred.insert(pred.end(), {p.x_min, p.y_min, p.x_max, p.y_max});
      }
      doc["pred"] = std::move(pred);
    }
    doc["scores"] = det.class_scores;
    out << doc.dump() << '\n';
  }
}

void WriteDetections(const std::filesystem::path& path,
                     std::span<const DetectionRecord> records) {
  auto out = OpenOutput(path);
  WriteDetections(out, records);
}

DatasetManifest ReadManifest(std::istream& in, const std::string& source) {
  std::string location = "document";
  const auto fail = [&](const std::string& msg) {
    throw ParseError(source, location, msg);
  };
  const Reader r(fail);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(fmt::format("invalid JSON ({})", e.what()));
  }

  DatasetManifest manifest;
  location = "classes";
  const json& classes = r.Field(doc, "classes");
  if (!classes.is_array() || classes.empty()) fail("need a non-empty class list");
  for (const auto& name : classes) {
    if (!name.is_string() || name.get<std::string>().empty()) {
      fail("class names must be non-empty strings");
    }
    const auto s = name.get<std::string>();
    if (s.find_first_of(",\"\n\r") != std::string::npos || s == "mean") {
      fail(fmt::format("class name '{}' is not usable as a CSV field", s));
    }
    manifest.class_names.push_back(s);
  }

  location = "videos";
  const json& videos = r.Field(doc, "videos");
  if (!videos.is_array()) fail("videos must be an array");
  std::set<std::string> seen;
  for (std::size_t v = 0; v < videos.size(); ++v) {
    location = fmt::format("videos[{}]", v);
    const json& jv = videos[v];
    VideoAnnotation video;
    const json& id = r.Field(jv, "id");
    if (!id.is_string() || id.get<std::string>().empty()) {
      fail("id must be a non-empty string");
    }
    video.id = id.get<std::string>();
    if (!seen.insert(video.id).second) {
      fail(fmt::format("duplicate video id '{}'", video.id));
    }
    video.num_frames = r.Integer(r.Field(jv, "num_frames"), "num_frames");
    if (video.num_frames < 1) fail("num_frames must be >= 1");
    const json& frame = r.Field(jv, "frame");
    if (!frame.is_array() || frame.size() != 2) fail("frame must be [width, height]");
    video.frame = {r.Integer(frame[0], "frame width"), r.Integer(frame[1], "frame height")};
    if (video.frame.width < 1 || video.frame.height < 1) {
      fail("frame size must be positive");
    }
    const json& tubes = r.Field(jv, "tubes");
    if (!tubes.is_array()) fail("tubes must be an array");
    for (std::size_t k = 0; k < tubes.size(); ++k) {
      location = fmt::format("videos[{}].tubes[{}]", v, k);
      const json& jt = tubes[k];
      GroundTruthTube tube;
      tube.class_id = r.Integer(r.Field(jt, "class"), "class");
      if (tube.class_id < 0 || tube.class_id >= manifest.num_classes()) {
        fail(fmt::format("unknown class id {}", tube.class_id));
      }
      const int start = r.Integer(r.Field(jt, "start_frame"), "start_frame");
      const json& boxes = r.Field(jt, "boxes");
      if (!boxes.is_array() || boxes.empty()) fail("boxes must be a non-empty array");
      const int end = start + static_cast<int>(boxes.size()) - 1;
      if (start < 1 || end > video.num_frames) {
        fail(fmt::format("tube frames [{}, {}] outside [1, {}]", start, end,
                         video.num_frames));
      }
      int f = start;
      for (const auto& b : boxes) tube.boxes[f++] = r.Box(b, "tube box");
      video.tubes.push_back(std::move(tube));
    }
    manifest.videos.push_back(std::move(video));
  }
  return manifest;
}

DatasetManifest ReadManifest(const std::filesystem::path& path) {
  auto in = OpenInput(path);
  return ReadManifest(in, path.string());
}

void WriteManifest(std::ostream& out, const DatasetManifest& manifest) {
  ordered_json doc;
  doc["classes"] = manifest.class_names;
  ordered_json videos = ordered_json::array();
  for (const auto& video : manifest.videos) {
    ordered_json jv;
    jv["id"] = video.id;
    jv["num_frames"] = video.num_frames;
    jv["frame"] = {video.frame.width, video.frame.height};
    ordered_json tubes = ordered_json::array();
    for (const auto& tube : video.tubes) {
      if (tube.boxes.empty()) throw std::invalid_argument("empty ground-truth tube");
      CheckContiguous(tube.boxes, "ground-truth tube");
      ordered_json jt;
      jt["class"] = tube.class_id;
      jt["start_frame"] = tube.boxes.begin()->first;
      ordered_json boxes = ordered_json::array();
      for (const auto& [f, box] : tube.boxes) boxes.push_back(BoxJson<ordered_json>(box));
      jt["boxes"] = std::move(boxes);
      tubes.push_back(std::move(jt));
    }
    jv["tubes"] = std::move(tubes);
    videos.push_back(std::move(jv));
  }
  doc["videos"] = std::move(videos);
  out << doc.dump() << '\n';
}

void WriteManifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  auto out = OpenOutput(path);
  WriteManifest(out, manifest);
}

void WriteTubes(std::ostream& out, std::span<const VideoTubes> videos) {
  ordered_json doc;
  ordered_json jvideos = ordered_json::array();
  for (const auto& video : videos) {
    ordered_json jv;
    jv["id"] = video.id;
    jv["num_frames"] = video.num_frames;
    jv["observed_frame"] = video.observed_frame;
    ordered_json tubes = ordered_json::array();
    for (const auto& tube : video.tubes) {
      CheckContiguous(tube.detected, "detected segment");
      CheckContiguous(tube.predicted, "predicted segment");
      ordered_json jt;
      jt["class"] = tube.class_id;
      jt["score"] = tube.score;
      jt["detected"] = SegmentJson(tube.detected);
      jt["predicted"] = SegmentJson(tube.predicted);
      tubes.push_back(std::move(jt));
    }
    jv["tubes"] = std::move(tubes);
    jvideos.push_back(std::move(jv));
  }
  doc["videos"] = std::move(jvideos);
  out << doc.dump() << '\n';
}

void WriteTubes(const std::filesystem::path& path, std::span<const VideoTubes> videos) {
  auto out = OpenOutput(path);
  WriteTubes(out, videos);
}

std::vector<VideoTubes> ReadTubes(std::istream& in, const std::string& source) {
  std::string location = "document";
  const auto fail = [&](const std::string& msg) {
    throw ParseError(source, location, msg);
  };
  const Reader r(fail);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(fmt::format("invalid JSON ({})", e.what()));
  }
  std::vector<VideoTubes> out;
  const json& videos = r.Field(doc, "videos");
  if (!videos.is_array()) fail("videos must be an array");
  for (std::size_t v = 0; v < videos.size(); ++v) {
    location = fmt::format("videos[{}]", v);
    const json& jv = videos[v];
    VideoTubes video;
    const json& id = r.Field(jv, "id");
    if (!id.is_string()) fail("id must be a string");
    video.id = id.get<std::string>();
    video.num_frames = r.Integer(r.Field(jv, "num_frames"), "num_frames");
    video.observed_frame = r.Integer(r.Field(jv, "observed_frame"), "observed_frame");
    const json& tubes = r.Field(jv, "tubes");
    if (!tubes.is_array()) fail("tubes must be an array");
    for (std::size_t k = 0; k < tubes.size(); ++k) {
      location = fmt::format("videos[{}].tubes[{}]", v, k);
      ActionTube tube;
      tube.class_id = r.Integer(r.Field(tubes[k], "class"), "class");
      tube.score = r.Real(r.Field(tubes[k], "score"), "score");
      tube.detected = ReadSegment(r, r.Field(tubes[k], "detected"), "detected");
      tube.predicted = ReadSegment(r, r.Field(tubes[k], "predicted"), "predicted");
      video.tubes.push_back(std::move(tube));
    }
    out.push_back(std::move(video));
  }
  return out;
}

void WriteReport(std::ostream& out, const EvalReport& report) {
  out << "metric,delta,observed_pct,class,value\n";
  for (const auto& cell : report.cells) {
    const auto metric = MetricName(cell.metric);
    for (const auto& [c, value] : cell.per_class) {
      out << fmt::format("{},{},{},{},{}\n", metric, cell.delta, cell.observed_pct,
                         report.class_names.at(c), value);
    }
    out << fmt::format("{},{},{},mean,{}\n", metric, cell.delta, cell.observed_pct,
                       cell.mean);
  }
}

void WriteReport(const std::filesystem::path& path, const EvalReport& report) {
  auto out = OpenOutput(path);
  WriteReport(out, report);
}

EvalReport ReadReport(std::istream& in, const std::string& source) {
  EvalReport report;
  std::map<std::string, int> class_ids;
  std::string line;
  int line_no = 0;
  ReportCell* open = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "metric,delta,observed_pct,class,value") {
        throw ParseError(source, line_no, "unexpected report header");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto fields = SplitCsv(line);
    if (fields.size() != 5) {
      throw ParseError(source, line_no, "expected 5 comma-separated fields");
    }
    const auto metric = ParseMetricName(fields[0]);
    if (!metric) {
      throw ParseError(source, line_no, fmt::format("unknown metric '{}'", fields[0]));
    }
    int pct = 0;
    double value = 0.0;
    try {
      std::size_t used = 0;
      pct = std::stoi(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
      value = std::stod(fields[4], &used);
      if (used != fields[4].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError(source, line_no, "malformed number");
    }
    if (open == nullptr || open->metric != *metric || open->delta != fields[1] ||
        open->observed_pct != pct) {
      report.cells.push_back({*metric, fields[1], pct, 0.0, {}});
      open = &report.cells.back();
    }
    if (fields[3] == "mean") {
      open->mean = value;
      open = nullptr;
      continue;
    }
    auto [it, inserted] =
        class_ids.emplace(fields[3], static_cast<int>(report.class_names.size()));
    if (inserted) report.class_names.push_back(fields[3]);
    open->per_class[it->second] = value;
  }
  return report;
}

std::vector<SweepRow> SweepRows(const std::string& model, const EvalReport& report) {
  static const std::set<std::string> kFigureDeltas = {"0.2", "0.5", "0.75",
                                                      std::string(kAvgDeltaLabel)};
  std::vector<SweepRow> rows;
  for (MetricKind metric : {MetricKind::kAccuracy, MetricKind::kOnline,
                            MetricKind::kPrediction, MetricKind::kCompletion}) {
    for (const auto& cell : report.cells) {
      if (cell.metric != metric) continue;
      if (metric != MetricKind::kAccuracy && !kFigureDeltas.contains(cell.delta)) {
        continue;
      }
      rows.push_back({model, metric, cell.delta, cell.observed_pct, cell.mean});
    }
  }
  return rows;
}

void WriteSweep(std::ostream& out, std::span<const SweepRow> rows) {
  out << "model,metric,delta,observed_pct,value\n";
  for (const auto& row : rows) {
    out << fmt::format("{},{},{},{},{}\n", row.model, MetricName(row.metric), row.delta,
                       row.observed_pct, row.value);
  }
}

void WriteSweep(const std::filesystem::path& path, std::span<const SweepRow> rows) {
  auto out = OpenOutput(path);
  WriteSweep(out, rows);
}

}  // namespace tubepred
