// Copyright 2026 The NOC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOC_EVALUATION_H_
#define NOC_EVALUATION_H_

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "noc/dataset.h"
#include "noc/visual_model.h"

namespace noc {

// image id -> generated caption tokens
using CaptionMap = std::map<std::string, Words>;
// image id -> objects present in the image
using TruthMap = std::map<std::string, std::set<std::string>>;

struct ObjectScore {
  std::string object;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  // Images containing the object.
  std::size_t n_images = 0;

  friend bool operator==(const ObjectScore&, const ObjectScore&) = default;
};

struct MentionReport {
  std::vector<ObjectScore> objects;
  double average_f1 = 0.0;
  // Fraction of objects mentioned in at least one caption of an image that
  // contains them.
  double percent_described = 0.0;
  // Macro average of per-object accuracy (= recall).
  double average_accuracy = 0.0;

  friend bool operator==(const MentionReport&, const MentionReport&) = default;
};

// Mention = exact token occurrence (after lowercasing) anywhere in the
// caption. Precision counts images whose caption mentions the object; it is
// 0 when the object is never mentioned. Images in `truth` without a caption
// count as empty captions. LookupError when no truth set holds `object`.
ObjectScore ObjectF1(const CaptionMap& captions, const TruthMap& truth,
                     const std::string& object);

double PercentDescribed(const CaptionMap& captions, const TruthMap& truth,
                        std::span<const std::string> objects);

// Fraction of images containing `object` whose caption mentions it.
double CategoryAccuracy(const CaptionMap& captions, const TruthMap& truth,
                        const std::string& object);

MentionReport BuildReport(const CaptionMap& captions, const TruthMap& truth,
                          std::span<const std::string> objects);

// Writes `<prefix>.json` and an aligned text table `<prefix>.txt`.
void EmitReport(const MentionReport& report, const std::filesystem::path& prefix);
std::string ReportTable(const MentionReport& report);
std::string ReportJson(const MentionReport& report);
MentionReport ParseReportJson(const std::string& text);

CaptionMap ToCaptionMap(std::span<const CaptionRecord> captions);
TruthMap ToTruthMap(std::span<const LabeledRecord> labels);

// Share of (image, target label) pairs where the label ranks within the top k
// of the visual head's activations. Only labels in `targets` are counted.
double TopKLabelRecall(const VisualModel& vision, std::span<const LabeledImage> images,
                       const std::set<TokenId>& targets, std::size_t k);

}  // namespace noc

#endif  // NOC_EVALUATION_H_
