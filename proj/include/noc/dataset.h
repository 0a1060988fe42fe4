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

#ifndef NOC_DATASET_H_
#define NOC_DATASET_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "noc/caption_model.h"
#include "noc/visual_model.h"
#include "noc/vocab.h"

namespace noc {

// Text-level records as they appear on disk.
using Words = std::vector<std::string>;

struct PairedRecord {
  std::string id;
  Words caption;
  std::vector<double> features;
};

struct LabeledRecord {
  std::string id;
  Words labels;
  std::vector<double> features;
};

struct CaptionRecord {
  std::string id;
  Words caption;
  double log_prob = 0.0;
};

// Corpus: one whitespace-tokenized lowercase sentence per line.
void WriteCorpus(const std::filesystem::path& path, std::span<const Words> sentences);
std::vector<Words> ReadCorpus(const std::filesystem::path& path);

// "id<TAB>label1,label2,...<TAB>f1 f2 ... fF"
void WriteLabeledImages(const std::filesystem::path& path,
                        std::span<const LabeledRecord> records);
std::vector<LabeledRecord> ReadLabeledImages(const std::filesystem::path& path);

// "id<TAB>caption tokens<TAB>f1 f2 ... fF"
void WritePairedCaptions(const std::filesystem::path& path,
                         std::span<const PairedRecord> records);
std::vector<PairedRecord> ReadPairedCaptions(const std::filesystem::path& path);

// "id<TAB>caption tokens<TAB>log_prob"
void WriteCaptions(const std::filesystem::path& path,
                   std::span<const CaptionRecord> records);
std::vector<CaptionRecord> ReadCaptions(const std::filesystem::path& path);

// Conversions to id-level training examples. Out-of-vocabulary words map to
// UNK in sentences; unknown labels are a LookupError.
std::vector<Sentence> EncodeCorpus(const Vocabulary& vocab,
                                   std::span<const Words> sentences);
std::vector<PairedExample> EncodePaired(const Vocabulary& vocab,
                                        std::span<const PairedRecord> records);
std::vector<LabeledImage> EncodeLabeled(const Vocabulary& vocab,
                                        std::span<const LabeledRecord> records);

}  // namespace noc

#endif  // NOC_DATASET_H_
