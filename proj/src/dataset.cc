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

#include "noc/dataset.h"

#include "noc/errors.h"
#include "noc/text.h"

namespace noc {

namespace {

std::string Where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line + 1);
}

std::vector<std::string> TabFields(const std::string& line,
                                   const std::filesystem::path& path,
                                   std::size_t ln) {
  auto fields = Split(line, '\t');
  if (fields.size() != 3) {
    throw FormatError(Where(path, ln) + ": expected 3 tab-separated fields, got " +
                      std::to_string(fields.size()));
  }
  if (fields[0].empty()) throw FormatError(Where(path, ln) + ": empty id");
  return fields;
}

std::string FeatureText(std::span<const double> features) {
  std::string out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i > 0) out += ' ';
    out += FormatDouble(features[i]);
  }
  return out;
}

std::vector<double> ParseFeatures(const std::string& text, const std::string& where,
                                  std::size_t& dim) {
  auto f = ParseDoubles(text, where);
  if (f.empty()) throw FormatError(where + ": no feature values");
  if (dim == 0) dim = f.size();
  if (f.size() != dim) {
    throw FormatError(where + ": expected " + std::to_string(dim) +
                      " features, got " + std::to_string(f.size()));
  }
  return f;
}

}  // namespace

void WriteCorpus(const std::filesystem::path& path, std::span<const Words> sentences) {
  std::string out;
  for (const auto& s : sentences) out += Join(s, " ") + "\n";
  WriteFile(path, out);
}

std::vector<Words> ReadCorpus(const std::filesystem::path& path) {
  std::vector<Words> out;
  for (const auto& line : ReadLines(path)) {
    auto words = SplitWhitespace(ToLower(line));
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

void WriteLabeledImages(const std::filesystem::path& path,
                        std::span<const LabeledRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += r.id + "\t" + Join(r.labels, ",") + "\t" + FeatureText(r.features) + "\n";
  }
  WriteFile(path, out);
}

std::vector<LabeledRecord> ReadLabeledImages(const std::filesystem::path& path) {
  std::vector<LabeledRecord> out;
  const auto lines = ReadLines(path);
  std::size_t dim = 0;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    auto fields = TabFields(lines[ln], path, ln);
    LabeledRecord r;
    r.id = fields[0];
    if (!fields[1].empty()) {
      for (auto& l : Split(fields[1], ',')) {
        if (l.empty()) throw FormatError(Where(path, ln) + ": empty label");
        r.labels.push_back(std::move(l));
      }
    }
    r.features = ParseFeatures(fields[2], Where(path, ln), dim);
    out.push_back(std::move(r));
  }
  return out;
}

void WritePairedCaptions(const std::filesystem::path& path,
                         std::span<const PairedRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += r.id + "\t" + Join(r.caption, " ") + "\t" + FeatureText(r.features) + "\n";
  }
  WriteFile(path, out);
}

std::vector<PairedRecord> ReadPairedCaptions(const std::filesystem::path& path) {
  std::vector<PairedRecord> out;
  const auto lines = ReadLines(path);
  std::size_t dim = 0;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    auto fields = TabFields(lines[ln], path, ln);
    PairedRecord r;
    r.id = fields[0];
    r.caption = SplitWhitespace(ToLower(fields[1]));
    r.features = ParseFeatures(fields[2], Where(path, ln), dim);
    out.push_back(std::move(r));
  }
  return out;
}

void WriteCaptions(const std::filesystem::path& path,
                   std::span<const CaptionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += r.id + "\t" + Join(r.caption, " ") + "\t" + FormatDouble(r.log_prob) + "\n";
  }
  WriteFile(path, out);
}

std::vector<CaptionRecord> ReadCaptions(const std::filesystem::path& path) {
  std::vector<CaptionRecord> out;
  const auto lines = ReadLines(path);
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    auto fields = TabFields(lines[ln], path, ln);
    CaptionRecord r;
    r.id = fields[0];
    r.caption = SplitWhitespace(ToLower(fields[1]));
    r.log_prob = ParseDouble(fields[2], Where(path, ln));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Sentence> EncodeCorpus(const Vocabulary& vocab,
                                   std::span<const Words> sentences) {
  std::vector<Sentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(vocab.Encode(s));
  return out;
}

std::vector<PairedExample> EncodePaired(const Vocabulary& vocab,
                                        std::span<const PairedRecord> records) {
  std::vector<PairedExample> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back(PairedExample{r.id, Tensor::Vector(r.features),
                                vocab.Encode(r.caption)});
  }
  return out;
}

std::vector<LabeledImage> EncodeLabeled(const Vocabulary& vocab,
                                        std::span<const LabeledRecord> records) {
  std::vector<LabeledImage> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    std::vector<TokenId> ids;
    for (const auto& l : r.labels) ids.push_back(vocab.id(l));
    out.push_back(LabeledImage{r.id, Tensor::Vector(r.features),
                               LabelVector(std::move(ids))});
  }
  return out;
}

}  // namespace noc
