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

#include "noc/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "json.hpp"
#include "noc/errors.h"
#include "noc/text.h"

namespace noc {

using json = nlohmann::json;

namespace {

void CheckIds(const CaptionMap& captions, const TruthMap& truth) {
  for (const auto& [id, _] : captions) {
    if (!truth.contains(id)) {
      throw ArgumentError("caption for image '" + id + "' has no ground truth");
    }
  }
}

bool Mentions(const CaptionMap& captions, const std::string& id,
              const std::string& object) {
  auto it = captions.find(id);
  if (it == captions.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(),
                     [&](const std::string& w) { return ToLower(w) == object; });
}

double F1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

ObjectScore ObjectF1(const CaptionMap& captions, const TruthMap& truth,
                     const std::string& object) {
  CheckIds(captions, truth);
  const std::string obj = ToLower(object);
  std::size_t present = 0, mentioned = 0, both = 0;
  for (const auto& [id, objects] : truth) {
    const bool has = objects.contains(obj);
    const bool says = Mentions(captions, id, obj);
    present += has;
    mentioned += says;
    both += has && says;
  }
  if (present == 0) throw LookupError("object '" + object + "' appears in no image");
  ObjectScore s;
  s.object = obj;
  s.n_images = present;
  s.precision = mentioned ? static_cast<double>(both) / static_cast<double>(mentioned) : 0.0;
  s.recall = static_cast<double>(both) / static_cast<double>(present);
  s.f1 = F1(s.precision, s.recall);
  return s;
}

double PercentDescribed(const CaptionMap& captions, const TruthMap& truth,
                        std::span<const std::string> objects) {
  if (objects.empty()) throw ArgumentError("percent_described: no objects");
  CheckIds(captions, truth);
  std::size_t described = 0;
  for (const auto& object : objects) {
    const std::string obj = ToLower(object);
    for (const auto& [id, present] : truth) {
      if (present.contains(obj) && Mentions(captions, id, obj)) {
        ++described;
        break;
      }
    }
  }
  return static_cast<double>(described) / static_cast<double>(objects.size());
}

double CategoryAccuracy(const CaptionMap& captions, const TruthMap& truth,
                        const std::string& object) {
  CheckIds(captions, truth);
  const std::string obj = ToLower(object);
  std::size_t present = 0, correct = 0;
  for (const auto& [id, objects] : truth) {
    if (!objects.contains(obj)) continue;
    ++present;
    correct += Mentions(captions, id, obj);
  }
  if (present == 0) {
    throw ArgumentError("category_accuracy: no image contains '" + object + "'");
  }
  return static_cast<double>(correct) / static_cast<double>(present);
}

MentionReport BuildReport(const CaptionMap& captions, const TruthMap& truth,
                          std::span<const std::string> objects) {
  MentionReport r;
  double f1_sum = 0.0, acc_sum = 0.0;
  for (const auto& o : objects) {
    r.objects.push_back(ObjectF1(captions, truth, o));
    f1_sum += r.objects.back().f1;
    acc_sum += CategoryAccuracy(captions, truth, o);
  }
  const double n = static_cast<double>(objects.size());
  r.average_f1 = objects.empty() ? 0.0 : f1_sum / n;
  r.average_accuracy = objects.empty() ? 0.0 : acc_sum / n;
  r.percent_described = objects.empty() ? 0.0 : PercentDescribed(captions, truth, objects);
  return r;
}

std::string ReportJson(const MentionReport& report) {
  json objs = json::array();
  for (const auto& s : report.objects) {
    objs.push_back({{"object", s.object},
                    {"precision", s.precision},
                    {"recall", s.recall},
                    {"f1", s.f1},
                    {"n_images", s.n_images}});
  }
  json j = {{"objects", objs},
            {"average_f1", report.average_f1},
            {"percent_described", report.percent_described},
            {"average_accuracy", report.average_accuracy}};
  return j.dump(2) + "\n";
}

MentionReport ParseReportJson(const std::string& text) {
  MentionReport r;
  try {
    const json j = json::parse(text);
    for (const auto& o : j.at("objects")) {
      r.objects.push_back(ObjectScore{o.at("object").get<std::string>(),
                                      o.at("precision").get<double>(),
                                      o.at("recall").get<double>(),
                                      o.at("f1").get<double>(),
                                      o.at("n_images").get<std::size_t>()});
    }
    r.average_f1 = j.at("average_f1").get<double>();
    r.percent_described = j.at("percent_described").get<double>();
    r.average_accuracy = j.at("average_accuracy").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("report json: ") + e.what());
  }
  return r;
}

std::string ReportTable(const MentionReport& report) {
  std::size_t width = 7;
  for (const auto& s : report.objects) width = std::max(width, s.object.size());
  auto row = [width](const std::string& name, const std::string& p,
                     const std::string& r, const std::string& f, const std::string& n) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-*s  %9s  %9s  %9s  %6s\n",
                  static_cast<int>(width), name.c_str(), p.c_str(), r.c_str(),
                  f.c_str(), n.c_str());
    return std::string(buf);
  };
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
    return std::string(buf);
  };
  std::string out = row("object", "P(%)", "R(%)", "F1(%)", "N");
  for (const auto& s : report.objects) {
    out += row(s.object, pct(s.precision), pct(s.recall), pct(s.f1),
               std::to_string(s.n_images));
  }
  out += row("avg_f1", "", "", pct(report.average_f1), "");
  out += row("described", "", "", pct(report.percent_described), "");
  out += row("accuracy", "", "", pct(report.average_accuracy), "");
  return out;
}

void EmitReport(const MentionReport& report, const std::filesystem::path& prefix) {
  WriteFile(prefix.string() + ".json", ReportJson(report));
  WriteFile(prefix.string() + ".txt", ReportTable(report));
}

CaptionMap ToCaptionMap(std::span<const CaptionRecord> captions) {
  CaptionMap out;
  for (const auto& c : captions) out[c.id] = c.caption;
  return out;
}

TruthMap ToTruthMap(std::span<const LabeledRecord> labels) {
  TruthMap out;
  for (const auto& l : labels) {
    auto& set = out[l.id];
    for (const auto& w : l.labels) set.insert(ToLower(w));
  }
  return out;
}

double TopKLabelRecall(const VisualModel& vision, std::span<const LabeledImage> images,
                       const std::set<TokenId>& targets, std::size_t k) {
  std::size_t total = 0, hits = 0;
  for (const auto& img : images) {
    const Tensor act = vision.Activations(img.features);
    std::vector<TokenId> order(act.size());
    std::iota(order.begin(), order.end(), TokenId{0});
    const std::size_t kk = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                      [&](TokenId a, TokenId b) {
                        return act[a] != act[b] ? act[a] > act[b] : a < b;
                      });
    for (TokenId label : img.labels.ids()) {
      if (!targets.contains(label)) continue;
      ++total;
      hits += std::find(order.begin(), order.begin() + kk, label) != order.begin() + kk;
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

}  // namespace noc
