// Copyright 2026 The uralprobe Authors.
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

#include "uralprobe/metrics.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "uralprobe/corpus.hpp"

namespace uralprobe {
namespace {

PrecisionRecall score(std::size_t tp, std::size_t predicted, std::size_t gold) {
  PrecisionRecall s;
  s.true_positives = tp;
  s.predicted = predicted;
  s.gold = gold;
  s.precision = predicted == 0 ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(predicted);
  s.recall =
      gold == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gold);
  const double denom = s.precision + s.recall;
  s.f1 = denom == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / denom;
  return s;
}

}  // namespace

std::vector<std::string> repair_bio(const std::vector<std::string>& tags) {
  std::vector<std::string> out = tags;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!is_bio_tag(out[i])) {
      throw InvalidArgument("'" + out[i] + "' is not a BIO tag");
    }
    if (out[i][0] != 'I') continue;
    const std::string_view type = std::string_view(out[i]).substr(2);
    const bool continues =
        i > 0 && out[i - 1] != "O" &&
        std::string_view(out[i - 1]).substr(2) == type;
    if (!continues) out[i][0] = 'B';
  }
  return out;
}

std::vector<EntitySpan> extract_spans(const std::vector<std::string>& tags) {
  const std::vector<std::string> fixed = repair_bio(tags);
  std::vector<EntitySpan> spans;
  for (std::size_t i = 0; i < fixed.size();) {
    if (fixed[i][0] != 'B') {
      ++i;
      continue;
    }
    const std::string type = fixed[i].substr(2);
    std::size_t j = i + 1;
    while (j < fixed.size() && fixed[j][0] == 'I' && fixed[j].substr(2) == type) {
      ++j;
    }
    spans.push_back({i, j, type});
    i = j;
  }
  return spans;
}

SpanF1 span_f1(const std::vector<std::vector<std::string>>& predicted,
               const std::vector<std::vector<std::string>>& gold) {
  if (predicted.size() != gold.size()) {
    throw InvalidArgument("span_f1: sentence counts differ");
  }
  struct Counts {
    std::size_t tp = 0, predicted = 0, gold = 0;
  };
  std::map<std::string, Counts> by_type;
  Counts total;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (predicted[s].size() != gold[s].size()) {
      throw InvalidArgument("span_f1: sentence " + std::to_string(s) +
                            " has " + std::to_string(predicted[s].size()) +
                            " predicted and " + std::to_string(gold[s].size()) +
                            " gold tags");
    }
    const auto pred_spans = extract_spans(predicted[s]);
    const auto gold_spans = extract_spans(gold[s]);
    for (const auto& span : pred_spans) {
      ++by_type[span.type].predicted;
      ++total.predicted;
    }
    for (const auto& span : gold_spans) {
      ++by_type[span.type].gold;
      ++total.gold;
    }
    // Both lists are sorted by position and non-overlapping.
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < pred_spans.size() && j < gold_spans.size()) {
      if (pred_spans[i] == gold_spans[j]) {
        ++by_type[gold_spans[j].type].tp;
        ++total.tp;
        ++i;
        ++j;
      } else if (pred_spans[i] < gold_spans[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }
  SpanF1 out;
  static_cast<PrecisionRecall&>(out) = score(total.tp, total.predicted, total.gold);
  for (const auto& [type, c] : by_type) {
    out.per_type[type] = score(c.tp, c.predicted, c.gold);
  }
  return out;
}

double student_t_two_tailed_p(double t, double df) {
  if (!(df > 0.0)) throw InvalidArgument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  // P(|T| > |t|) = I_{df / (df + t^2)}(df / 2, 1 / 2)
  const double x = df / (df + t * t);
  return boost::math::ibeta(df / 2.0, 0.5, x);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidArgument("paired t-test: samples differ in size");
  }
  const std::size_t n = a.size();
  if (n < 2) throw InvalidArgument("paired t-test needs at least two pairs");

  std::vector<double> d(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    mean += d[i];
  }
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.df = n - 1;
  const double scale = std::max(1.0, std::abs(mean));
  if (sd <= 1e-15 * scale) {
    const bool all_zero =
        std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
    r.defined = all_zero;
    if (!all_zero) {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_tailed_p(r.t, static_cast<double>(r.df));
  return r;
}

}  // namespace uralprobe
