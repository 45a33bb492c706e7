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

#ifndef URALPROBE_METRICS_HPP_
#define URALPROBE_METRICS_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "uralprobe/error.hpp"

namespace uralprobe {

template <typename T>
double accuracy(std::span<const T> predictions, std::span<const T> golds) {
  if (predictions.size() != golds.size()) {
    throw InvalidArgument("accuracy: " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(golds.size()) +
                          " gold labels");
  }
  if (golds.empty()) throw InvalidArgument("accuracy of an empty set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (predictions[i] == golds[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(golds.size());
}

template <typename T>
double accuracy(const std::vector<T>& predictions, const std::vector<T>& golds) {
  return accuracy(std::span<const T>(predictions), std::span<const T>(golds));
}

struct EntitySpan {
  std::size_t begin = 0;  // token index, inclusive
  std::size_t end = 0;    // exclusive
  std::string type;

  friend auto operator<=>(const EntitySpan&, const EntitySpan&) = default;
};

// I-X that does not continue an X span (after O, B-Y, I-Y or at the start)
// becomes B-X.
std::vector<std::string> repair_bio(const std::vector<std::string>& tags);

// Spans of a BIO sequence after repair. Tags outside the BIO grammar throw
// InvalidArgument.
std::vector<EntitySpan> extract_spans(const std::vector<std::string>& tags);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_positives = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
};

struct SpanF1 : PrecisionRecall {
  std::map<std::string, PrecisionRecall> per_type;
};

// Micro-averaged exact-match span scores over sentences. Precision is 0 when
// nothing is predicted, F1 is 0 when precision and recall are both 0.
SpanF1 span_f1(const std::vector<std::vector<std::string>>& predicted,
               const std::vector<std::vector<std::string>>& gold);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
  // False when the differences are constant and non-zero (zero variance);
  // t is then +-inf and p is NaN.
  bool defined = true;
};

// Two-tailed p-value of Student's t with df degrees of freedom.
double student_t_two_tailed_p(double t, double df);

// Paired t-test over per-task scores. All-zero differences give t=0, p=1.
// Throws InvalidArgument for mismatched sizes or fewer than two pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace uralprobe

#endif  // URALPROBE_METRICS_HPP_
