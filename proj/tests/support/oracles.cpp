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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace uralprobe::oracle {
namespace {

std::size_t utf8_chars(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

}  // namespace

NaiveSegmentation wordpiece(const std::vector<std::string>& pieces,
                            const std::string& unk, const std::string& word,
                            const std::string& continuation) {
  if (utf8_chars(word) > 512) return {{unk}, true};
  NaiveSegmentation out;
  std::size_t pos = 0;
  while (pos < word.size()) {
    std::string best;
    std::size_t best_len = 0;
    for (const std::string& piece : pieces) {
      std::string text = piece;
      if (pos > 0) {
        if (piece.rfind(continuation, 0) != 0) continue;
        text = piece.substr(continuation.size());
      }
      if (text.empty() || text.size() <= best_len) continue;
      if (word.compare(pos, text.size(), text) == 0) {
        best = piece;
        best_len = text.size();
      }
    }
    if (best_len == 0) return {{unk}, true};
    out.pieces.push_back(best);
    pos += best_len;
  }
  return out;
}

NaiveStats wordpiece_stats(const std::vector<std::string>& pieces,
                           const std::string& unk,
                           const std::vector<std::string>& types) {
  NaiveStats s;
  std::vector<double> lengths;
  std::size_t known = 0;
  std::size_t chars = 0;
  for (const std::string& type : types) {
    const NaiveSegmentation seg = wordpiece(pieces, unk, type);
    if (seg.is_unk) {
      ++s.unk_types;
      continue;
    }
    ++known;
    chars += utf8_chars(type);
    for (const std::string& p : seg.pieces) {
      const std::string text = p.rfind("##", 0) == 0 ? p.substr(2) : p;
      lengths.push_back(static_cast<double>(utf8_chars(text)));
    }
  }
  s.missing_rate = static_cast<double>(s.unk_types) / static_cast<double>(types.size());
  if (known == 0) return s;
  const double n = static_cast<double>(lengths.size());
  double sum = 0.0;
  for (double l : lengths) sum += l;
  const double mean = sum / n;
  double sq = 0.0;
  for (double l : lengths) sq += (l - mean) * (l - mean);
  s.mean_subword_len = mean;
  s.std_subword_len = std::sqrt(sq / n);
  s.mean_char_len = static_cast<double>(chars) / static_cast<double>(known);
  s.fertility = n / static_cast<double>(known);
  return s;
}

std::vector<EntitySpan> regex_spans(const std::vector<std::string>& tags) {
  std::string text;
  std::vector<std::size_t> token_at;  // byte offset of each leading space
  for (const std::string& t : tags) {
    token_at.push_back(text.size());
    text += " " + t;
  }
  static const std::regex pattern(" (B|I)-([A-Z]+)(?: I-\\2)*(?= |$)");
  std::vector<EntitySpan> spans;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern);
       it != std::sregex_iterator(); ++it) {
    const auto begin_byte = static_cast<std::size_t>(it->position(0));
    const std::size_t end_byte = begin_byte + static_cast<std::size_t>(it->length(0));
    const auto first = std::lower_bound(token_at.begin(), token_at.end(), begin_byte);
    const auto last = std::lower_bound(token_at.begin(), token_at.end(), end_byte);
    spans.push_back({static_cast<std::size_t>(first - token_at.begin()),
                     static_cast<std::size_t>(last - token_at.begin()),
                     (*it)[2].str()});
  }
  return spans;
}

CountF1 regex_span_f1(const std::vector<std::vector<std::string>>& predicted,
                      const std::vector<std::vector<std::string>>& gold) {
  CountF1 c;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto p = regex_spans(predicted[s]);
    const auto g = regex_spans(gold[s]);
    const std::set<EntitySpan> gs(g.begin(), g.end());
    for (const auto& span : p) c.tp += gs.count(span);
    c.predicted += p.size();
    c.gold += g.size();
  }
  const double precision = c.predicted == 0 ? 0.0 : double(c.tp) / double(c.predicted);
  const double recall = c.gold == 0 ? 0.0 : double(c.tp) / double(c.gold);
  c.f1 = precision + recall == 0.0 ? 0.0 : 2 * precision * recall / (precision + recall);
  return c;
}

double t_tail_quadrature(double t, double df) {
  const double log_norm = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) -
                          0.5 * std::log(df * M_PI);
  auto density = [&](double x) {
    return std::exp(log_norm - (df + 1) / 2 * std::log1p(x * x / df));
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return 2.0 * integrator.integrate(density, std::fabs(t),
                                    std::numeric_limits<double>::infinity());
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  const double scale = std::sqrt(std::max(na, nb));
  return scale == 0.0 ? 0.0 : std::sqrt(diff) / scale;
}

}  // namespace uralprobe::oracle
