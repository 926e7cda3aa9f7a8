// Copyright 2026 The mrforge Authors.
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

#include "mrforge/testgen.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "mrforge/error.h"

namespace mrforge {
namespace {

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

bool Generatable(const Attribute &attr) {
  return attr.open ? attr.has_placeholder() : !attr.values.empty();
}

std::vector<const Attribute *> Pool(const Ontology &ontology, Source source) {
  std::vector<const Attribute *> out;
  for (const Attribute &attr : ontology.attributes()) {
    if (attr.source == source && Generatable(attr)) out.push_back(&attr);
  }
  return out;
}

std::string DrawValue(const Attribute &attr, Rng &rng) {
  if (attr.open) return attr.placeholder();
  return attr.values[rng.Below(attr.values.size())];
}

// Distinct MRs (without RECOMMEND) the generator can produce: name, at
// least one NYC-unique and one E2E-unique attribute, length in range.
double DistinctMrCount(const Ontology &ontology, const TestGenConfig &config) {
  std::vector<const Attribute *> others;
  for (const Attribute &attr : ontology.attributes()) {
    if (attr.id != "name" && Generatable(attr)) others.push_back(&attr);
  }
  if (others.size() > 24) return std::numeric_limits<double>::infinity();
  double total = 0;
  for (unsigned long mask = 0; mask < (1UL << others.size()); ++mask) {
    int length = 1 + std::popcount(mask);
    if (length < config.length_min || length > config.length_max) continue;
    bool nyc = false, e2e = false;
    double count = 1;
    for (std::size_t i = 0; i < others.size(); ++i) {
      if (!(mask & (1UL << i))) continue;
      nyc |= others[i]->source == Source::kNyc;
      e2e |= others[i]->source == Source::kE2e;
      if (!others[i]->open) count *= static_cast<double>(others[i]->values.size());
    }
    if (nyc && e2e) total += count;
  }
  return total;
}

}  // namespace

void TestGenConfig::Validate(const Ontology &ontology) const {
  auto fail = [](const std::string &what) {
    return ConfigError("infeasible test-set configuration: " + what);
  };
  if (size < 0) throw fail("negative size");
  if (length_min < 3) throw fail("length_min below 3 cannot hold name, NYC and E2E slots");
  if (length_max < length_min) throw fail("length_max < length_min");
  if (recommend_fraction < 0 || recommend_fraction > 1) {
    throw fail("recommend_fraction outside [0, 1]");
  }
  if (recommend_fraction > 0 && !ontology.has_recommend() && size > 0) {
    throw fail("ontology has no RECOMMEND act");
  }
  if (!(length_stddev >= 0) || !std::isfinite(length_mean)) {
    throw fail("bad length distribution parameters");
  }
  const Attribute *name = ontology.Find("name");
  if (name == nullptr || !Generatable(*name)) throw fail("ontology lacks a usable name");
  if (Pool(ontology, Source::kNyc).empty()) throw fail("no NYC-unique attribute");
  if (Pool(ontology, Source::kE2e).empty()) throw fail("no E2E-unique attribute");
  std::size_t usable = std::count_if(ontology.attributes().begin(), ontology.attributes().end(),
                                     [](const Attribute &a) { return Generatable(a); });
  if (static_cast<std::size_t>(length_max) > usable) {
    throw fail("length_max " + std::to_string(length_max) + " exceeds the " +
               std::to_string(usable) + " generatable attributes");
  }
  if (length_stddev == 0) {
    long k = std::lround(length_mean);
    if (k < length_min || k > length_max) throw fail("degenerate length outside range");
  } else {
    double mass = NormalCdf((length_max + 0.5 - length_mean) / length_stddev) -
                  NormalCdf((length_min - 0.5 - length_mean) / length_stddev);
    if (mass < 1e-6) throw fail("length range has negligible probability");
  }
  double capacity = DistinctMrCount(ontology, *this);
  double with_recommend = std::round(size * recommend_fraction);
  if (std::max(with_recommend, size - with_recommend) > capacity) {
    throw fail(fmt::format("only {:.0f} distinct MRs exist per RECOMMEND setting, {} requested",
                           capacity, size));
  }
}

int SampleMrLength(const TestGenConfig &config, Rng &rng) {
  if (config.length_stddev == 0) return static_cast<int>(std::lround(config.length_mean));
  while (true) {
    long k = std::lround(config.length_mean + config.length_stddev * rng.Normal());
    if (k >= config.length_min && k <= config.length_max) return static_cast<int>(k);
  }
}

std::vector<MeaningRepresentation> GenerateComTestset(const Ontology &ontology,
                                                      const TestGenConfig &config,
                                                      const std::set<std::string> &exclude) {
  config.Validate(ontology);
  std::vector<const Attribute *> nyc = Pool(ontology, Source::kNyc);
  std::vector<const Attribute *> e2e = Pool(ontology, Source::kE2e);
  const Attribute *name = ontology.Find("name");

  std::size_t size = static_cast<std::size_t>(config.size);
  std::vector<bool> recommend(size, false);
  {
    Rng rng(DeriveSeed(config.seed, "testgen/recommend"));
    std::vector<std::size_t> order(size);
    for (std::size_t i = 0; i < size; ++i) order[i] = i;
    auto count = static_cast<std::size_t>(std::lround(config.size * config.recommend_fraction));
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t j = i + rng.Below(size - i);
      std::swap(order[i], order[j]);
      recommend[order[i]] = true;
    }
  }

  Rng rng(DeriveSeed(config.seed, "testgen/mrs"));
  std::set<std::string> seen;
  std::vector<MeaningRepresentation> out;
  out.reserve(size);
  const long max_attempts = 1000L * std::max(config.size, 1);
  long attempts = 0;
  for (std::size_t i = 0; i < size; ++i) {
    int length = SampleMrLength(config, rng);
    while (true) {
      if (++attempts > max_attempts) {
        throw ConfigError("infeasible test-set configuration: cannot draw " +
                          std::to_string(config.size) + " distinct MRs");
      }
      std::vector<const Attribute *> chosen = {
          name, nyc[rng.Below(nyc.size())], e2e[rng.Below(e2e.size())]};
      std::vector<const Attribute *> rest;
      for (const Attribute &attr : ontology.attributes()) {
        if (Generatable(attr) &&
            std::find(chosen.begin(), chosen.end(), &attr) == chosen.end()) {
          rest.push_back(&attr);
        }
      }
      for (int k = 3; k < length; ++k) {
        std::size_t j = rng.Below(rest.size());
        chosen.push_back(rest[j]);
        rest.erase(rest.begin() + static_cast<long>(j));
      }
      MeaningRepresentation mr;
      mr.recommend = recommend[i];
      for (const Attribute *attr : chosen) mr.slots.push_back({attr->id, DrawValue(*attr, rng)});
      mr = Canonicalize(mr, ontology);
      mr.provenance = InferProvenance(mr, ontology);
      std::string key = FormatMr(mr);
      if (exclude.count(key) || !seen.insert(key).second) continue;
      out.push_back(std::move(mr));
      break;
    }
  }
  return out;
}

TestsetStats ComputeTestsetStats(const std::vector<MeaningRepresentation> &mrs) {
  TestsetStats stats;
  stats.size = static_cast<long>(mrs.size());
  long total_length = 0;
  for (const MeaningRepresentation &mr : mrs) {
    if (mr.recommend) ++stats.recommend;
    ++stats.length_histogram[mr.length()];
    total_length += mr.length();
    for (const Slot &slot : mr.slots) ++stats.attribute_frequency[slot.attribute];
  }
  if (stats.size > 0) {
    stats.recommend_fraction = static_cast<double>(stats.recommend) / stats.size;
    stats.mean_length = static_cast<double>(total_length) / stats.size;
  }
  return stats;
}

std::string TestsetStats::ToString() const {
  std::string out = fmt::format("size                {}\nrecommend           {} ({:.4f})\n"
                                "mean length         {:.3f}\nlength histogram\n",
                                size, recommend, recommend_fraction, mean_length);
  for (const auto &[length, count] : length_histogram) {
    out += fmt::format("  {:>2}  {:>6}\n", length, count);
  }
  out += "attribute frequency\n";
  for (const auto &[attribute, count] : attribute_frequency) {
    out += fmt::format("  {:<16} {:>6}\n", attribute, count);
  }
  return out;
}

std::map<int, double> LengthDistribution(const TestGenConfig &config) {
  std::map<int, double> p;
  if (config.length_stddev == 0) {
    p[static_cast<int>(std::lround(config.length_mean))] = 1.0;
    return p;
  }
  double total = 0;
  for (int k = config.length_min; k <= config.length_max; ++k) {
    double mass = NormalCdf((k + 0.5 - config.length_mean) / config.length_stddev) -
                  NormalCdf((k - 0.5 - config.length_mean) / config.length_stddev);
    p[k] = mass;
    total += mass;
  }
  for (auto &[k, mass] : p) mass /= total;
  return p;
}

double LengthChiSquaredPValue(const TestsetStats &stats, const TestGenConfig &config) {
  if (stats.size == 0) return 1.0;
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double observed = 0, expected = 0;
  for (const auto &[k, p] : LengthDistribution(config)) {
    auto it = stats.length_histogram.find(k);
    observed += it == stats.length_histogram.end() ? 0 : static_cast<double>(it->second);
    expected += p * static_cast<double>(stats.size);
    if (expected >= 5) {
      bins.emplace_back(observed, expected);
      observed = expected = 0;
    }
  }
  if (expected > 0 || observed > 0) {
    if (bins.empty()) {
      bins.emplace_back(observed, expected);
    } else {
      bins.back().first += observed;
      bins.back().second += expected;
    }
  }
  if (bins.size() < 2) return 1.0;
  double chi2 = 0;
  for (const auto &[o, e] : bins) chi2 += (o - e) * (o - e) / e;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(bins.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, chi2));
}

}  // namespace mrforge
