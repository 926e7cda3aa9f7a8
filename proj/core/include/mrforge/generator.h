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

#ifndef MRFORGE_GENERATOR_H_
#define MRFORGE_GENERATOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mrforge/lexicon.h"
#include "mrforge/mr.h"
#include "mrforge/rng.h"
#include "mrforge/ttm.h"

namespace mrforge {

// Deterministic clause-per-slot realizer. Its output is exactly inverted by
// ExtractMr for every valid MR whose open values are placeholders.
class TemplateRealizer {
 public:
  // One realizable clause: an attribute slot or the RECOMMEND act.
  struct Unit {
    std::string attribute;
    std::string value;
  };

  explicit TemplateRealizer(const Lexicon &lexicon) : lexicon_(&lexicon) {}

  // Throws DataError for an invalid MR and ConfigError for a template gap.
  std::string Realize(const MeaningRepresentation &mr) const;

  // Units in canonical order; the subject attribute (name) is not a unit.
  std::vector<Unit> Units(const MeaningRepresentation &mr) const;
  // Realizes units in the given order. `subject` opens the first sentence;
  // later sentences use "it". Adjacent aggregating units share a sentence.
  std::string RealizeUnits(const std::vector<Unit> &units,
                           const std::optional<std::string> &subject) const;

 private:
  const Lexicon *lexicon_;
};

struct NoiseConfig {
  double p_del = 0;
  double p_sub = 0;
  double p_hall = 0;
  double p_rep = 0;
  std::uint64_t seed = 0;

  // Throws ConfigError for probabilities outside [0, 1].
  void Validate() const;
  NoiseConfig Scaled(double factor) const;
};

struct Edit {
  enum class Kind { kDelete, kSubstitute, kRepeat, kHallucinate };
  Kind kind;
  std::string attribute;
  std::string value;  // new value for substitutions and hallucinations
};

struct Realization {
  std::string text;
  ErrorCounts injected;
  std::vector<Edit> edits;
};

// Template output with clause-level faults. Each unit (never the name) is
// deleted with p_del, else substituted to another closed value with p_sub,
// and duplicated in place with p_rep; each attribute absent from the MR
// (never the name) is inserted with p_hall. Every unit and every absent
// attribute consumes a fixed number of draws, so outcomes for different
// probabilities are coupled through the same stream.
Realization CorruptGenerate(const MeaningRepresentation &mr, const NoiseConfig &noise,
                            const Lexicon &lexicon, Rng &rng);

struct GenerationRequest {
  std::string id;
  MeaningRepresentation mr;
  SupervisionMode supervision = SupervisionMode::kNosup;
};

struct GenerationResult {
  std::string id;
  std::optional<std::string> text;
  std::string error;  // set iff !text
  std::optional<ErrorCounts> injected;

  bool ok() const { return text.has_value(); }
};

struct RetrainMessage {
  std::string corpus_delta_path;
  std::string corpus_path;
  int round = 0;
};

// A pluggable NLG model. Results come back in request order.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual std::vector<GenerationResult> Generate(
      const std::vector<GenerationRequest> &requests) = 0;
  // Signals that the training corpus grew. Learning is the generator's own
  // business; the default ignores the message.
  virtual void Retrain(const RetrainMessage &message);
  virtual std::string Describe() const = 0;
  // False once the generator can no longer answer (a remote endpoint died).
  virtual bool healthy() const { return true; }
};

class TemplateGenerator : public Generator {
 public:
  explicit TemplateGenerator(const Lexicon &lexicon) : realizer_(lexicon) {}
  std::vector<GenerationResult> Generate(const std::vector<GenerationRequest> &requests) override;
  std::string Describe() const override { return "template"; }

 private:
  TemplateRealizer realizer_;
};

// Noise stream per request derived from (seed, request id).
class CorruptingGenerator : public Generator {
 public:
  CorruptingGenerator(const Lexicon &lexicon, NoiseConfig noise);
  std::vector<GenerationResult> Generate(const std::vector<GenerationRequest> &requests) override;
  std::string Describe() const override;

 private:
  const Lexicon *lexicon_;
  NoiseConfig noise_;
};

// Returns the canonical MR string as the utterance.
class EchoGenerator : public Generator {
 public:
  std::vector<GenerationResult> Generate(const std::vector<GenerationRequest> &requests) override;
  std::string Describe() const override { return "echo"; }
};

// A stand-in learner: a corruptor whose noise shrinks as self-training
// instances accumulate, scaled by half / (half + n_self). The noise stream
// is keyed on the MR, so a given MR sees the same draws every round and
// its output can only lose errors as the scale drops.
class SurrogateLearner : public Generator {
 public:
  SurrogateLearner(const Lexicon &lexicon, NoiseConfig base, double half);
  std::vector<GenerationResult> Generate(const std::vector<GenerationRequest> &requests) override;
  // Counts source=self records in message.corpus_path.
  void Retrain(const RetrainMessage &message) override;
  std::string Describe() const override;

  long self_instances() const { return self_instances_; }
  double scale() const { return half_ / (half_ + static_cast<double>(self_instances_)); }

 private:
  const Lexicon *lexicon_;
  NoiseConfig base_;
  double half_;
  long self_instances_ = 0;
};

// "p_del=0.1,p_sub=0,seed=7,half=500" style settings. Unknown keys throw
// ConfigError. `half` is written to *half when given.
NoiseConfig ParseNoiseSpec(std::string_view spec, double *half = nullptr);
std::string FormatNoiseSpec(const NoiseConfig &noise);

}  // namespace mrforge

#endif  // MRFORGE_GENERATOR_H_
