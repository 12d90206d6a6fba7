// ngram/ngram-model.h

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPEECHMARK_NGRAM_NGRAM_MODEL_H_
#define SPEECHMARK_NGRAM_NGRAM_MODEL_H_

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/transcript.h"

namespace speechmark {

enum class Smoothing { kGoodTuring, kKneserNey };

std::string SmoothingName(Smoothing s);
Smoothing ParseSmoothing(const std::string &name);

struct NgramOptions {
  // Tokens with corpus frequency strictly below this become <unk>.  The
  // default of 1 keeps every observed token; 2 folds hapax legomena away.
  int unk_threshold = 1;
  double kn_discount = 0.75;  // absolute discount D, must be in [0, 1)
  int katz_cutoff = 5;        // counts r < cutoff get Good-Turing adjusted
};

// Perplexities of one case under the two class-conditional models.
struct PerplexityPair {
  double ppl_dementia = 0.0;
  double ppl_control = 0.0;
};

// Adjusted count r* = (r+1) * n_{r+1} / n_r.  Above the cutoff the raw count
// passes through.  When n_{r+1} vanishes below the cutoff (the count-of-count
// "hole"), both counts-of-counts are replaced by a log-log regression fit.
// Throws ConsistencyError when the claimed observed count has n_r = 0.
double GoodTuringAdjust(const std::map<int64_t, int64_t> &counts_of_counts,
                        int64_t r, int katz_cutoff);

// Order-N language model over word tokens with Good-Turing (Katz backoff)
// or interpolated Kneser-Ney smoothing.  Sequences are padded with N-1
// start tokens and one end token; every smoothed conditional sums to one
// over the prediction vocabulary and is strictly positive for discount > 0.
class NgramModel {
 public:
  NgramModel() = default;  // untrained shell; fill via Train or Load

  static NgramModel Train(const std::vector<TokenSequence> &corpus, int order,
                          Smoothing smoothing, const NgramOptions &opts = {});

  // Smoothed P(word | context); context must hold exactly order-1 tokens
  // ("<s>" names the start token).  Out-of-vocabulary tokens map to <unk>.
  double Prob(const std::vector<std::string> &context,
              const std::string &word) const;

  // exp(-(1/k) * sum log P), k = tokens scored (sequence plus end token,
  // start padding excluded).  Infinite when an unsmoothed zero turns up.
  double Perplexity(const TokenSequence &sequence) const;

  int order() const { return order_; }
  Smoothing smoothing() const { return smoothing_; }
  const NgramOptions &options() const { return opts_; }

  // Raw top-order count of an n-gram given as token strings.
  int64_t RawCount(const std::vector<std::string> &ngram) const;
  // n_r over top-order n-grams.
  const std::map<int64_t, int64_t> &CountsOfCounts() const { return top_counts_of_counts_; }
  // Every token the model can predict (includes </s> and <unk>, not <s>).
  std::vector<std::string> PredictionVocab() const;

  void Save(const std::string &path) const;
  static NgramModel Load(const std::string &path);

 private:
  struct Entry {
    std::vector<std::pair<int, double>> followers;  // sorted by token id
    double total = 0.0;
    // Good-Turing backoff precomputation:
    double seen_scale = 1.0;
    double beta = 0.0;
    double alpha = 0.0;
    int unseen_count = 0;
    bool uniform_unseen = false;
  };
  using Table = std::unordered_map<std::string, Entry>;

  static std::string PackContext(const int *ids, int len);
  int TokenToId(const std::string &token) const;
  const Entry *FindEntry(const Table &table, const int *ctx, int len) const;

  void BuildLowerOrders();
  void Finalize();
  double ProbKatz(int level, const int *ctx, int word) const;
  double ProbKneserNey(int level, const int *ctx, int word) const;
  double ProbIds(const int *ctx, int word) const;

  int order_ = 2;
  Smoothing smoothing_ = Smoothing::kGoodTuring;
  NgramOptions opts_;
  std::vector<std::string> id_to_token_;          // 0 <unk>, 1 <s>, 2 </s>
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<Table> raw_;                        // raw_[n], n = 1..order
  std::vector<Table> cont_;                       // cont_[n], n = 1..order-1
  std::vector<std::vector<double>> discount_;     // per level, indexed by r
  std::map<int64_t, int64_t> top_counts_of_counts_;
  int prediction_vocab_size_ = 0;
};

// Scores one case against both class models (same order and smoothing
// required).  Fold purity is the evaluation harness's responsibility.
PerplexityPair ScoreCase(const NgramModel &model_dementia,
                         const NgramModel &model_control,
                         const TokenSequence &sequence);

}  // namespace speechmark

#endif  // SPEECHMARK_NGRAM_NGRAM_MODEL_H_
