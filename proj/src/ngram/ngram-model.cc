// ngram/ngram-model.cc

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

#include "ngram/ngram-model.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "base/error.h"

namespace speechmark {

namespace {

constexpr int kUnkId = 0;
constexpr int kStartId = 1;
constexpr int kEndId = 2;
constexpr int kNumSpecials = 3;
const char *kUnkToken = "<unk>";
const char *kStartToken = "<s>";
const char *kEndToken = "</s>";

// Smallest unseen mass a context may reserve; keeps every smoothed
// probability strictly positive even when discounting frees nothing.
constexpr double kUnseenMassFloor = 1e-10;

double LookupFollower(const std::vector<std::pair<int, double>> &followers,
                      int word) {
  auto it = std::lower_bound(
      followers.begin(), followers.end(), word,
      [](const std::pair<int, double> &a, int b) { return a.first < b; });
  if (it != followers.end() && it->first == word) return it->second;
  return 0.0;
}

}  // namespace

std::string SmoothingName(Smoothing s) {
  return s == Smoothing::kGoodTuring ? "good-turing" : "kneser-ney";
}

Smoothing ParseSmoothing(const std::string &name) {
  std::string lower;
  for (char c : name)
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "good-turing" || lower == "goodturing" || lower == "gt")
    return Smoothing::kGoodTuring;
  if (lower == "kneser-ney" || lower == "kneserney" || lower == "kn")
    return Smoothing::kKneserNey;
  throw ConfigError("unknown smoothing \"" + name +
                    "\" (expected good-turing or kneser-ney)");
}

double GoodTuringAdjust(const std::map<int64_t, int64_t> &counts_of_counts,
                        int64_t r, int katz_cutoff) {
  SM_REQUIRE(r >= 0, InputError, "count must be non-negative");
  if (r >= katz_cutoff) return static_cast<double>(r);

  auto n_r_it = counts_of_counts.find(r);
  if (n_r_it == counts_of_counts.end() || n_r_it->second <= 0)
    throw ConsistencyError("counts-of-counts has no mass at observed count " +
                           std::to_string(r));
  double n_r = static_cast<double>(n_r_it->second);

  auto n_r1_it = counts_of_counts.find(r + 1);
  if (n_r1_it != counts_of_counts.end() && n_r1_it->second > 0)
    return (r + 1) * static_cast<double>(n_r1_it->second) / n_r;

  // Count-of-count hole: fit log n_r = a + b log r over the observed pairs
  // and use the fitted curve for both numerator and denominator.
  int points = 0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto &[rr, nn] : counts_of_counts) {
    if (rr <= 0 || nn <= 0) continue;
    double x = std::log(static_cast<double>(rr));
    double y = std::log(static_cast<double>(nn));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++points;
  }
  if (points < 2) return static_cast<double>(r);  // nothing to fit
  double denom = points * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return static_cast<double>(r);
  double b = (points * sxy - sx * sy) / denom;
  double a = (sy - b * sx) / points;
  auto fitted = [&](double rr) { return std::exp(a + b * std::log(rr)); };
  return (r + 1) * fitted(static_cast<double>(r + 1)) /
         fitted(static_cast<double>(r));
}

std::string NgramModel::PackContext(const int *ids, int len) {
  std::string key(static_cast<size_t>(len) * 4, '\0');
  for (int i = 0; i < len; ++i) {
    uint32_t v = static_cast<uint32_t>(ids[i]);
    key[i * 4 + 0] = static_cast<char>(v & 0xff);
    key[i * 4 + 1] = static_cast<char>((v >> 8) & 0xff);
    key[i * 4 + 2] = static_cast<char>((v >> 16) & 0xff);
    key[i * 4 + 3] = static_cast<char>((v >> 24) & 0xff);
  }
  return key;
}

int NgramModel::TokenToId(const std::string &token) const {
  if (token == kUnkToken) return kUnkId;
  if (token == kStartToken) return kStartId;
  if (token == kEndToken) return kEndId;
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnkId : it->second;
}

const NgramModel::Entry *NgramModel::FindEntry(const Table &table,
                                               const int *ctx, int len) const {
  auto it = table.find(PackContext(ctx, len));
  return it == table.end() ? nullptr : &it->second;
}

NgramModel NgramModel::Train(const std::vector<TokenSequence> &corpus,
                             int order, Smoothing smoothing,
                             const NgramOptions &opts) {
  SM_REQUIRE(order >= 1 && order <= 4, ConfigError,
             "n-gram order must be between 1 and 4");
  SM_REQUIRE(opts.kn_discount >= 0.0 && opts.kn_discount < 1.0, ConfigError,
             "Kneser-Ney discount must be in [0, 1)");
  SM_REQUIRE(opts.katz_cutoff >= 1, ConfigError, "Katz cutoff must be >= 1");
  SM_REQUIRE(!corpus.empty(), TrainingError,
             "cannot train an n-gram model on an empty corpus");

  NgramModel model;
  model.order_ = order;
  model.smoothing_ = smoothing;
  model.opts_ = opts;

  // Vocabulary: tokens at or above the unk threshold, sorted for stable ids.
  std::unordered_map<std::string, int64_t> freq;
  for (const auto &seq : corpus)
    for (const auto &tok : seq) ++freq[tok];
  std::set<std::string> kept;
  for (const auto &[tok, n] : freq)
    if (n >= opts.unk_threshold) kept.insert(tok);
  model.id_to_token_ = {kUnkToken, kStartToken, kEndToken};
  for (const auto &tok : kept) {
    model.token_to_id_[tok] = static_cast<int>(model.id_to_token_.size());
    model.id_to_token_.push_back(tok);
  }
  model.prediction_vocab_size_ =
      static_cast<int>(model.id_to_token_.size()) - 1;  // everything but <s>

  // Top-order counts over padded sequences.
  std::unordered_map<std::string, std::unordered_map<int, double>> counts;
  for (const auto &seq : corpus) {
    std::vector<int> ids;
    ids.reserve(seq.size() + order);
    for (int i = 0; i < order - 1; ++i) ids.push_back(kStartId);
    for (const auto &tok : seq) {
      SM_REQUIRE(!tok.empty(), InputError, "empty token in training sequence");
      ids.push_back(model.TokenToId(tok));
    }
    ids.push_back(kEndId);
    if (static_cast<int>(ids.size()) < order) continue;
    for (size_t i = 0; i + order <= ids.size(); ++i) {
      std::string ctx = PackContext(ids.data() + i, order - 1);
      counts[ctx][ids[i + order - 1]] += 1.0;
    }
  }

  model.raw_.assign(order + 1, Table());
  Table &top = model.raw_[order];
  for (auto &[ctx, followers] : counts) {
    Entry entry;
    entry.followers.assign(followers.begin(), followers.end());
    std::sort(entry.followers.begin(), entry.followers.end());
    for (const auto &[w, c] : entry.followers) entry.total += c;
    top.emplace(ctx, std::move(entry));
  }
  SM_REQUIRE(!top.empty(), TrainingError, "training corpus produced no n-grams");

  model.BuildLowerOrders();
  model.Finalize();
  return model;
}

void NgramModel::BuildLowerOrders() {
  // Each lower raw level is the level above summed over its first token;
  // continuation levels count distinct predecessors instead.
  for (int n = order_ - 1; n >= 1; --n) {
    std::unordered_map<std::string, std::unordered_map<int, double>> acc;
    for (const auto &[ctx_key, entry] : raw_[n + 1]) {
      // Drop the first token of the context: bytes 4..end.
      std::string sub_ctx = ctx_key.substr(4);
      auto &followers = acc[sub_ctx];
      for (const auto &[w, c] : entry.followers) followers[w] += c;
    }
    Table &table = raw_[n];
    for (auto &[ctx, followers] : acc) {
      Entry entry;
      entry.followers.assign(followers.begin(), followers.end());
      std::sort(entry.followers.begin(), entry.followers.end());
      for (const auto &[w, c] : entry.followers) entry.total += c;
      table.emplace(ctx, std::move(entry));
    }
  }

  if (smoothing_ == Smoothing::kKneserNey && order_ > 1) {
    cont_.assign(order_, Table());
    for (int n = 1; n < order_; ++n) {
      std::unordered_map<std::string, std::unordered_map<int, double>> acc;
      for (const auto &[ctx_key, entry] : raw_[n + 1]) {
        std::string sub_ctx = ctx_key.substr(4);
        auto &followers = acc[sub_ctx];
        for (const auto &[w, c] : entry.followers) {
          (void)c;
          followers[w] += 1.0;  // one distinct predecessor
        }
      }
      Table &table = cont_[n];
      for (auto &[ctx, followers] : acc) {
        Entry entry;
        entry.followers.assign(followers.begin(), followers.end());
        std::sort(entry.followers.begin(), entry.followers.end());
        for (const auto &[w, c] : entry.followers) entry.total += c;
        table.emplace(ctx, std::move(entry));
      }
    }
  }
}

void NgramModel::Finalize() {
  // Top-order counts-of-counts are part of the public model state.
  top_counts_of_counts_.clear();
  for (const auto &[ctx, entry] : raw_[order_])
    for (const auto &[w, c] : entry.followers)
      ++top_counts_of_counts_[static_cast<int64_t>(std::llround(c))];

  if (smoothing_ != Smoothing::kGoodTuring) return;

  int cutoff = opts_.katz_cutoff;
  discount_.assign(order_ + 1, std::vector<double>());
  for (int n = 1; n <= order_; ++n) {
    std::map<int64_t, int64_t> noc;
    for (const auto &[ctx, entry] : raw_[n])
      for (const auto &[w, c] : entry.followers)
        ++noc[static_cast<int64_t>(std::llround(c))];

    std::vector<double> d(cutoff, 1.0);
    auto n1 = noc.find(1);
    double n1_val = (n1 == noc.end()) ? 0.0 : static_cast<double>(n1->second);
    auto ncut = noc.find(cutoff);
    double ncut_val = (ncut == noc.end()) ? 0.0 : static_cast<double>(ncut->second);
    // Katz renormalizer; unusable when singletons are too scarce.
    double big_a = n1_val > 0 ? cutoff * ncut_val / n1_val : 1.0;
    if (n1_val > 0 && big_a < 1.0 - 1e-9) {
      for (int64_t r = 1; r < cutoff; ++r) {
        if (noc.find(r) == noc.end()) continue;  // count never occurs
        double r_star = GoodTuringAdjust(noc, r, cutoff);
        double dr = (r_star / r - big_a) / (1.0 - big_a);
        d[r] = std::clamp(dr, 1e-6, 1.0);
      }
    }
    discount_[n] = std::move(d);
  }

  // Precompute backoff parameters level by level so that lower-order
  // probabilities are final before the level above uses them.
  for (int n = 1; n <= order_; ++n) {
    const std::vector<double> &d = discount_[n];
    for (auto &[ctx_key, entry] : raw_[n]) {
      double seen_sum = 0.0;
      for (const auto &[w, c] : entry.followers) {
        int64_t r = static_cast<int64_t>(std::llround(c));
        double dr = (r < cutoff) ? d[r] : 1.0;
        seen_sum += dr * c / entry.total;
      }
      entry.unseen_count =
          prediction_vocab_size_ - static_cast<int>(entry.followers.size());
      if (entry.unseen_count <= 0) {
        entry.seen_scale = 1.0 / seen_sum;
        entry.beta = 0.0;
        entry.alpha = 0.0;
        continue;
      }
      double beta = 1.0 - seen_sum;
      if (beta < kUnseenMassFloor) {
        beta = kUnseenMassFloor;
        entry.seen_scale = (1.0 - beta) / seen_sum;
      } else {
        entry.seen_scale = 1.0;
      }
      entry.beta = beta;
      if (n == 1) {
        entry.uniform_unseen = true;
        continue;
      }
      // Mass of this context's seen words under the lower-order model.
      std::vector<int> ctx_ids(order_);
      const unsigned char *p = reinterpret_cast<const unsigned char *>(ctx_key.data());
      int ctx_len = n - 1;
      for (int i = 0; i < ctx_len; ++i) {
        ctx_ids[i] = p[i * 4] | (p[i * 4 + 1] << 8) | (p[i * 4 + 2] << 16) |
                     (p[i * 4 + 3] << 24);
      }
      double lower_seen = 0.0;
      for (const auto &[w, c] : entry.followers)
        lower_seen += ProbKatz(n - 1, ctx_ids.data() + 1, w);
      double denom = 1.0 - lower_seen;
      // A small normalizer turns alpha into a rounding amplifier across
      // backoff levels; such contexts spread their reserved mass uniformly.
      if (denom <= 1e-2) {
        entry.uniform_unseen = true;
      } else {
        entry.alpha = beta / denom;
      }
    }
  }
}

double NgramModel::ProbKatz(int level, const int *ctx, int word) const {
  const Entry *entry = FindEntry(raw_[level], ctx, level - 1);
  if (entry == nullptr || entry->total <= 0.0) {
    if (level == 1) return 1.0 / prediction_vocab_size_;
    return ProbKatz(level - 1, ctx + 1, word);
  }
  double c = LookupFollower(entry->followers, word);
  if (c > 0.0) {
    int64_t r = static_cast<int64_t>(std::llround(c));
    double dr = (r < opts_.katz_cutoff) ? discount_[level][r] : 1.0;
    return dr * c / entry->total * entry->seen_scale;
  }
  if (entry->unseen_count <= 0) return kUnseenMassFloor / prediction_vocab_size_;
  if (entry->uniform_unseen) return entry->beta / entry->unseen_count;
  return entry->alpha * ProbKatz(level - 1, ctx + 1, word);
}

double NgramModel::ProbKneserNey(int level, const int *ctx, int word) const {
  const Table &table = (level == order_) ? raw_[level] : cont_[level];
  const Entry *entry = FindEntry(table, ctx, level - 1);
  if (entry == nullptr || entry->total <= 0.0) {
    if (level == 1) return 1.0 / prediction_vocab_size_;
    return ProbKneserNey(level - 1, ctx + 1, word);
  }
  double discount = opts_.kn_discount;
  double c = LookupFollower(entry->followers, word);
  double direct = std::max(c - discount, 0.0) / entry->total;
  double lambda = discount * static_cast<double>(entry->followers.size()) / entry->total;
  double lower = (level == 1) ? 1.0 / prediction_vocab_size_
                              : ProbKneserNey(level - 1, ctx + 1, word);
  return direct + lambda * lower;
}

double NgramModel::ProbIds(const int *ctx, int word) const {
  if (smoothing_ == Smoothing::kGoodTuring) return ProbKatz(order_, ctx, word);
  return ProbKneserNey(order_, ctx, word);
}

double NgramModel::Prob(const std::vector<std::string> &context,
                        const std::string &word) const {
  SM_REQUIRE(static_cast<int>(context.size()) == order_ - 1, InputError,
             "context length must be order-1");
  std::vector<int> ctx(context.size());
  for (size_t i = 0; i < context.size(); ++i) ctx[i] = TokenToId(context[i]);
  return ProbIds(ctx.data(), TokenToId(word));
}

double NgramModel::Perplexity(const TokenSequence &sequence) const {
  SM_REQUIRE(!sequence.empty(), InputError, "cannot score an empty sequence");
  std::vector<int> ids;
  ids.reserve(sequence.size() + order_);
  for (int i = 0; i < order_ - 1; ++i) ids.push_back(kStartId);
  for (const auto &tok : sequence) ids.push_back(TokenToId(tok));
  ids.push_back(kEndId);

  double log_sum = 0.0;
  size_t scored = 0;
  for (size_t i = order_ - 1; i < ids.size(); ++i) {
    double p = ProbIds(ids.data() + i - (order_ - 1), ids[i]);
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    log_sum += std::log(p);
    ++scored;
  }
  return std::exp(-log_sum / static_cast<double>(scored));
}

int64_t NgramModel::RawCount(const std::vector<std::string> &ngram) const {
  SM_REQUIRE(!ngram.empty() && static_cast<int>(ngram.size()) <= order_,
             InputError, "n-gram length must be in [1, order]");
  int n = static_cast<int>(ngram.size());
  std::vector<int> ids(ngram.size());
  for (size_t i = 0; i < ngram.size(); ++i) ids[i] = TokenToId(ngram[i]);
  const Entry *entry = FindEntry(raw_[n], ids.data(), n - 1);
  if (entry == nullptr) return 0;
  return static_cast<int64_t>(std::llround(LookupFollower(entry->followers, ids[n - 1])));
}

std::vector<std::string> NgramModel::PredictionVocab() const {
  std::vector<std::string> vocab;
  vocab.reserve(id_to_token_.size() - 1);
  for (size_t i = 0; i < id_to_token_.size(); ++i)
    if (static_cast<int>(i) != kStartId) vocab.push_back(id_to_token_[i]);
  return vocab;
}

void NgramModel::Save(const std::string &path) const {
  std::ostringstream out;
  out << "speechmark-ngram 1\n";
  out << "order " << order_ << "\n";
  out << "smoothing " << SmoothingName(smoothing_) << "\n";
  out << "discount " << opts_.kn_discount << "\n";
  out << "katz_cutoff " << opts_.katz_cutoff << "\n";
  out << "unk_threshold " << opts_.unk_threshold << "\n";
  out << "vocab " << (id_to_token_.size() - kNumSpecials) << "\n";
  for (size_t i = kNumSpecials; i < id_to_token_.size(); ++i)
    out << id_to_token_[i] << "\n";

  // Top-order n-grams, sorted by token strings for stable bytes.
  std::vector<std::pair<std::vector<std::string>, int64_t>> grams;
  for (const auto &[ctx_key, entry] : raw_[order_]) {
    const unsigned char *p = reinterpret_cast<const unsigned char *>(ctx_key.data());
    std::vector<std::string> prefix(order_ - 1);
    for (int i = 0; i < order_ - 1; ++i) {
      int id = p[i * 4] | (p[i * 4 + 1] << 8) | (p[i * 4 + 2] << 16) |
               (p[i * 4 + 3] << 24);
      prefix[i] = id_to_token_[id];
    }
    for (const auto &[w, c] : entry.followers) {
      auto gram = prefix;
      gram.push_back(id_to_token_[w]);
      grams.emplace_back(std::move(gram), static_cast<int64_t>(std::llround(c)));
    }
  }
  std::sort(grams.begin(), grams.end());
  out << "ngrams " << grams.size() << "\n";
  for (const auto &[gram, count] : grams) {
    for (const auto &tok : gram) out << tok << " ";
    out << count << "\n";
  }
  out << "end\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << out.str();
  file.close();
  if (file.fail()) throw IoError("write failed: " + path);
}

NgramModel NgramModel::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string word;
  int version = 0;
  in >> word >> version;
  if (!in || word != "speechmark-ngram" || version != 1)
    throw IoError("not a speechmark n-gram model file: " + path);

  NgramModel model;
  std::string key;
  in >> key >> model.order_;
  if (key != "order") throw IoError("malformed model file: " + path);
  std::string smoothing_name;
  in >> key >> smoothing_name;
  if (key != "smoothing") throw IoError("malformed model file: " + path);
  model.smoothing_ = ParseSmoothing(smoothing_name);
  in >> key >> model.opts_.kn_discount;
  if (key != "discount") throw IoError("malformed model file: " + path);
  in >> key >> model.opts_.katz_cutoff;
  if (key != "katz_cutoff") throw IoError("malformed model file: " + path);
  in >> key >> model.opts_.unk_threshold;
  if (key != "unk_threshold") throw IoError("malformed model file: " + path);

  size_t vocab_size = 0;
  in >> key >> vocab_size;
  if (key != "vocab") throw IoError("malformed model file: " + path);
  model.id_to_token_ = {kUnkToken, kStartToken, kEndToken};
  for (size_t i = 0; i < vocab_size; ++i) {
    in >> word;
    if (!in) throw IoError("truncated vocab in " + path);
    model.token_to_id_[word] = static_cast<int>(model.id_to_token_.size());
    model.id_to_token_.push_back(word);
  }
  model.prediction_vocab_size_ = static_cast<int>(model.id_to_token_.size()) - 1;

  size_t n_grams = 0;
  in >> key >> n_grams;
  if (key != "ngrams") throw IoError("malformed model file: " + path);
  std::unordered_map<std::string, std::unordered_map<int, double>> counts;
  for (size_t g = 0; g < n_grams; ++g) {
    std::vector<int> ids(model.order_);
    for (int i = 0; i < model.order_; ++i) {
      in >> word;
      if (!in) throw IoError("truncated n-gram list in " + path);
      ids[i] = model.TokenToId(word);
    }
    int64_t count = 0;
    in >> count;
    if (!in) throw IoError("truncated n-gram list in " + path);
    counts[PackContext(ids.data(), model.order_ - 1)][ids[model.order_ - 1]] +=
        static_cast<double>(count);
  }
  in >> key;
  if (key != "end") throw IoError("missing end marker in " + path);

  model.raw_.assign(model.order_ + 1, Table());
  Table &top = model.raw_[model.order_];
  for (auto &[ctx, followers] : counts) {
    Entry entry;
    entry.followers.assign(followers.begin(), followers.end());
    std::sort(entry.followers.begin(), entry.followers.end());
    for (const auto &[w, c] : entry.followers) entry.total += c;
    top.emplace(ctx, std::move(entry));
  }
  model.BuildLowerOrders();
  model.Finalize();
  return model;
}

PerplexityPair ScoreCase(const NgramModel &model_dementia,
                         const NgramModel &model_control,
                         const TokenSequence &sequence) {
  SM_REQUIRE(model_dementia.order() == model_control.order(), InputError,
             "class models must share the n-gram order");
  SM_REQUIRE(model_dementia.smoothing() == model_control.smoothing(), InputError,
             "class models must share the smoothing method");
  PerplexityPair pair;
  pair.ppl_dementia = model_dementia.Perplexity(sequence);
  pair.ppl_control = model_control.Perplexity(sequence);
  return pair;
}

}  // namespace speechmark
