// cli/config.cc

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

#include "cli/config.h"

#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "base/error.h"
#include "base/hash.h"
#include "base/io.h"

namespace speechmark {

namespace {

int64_t ParseInt(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    int64_t v = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError("key " + key + ": \"" + value + "\" is not an integer");
  }
}

uint64_t ParseU64(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError("key " + key + ": \"" + value + "\" is not a non-negative integer");
  }
}

double ParseDouble(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception &) {
    throw ConfigError("key " + key + ": \"" + value + "\" is not a number");
  }
}

bool ParseBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError("key " + key + ": \"" + value + "\" is not a boolean");
}

std::vector<int> ParseIntList(const std::string &key, const std::string &value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(static_cast<int>(ParseInt(key, item)));
  }
  if (out.empty()) throw ConfigError("key " + key + ": empty list");
  return out;
}

using Setter = std::function<void(RunConfig &, const std::string &, const std::string &)>;

const std::map<std::string, Setter> &KeyTable() {
  static const std::map<std::string, Setter> table = {
      {"paths.manifest", [](RunConfig &c, const std::string &, const std::string &v) { c.manifest = v; }},
      {"paths.workdir", [](RunConfig &c, const std::string &, const std::string &v) { c.workdir = v; }},
      {"paths.cachedir", [](RunConfig &c, const std::string &, const std::string &v) { c.cachedir = v; }},
      {"run.jobs", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.jobs = static_cast<int>(ParseInt(k, v)); }},
      {"run.feature_cache", [](RunConfig &c, const std::string &k, const std::string &v) { c.feature_cache = ParseBool(k, v); }},

      {"corpus.target_rate", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.target_rate = static_cast<int>(ParseInt(k, v)); }},
      {"corpus.strip_chat", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.strip_chat = ParseBool(k, v); }},

      {"frontend.window_ms", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.window_ms = ParseDouble(k, v); }},
      {"frontend.shift_ms", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.shift_ms = ParseDouble(k, v); }},
      {"frontend.num_coeffs", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.num_coeffs = static_cast<int>(ParseInt(k, v)); }},
      {"frontend.num_filters", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.num_filters = static_cast<int>(ParseInt(k, v)); }},
      {"frontend.preemphasis", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.preemphasis = ParseDouble(k, v); }},
      {"frontend.log_floor", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.log_floor = ParseDouble(k, v); }},
      {"frontend.vad", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.vad = ParseBool(k, v); }},
      {"frontend.vad_drop_db", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.frontend.vad_drop_db = ParseDouble(k, v); }},
      {"frontend.cmvn", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.apply_cmvn = ParseBool(k, v); }},

      {"ngram.order", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ngram_order = static_cast<int>(ParseInt(k, v)); }},
      {"ngram.smoothing", [](RunConfig &c, const std::string &, const std::string &v) { c.pipeline.smoothing = ParseSmoothing(v); }},
      {"ngram.discount", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ngram.kn_discount = ParseDouble(k, v); }},
      {"ngram.katz_cutoff", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ngram.katz_cutoff = static_cast<int>(ParseInt(k, v)); }},
      {"ngram.unk_threshold", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ngram.unk_threshold = static_cast<int>(ParseInt(k, v)); }},

      {"ubm.components", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ubm_components = static_cast<int>(ParseInt(k, v)); }},
      {"ubm.iters", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ubm.iterations = static_cast<int>(ParseInt(k, v)); }},
      {"ubm.kmeans_iters", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ubm.kmeans_iterations = static_cast<int>(ParseInt(k, v)); }},
      {"ubm.subsample", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ubm.kmeans_subsample = static_cast<size_t>(ParseU64(k, v)); }},
      {"ubm.seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ubm.seed = ParseU64(k, v); }},
      {"ubm.variance_floor_factor", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ubm.variance_floor_factor = ParseDouble(k, v); }},

      {"ivector.rank", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.ivector_rank = static_cast<int>(ParseInt(k, v)); }},
      {"ivector.iters", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.tv.iterations = static_cast<int>(ParseInt(k, v)); }},
      {"ivector.seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.tv.seed = ParseU64(k, v); }},

      {"xvector.frame_dim", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec_frame_dim = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.pre_pool_dim", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec_pre_pool_dim = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.seg6_dim", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec_seg6_dim = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.seg7_dim", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec_seg7_dim = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.epochs", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.epochs = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.batch", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.batch_size = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.lr", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.learning_rate = ParseDouble(k, v); }},
      {"xvector.momentum", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.momentum = ParseDouble(k, v); }},
      {"xvector.lr_decay", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.lr_decay = ParseDouble(k, v); }},
      {"xvector.chunk_min", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.chunk_min = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.chunk_max", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.chunk_max = static_cast<int>(ParseInt(k, v)); }},
      {"xvector.seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.seed = ParseU64(k, v); }},
      {"xvector.augment", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.augment = ParseBool(k, v); }},
      {"xvector.noise_snr_db", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.xvec.noise_snr_db = ParseDouble(k, v); }},

      {"svm.c", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.svm.c = ParseDouble(k, v); }},
      {"svm.epochs", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.svm.max_epochs = static_cast<int>(ParseInt(k, v)); }},
      {"svm.eta0", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.svm.eta0 = ParseDouble(k, v); }},

      {"fusion.use_ppl", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.use_ppl = ParseBool(k, v); }},
      {"fusion.use_ivec", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.use_ivec = ParseBool(k, v); }},
      {"fusion.use_xvec", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.use_xvec = ParseBool(k, v); }},

      {"cv.k_folds", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.k_folds = static_cast<int>(ParseInt(k, v)); }},
      {"cv.seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.pipeline.cv_seed = ParseU64(k, v); }},

      {"ablate.grid", [](RunConfig &c, const std::string &, const std::string &v) { c.ablate_grid = v; }},
      {"ablate.ngram_orders", [](RunConfig &c, const std::string &k, const std::string &v) { c.grids.ngram_orders = ParseIntList(k, v); }},
      {"ablate.ubm_grid", [](RunConfig &c, const std::string &k, const std::string &v) { c.grids.ubm_grid = ParseIntList(k, v); }},
      {"ablate.rank_grid", [](RunConfig &c, const std::string &k, const std::string &v) { c.grids.rank_grid = ParseIntList(k, v); }},

      {"synth.cases", [](RunConfig &c, const std::string &k, const std::string &v) { c.synth_cases = static_cast<int>(ParseInt(k, v)); }},
      {"synth.seed", [](RunConfig &c, const std::string &k, const std::string &v) { c.synth_seed = ParseU64(k, v); }},
  };
  return table;
}

std::string EnvName(const std::string &key) {
  std::string name = "SPEECHMARK_";
  for (char c : key) {
    if (c == '.') {
      name.push_back('_');
    } else {
      name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return name;
}

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::Set(const std::string &key, const std::string &value) {
  auto it = KeyTable().find(key);
  if (it == KeyTable().end()) throw ConfigError("unknown config key \"" + key + "\"");
  it->second(*this, key, value);
}

void RunConfig::LoadFile(const std::string &path) {
  std::istringstream in(ReadTextFile(path));
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = Trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed section header");
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = Trim(line.substr(0, eq));
    std::string value = Trim(line.substr(eq + 1));
    if (section.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": key outside any [section]");
    try {
      Set(section + "." + key, value);
    } catch (const ConfigError &e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::ApplyEnvironment() {
  for (const auto &[key, setter] : KeyTable()) {
    const char *value = std::getenv(EnvName(key).c_str());
    if (value != nullptr) setter(*this, key, value);
  }
}

std::vector<std::string> RunConfig::KnownKeys() {
  std::vector<std::string> keys;
  for (const auto &[key, setter] : KeyTable()) keys.push_back(key);
  return keys;
}

std::string RunConfig::StageFingerprint(const std::vector<std::string> &prefixes) const {
  std::istringstream dump(pipeline.CanonicalDump());
  std::ostringstream selected;
  std::string line;
  while (std::getline(dump, line)) {
    if (prefixes.empty()) {
      selected << line << "\n";
      continue;
    }
    for (const auto &prefix : prefixes) {
      if (line.rfind(prefix, 0) == 0) {
        selected << line << "\n";
        break;
      }
    }
  }
  return HashToHex(HashString(selected.str()));
}

std::string RunConfig::FrontendFingerprint() const {
  return StageFingerprint({"corpus.", "frontend."});
}

RunConfig ParseRunConfig(const std::vector<std::string> &args) {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  for (size_t i = 0; i < args.size(); ++i) {
    std::string arg = args[i];
    if (arg.rfind("--", 0) != 0)
      throw ConfigError("unexpected argument \"" + arg + "\" (flags are --key value)");
    arg = arg.substr(2);
    std::string value;
    size_t eq = arg.find('=');
    if (eq != std::string::npos) {
      value = arg.substr(eq + 1);
      arg = arg.substr(0, eq);
    } else {
      if (i + 1 >= args.size())
        throw ConfigError("flag --" + arg + " expects a value");
      value = args[++i];
    }
    if (arg == "config") {
      config_path = value;
    } else if (arg == "manifest") {
      overrides.emplace_back("paths.manifest", value);
    } else if (arg == "workdir") {
      overrides.emplace_back("paths.workdir", value);
    } else if (arg == "jobs") {
      overrides.emplace_back("run.jobs", value);
    } else if (arg == "grid") {
      overrides.emplace_back("ablate.grid", value);
    } else {
      overrides.emplace_back(arg, value);
    }
  }

  RunConfig config;
  if (!config_path.empty()) config.LoadFile(config_path);
  config.ApplyEnvironment();
  for (const auto &[key, value] : overrides) config.Set(key, value);
  return config;
}

}  // namespace speechmark
