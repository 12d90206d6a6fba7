// fusion/pipeline-config.cc

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

#include "fusion/pipeline-config.h"

#include <map>
#include <sstream>

#include "base/hash.h"

namespace speechmark {

XvectorConfig PipelineConfig::MakeXvectorConfig() const {
  XvectorConfig config = XvectorConfig::Desk(frontend.num_coeffs, 2);
  config.frame_dims = {xvec_frame_dim, xvec_frame_dim, xvec_frame_dim,
                       xvec_frame_dim, xvec_pre_pool_dim};
  config.seg6_dim = xvec_seg6_dim;
  config.seg7_dim = xvec_seg7_dim;
  return config;
}

std::string PipelineConfig::CanonicalDump() const {
  std::map<std::string, std::string> kv;
  auto put = [&kv](const std::string &key, auto value) {
    std::ostringstream oss;
    oss << value;
    kv[key] = oss.str();
  };
  put("corpus.target_rate", target_rate);
  put("corpus.strip_chat", strip_chat ? 1 : 0);
  put("frontend.cmvn", apply_cmvn ? 1 : 0);
  put("frontend.window_ms", frontend.window_ms);
  put("frontend.shift_ms", frontend.shift_ms);
  put("frontend.num_coeffs", frontend.num_coeffs);
  put("frontend.num_filters", frontend.num_filters);
  put("frontend.preemphasis", frontend.preemphasis);
  put("frontend.log_floor", frontend.log_floor);
  put("frontend.vad", frontend.vad ? 1 : 0);
  put("frontend.vad_drop_db", frontend.vad_drop_db);
  put("ngram.order", ngram_order);
  put("ngram.smoothing", SmoothingName(smoothing));
  put("ngram.discount", ngram.kn_discount);
  put("ngram.katz_cutoff", ngram.katz_cutoff);
  put("ngram.unk_threshold", ngram.unk_threshold);
  put("ubm.components", ubm_components);
  put("ubm.iters", ubm.iterations);
  put("ubm.kmeans_iters", ubm.kmeans_iterations);
  put("ubm.subsample", ubm.kmeans_subsample);
  put("ubm.seed", ubm.seed);
  put("ubm.variance_floor_factor", ubm.variance_floor_factor);
  put("ivector.rank", ivector_rank);
  put("ivector.iters", tv.iterations);
  put("ivector.seed", tv.seed);
  put("xvector.frame_dim", xvec_frame_dim);
  put("xvector.pre_pool_dim", xvec_pre_pool_dim);
  put("xvector.seg6_dim", xvec_seg6_dim);
  put("xvector.seg7_dim", xvec_seg7_dim);
  put("xvector.epochs", xvec.epochs);
  put("xvector.batch", xvec.batch_size);
  put("xvector.lr", xvec.learning_rate);
  put("xvector.momentum", xvec.momentum);
  put("xvector.lr_decay", xvec.lr_decay);
  put("xvector.chunk_min", xvec.chunk_min);
  put("xvector.chunk_max", xvec.chunk_max);
  put("xvector.seed", xvec.seed);
  put("xvector.augment", xvec.augment ? 1 : 0);
  put("xvector.noise_snr_db", xvec.noise_snr_db);
  put("svm.c", svm.c);
  put("svm.epochs", svm.max_epochs);
  put("svm.eta0", svm.eta0);
  put("fusion.use_ppl", use_ppl ? 1 : 0);
  put("fusion.use_ivec", use_ivec ? 1 : 0);
  put("fusion.use_xvec", use_xvec ? 1 : 0);
  put("cv.k_folds", k_folds);
  put("cv.seed", cv_seed);

  std::ostringstream out;
  for (const auto &[key, value] : kv) out << key << "=" << value << "\n";
  return out.str();
}

std::string PipelineConfig::Fingerprint() const {
  return HashToHex(HashString(CanonicalDump()));
}

}  // namespace speechmark
