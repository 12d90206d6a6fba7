// fusion/fusion.cc

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

#include "fusion/fusion.h"

#include <cmath>

#include "base/error.h"

namespace speechmark {

std::string FusionLayout::Describe() const {
  std::string out;
  if (has_ppl) out += "ppl(2)";
  if (ivec_dim > 0) out += (out.empty() ? "" : "+") + std::string("ivec(") +
                           std::to_string(ivec_dim) + ")";
  if (xvec_dim > 0) out += (out.empty() ? "" : "+") + std::string("xvec(") +
                           std::to_string(xvec_dim) + ")";
  return out.empty() ? "empty" : out;
}

FusionVector Fuse(const PerplexityPair *ppl, const Eigen::VectorXd *ivec,
                  const Eigen::VectorXd *xvec) {
  SM_REQUIRE(ppl != nullptr || ivec != nullptr || xvec != nullptr, ConfigError,
             "at least one fusion block must be present");
  FusionVector out;
  out.layout.has_ppl = ppl != nullptr;
  out.layout.ivec_dim = ivec ? static_cast<int>(ivec->size()) : 0;
  out.layout.xvec_dim = xvec ? static_cast<int>(xvec->size()) : 0;
  out.values.resize(out.layout.TotalDim());
  int at = 0;
  if (ppl != nullptr) {
    SM_REQUIRE(std::isfinite(ppl->ppl_dementia) && ppl->ppl_dementia > 0 &&
                   std::isfinite(ppl->ppl_control) && ppl->ppl_control > 0,
               InputError, "perplexities must be finite and positive");
    out.values(at++) = std::log(ppl->ppl_dementia);
    out.values(at++) = std::log(ppl->ppl_control);
  }
  if (ivec != nullptr) {
    SM_REQUIRE(ivec->allFinite(), InputError, "non-finite i-vector");
    out.values.segment(at, ivec->size()) = *ivec;
    at += static_cast<int>(ivec->size());
  }
  if (xvec != nullptr) {
    SM_REQUIRE(xvec->allFinite(), InputError, "non-finite x-vector");
    out.values.segment(at, xvec->size()) = *xvec;
  }
  return out;
}

}  // namespace speechmark
