// cli/config.h

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

#ifndef SPEECHMARK_CLI_CONFIG_H_
#define SPEECHMARK_CLI_CONFIG_H_

#include <string>
#include <vector>

#include "fusion/ablation.h"
#include "fusion/pipeline-config.h"

namespace speechmark {

// Full tool configuration: a plain `key = value` file with [section]
// headers, every key also settable through `SPEECHMARK_SECTION_KEY`
// environment variables and `--section.key value` flags.  Unknown keys are
// rejected.  All seeds default to fixed values; nothing is ever drawn from
// system entropy.
struct RunConfig {
  std::string manifest;
  std::string workdir = "work";
  std::string cachedir;  // empty means <workdir>/cache
  bool feature_cache = true;

  PipelineConfig pipeline;

  AblationGrids grids;
  std::string ablate_grid = "table5";

  int synth_cases = 200;
  uint64_t synth_seed = 7;

  std::string CacheDir() const { return cachedir.empty() ? workdir + "/cache" : cachedir; }

  // Precedence: defaults, then file, then environment, then flags.
  void LoadFile(const std::string &path);
  void ApplyEnvironment();
  void Set(const std::string &key, const std::string &value);

  // Fingerprint over the pipeline keys selected by the given section
  // prefixes; an empty list selects everything.
  std::string StageFingerprint(const std::vector<std::string> &prefixes) const;
  std::string FrontendFingerprint() const;

  static std::vector<std::string> KnownKeys();
};

// Parses flags after the subcommand: `--config <file>`, `--key value`,
// `--key=value`, plus the aliases --manifest, --workdir, --jobs and --grid.
RunConfig ParseRunConfig(const std::vector<std::string> &args);

}  // namespace speechmark

#endif  // SPEECHMARK_CLI_CONFIG_H_
