// cli/commands.h

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

#ifndef SPEECHMARK_CLI_COMMANDS_H_
#define SPEECHMARK_CLI_COMMANDS_H_

#include <string>
#include <vector>

namespace speechmark {

// Runs one subcommand.  Exit codes: 0 success, 1 stage failure, 2 usage or
// configuration error.
int Dispatch(const std::vector<std::string> &args);

std::string UsageText();

}  // namespace speechmark

#endif  // SPEECHMARK_CLI_COMMANDS_H_
