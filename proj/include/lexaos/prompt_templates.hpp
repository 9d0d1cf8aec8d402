// Copyright 2026 The lexaos Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Zero-shot prompt templates. These strings must stay byte-identical to
// resources/prompts/*_v1.txt (checked by the test suite); bump the version
// instead of editing in place.

#pragma once

#include <string_view>

namespace lexaos::prompts {

inline constexpr std::string_view kTemplateVersion = "v1";
inline constexpr std::string_view kStatuteSlot = "{{STATUTE}}";
inline constexpr std::string_view kCaseSlot = "{{CASE}}";

inline constexpr std::string_view kStandardV1 =
    "An ARTICLE is applicable to a CASE if at least one event or condition mentioned in the CASE facts is "
    "semantically similar to or relevant to or implies or entails or is a special case of one of the "
    "events/conditions mentioned in the ARTICLE. Identify whether the following ARTICLE is applicable for the "
    "CASE. Also, provide an explanation for the applicability. Keep the explanation concise and no longer than 2 "
    "sentences.\n"
    "### Response format:\n"
    "Applicable: ⟨Yes or No⟩\n"
    "Explanation: ⟨explanation⟩\n"
    "\n"
    "ARTICLE: {{STATUTE}}\n"
    "CASE: {{CASE}}\n";

inline constexpr std::string_view kCotV1 =
    "An ARTICLE is applicable to a CASE if at least one event or condition mentioned in the CASE facts is "
    "semantically similar to or relevant to or implies or entails or is a special case of one of the "
    "events/conditions mentioned in the ARTICLE. Compare the following ARTICLE with the CASE below by identifying "
    "common aspects such as similar events or conditions. First write these common aspects in your response. If "
    "there are no common aspects, write \"None\". Then using the identified common aspects, identify whether the "
    "following ARTICLE is applicable for the CASE. Also, provide an explanation for the applicability. Keep the "
    "explanation concise and no longer than 2 sentences.\n"
    "### Response format:\n"
    "Common Aspects: ⟨list of common events/conditions⟩\n"
    "Applicable: ⟨Yes or No⟩\n"
    "Explanation: ⟨explanation⟩\n"
    "\n"
    "ARTICLE: {{STATUTE}}\n"
    "CASE: {{CASE}}\n";

}  // namespace lexaos::prompts
