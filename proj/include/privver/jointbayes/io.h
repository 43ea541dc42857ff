/*
 * Copyright 2026 The Privver Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVVER_JOINTBAYES_IO_H_
#define PRIVVER_JOINTBAYES_IO_H_

#include <string>
#include <vector>

#include "privver/common/bytes.h"
#include "privver/jointbayes/jointbayes.h"

namespace privver::jointbayes {

struct FeatureRow {
  std::string identity_id;
  Vector values;
};

// CSV with header identity_id,f0,...,f{d-1}.
std::vector<FeatureRow> ReadFeatureCsv(const std::string& path);
std::vector<FeatureRow> ParseFeatureCsv(const std::string& text);
std::string FormatFeatureCsv(const std::vector<FeatureRow>& rows);
void WriteFeatureCsv(const std::string& path, const std::vector<FeatureRow>& rows);

// Groups rows by identity in order of first appearance.
std::vector<IdentityGroup> GroupRows(const std::vector<FeatureRow>& rows);

struct Model {
  JbParams params;
  VerifierMatrices verifier;
};

Bytes SerializeModel(const Model& model);
Model ParseModel(std::span<const uint8_t> data);
void SaveModel(const std::string& path, const Model& model);
Model LoadModel(const std::string& path);

}  // namespace privver::jointbayes

#endif  // PRIVVER_JOINTBAYES_IO_H_
