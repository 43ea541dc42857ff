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

#include "privver/jointbayes/io.h"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "privver/common/error.h"

namespace privver::jointbayes {
namespace {

constexpr char kModelMagic[] = "JBM1";

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double ParseReal(std::string_view s, size_t line_no) {
  s = Trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    Fail(ErrorCode::kParseError,
         "line " + std::to_string(line_no) + ": bad value '" + std::string(s) + "'");
  }
  return v;
}

void WriteMatrix(ByteWriter& w, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.F64Le(m(r, c));
  }
}

Matrix ReadMatrix(ByteReader& r, uint32_t d) {
  Matrix m(d, d);
  for (uint32_t i = 0; i < d; ++i) {
    for (uint32_t j = 0; j < d; ++j) m(i, j) = r.F64Le();
  }
  return m;
}

}  // namespace

std::vector<FeatureRow> ParseFeatureCsv(const std::string& text) {
  std::vector<FeatureRow> rows;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  size_t d = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    auto fields = SplitCommas(view);
    if (!header_seen) {
      if (fields.size() < 2 || Trim(fields[0]) != "identity_id") {
        Fail(ErrorCode::kParseError, "feature header must start with identity_id");
      }
      for (size_t i = 1; i < fields.size(); ++i) {
        if (Trim(fields[i]) != "f" + std::to_string(i - 1)) {
          Fail(ErrorCode::kParseError, "unexpected header column " + std::string(fields[i]));
        }
      }
      d = fields.size() - 1;
      header_seen = true;
      continue;
    }
    if (fields.size() != d + 1) {
      Fail(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(d + 1) + " fields");
    }
    FeatureRow row;
    row.identity_id = std::string(Trim(fields[0]));
    row.values.resize(static_cast<Eigen::Index>(d));
    for (size_t i = 0; i < d; ++i) row.values[i] = ParseReal(fields[i + 1], line_no);
    rows.push_back(std::move(row));
  }
  if (!header_seen) Fail(ErrorCode::kParseError, "missing feature header");
  return rows;
}

std::vector<FeatureRow> ReadFeatureCsv(const std::string& path) {
  Bytes data = ReadFile(path);
  return ParseFeatureCsv(std::string(data.begin(), data.end()));
}

std::string FormatFeatureCsv(const std::vector<FeatureRow>& rows) {
  std::string out = "identity_id";
  size_t d = rows.empty() ? 0 : static_cast<size_t>(rows.front().values.size());
  for (size_t i = 0; i < d; ++i) out += ",f" + std::to_string(i);
  out += '\n';
  char buf[64];
  for (const FeatureRow& row : rows) {
    if (static_cast<size_t>(row.values.size()) != d) {
      Fail(ErrorCode::kDimensionMismatch, "rows differ in dimension");
    }
    out += row.identity_id;
    for (Eigen::Index i = 0; i < row.values.size(); ++i) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), row.values[i]);
      out += ',';
      out.append(buf, ptr);
    }
    out += '\n';
  }
  return out;
}

void WriteFeatureCsv(const std::string& path, const std::vector<FeatureRow>& rows) {
  std::string text = FormatFeatureCsv(rows);
  WriteFile(path, std::span(reinterpret_cast<const uint8_t*>(text.data()), text.size()));
}

std::vector<IdentityGroup> GroupRows(const std::vector<FeatureRow>& rows) {
  std::vector<IdentityGroup> groups;
  std::unordered_map<std::string, size_t> index;
  for (const FeatureRow& row : rows) {
    auto [it, inserted] = index.emplace(row.identity_id, groups.size());
    if (inserted) groups.push_back({row.identity_id, {}});
    groups[it->second].images.push_back(row.values);
  }
  return groups;
}

Bytes SerializeModel(const Model& model) {
  const uint32_t d = static_cast<uint32_t>(model.params.d());
  if (model.verifier.d() != static_cast<int>(d) || model.params.s_eps.rows() != d) {
    Fail(ErrorCode::kDimensionMismatch, "model matrices differ in dimension");
  }
  ByteWriter w;
  w.Raw(std::string_view(kModelMagic, 4));
  w.U32Le(d);
  WriteMatrix(w, model.params.s_mu);
  WriteMatrix(w, model.params.s_eps);
  WriteMatrix(w, model.verifier.a);
  WriteMatrix(w, model.verifier.g);
  w.F64Le(model.verifier.threshold);
  return w.Take();
}

Model ParseModel(std::span<const uint8_t> data) {
  ByteReader r(data);
  r.Expect(std::string_view(kModelMagic, 4));
  uint32_t d = r.U32Le();
  if (d == 0 || static_cast<uint64_t>(d) * d * 32 + 8 != r.remaining()) {
    Fail(ErrorCode::kParseError, "model size does not match dimension");
  }
  Model m;
  m.params.s_mu = ReadMatrix(r, d);
  m.params.s_eps = ReadMatrix(r, d);
  m.verifier.a = ReadMatrix(r, d);
  m.verifier.g = ReadMatrix(r, d);
  m.verifier.threshold = r.F64Le();
  r.ExpectDone();
  return m;
}

void SaveModel(const std::string& path, const Model& model) {
  WriteFile(path, SerializeModel(model));
}

Model LoadModel(const std::string& path) { return ParseModel(ReadFile(path)); }

}  // namespace privver::jointbayes
