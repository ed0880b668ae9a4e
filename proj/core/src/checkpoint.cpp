/*
 * Copyright 2026 The erpvis Authors.
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

#include "erpvis/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "erpvis/error.hpp"

namespace erpvis {
namespace {

constexpr char kMagic[4] = {'E', 'R', 'P', 'L'};
const char* const kHyperKeys[] = {"input_size", "hidden_size", "num_layers", "repr_dim",
                                  "num_classes"};

void PutU32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t GetLE(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

// Visits every parameter in checkpoint order. Fn(double&) for writing or
// reading through the same traversal.
template <typename Set, typename Fn>
void VisitInFileOrder(Set& set, Fn&& fn) {
  const auto& hp = set.hyper();
  const int h = hp.hidden_size;
  auto row_major = [&fn](auto&& block) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      for (Eigen::Index j = 0; j < block.cols(); ++j) fn(block(i, j));
    }
  };
  for (int l = 0; l < hp.num_layers; ++l) {
    auto wx = set.Wx(l);
    auto wh = set.Wh(l);
    for (int gate = 0; gate < 4; ++gate) {
      row_major(wx.middleRows(gate * h, h));
      row_major(wh.middleRows(gate * h, h));
    }
    auto b = set.Bias(l);
    for (int gate = 0; gate < 4; ++gate) row_major(b.middleRows(gate * h, h));
  }
  row_major(set.Wp());
  row_major(set.Bp());
  row_major(set.Wy());
  row_major(set.By());
}

}  // namespace

void SaveCheckpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto& hp = checkpoint.model.hyper();
  std::map<std::string, std::string> header = checkpoint.info;
  header["input_size"] = std::to_string(hp.input_size);
  header["hidden_size"] = std::to_string(hp.hidden_size);
  header["num_layers"] = std::to_string(hp.num_layers);
  header["repr_dim"] = std::to_string(hp.repr_dim);
  header["num_classes"] = std::to_string(hp.num_classes);
  std::string text;
  for (const auto& [k, v] : header) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw FormatError("checkpoint header entry '" + k + "' contains '=' or a newline");
    }
    text += k + "=" + v + "\n";
  }

  std::string buf;
  buf.append(kMagic, 4);
  PutU32(buf, kCheckpointVersion);
  PutU32(buf, static_cast<std::uint32_t>(text.size()));
  buf += text;
  PutU64(buf, checkpoint.model.size());
  VisitInFileOrder(checkpoint.model, [&buf](double v) { PutU64(buf, std::bit_cast<std::uint64_t>(v)); });

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("checkpoint: cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, kMagic, 4) != 0) throw FormatError("checkpoint: bad magic (expected \"ERPL\")");
  const auto version = static_cast<std::uint32_t>(GetLE(p + 4, 4));
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: version " + std::to_string(version) + " unsupported");
  }
  const std::size_t header_len = GetLE(p + 8, 4);
  if (size < 12 + header_len + 8) throw FormatError("checkpoint: truncated header");

  std::map<std::string, std::string> header;
  std::istringstream lines(bytes.substr(12, header_len));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("checkpoint: malformed header line '" + line + "'");
    header[line.substr(0, eq)] = line.substr(eq + 1);
  }

  LstmHyper hp;
  int* fields[] = {&hp.input_size, &hp.hidden_size, &hp.num_layers, &hp.repr_dim, &hp.num_classes};
  for (std::size_t i = 0; i < std::size(kHyperKeys); ++i) {
    auto it = header.find(kHyperKeys[i]);
    if (it == header.end()) throw FormatError(std::string("checkpoint: header missing ") + kHyperKeys[i]);
    try {
      *fields[i] = std::stoi(it->second);
    } catch (const std::exception&) {
      throw FormatError(std::string("checkpoint: header field ") + kHyperKeys[i] + " is not an integer");
    }
    header.erase(it);
  }
  try {
    hp.Validate();
  } catch (const ParameterError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }

  Checkpoint ckpt{LstmModel(hp), std::move(header)};
  const std::size_t count_at = 12 + header_len;
  const std::uint64_t count = GetLE(p + count_at, 8);
  if (count != ckpt.model.size()) {
    throw FormatError("checkpoint: parameter count " + std::to_string(count) +
                      " does not match hyperparameters (" + std::to_string(ckpt.model.size()) + ")");
  }
  const std::size_t expected = count_at + 8 + count * 8;
  if (size < expected) throw FormatError("checkpoint: truncated parameter payload");
  if (size > expected) throw FormatError("checkpoint: unexpected trailing bytes");

  const unsigned char* q = p + count_at + 8;
  VisitInFileOrder(ckpt.model, [&q](double& v) {
    v = std::bit_cast<double>(GetLE(q, 8));
    q += 8;
  });
  if (!ckpt.model.values().allFinite()) throw FormatError("checkpoint: non-finite parameters");
  return ckpt;
}

}  // namespace erpvis
