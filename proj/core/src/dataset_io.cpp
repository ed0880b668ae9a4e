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

#include "erpvis/dataset_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "erpvis/error.hpp"

namespace erpvis {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr char kMagic[4] = {'E', 'E', 'G', 'T'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 4;

void PutU16(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>(v >> 8));
}

void PutU32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutFloats(std::string& buf, const SignalMatrix& m) {
  const auto n = static_cast<std::size_t>(m.size());
  if constexpr (std::endian::native == std::endian::little) {
    const auto* p = reinterpret_cast<const char*>(m.data());
    buf.append(p, n * sizeof(float));
  } else {
    for (std::size_t i = 0; i < n; ++i) PutU32(buf, std::bit_cast<std::uint32_t>(m.data()[i]));
  }
}

std::uint16_t GetU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void GetFloats(const unsigned char* p, SignalMatrix& m) {
  const auto n = static_cast<std::size_t>(m.size());
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(m.data(), p, n * sizeof(float));
  } else {
    for (std::size_t i = 0; i < n; ++i) m.data()[i] = std::bit_cast<float>(GetU32(p + 4 * i));
  }
}

struct Header {
  std::string kind;
  std::uint64_t n_records = 0;
  int channels = 0;
  int samples = 0;
  double sampling_rate_hz = 0.0;
  std::vector<int> subjects;
  std::vector<int> exemplar_to_category;
  std::map<std::string, std::string> metadata;
  json provenance;
};

struct RecordLabels {
  std::uint16_t subject_id;
  std::uint16_t exemplar_id;
  std::uint16_t n_averaged;
  const SignalMatrix* data;
};

void WriteContainer(const fs::path& dir, const Header& header,
                    const std::vector<RecordLabels>& records) {
  fs::create_directories(dir);
  const bool erp = header.kind == "erp";

  json manifest;
  manifest["version"] = kContainerVersion;
  manifest["kind"] = header.kind;
  manifest["n_trials"] = header.n_records;
  manifest["channels"] = header.channels;
  manifest["samples"] = header.samples;
  manifest["sampling_rate_hz"] = header.sampling_rate_hz;
  manifest["subjects"] = header.subjects;
  manifest["exemplar_to_category"] = header.exemplar_to_category;
  manifest["metadata"] = header.metadata;
  if (erp) manifest["provenance"] = header.provenance;
  {
    std::ofstream out(dir / kManifestFile, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + (dir / kManifestFile).string() + " for writing");
    out << manifest.dump(2) << '\n';
    if (!out) throw FormatError("failed writing " + (dir / kManifestFile).string());
  }

  std::ofstream out(dir / kTrialsFile, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + (dir / kTrialsFile).string() + " for writing");
  std::string buf;
  buf.append(kMagic, 4);
  PutU32(buf, kContainerVersion);
  PutU32(buf, static_cast<std::uint32_t>(header.n_records));
  PutU32(buf, static_cast<std::uint32_t>(header.channels));
  PutU32(buf, static_cast<std::uint32_t>(header.samples));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  for (const auto& r : records) {
    buf.clear();
    PutU16(buf, r.subject_id);
    PutU16(buf, r.exemplar_id);
    if (erp) PutU16(buf, r.n_averaged);
    PutFloats(buf, *r.data);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw FormatError("failed writing " + (dir / kTrialsFile).string());
}

json ReadManifest(const fs::path& dir) {
  std::ifstream in(dir / kManifestFile, std::ios::binary);
  if (!in) throw FormatError("manifest.json: cannot open in " + dir.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string("manifest.json: invalid JSON: ") + e.what());
  }
}

template <typename T>
T Field(const json& manifest, const char* name) {
  if (!manifest.contains(name)) throw FormatError(std::string("manifest.json: missing field '") + name + "'");
  try {
    return manifest.at(name).get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("manifest.json: field '") + name + "' has the wrong type");
  }
}

Header ParseManifest(const json& manifest, const std::string& expected_kind) {
  Header h;
  const auto version = Field<std::uint32_t>(manifest, "version");
  if (version != kContainerVersion) {
    throw FormatError("manifest.json: version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kContainerVersion) + ")");
  }
  h.kind = manifest.value("kind", std::string("eeg"));
  if (h.kind != expected_kind) {
    throw FormatError("manifest.json: kind is '" + h.kind + "', expected '" + expected_kind + "'");
  }
  h.n_records = Field<std::uint64_t>(manifest, "n_trials");
  h.channels = Field<int>(manifest, "channels");
  h.samples = Field<int>(manifest, "samples");
  h.sampling_rate_hz = Field<double>(manifest, "sampling_rate_hz");
  h.subjects = Field<std::vector<int>>(manifest, "subjects");
  h.exemplar_to_category = Field<std::vector<int>>(manifest, "exemplar_to_category");
  if (manifest.contains("metadata")) {
    h.metadata = Field<std::map<std::string, std::string>>(manifest, "metadata");
  }
  if (manifest.contains("provenance")) h.provenance = manifest.at("provenance");
  if (h.channels < 0 || h.samples < 0) throw FormatError("manifest.json: negative channels/samples");
  if (!(h.sampling_rate_hz > 0.0) || !std::isfinite(h.sampling_rate_hz)) {
    throw FormatError("manifest.json: sampling_rate_hz must be positive");
  }
  for (int c : h.exemplar_to_category) {
    if (c < 0 || c > 65535) throw FormatError("manifest.json: exemplar_to_category entry out of range");
  }
  return h;
}

// Validates trials.bin against the manifest and calls on_record for every
// record with its labels and payload pointer.
template <typename OnRecord>
void ReadRecords(const fs::path& dir, const Header& h, OnRecord&& on_record) {
  const fs::path path = dir / kTrialsFile;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("trials.bin: cannot open " + path.string());
  const std::size_t file_size = static_cast<std::size_t>(fs::file_size(path));
  unsigned char head[kHeaderBytes];
  if (file_size < kHeaderBytes || !in.read(reinterpret_cast<char*>(head), kHeaderBytes)) {
    throw FormatError("trials.bin: truncated header (" + std::to_string(file_size) + " bytes)");
  }
  if (std::memcmp(head, kMagic, 4) != 0) throw FormatError("trials.bin: bad magic (expected \"EEGT\")");
  const auto version = GetU32(head + 4);
  if (version != kContainerVersion) {
    throw FormatError("trials.bin: version " + std::to_string(version) + " unsupported (expected " +
                      std::to_string(kContainerVersion) + ")");
  }
  const std::uint64_t n = GetU32(head + 8);
  const std::uint32_t channels = GetU32(head + 12);
  const std::uint32_t samples = GetU32(head + 16);
  auto mismatch = [](const char* field, std::uint64_t manifest, std::uint64_t header) {
    std::ostringstream msg;
    msg << field << ": manifest declares " << manifest << " but trials.bin header says " << header;
    return FormatError(msg.str());
  };
  if (n != h.n_records) throw mismatch("n_trials", h.n_records, n);
  if (channels != static_cast<std::uint32_t>(h.channels)) throw mismatch("channels", h.channels, channels);
  if (samples != static_cast<std::uint32_t>(h.samples)) throw mismatch("samples", h.samples, samples);

  const bool erp = h.kind == "erp";
  const std::size_t label_bytes = erp ? 6 : 4;
  const std::size_t payload = static_cast<std::size_t>(channels) * samples * sizeof(float);
  const std::size_t record = label_bytes + payload;
  const std::size_t expected = kHeaderBytes + static_cast<std::size_t>(n) * record;
  if (file_size < expected) {
    throw FormatError("trials.bin: truncated payload (expected " + std::to_string(expected) +
                      " bytes, found " + std::to_string(file_size) + ")");
  }
  if (file_size > expected) {
    throw FormatError("trials.bin: " + std::to_string(file_size - expected) +
                      " unexpected trailing bytes");
  }

  const std::set<int> subjects(h.subjects.begin(), h.subjects.end());
  std::vector<unsigned char> buffer(record);
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(record))) {
      throw FormatError("trials.bin: read failed at record " + std::to_string(i));
    }
    const unsigned char* p = buffer.data();
    const std::uint16_t subject = GetU16(p);
    const std::uint16_t exemplar = GetU16(p + 2);
    const std::uint16_t n_avg = erp ? GetU16(p + 4) : 1;
    if (subject < 1) throw FormatError("subject_id: record " + std::to_string(i) + " has subject 0");
    if (!subjects.contains(subject)) {
      throw FormatError("subjects: record " + std::to_string(i) + " has subject " +
                        std::to_string(subject) + " not listed in the manifest");
    }
    if (exemplar >= h.exemplar_to_category.size()) {
      throw FormatError("exemplar_id: record " + std::to_string(i) + " has exemplar " +
                        std::to_string(exemplar) + " outside exemplar_to_category");
    }
    if (erp && n_avg < 1) throw FormatError("n_averaged: record " + std::to_string(i) + " is 0");
    SignalMatrix data(static_cast<Eigen::Index>(channels), static_cast<Eigen::Index>(samples));
    GetFloats(p + label_bytes, data);
    if (!data.allFinite()) {
      throw FormatError("trials.bin: record " + std::to_string(i) + " holds non-finite amplitudes");
    }
    on_record(subject, exemplar, n_avg, std::move(data));
  }
}

}  // namespace

void SaveDataset(const Dataset& ds, const fs::path& dir) {
  Header h;
  h.kind = "eeg";
  h.n_records = ds.trials.size();
  h.channels = ds.channel_count;
  h.samples = ds.sample_count;
  h.sampling_rate_hz = ds.sampling_rate_hz;
  h.subjects = ds.Subjects();
  h.exemplar_to_category = ds.exemplar_to_category;
  h.metadata = ds.metadata;
  std::vector<RecordLabels> records;
  records.reserve(ds.trials.size());
  for (const auto& t : ds.trials) records.push_back({t.subject_id, t.exemplar_id, 1, &t.data});
  WriteContainer(dir, h, records);
}

Dataset LoadDataset(const fs::path& dir) {
  const Header h = ParseManifest(ReadManifest(dir), "eeg");
  Dataset ds;
  ds.sampling_rate_hz = h.sampling_rate_hz;
  ds.channel_count = h.channels;
  ds.sample_count = h.samples;
  ds.exemplar_to_category = h.exemplar_to_category;
  ds.metadata = h.metadata;
  ds.trials.reserve(static_cast<std::size_t>(h.n_records));
  ReadRecords(dir, h, [&](std::uint16_t subject, std::uint16_t exemplar, std::uint16_t,
                          SignalMatrix data) {
    EEGTrial t;
    t.data = std::move(data);
    t.subject_id = subject;
    t.exemplar_id = exemplar;
    t.category_id = static_cast<std::uint16_t>(h.exemplar_to_category[exemplar]);
    ds.trials.push_back(std::move(t));
  });
  ds.Validate();
  return ds;
}

void SaveErpSpace(const ERPSpace& space, const fs::path& dir) {
  Header h;
  h.kind = "erp";
  h.n_records = space.sequences.size();
  h.channels = space.channel_count;
  h.samples = space.sample_count;
  h.sampling_rate_hz = space.sampling_rate_hz;
  h.subjects = space.Subjects();
  h.exemplar_to_category = space.exemplar_to_category;
  h.provenance = {{"source_id", space.provenance.source_id},
                  {"n", space.provenance.n_averaged},
                  {"partition_seed", space.provenance.partition_seed}};
  std::vector<RecordLabels> records;
  records.reserve(space.sequences.size());
  for (const auto& s : space.sequences) {
    if (s.channels() != space.channel_count || s.samples() != space.sample_count) {
      throw FormatError("ERP sequence shape differs from the space shape");
    }
    records.push_back({s.subject_id, s.exemplar_id, s.n_averaged, &s.data});
  }
  WriteContainer(dir, h, records);
}

ERPSpace LoadErpSpace(const fs::path& dir) {
  const Header h = ParseManifest(ReadManifest(dir), "erp");
  ERPSpace space;
  space.sampling_rate_hz = h.sampling_rate_hz;
  space.channel_count = h.channels;
  space.sample_count = h.samples;
  space.exemplar_to_category = h.exemplar_to_category;
  if (h.provenance.is_object()) {
    try {
      space.provenance.source_id = h.provenance.value("source_id", std::string());
      space.provenance.n_averaged = h.provenance.value("n", 1);
      space.provenance.partition_seed = h.provenance.value("partition_seed", std::uint64_t{0});
    } catch (const json::exception&) {
      throw FormatError("manifest.json: malformed provenance");
    }
  }
  std::map<std::pair<int, int>, std::uint32_t> next_id;
  space.sequences.reserve(static_cast<std::size_t>(h.n_records));
  ReadRecords(dir, h, [&](std::uint16_t subject, std::uint16_t exemplar, std::uint16_t n_avg,
                          SignalMatrix data) {
    ERPSequence s;
    s.data = std::move(data);
    s.subject_id = subject;
    s.exemplar_id = exemplar;
    s.category_id = static_cast<std::uint16_t>(h.exemplar_to_category[exemplar]);
    s.n_averaged = n_avg;
    s.sequence_id = next_id[{subject, exemplar}]++;
    space.sequences.push_back(std::move(s));
  });
  return space;
}

std::string ContainerKind(const fs::path& dir) {
  const json manifest = ReadManifest(dir);
  return manifest.value("kind", std::string("eeg"));
}

}  // namespace erpvis
