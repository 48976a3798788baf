// Copyright 2026 The ganlocal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Reader/writer for the numpy .npy array file and .npz archive formats.
// Only little-endian float32/float64 payloads in C order are supported;
// float64 input is narrowed to float32.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ganlocal/tensor.hpp"

namespace ganlocal::npy {

using Bytes = std::vector<std::uint8_t>;
using ArrayMap = std::map<std::string, NdArray>;

NdArray read_array_file(std::span<const std::uint8_t> bytes);

// Emits a version 1.0 header laid out exactly as numpy writes it.
Bytes write_array_file(const NdArray& array);

// Entries may be stored or deflated; keys drop the ".npy" suffix.
ArrayMap read_archive(std::span<const std::uint8_t> bytes);

// Stored (uncompressed) entries with a fixed timestamp, so equal inputs
// produce equal bytes.
Bytes write_archive(const ArrayMap& arrays);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

NdArray load_array(const std::filesystem::path& path);
void save_array(const std::filesystem::path& path, const NdArray& array);
ArrayMap load_archive(const std::filesystem::path& path);
void save_archive(const std::filesystem::path& path, const ArrayMap& arrays);

}  // namespace ganlocal::npy
