// SPDX-License-Identifier: Apache-2.0
//
// duoris: dual-RIS radio-frequency imaging toolkit
// Copyright (C) 2026 The duoris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include "duoris/forward.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace duoris {

/// Failure to open, read, write or rename a file.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Readable bytes that are not a valid tensor file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense f32 array, row-major with the last axis fastest.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t count() const;
    bool operator==(const Tensor&) const = default;
};

inline constexpr std::uint16_t kTensorVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 1;

/// Layout: "DRMR", u16 version, u8 dtype, u8 ndim, u32 dims[ndim], payload.
/// All integers and floats little-endian on disk.
std::vector<std::uint8_t> encode_tensor(const Tensor& t);
Tensor decode_tensor(const std::vector<std::uint8_t>& bytes);

/// Writes to a sibling temporary file, then renames over `path`.
void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

/// (2, patterns, bins).
Tensor psd_tensor(const PsdTensor& psd);
PsdTensor psd_from_tensor(const Tensor& t);

/// (2, patterns, bins, 2): receiver, pattern, bin, {re, im}.
Tensor measurement_tensor(const Measurement& m);
Measurement measurement_from_tensor(const Tensor& t);

/// (height, width).
Tensor image_tensor(const Eigen::ArrayXXd& image);
Eigen::ArrayXXd image_from_tensor(const Tensor& t);

/// 8-bit binary PGM (P5), values clamped to [0, 1] and scaled to 255.
void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& image);

} // namespace duoris
