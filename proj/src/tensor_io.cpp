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


#include "duoris/tensor_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <numeric>
#include <string>

namespace duoris {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'M', 'R'};

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v)
{
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(const std::uint8_t* p)
{
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
    return v;
}

void write_bytes(const std::filesystem::path& path, const char* data, std::size_t n)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f)
            throw IoError("cannot open " + tmp.string() + " for writing");
        f.write(data, static_cast<std::streamsize>(n));
        f.flush();
        if (!f)
            throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void require_dims(const Tensor& t, std::size_t ndim, const char* what)
{
    if (t.dims.size() != ndim)
        throw FormatError(std::string(what) + ": unexpected tensor rank");
}

} // namespace

std::size_t Tensor::count() const
{
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::uint8_t> encode_tensor(const Tensor& t)
{
    if (t.dims.empty() || t.dims.size() > 255)
        throw std::invalid_argument("tensor: rank must be 1..255");
    for (auto d : t.dims)
        if (d == 0)
            throw std::invalid_argument("tensor: zero-length dimension");
    if (t.data.size() != t.count())
        throw std::invalid_argument("tensor: data length does not match dims");

    std::vector<std::uint8_t> out(kMagic, kMagic + 4);
    out.reserve(8 + 4 * t.dims.size() + 4 * t.data.size());
    put_le<std::uint16_t>(out, kTensorVersion);
    out.push_back(kDtypeF32);
    out.push_back(static_cast<std::uint8_t>(t.dims.size()));
    for (auto d : t.dims)
        put_le<std::uint32_t>(out, d);
    for (float v : t.data)
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
    return out;
}

Tensor decode_tensor(const std::vector<std::uint8_t>& bytes)
{
    if (bytes.size() < 8 || !std::equal(kMagic, kMagic + 4, bytes.begin()))
        throw FormatError("tensor: bad magic");
    const auto version = get_le<std::uint16_t>(&bytes[4]);
    if (version != kTensorVersion)
        throw FormatError("tensor: unsupported version " + std::to_string(version));
    if (bytes[6] != kDtypeF32)
        throw FormatError("tensor: unsupported dtype code " + std::to_string(bytes[6]));
    const std::size_t ndim = bytes[7];
    if (ndim == 0)
        throw FormatError("tensor: zero rank");
    if (bytes.size() < 8 + 4 * ndim)
        throw FormatError("tensor: truncated header");

    Tensor t;
    for (std::size_t k = 0; k < ndim; ++k) {
        t.dims.push_back(get_le<std::uint32_t>(&bytes[8 + 4 * k]));
        if (t.dims.back() == 0)
            throw FormatError("tensor: zero-length dimension");
    }
    const std::size_t offset = 8 + 4 * ndim;
    const std::size_t n = t.count();
    if (bytes.size() - offset != 4 * n)
        throw FormatError("tensor: payload is " + std::to_string(bytes.size() - offset) +
                          " bytes, expected " + std::to_string(4 * n));
    t.data.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        t.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(&bytes[offset + 4 * i]));
    return t;
}

void write_tensor(const std::filesystem::path& path, const Tensor& t)
{
    const auto bytes = encode_tensor(t);
    write_bytes(path, reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

Tensor read_tensor(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad())
        throw IoError("read failed: " + path.string());
    return decode_tensor(bytes);
}

Tensor psd_tensor(const PsdTensor& psd)
{
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(psd.receivers), static_cast<std::uint32_t>(psd.patterns),
              static_cast<std::uint32_t>(psd.bins)};
    t.data.assign(psd.values.begin(), psd.values.end());
    return t;
}

PsdTensor psd_from_tensor(const Tensor& t)
{
    require_dims(t, 3, "psd");
    PsdTensor psd;
    psd.receivers = static_cast<int>(t.dims[0]);
    psd.patterns = static_cast<int>(t.dims[1]);
    psd.bins = static_cast<int>(t.dims[2]);
    psd.values.resize(static_cast<Eigen::Index>(t.data.size()));
    for (std::size_t i = 0; i < t.data.size(); ++i)
        psd.values[static_cast<Eigen::Index>(i)] = t.data[i];
    return psd;
}

Tensor measurement_tensor(const Measurement& m)
{
    const auto P = static_cast<std::uint32_t>(m.y1.rows());
    const auto F = static_cast<std::uint32_t>(m.y1.cols());
    Tensor t;
    t.dims = {2, P, F, 2};
    t.data.reserve(t.count());
    for (const Eigen::MatrixXcd* y : {&m.y1, &m.y2})
        for (std::uint32_t p = 0; p < P; ++p)
            for (std::uint32_t f = 0; f < F; ++f) {
                t.data.push_back(static_cast<float>((*y)(p, f).real()));
                t.data.push_back(static_cast<float>((*y)(p, f).imag()));
            }
    return t;
}

Measurement measurement_from_tensor(const Tensor& t)
{
    require_dims(t, 4, "measurement");
    if (t.dims[0] != 2 || t.dims[3] != 2)
        throw FormatError("measurement: expected shape (2, P, F, 2)");
    const int P = static_cast<int>(t.dims[1]), F = static_cast<int>(t.dims[2]);
    Measurement m;
    m.y1.resize(P, F);
    m.y2.resize(P, F);
    std::size_t i = 0;
    for (Eigen::MatrixXcd* y : {&m.y1, &m.y2})
        for (int p = 0; p < P; ++p)
            for (int f = 0; f < F; ++f, i += 2)
                (*y)(p, f) = cd(t.data[i], t.data[i + 1]);
    return m;
}

Tensor image_tensor(const Eigen::ArrayXXd& image)
{
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(image.rows()), static_cast<std::uint32_t>(image.cols())};
    t.data.reserve(t.count());
    for (Eigen::Index r = 0; r < image.rows(); ++r)
        for (Eigen::Index c = 0; c < image.cols(); ++c)
            t.data.push_back(static_cast<float>(image(r, c)));
    return t;
}

Eigen::ArrayXXd image_from_tensor(const Tensor& t)
{
    require_dims(t, 2, "image");
    Eigen::ArrayXXd img(t.dims[0], t.dims[1]);
    std::size_t i = 0;
    for (Eigen::Index r = 0; r < img.rows(); ++r)
        for (Eigen::Index c = 0; c < img.cols(); ++c)
            img(r, c) = t.data[i++];
    return img;
}

void write_pgm(const std::filesystem::path& path, const Eigen::ArrayXXd& image)
{
    std::string out = "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
    for (Eigen::Index r = 0; r < image.rows(); ++r)
        for (Eigen::Index c = 0; c < image.cols(); ++c)
            out.push_back(static_cast<char>(std::lround(std::clamp(image(r, c), 0.0, 1.0) * 255.0)));
    write_bytes(path, out.data(), out.size());
}

} // namespace duoris
