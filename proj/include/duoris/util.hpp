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

#include <Eigen/Core>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <string_view>

namespace duoris {

/// splitmix64 finalizer; also used as a stateless counter-based generator.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

/// Portable uniform draws on top of mt19937_64 (the std distributions are
/// implementation-defined, this is not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    double uniform() { return to_unit(engine_()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int below(int n) { return static_cast<int>(uniform() * n); }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// 64-bit FNV-1a content hash.
class Fnv1a {
public:
    Fnv1a& bytes(const void* data, std::size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h_ ^= p[i];
            h_ *= 0x100000001b3ULL;
        }
        return *this;
    }
    Fnv1a& u64(std::uint64_t v)
    {
        unsigned char b[8];
        for (int i = 0; i < 8; ++i)
            b[i] = static_cast<unsigned char>(v >> (8 * i));
        return bytes(b, 8);
    }
    Fnv1a& f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }
    Fnv1a& str(std::string_view s) { return u64(s.size()).bytes(s.data(), s.size()); }
    template <typename Derived>
    Fnv1a& array(const Eigen::DenseBase<Derived>& a)
    {
        u64(static_cast<std::uint64_t>(a.size()));
        for (Eigen::Index i = 0; i < a.size(); ++i)
            scalar(a.derived().coeff(i));
        return *this;
    }

    std::uint64_t value() const { return h_; }
    std::string hex() const;

private:
    void scalar(double v) { f64(v); }
    void scalar(float v) { f64(v); }
    void scalar(int v) { u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
    template <typename T>
    void scalar(const std::complex<T>& v)
    {
        f64(v.real());
        f64(v.imag());
    }

    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string Fnv1a::hex() const
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 0; i < 16; ++i)
        s[15 - i] = digits[(h_ >> (4 * i)) & 0xf];
    return s;
}

} // namespace duoris
