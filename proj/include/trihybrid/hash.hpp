// SPDX-License-Identifier: Apache-2.0
//
// trihybrid: link-level simulator for tri-hybrid MIMO transmitters
// Copyright (C) 2026 The trihybrid authors
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

#ifndef TRIHYBRID_HASH_HPP
#define TRIHYBRID_HASH_HPP

#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

namespace trihybrid
{
    // FNV-1a, 64 bit. Stable across platforms and runs, unlike std::hash.
    class Fnv1a
    {
    public:
        Fnv1a &bytes(const void *data, std::size_t size)
        {
            const auto *p = static_cast<const unsigned char *>(data);
            for (std::size_t i = 0; i < size; ++i)
            {
                state_ ^= p[i];
                state_ *= 0x100000001b3ULL;
            }
            return *this;
        }
        Fnv1a &text(std::string_view s) { return bytes(s.data(), s.size()); }
        Fnv1a &real(double v)
        {
            if (v == 0.0)
                v = 0.0; // fold -0.0
            std::uint64_t bits;
            std::memcpy(&bits, &v, sizeof bits);
            return bytes(&bits, sizeof bits);
        }
        Fnv1a &integer(std::uint64_t v) { return bytes(&v, sizeof v); }
        std::uint64_t value() const { return state_; }

    private:
        std::uint64_t state_ = 0xcbf29ce484222325ULL;
    };

    std::string to_hex(std::uint64_t v);
}

#endif
