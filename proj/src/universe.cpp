/*
 * Copyright 2026 The pepsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "peps/universe.hpp"

namespace peps {

HeaderUniverse::HeaderUniverse(std::vector<Ipv4> hosts,
                               std::vector<std::uint16_t> ports,
                               std::vector<Protocol> protocols, std::size_t cap)
    : hosts_(std::move(hosts)),
      ports_(std::move(ports)),
      protocols_(std::move(protocols)) {
    if (size() > cap)
        throw std::invalid_argument("header universe exceeds the enumeration cap");
}

}  // namespace peps
