// Copyright 2026 The tweakscale Authors
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

#ifndef TWEAKSCALE_CSV_HPP_
#define TWEAKSCALE_CSV_HPP_

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tweakscale::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader. Accepts LF or CRLF line endings and quoted fields that
// span lines. Throws Error(kIoFailure) on an unterminated quote.
std::vector<Record> read(std::istream& in);

void writeField(std::ostream& out, std::string_view field);
void writeRecord(std::ostream& out, const Record& record);

}  // namespace tweakscale::csv

#endif  // TWEAKSCALE_CSV_HPP_
