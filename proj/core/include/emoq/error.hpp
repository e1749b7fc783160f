/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

#ifndef EMOQ_ERROR_HPP_
#define EMOQ_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace emoq {

enum class ErrorCode {
    load_error,
    parse_error,
    rejected_label,
    duplicate_id,
    dangling_parent,
    multiple_root,
    timestamp_order,
    empty_graph,
    unknown_node,
    invalid_revision,
    config_error,
    corpus_shape,
    mismatch,
    io_error,
    not_found,
    corrupt_journal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` is stable and machine-readable.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}// namespace emoq

#endif// EMOQ_ERROR_HPP_
