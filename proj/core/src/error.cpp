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

#include <emoq/error.hpp>

namespace emoq {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::load_error: return "load_error";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::rejected_label: return "rejected_label";
        case ErrorCode::duplicate_id: return "duplicate_id";
        case ErrorCode::dangling_parent: return "dangling_parent";
        case ErrorCode::multiple_root: return "multiple_root";
        case ErrorCode::timestamp_order: return "timestamp_order";
        case ErrorCode::empty_graph: return "empty_graph";
        case ErrorCode::unknown_node: return "unknown_node";
        case ErrorCode::invalid_revision: return "invalid_revision";
        case ErrorCode::config_error: return "config_error";
        case ErrorCode::corpus_shape: return "corpus_shape";
        case ErrorCode::mismatch: return "mismatch";
        case ErrorCode::io_error: return "io_error";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::corrupt_journal: return "corrupt_journal";
    }
    return "unknown";
}

}// namespace emoq
