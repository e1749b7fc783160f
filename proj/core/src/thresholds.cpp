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
#include <emoq/thresholds.hpp>

#include <algorithm>

namespace emoq {

ThresholdParams ThresholdParams::defaults_for(const EmotionSet& emotions) {
    ThresholdParams p;
    p.base.assign(emotions.size(), 70.0);
    if (auto i = emotions.index_of("anger")) {
        p.base[*i] = 50.0;
    }
    if (auto i = emotions.index_of("fear")) {
        p.base[*i] = 60.0;
    }
    return p;
}

void ThresholdParams::validate(std::size_t emotions) const {
    if (base.size() != emotions) {
        throw Error(ErrorCode::config_error, "threshold base does not cover the emotion set");
    }
    if (!(min_pct >= 0.0 && min_pct <= max_pct && max_pct <= 100.0)) {
        throw Error(ErrorCode::config_error, "thresholds need 0 <= min_pct <= max_pct <= 100");
    }
    for (double b : base) {
        if (!(b >= 0.0 && b <= 100.0)) {
            throw Error(ErrorCode::config_error, "threshold base values must lie in [0,100]");
        }
    }
    if (!(alpha >= 0.0) || !(idle_step >= 0.0)) {
        throw Error(ErrorCode::config_error, "alpha and idle_step must be non-negative");
    }
}

ThresholdSet::ThresholdSet(ThresholdParams params)
    : params_(std::move(params)), penalties_(params_.base.size(), 0.0) {
    update(0.5, penalties_);
}

std::vector<double> ThresholdSet::adjusted_bases() const {
    std::vector<double> out(params_.base.size());
    for (std::size_t e = 0; e < out.size(); ++e) {
        out[e] = params_.base[e] * (1.0 + params_.alpha * (activity_ - 0.5)) - penalties_[e];
    }
    return out;
}

bool ThresholdSet::update(double activity, std::vector<double> penalties) {
    activity_ = activity;
    penalties_ = std::move(penalties);
    const auto adjusted = adjusted_bases();
    std::vector<double> next(adjusted.size());
    for (std::size_t e = 0; e < next.size(); ++e) {
        next[e] = std::clamp(adjusted[e] + idle_offset_, params_.min_pct, params_.max_pct);
    }
    const bool changed = next != effective_;
    effective_ = std::move(next);
    return changed;
}

void ThresholdSet::relax() {
    const auto adjusted = adjusted_bases();
    const double lowest = adjusted.empty() ? params_.max_pct : *std::min_element(adjusted.begin(), adjusted.end());
    const double cap = std::max(0.0, params_.max_pct - lowest);
    idle_offset_ = std::min(idle_offset_ + params_.idle_step, cap);
}

}// namespace emoq
