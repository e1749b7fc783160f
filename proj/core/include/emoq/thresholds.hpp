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

#ifndef EMOQ_THRESHOLDS_HPP_
#define EMOQ_THRESHOLDS_HPP_

#include <emoq/emotion.hpp>

#include <vector>

namespace emoq {

struct ThresholdParams {
    std::vector<double> base;// percentage per emotion, EmotionSet order
    double min_pct = 30.0;
    double max_pct = 90.0;
    double alpha = 0.2;    // activity gain
    double idle_step = 1.0;// percentage points per idle tick
    bool trend_enabled = false;
    double trend_rise_pct = 10.0;
    double trend_penalty_pct = 5.0;

    /// anger 50, fear 60, everything else 70.
    static ThresholdParams defaults_for(const EmotionSet& emotions);
    void validate(std::size_t emotions) const;
};

/**
 * Base and effective per-emotion limits. The effective limit is a pure
 * function of the base, the activity fraction, the idle offset and any
 * trend penalties:
 *
 *   effective = clamp(base * (1 + alpha * (activity - 0.5)) - penalty + idle_offset, min, max)
 */
class ThresholdSet {
  public:
    explicit ThresholdSet(ThresholdParams params);

    const ThresholdParams& params() const noexcept { return params_; }
    const std::vector<double>& effective() const noexcept { return effective_; }
    double idle_offset() const noexcept { return idle_offset_; }
    double activity() const noexcept { return activity_; }
    const std::vector<double>& penalties() const noexcept { return penalties_; }

    /// Recomputes effective limits; returns true when any limit moved.
    bool update(double activity, std::vector<double> penalties);
    /// Raises the idle offset by one step, stopping once every limit is saturated.
    void relax();
    void reset_idle() noexcept { idle_offset_ = 0.0; }

  private:
    std::vector<double> adjusted_bases() const;

    ThresholdParams params_;
    std::vector<double> effective_;
    std::vector<double> penalties_;
    double activity_ = 0.5;
    double idle_offset_ = 0.0;
};

}// namespace emoq

#endif// EMOQ_THRESHOLDS_HPP_
