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

#ifndef EMOQ_GRAPH_HPP_
#define EMOQ_GRAPH_HPP_

#include <emoq/emotion.hpp>

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emoq {

enum class CommentState { pending, published, queued, revision_requested, suspended };

std::string_view to_string(CommentState state) noexcept;

struct Comment {
    std::string id;
    std::string author;
    std::string body;
    std::int64_t created_at = 0;
    std::optional<std::string> parent_id;// absent for the root post
    EmotionVector emotion;
    CommentState state = CommentState::pending;
};

using NodeIndex = std::uint32_t;

/**
 * Reply DAG of one conversation. Nodes are only ever appended and each edge
 * points from a new comment to an existing one, so the graph stays acyclic
 * without explicit checks.
 */
class ConversationGraph {
  public:
    /// Inserts `comment` as pending. Throws duplicate_id, dangling_parent,
    /// multiple_root or timestamp_order; the graph is untouched on error.
    NodeIndex add_comment(Comment comment);

    bool empty() const noexcept { return nodes_.empty(); }
    std::size_t size() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return nodes_.empty() ? 0 : nodes_.size() - 1; }

    std::optional<NodeIndex> find(std::string_view id) const;
    /// Throws unknown_node.
    NodeIndex index_of(std::string_view id) const;

    const Comment& node(NodeIndex i) const { return nodes_.at(i); }
    const Comment& at(std::string_view id) const { return nodes_[index_of(id)]; }

    NodeIndex root() const;
    std::optional<NodeIndex> parent(NodeIndex i) const { return parents_.at(i); }
    std::uint32_t depth(NodeIndex i) const { return depths_.at(i); }
    std::span<const NodeIndex> children(NodeIndex i) const { return children_.at(i); }
    /// Number of direct replies currently published.
    std::uint32_t published_replies(NodeIndex i) const { return published_replies_.at(i); }

    /// Published nodes in publication order; the root comes first.
    std::span<const NodeIndex> publish_order() const noexcept { return publish_order_; }
    bool is_published(NodeIndex i) const { return nodes_.at(i).state == CommentState::published; }

    /// Moves a node to published and appends it to publish_order.
    void publish(NodeIndex i);
    /// Any non-published transition.
    void set_state(NodeIndex i, CommentState state);
    void replace_content(NodeIndex i, std::string body, EmotionVector emotion);

  private:
    std::vector<Comment> nodes_;
    std::vector<std::optional<NodeIndex>> parents_;
    std::vector<std::uint32_t> depths_;
    std::vector<std::vector<NodeIndex>> children_;
    std::vector<std::uint32_t> published_replies_;
    std::vector<NodeIndex> publish_order_;
    std::unordered_map<std::string, NodeIndex> index_;
};

/// Convex weights for the structural influence factors plus PageRank controls.
struct InfluenceWeights {
    double replies = 1.0 / 3.0;
    double depth = 1.0 / 3.0;
    double pagerank = 1.0 / 3.0;
    double damping = 0.85;
    double tolerance = 1e-8;

    /// Throws config_error unless weights are non-negative and sum to 1.
    void validate() const;
};

/**
 * PageRank over parent links, one entry per node; a negative link marks a
 * dangling node whose mass is spread uniformly. Power iteration until the L1
 * change drops below `tolerance`.
 */
std::vector<double> pagerank_links(std::span<const std::int64_t> parent_links, double damping, double tolerance);

/// PageRank over published nodes (root included), edges oriented child to parent.
std::map<std::string, double> pagerank(const ConversationGraph& graph, const InfluenceWeights& weights);

/// Structural influence of one window member in [0,1].
double influence_score(const ConversationGraph& graph,
                       std::string_view node_id,
                       const InfluenceWeights& weights,
                       const std::set<std::string>& window);

EmotionVector emotional_contribution(const Comment& comment, double influence);

/// Root-node emotion profile: per-emotion percentage of the window's total contribution.
struct EmotionBoard {
    std::vector<double> shares;
    std::size_t window_size = 100;
    std::size_t basis_count = 0;

    static EmotionBoard zeros(std::size_t emotions, std::size_t window_size) {
        return EmotionBoard{std::vector<double>(emotions, 0.0), window_size, 0};
    }

    friend bool operator==(const EmotionBoard&, const EmotionBoard&) = default;
};

/**
 * Board over the last `window_size` published non-root comments, recomputed
 * from scratch. A projection comment is treated as published at the tail of
 * the window with its real parent and no replies of its own.
 */
EmotionBoard compute_board(const ConversationGraph& graph,
                           const InfluenceWeights& weights,
                           std::size_t window_size,
                           const Comment* projection = nullptr);

/**
 * Incrementally maintained board state for one graph. Tracks the window and
 * the PageRank node layout as comments are published so that the current
 * board and candidate projections avoid walking the whole graph.
 */
class BoardTracker {
  public:
    BoardTracker(std::size_t emotions, InfluenceWeights weights, std::size_t window_size);

    /// Must be called right after `graph.publish(i)`.
    void on_publish(const ConversationGraph& graph, NodeIndex i);

    const EmotionBoard& current() const noexcept { return current_; }
    EmotionBoard project(const ConversationGraph& graph, const Comment& candidate) const;

    std::size_t window_size() const noexcept { return window_size_; }
    const std::deque<NodeIndex>& window() const noexcept { return window_; }

  private:
    EmotionBoard evaluate(const ConversationGraph& graph, const Comment* candidate) const;

    std::size_t emotions_;
    InfluenceWeights weights_;
    std::size_t window_size_;
    std::vector<NodeIndex> ranked_;           // published nodes in PageRank layout order
    std::vector<std::int64_t> rank_slot_;     // graph node -> slot in ranked_, -1 if unpublished
    std::deque<NodeIndex> window_;            // oldest first
    EmotionBoard current_;
};

}// namespace emoq

#endif// EMOQ_GRAPH_HPP_
