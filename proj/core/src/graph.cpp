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
#include <emoq/graph.hpp>

#include <algorithm>
#include <cmath>

namespace emoq {

std::string_view to_string(CommentState state) noexcept {
    switch (state) {
        case CommentState::pending: return "pending";
        case CommentState::published: return "published";
        case CommentState::queued: return "queued";
        case CommentState::revision_requested: return "revision_requested";
        case CommentState::suspended: return "suspended";
    }
    return "pending";
}

NodeIndex ConversationGraph::add_comment(Comment comment) {
    if (index_.contains(comment.id)) {
        throw Error(ErrorCode::duplicate_id, "comment '" + comment.id + "' already exists");
    }
    std::optional<NodeIndex> parent;
    std::uint32_t depth = 0;
    if (comment.parent_id) {
        auto it = index_.find(*comment.parent_id);
        if (it == index_.end()) {
            throw Error(ErrorCode::dangling_parent,
                        "comment '" + comment.id + "' replies to unknown '" + *comment.parent_id + "'");
        }
        parent = it->second;
        if (comment.created_at < nodes_[*parent].created_at) {
            throw Error(ErrorCode::timestamp_order,
                        "comment '" + comment.id + "' predates its parent '" + *comment.parent_id + "'");
        }
        depth = depths_[*parent] + 1;
    } else if (!nodes_.empty()) {
        throw Error(ErrorCode::multiple_root, "conversation already has root '" + nodes_.front().id + "'");
    }

    const auto idx = static_cast<NodeIndex>(nodes_.size());
    comment.state = CommentState::pending;
    index_.emplace(comment.id, idx);
    nodes_.push_back(std::move(comment));
    parents_.push_back(parent);
    depths_.push_back(depth);
    children_.emplace_back();
    published_replies_.push_back(0);
    if (parent) {
        children_[*parent].push_back(idx);
    }
    return idx;
}

std::optional<NodeIndex> ConversationGraph::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

NodeIndex ConversationGraph::index_of(std::string_view id) const {
    if (auto idx = find(id)) {
        return *idx;
    }
    throw Error(ErrorCode::unknown_node, "unknown comment '" + std::string(id) + "'");
}

NodeIndex ConversationGraph::root() const {
    if (nodes_.empty()) {
        throw Error(ErrorCode::empty_graph, "conversation has no root");
    }
    return 0;
}

void ConversationGraph::publish(NodeIndex i) {
    Comment& c = nodes_.at(i);
    if (c.state == CommentState::published) {
        return;
    }
    c.state = CommentState::published;
    publish_order_.push_back(i);
    if (parents_[i]) {
        ++published_replies_[*parents_[i]];
    }
}

void ConversationGraph::set_state(NodeIndex i, CommentState state) {
    Comment& c = nodes_.at(i);
    if (c.state == CommentState::published || state == CommentState::published) {
        throw Error(ErrorCode::invalid_revision, "published comments cannot change state");
    }
    c.state = state;
}

void ConversationGraph::replace_content(NodeIndex i, std::string body, EmotionVector emotion) {
    Comment& c = nodes_.at(i);
    c.body = std::move(body);
    c.emotion = std::move(emotion);
}

void InfluenceWeights::validate() const {
    if (replies < 0.0 || depth < 0.0 || pagerank < 0.0) {
        throw Error(ErrorCode::config_error, "influence weights must be non-negative");
    }
    if (std::abs(replies + depth + pagerank - 1.0) > 1e-9) {
        throw Error(ErrorCode::config_error, "influence weights must sum to 1");
    }
    if (!(damping > 0.0 && damping < 1.0)) {
        throw Error(ErrorCode::config_error, "pagerank damping must lie in (0,1)");
    }
    if (!(tolerance > 0.0)) {
        throw Error(ErrorCode::config_error, "pagerank tolerance must be positive");
    }
}

std::vector<double> pagerank_links(std::span<const std::int64_t> parent_links, double damping, double tolerance) {
    const std::size_t n = parent_links.size();
    if (n == 0) {
        throw Error(ErrorCode::empty_graph, "pagerank over an empty graph");
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> rank(n, inv_n);
    std::vector<double> next(n);
    constexpr int kMaxIterations = 10'000;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (parent_links[i] < 0) {
                dangling += rank[i];
            }
        }
        const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            if (parent_links[i] >= 0) {
                next[static_cast<std::size_t>(parent_links[i])] += damping * rank[i];
            }
        }
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            delta += std::abs(next[i] - rank[i]);
        }
        rank.swap(next);
        if (delta < tolerance) {
            break;
        }
    }
    double sum = 0.0;
    for (double r : rank) {
        sum += r;
    }
    for (double& r : rank) {
        r /= sum;
    }
    return rank;
}

namespace {

struct WindowMember {
    double replies;
    std::uint32_t depth;
    double rank;
    const EmotionVector* emotion;
};

EmotionBoard aggregate(const std::vector<WindowMember>& members,
                       const InfluenceWeights& weights,
                       std::size_t emotions,
                       std::size_t window_size) {
    EmotionBoard board = EmotionBoard::zeros(emotions, window_size);
    board.basis_count = members.size();
    if (members.empty()) {
        return board;
    }
    double max_replies = 0.0;
    double max_rank = 0.0;
    for (const auto& m : members) {
        max_replies = std::max(max_replies, m.replies);
        max_rank = std::max(max_rank, m.rank);
    }
    std::vector<double> totals(emotions, 0.0);
    for (const auto& m : members) {
        const double replies_term = max_replies > 0.0 ? m.replies / max_replies : 0.0;
        const double rank_term = max_rank > 0.0 ? m.rank / max_rank : 0.0;
        const double influence = weights.replies * replies_term + weights.depth / (1.0 + m.depth)
                               + weights.pagerank * rank_term;
        for (std::size_t e = 0; e < emotions; ++e) {
            totals[e] += influence * (*m.emotion)[e];
        }
    }
    double denom = 0.0;
    for (double t : totals) {
        denom += t;
    }
    if (denom <= 0.0) {
        return board;
    }
    for (std::size_t e = 0; e < emotions; ++e) {
        board.shares[e] = 100.0 * totals[e] / denom;
    }
    return board;
}

std::size_t emotion_width(const ConversationGraph& graph, const Comment* projection) {
    if (!graph.empty()) {
        return graph.node(graph.root()).emotion.size();
    }
    return projection ? projection->emotion.size() : 0;
}

}// namespace

std::map<std::string, double> pagerank(const ConversationGraph& graph, const InfluenceWeights& weights) {
    if (graph.empty()) {
        throw Error(ErrorCode::empty_graph, "pagerank over an empty graph");
    }
    const auto order = graph.publish_order();
    std::vector<std::int64_t> slot(graph.size(), -1);
    for (std::size_t k = 0; k < order.size(); ++k) {
        slot[order[k]] = static_cast<std::int64_t>(k);
    }
    std::vector<std::int64_t> links(order.size(), -1);
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (auto p = graph.parent(order[k])) {
            links[k] = slot[*p];
        }
    }
    std::map<std::string, double> out;
    if (order.empty()) {
        // Root not yet published: it still anchors the ranking.
        out.emplace(graph.node(graph.root()).id, 1.0);
        return out;
    }
    const auto ranks = pagerank_links(links, weights.damping, weights.tolerance);
    for (std::size_t k = 0; k < order.size(); ++k) {
        out.emplace(graph.node(order[k]).id, ranks[k]);
    }
    return out;
}

double influence_score(const ConversationGraph& graph,
                       std::string_view node_id,
                       const InfluenceWeights& weights,
                       const std::set<std::string>& window) {
    const NodeIndex target = graph.index_of(node_id);
    const auto ranks = pagerank(graph, weights);
    auto rank_of = [&](const std::string& id) {
        auto it = ranks.find(id);
        return it == ranks.end() ? 0.0 : it->second;
    };
    double max_replies = graph.published_replies(target);
    double max_rank = rank_of(graph.node(target).id);
    for (const auto& id : window) {
        const NodeIndex i = graph.index_of(id);
        max_replies = std::max(max_replies, static_cast<double>(graph.published_replies(i)));
        max_rank = std::max(max_rank, rank_of(id));
    }
    const double replies_term = max_replies > 0.0 ? graph.published_replies(target) / max_replies : 0.0;
    const double rank_term = max_rank > 0.0 ? rank_of(graph.node(target).id) / max_rank : 0.0;
    return weights.replies * replies_term + weights.depth / (1.0 + graph.depth(target))
         + weights.pagerank * rank_term;
}

EmotionVector emotional_contribution(const Comment& comment, double influence) {
    EmotionVector out = comment.emotion;
    for (double& v : out.values) {
        v *= influence;
    }
    return out;
}

EmotionBoard compute_board(const ConversationGraph& graph,
                           const InfluenceWeights& weights,
                           std::size_t window_size,
                           const Comment* projection) {
    const std::size_t emotions = emotion_width(graph, projection);
    if (window_size == 0) {
        throw Error(ErrorCode::config_error, "window size must be at least 1");
    }
    const auto order = graph.publish_order();
    std::optional<NodeIndex> cand_parent;
    if (projection && projection->parent_id) {
        cand_parent = graph.find(*projection->parent_id);
    }
    const bool with_candidate = projection != nullptr && cand_parent.has_value();

    std::vector<std::int64_t> slot(graph.size(), -1);
    for (std::size_t k = 0; k < order.size(); ++k) {
        slot[order[k]] = static_cast<std::int64_t>(k);
    }
    // A held candidate may already have published replies; they link to it
    // once it is counted as published.
    auto cand_node = with_candidate ? graph.find(projection->id) : std::nullopt;
    if (cand_node && graph.is_published(*cand_node)) {
        cand_node.reset();
    }
    if (cand_node) {
        slot[*cand_node] = static_cast<std::int64_t>(order.size());
    }
    std::vector<std::int64_t> links;
    links.reserve(order.size() + 1);
    for (const NodeIndex i : order) {
        const auto p = graph.parent(i);
        links.push_back(p ? slot[*p] : -1);
    }
    if (with_candidate) {
        links.push_back(slot[*cand_parent]);
    }
    if (links.empty()) {
        return EmotionBoard::zeros(emotions, window_size);
    }
    const auto ranks = pagerank_links(links, weights.damping, weights.tolerance);

    // Non-root published nodes, newest last.
    std::vector<std::size_t> window_slots;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (graph.parent(order[k])) {
            window_slots.push_back(k);
        }
    }
    const std::size_t keep = with_candidate ? window_size - 1 : window_size;
    if (window_slots.size() > keep) {
        window_slots.erase(window_slots.begin(), window_slots.end() - static_cast<std::ptrdiff_t>(keep));
    }

    std::vector<WindowMember> members;
    members.reserve(window_slots.size() + 1);
    for (const std::size_t k : window_slots) {
        const NodeIndex i = order[k];
        double replies = graph.published_replies(i);
        if (with_candidate && *cand_parent == i) {
            replies += 1.0;
        }
        members.push_back({replies, graph.depth(i), ranks[k], &graph.node(i).emotion});
    }
    if (with_candidate) {
        const double replies = cand_node ? graph.published_replies(*cand_node) : 0.0;
        members.push_back({replies, graph.depth(*cand_parent) + 1, ranks.back(), &projection->emotion});
    }
    return aggregate(members, weights, emotions, window_size);
}

// ---------------------------------------------------------------------------

BoardTracker::BoardTracker(std::size_t emotions, InfluenceWeights weights, std::size_t window_size)
    : emotions_(emotions), weights_(weights), window_size_(window_size),
      current_(EmotionBoard::zeros(emotions, window_size)) {
    if (window_size_ == 0) {
        throw Error(ErrorCode::config_error, "window size must be at least 1");
    }
}

void BoardTracker::on_publish(const ConversationGraph& graph, NodeIndex i) {
    if (rank_slot_.size() < graph.size()) {
        rank_slot_.resize(graph.size(), -1);
    }
    rank_slot_[i] = static_cast<std::int64_t>(ranked_.size());
    ranked_.push_back(i);
    if (graph.parent(i)) {
        window_.push_back(i);
        if (window_.size() > window_size_) {
            window_.pop_front();
        }
    }
    current_ = evaluate(graph, nullptr);
}

EmotionBoard BoardTracker::project(const ConversationGraph& graph, const Comment& candidate) const {
    return evaluate(graph, &candidate);
}

EmotionBoard BoardTracker::evaluate(const ConversationGraph& graph, const Comment* candidate) const {
    auto slot_of = [this](NodeIndex i) -> std::int64_t {
        return i < rank_slot_.size() ? rank_slot_[i] : -1;
    };
    std::optional<NodeIndex> cand_parent;
    if (candidate && candidate->parent_id) {
        cand_parent = graph.find(*candidate->parent_id);
    }
    const bool with_candidate = candidate != nullptr && cand_parent.has_value();
    if (ranked_.empty() && !with_candidate) {
        return EmotionBoard::zeros(emotions_, window_size_);
    }

    auto cand_node = with_candidate ? graph.find(candidate->id) : std::nullopt;
    if (cand_node && graph.is_published(*cand_node)) {
        cand_node.reset();
    }
    const auto cand_slot = static_cast<std::int64_t>(ranked_.size());
    std::vector<std::int64_t> links(ranked_.size() + (with_candidate ? 1 : 0), -1);
    for (std::size_t k = 0; k < ranked_.size(); ++k) {
        if (const auto p = graph.parent(ranked_[k])) {
            links[k] = cand_node && *p == *cand_node ? cand_slot : slot_of(*p);
        }
    }
    if (with_candidate) {
        links.back() = slot_of(*cand_parent);
    }
    const auto ranks = pagerank_links(links, weights_.damping, weights_.tolerance);

    std::vector<WindowMember> members;
    members.reserve(window_.size() + 1);
    auto first = window_.begin();
    if (with_candidate && window_.size() >= window_size_) {
        first += static_cast<std::ptrdiff_t>(window_.size() - window_size_ + 1);
    }
    for (auto it = first; it != window_.end(); ++it) {
        const NodeIndex i = *it;
        double replies = graph.published_replies(i);
        if (with_candidate && *cand_parent == i) {
            replies += 1.0;
        }
        members.push_back({replies, graph.depth(i), ranks[static_cast<std::size_t>(rank_slot_[i])],
                           &graph.node(i).emotion});
    }
    if (with_candidate) {
        const double replies = cand_node ? graph.published_replies(*cand_node) : 0.0;
        members.push_back({replies, graph.depth(*cand_parent) + 1, ranks.back(), &candidate->emotion});
    }
    return aggregate(members, weights_, emotions_, window_size_);
}

}// namespace emoq
