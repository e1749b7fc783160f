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
#include <emoq/service/server.hpp>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <thread>

namespace emoq::service {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::int64_t wall_clock() {
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch()).count();
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::config_error:
        case ErrorCode::parse_error:
        case ErrorCode::rejected_label:
        case ErrorCode::timestamp_order:
        case ErrorCode::multiple_root: return 400;
        case ErrorCode::not_found:
        case ErrorCode::unknown_node:
        case ErrorCode::dangling_parent: return 404;
        case ErrorCode::duplicate_id:
        case ErrorCode::invalid_revision: return 409;
        default: return 500;
    }
}

void reply(httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
    ojson body;
    body["error"] = code;
    body["message"] = message;
    reply(res, status, body.dump());
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) {
        return json::object();
    }
    json doc = json::parse(req.body, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(ErrorCode::config_error, "request body must be a JSON object");
    }
    return doc;
}

std::string string_field(const json& doc, const char* key, bool required) {
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        if (required) {
            throw Error(ErrorCode::config_error, fmt::format("field '{}' is required", key));
        }
        return {};
    }
    if (!it->is_string()) {
        throw Error(ErrorCode::config_error, fmt::format("field '{}' must be a string", key));
    }
    return it->get<std::string>();
}

std::optional<std::int64_t> time_field(const json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number_integer()) {
        throw Error(ErrorCode::config_error, fmt::format("field '{}' must be an integer", key));
    }
    return it->get<std::int64_t>();
}

/// Runs a handler, mapping engine errors to status codes.
template<typename F>
httplib::Server::Handler guarded(F&& f) {
    return [f = std::forward<F>(f)](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const Error& e) {
            reply_error(res, http_status(e.code()), to_string(e.code()), e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "internal", e.what());
        }
    };
}

}// namespace

struct Server::Impl {
    explicit Impl(ServerOptions opts) : options(std::move(opts)), registry(options.settings, options.data_dir) {
        http.new_task_queue = [] { return new httplib::ThreadPool(16); };
        routes();
    }

    void routes() {
        http.Post("/conversations", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json doc = body_of(req);
            CreateRequest r;
            r.author = string_field(doc, "author", false);
            r.body = string_field(doc, "body", false);
            if (const auto id = string_field(doc, "root_id", false); !id.empty()) {
                r.root_id = id;
            }
            if (const auto id = string_field(doc, "conversation_id", false); !id.empty()) {
                r.conversation_id = id;
            }
            r.created_at = time_field(doc, "created_at");
            if (const auto it = doc.find("config"); it != doc.end() && !it->is_null()) {
                if (!it->is_object()) {
                    throw Error(ErrorCode::config_error, "field 'config' must be an object");
                }
                r.overrides_json = it->dump();
            }
            const auto session = registry.create(std::move(r), wall_clock());
            ojson out = ojson::parse(session->status_json());
            reply(res, 201, out.dump());
        }));

        http.Post(R"(/conversations/([^/]+)/comments)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto session = registry.get(req.matches[1]);
            const json doc = body_of(req);
            CommentRequest r;
            if (auto id = string_field(doc, "id", false); !id.empty()) {
                r.id = std::move(id);
            }
            r.parent_id = string_field(doc, "parent_id", true);
            r.author = string_field(doc, "author", false);
            r.body = string_field(doc, "body", true);
            r.created_at = time_field(doc, "created_at");
            const CommentResult result = session->post(std::move(r), wall_clock());
            ojson out;
            out["comment_id"] = result.comment_id;
            if (result.decision == Decision::published) {
                out["status"] = "accepted";
            } else {
                out["status"] = "queued";
                out["ticket"] = result.comment_id;
            }
            reply(res, result.decision == Decision::published ? 201 : 202, out.dump());
        }));

        http.Get(R"(/conversations/([^/]+)/status)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            reply(res, 200, registry.get(req.matches[1])->status_json());
        }));

        http.Post(R"(/conversations/([^/]+)/tickets/([^/]+)/revision)",
                  guarded([this](const httplib::Request& req, httplib::Response& res) {
                      const auto session = registry.get(req.matches[1]);
                      const json doc = body_of(req);
                      const auto kind = revision_kind_from(string_field(doc, "response", true));
                      if (!kind) {
                          throw Error(ErrorCode::config_error, "field 'response' must be revised, unchanged or withdrawn");
                      }
                      RevisionResponse response;
                      response.kind = *kind;
                      response.body = string_field(doc, "body", *kind == RevisionKind::revised);
                      const RevisionOutcome outcome = session->revise(req.matches[2], std::move(response), wall_clock());
                      ojson out;
                      out["ticket"] = std::string(req.matches[2]);
                      out["outcome"] = to_string(outcome);
                      reply(res, 200, out.dump());
                  }));

        http.Post(R"(/conversations/([^/]+)/idle)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto session = registry.get(req.matches[1]);
            const json doc = body_of(req);
            const auto released = session->idle_tick(time_field(doc, "time"), wall_clock());
            ojson out;
            out["released"] = released;
            reply(res, 200, out.dump());
        }));

        http.Get(R"(/conversations/([^/]+)/events)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto session = registry.get(req.matches[1]);
            std::uint64_t from = 0;
            if (req.has_header("Last-Event-ID")) {
                from = std::stoull(req.get_header_value("Last-Event-ID"));
            }
            if (req.has_param("from")) {
                from = std::stoull(req.get_param_value("from"));
            }
            const bool once = req.has_param("once") && req.get_param_value("once") == "1";
            res.set_header("Cache-Control", "no-cache");
            res.set_chunked_content_provider(
                "text/event-stream",
                [this, session, cursor = from, once, quiet = 0](std::size_t, httplib::DataSink& sink) mutable {
                    for (const auto& ev : session->events_since(cursor)) {
                        const std::string frame = fmt::format("id: {}\nevent: {}\ndata: {}\n\n", ev.seq, ev.kind, ev.json);
                        if (!sink.write(frame.data(), frame.size())) {
                            return false;
                        }
                        cursor = ev.seq;
                        quiet = 0;
                    }
                    if (once || stopping.load()) {
                        sink.done();
                        return true;
                    }
                    if (!session->wait_for(cursor, std::chrono::milliseconds(500)) && ++quiet >= 30) {
                        quiet = 0;
                        static constexpr std::string_view kKeepAlive = ": keep-alive\n\n";
                        return sink.write(kKeepAlive.data(), kKeepAlive.size());
                    }
                    return sink.is_writable();
                });
        }));
    }

    void idle_loop() {
        const auto interval = std::chrono::seconds(options.idle_seconds);
        std::unique_lock lock(idle_mutex);
        while (!stopping.load()) {
            idle_cv.wait_for(lock, std::chrono::milliseconds(250), [this] { return stopping.load(); });
            if (stopping.load()) {
                break;
            }
            const auto now = std::chrono::steady_clock::now();
            for (const auto& session : registry.all()) {
                if (session->has_queue() && now - session->last_command() >= interval) {
                    try {
                        session->idle_tick(std::nullopt, wall_clock());
                    } catch (const std::exception&) {
                        // The session rejects ticks only once closed; the next scan skips it.
                    }
                }
            }
        }
    }

    void start_idle_timer() {
        if (options.idle_seconds > 0 && !idle_thread.joinable()) {
            idle_thread = std::thread([this] { idle_loop(); });
        }
    }

    ServerOptions options;
    SessionRegistry registry;
    httplib::Server http;
    std::atomic<bool> stopping{false};
    std::thread serve_thread;
    std::thread idle_thread;
    std::mutex idle_mutex;
    std::condition_variable idle_cv;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

std::size_t Server::recover() { return impl_->registry.recover(); }

void Server::listen() {
    if (impl_->options.port == 0) {
        impl_->options.port = impl_->http.bind_to_any_port(impl_->options.host);
    } else if (!impl_->http.bind_to_port(impl_->options.host, impl_->options.port)) {
        throw Error(ErrorCode::io_error, fmt::format("cannot bind {}:{}", impl_->options.host, impl_->options.port));
    }
    impl_->start_idle_timer();
    impl_->http.listen_after_bind();
}

int Server::start() {
    if (impl_->options.port == 0) {
        impl_->options.port = impl_->http.bind_to_any_port(impl_->options.host);
    } else if (!impl_->http.bind_to_port(impl_->options.host, impl_->options.port)) {
        throw Error(ErrorCode::io_error, fmt::format("cannot bind {}:{}", impl_->options.host, impl_->options.port));
    }
    if (impl_->options.port <= 0) {
        throw Error(ErrorCode::io_error, "cannot bind an ephemeral port");
    }
    impl_->start_idle_timer();
    impl_->serve_thread = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return impl_->options.port;
}

void Server::stop() {
    if (!impl_ || impl_->stopping.exchange(true)) {
        return;
    }
    impl_->idle_cv.notify_all();
    impl_->registry.close_all();
    impl_->http.stop();
    if (impl_->serve_thread.joinable()) {
        impl_->serve_thread.join();
    }
    if (impl_->idle_thread.joinable()) {
        impl_->idle_thread.join();
    }
}

const ServerOptions& Server::options() const noexcept { return impl_->options; }

SessionRegistry& Server::registry() noexcept { return impl_->registry; }

}// namespace emoq::service
