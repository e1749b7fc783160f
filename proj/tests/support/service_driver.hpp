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

#ifndef EMOQ_TESTS_SERVICE_DRIVER_HPP_
#define EMOQ_TESTS_SERVICE_DRIVER_HPP_

#include <emoq/replay.hpp>
#include <emoq/service/server.hpp>

#include <httplib.h>
#include <json.hpp>

#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

namespace emoq::testing {

struct HttpReply {
    int status = 0;
    nlohmann::json body;
};

/// A server on an ephemeral port plus a client bound to it.
class ServiceDriver {
  public:
    explicit ServiceDriver(service::ServerOptions options) : server_(prepare(std::move(options))) {
        port_ = server_.start();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        client_->set_read_timeout(10, 0);
    }

    service::Server& server() { return server_; }
    int port() const { return port_; }

    HttpReply post(const std::string& path, const nlohmann::json& body) {
        return wrap(client_->Post(path, body.dump(), "application/json"));
    }

    HttpReply get(const std::string& path) { return wrap(client_->Get(path)); }

    /// Client events after `from`, read from the SSE endpoint in one shot.
    std::vector<nlohmann::json> events(const std::string& conversation, std::uint64_t from) {
        auto res = client_->Get("/conversations/" + conversation + "/events?once=1&from=" + std::to_string(from));
        if (!res || res->status != 200) {
            throw std::runtime_error("event stream request failed");
        }
        std::vector<nlohmann::json> out;
        std::size_t pos = 0;
        const std::string& text = res->body;
        while ((pos = text.find("data: ", pos)) != std::string::npos) {
            const auto end = text.find('\n', pos);
            out.push_back(nlohmann::json::parse(text.substr(pos + 6, end - pos - 6)));
            pos = end;
        }
        return out;
    }

  private:
    static service::ServerOptions prepare(service::ServerOptions options) {
        options.port = 0;
        options.idle_seconds = 0;
        return options;
    }

    static HttpReply wrap(const httplib::Result& res) {
        if (!res) {
            throw std::runtime_error("request failed: " + httplib::to_string(res.error()));
        }
        HttpReply out;
        out.status = res->status;
        out.body = res->body.empty() ? nlohmann::json() : nlohmann::json::parse(res->body);
        return out;
    }

    service::Server server_;
    int port_ = 0;
    std::unique_ptr<httplib::Client> client_;
};

/**
 * Feeds a corpus through the HTTP API using the replay harness's schedule:
 * an idle tick for each long gap, declined prompts answered in the order the
 * stream announces them, then ticks until the queue drains. Returns the
 * conversation id.
 */
inline std::string drive_like_harness(ServiceDriver& driver,
                                      const std::vector<replay::CorpusRecord>& records,
                                      const replay::ReplayConfig& cfg,
                                      const std::string& conversation) {
    auto expect = [](const HttpReply& r, const char* what) {
        if (r.status >= 300) {
            throw std::runtime_error(std::string(what) + " failed: " + r.body.dump());
        }
        return r;
    };
    const auto& root = records.front();
    expect(driver.post("/conversations", {{"conversation_id", conversation},
                                          {"root_id", root.id},
                                          {"author", root.author},
                                          {"body", root.body},
                                          {"created_at", root.created_utc}}),
           "create");
    const std::string base = "/conversations/" + conversation;
    std::uint64_t cursor = 0;
    std::deque<std::string> prompts;
    auto pump = [&] {
        for (;;) {
            for (const auto& ev : driver.events(conversation, cursor)) {
                cursor = ev.at("seq").get<std::uint64_t>();
                if (ev.at("kind") == "revision_prompt") {
                    prompts.push_back(ev.at("payload").at("ticket").get<std::string>());
                }
            }
            if (prompts.empty()) {
                return;
            }
            const std::string ticket = prompts.front();
            prompts.pop_front();
            expect(driver.post(base + "/tickets/" + ticket + "/revision", {{"response", "unchanged"}}), "revision");
        }
    };
    auto tick = [&](std::int64_t t) {
        expect(driver.post(base + "/idle", {{"time", t}}), "idle");
        pump();
    };
    std::int64_t last = root.created_utc;
    pump();
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.created_utc - last > cfg.idle_gap_seconds) {
            tick(last + cfg.idle_gap_seconds);
        }
        expect(driver.post(base + "/comments", {{"id", r.id},
                                                {"parent_id", r.parent_id},
                                                {"author", r.author},
                                                {"body", r.body},
                                                {"created_at", r.created_utc}}),
               "comment");
        pump();
        last = r.created_utc;
    }
    for (std::int64_t t = last; driver.get(base + "/status").body.at("queue_depth").get<std::size_t>() > 0;) {
        t += cfg.idle_gap_seconds;
        tick(t);
    }
    return conversation;
}

}// namespace emoq::testing

#endif// EMOQ_TESTS_SERVICE_DRIVER_HPP_
