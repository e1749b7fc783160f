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

#ifndef EMOQ_SERVICE_SERVER_HPP_
#define EMOQ_SERVICE_SERVER_HPP_

#include <emoq/config.hpp>
#include <emoq/service/session.hpp>

#include <filesystem>
#include <memory>
#include <string>

namespace emoq::service {

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;// 0 binds an ephemeral port
    std::filesystem::path data_dir = "emoq-data";
    int idle_seconds = 60;// idle tick after this much inactivity; 0 disables the timer
    EngineSettings settings;
};

/**
 * HTTP JSON API over a SessionRegistry.
 *
 *   POST /conversations
 *   POST /conversations/{id}/comments
 *   GET  /conversations/{id}/status
 *   POST /conversations/{id}/tickets/{ticket}/revision
 *   POST /conversations/{id}/idle
 *   GET  /conversations/{id}/events      (text/event-stream; ?from=N, ?once=1)
 */
class Server {
  public:
    explicit Server(ServerOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Loads existing journals from the data directory.
    std::size_t recover();
    /// Serves on the calling thread until stop().
    void listen();
    /// Binds and serves on a background thread; returns the bound port.
    int start();
    void stop();

    const ServerOptions& options() const noexcept;
    SessionRegistry& registry() noexcept;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}// namespace emoq::service

#endif// EMOQ_SERVICE_SERVER_HPP_
