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

#include <emoq/config.hpp>
#include <emoq/corpus.hpp>
#include <emoq/error.hpp>
#include <emoq/event_log.hpp>
#include <emoq/replay.hpp>
#include <emoq/service/server.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace emoq;

std::shared_ptr<const Lexicon> lexicon_for(const EngineSettings& settings) {
    if (settings.lexicon_path.empty()) {
        throw Error(ErrorCode::config_error, "config key 'lexicon.words': a lexicon file is required");
    }
    return std::make_shared<const Lexicon>(
        load_lexicon(settings.lexicon_path, settings.emoji_path, settings.engine.emotions));
}

void print_error(std::string_view code, std::string_view message) {
    nlohmann::ordered_json line;
    line["error"] = code;
    line["message"] = message;
    std::cerr << line.dump() << '\n';
}

struct ReplayArgs {
    std::string corpus;
    std::string format = "csv";
    std::string config;
    std::string out;
    bool no_queue = false;
    bool compare = false;
};

int run_replay_command(const ReplayArgs& args) {
    replay::ReplayConfig cfg = replay::load_replay_config(args.config);
    const auto lexicon = lexicon_for(cfg.engine);
    const replay::Corpus corpus = replay::load_corpus(args.corpus, replay::corpus_format_from(args.format));
    if (corpus.dropped > 0) {
        std::cerr << fmt::format("warning: dropped {} orphaned or out-of-order records\n", corpus.dropped);
    }
    if (args.compare) {
        cfg.queue_enabled = true;
        const auto with_queue = replay::run_replay(corpus.records, cfg, lexicon);
        cfg.queue_enabled = false;
        const auto without_queue = replay::run_replay(corpus.records, cfg, lexicon);
        const auto comparison = replay::compare_runs(with_queue, without_queue);
        replay::emit_comparison(comparison, with_queue, without_queue, args.out);
        std::cout << fmt::format("held_fraction={} mean_hold_seconds={} anger_delta={}\n", comparison.held_fraction,
                                 comparison.mean_hold_seconds,
                                 cfg.engine.engine.emotions.index_of("anger")
                                     ? comparison.deltas[*cfg.engine.engine.emotions.index_of("anger")].mean_share
                                     : 0.0);
        return 0;
    }
    if (args.no_queue) {
        cfg.queue_enabled = false;
    }
    const auto report = replay::run_replay(corpus.records, cfg, lexicon);
    replay::emit_report(report, args.out);
    std::cout << fmt::format("comments={} held_fraction={} mean_hold_seconds={}\n", report.summary.total,
                             report.summary.held_fraction, report.summary.mean_hold_seconds);
    return 0;
}

struct RerunArgs {
    std::string events;
    std::string config;
    std::string out;
};

int run_rerun_command(const RerunArgs& args) {
    const EngineSettings settings = load_engine_settings(args.config, {"replay"});
    const auto lexicon = lexicon_for(settings);
    const auto original = read_event_log(args.events, settings.engine.emotions);
    const auto inputs = inputs_from_events(original);
    const auto events = replay::run_inputs(inputs, settings.engine, lexicon);
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write '" + args.out + "'");
    }
    write_event_log(out, events, settings.engine.emotions);
    return 0;
}

struct SynthArgs {
    replay::SynthProfile profile;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";
};

int run_synth_command(const SynthArgs& args) {
    const auto records = replay::synthesize_corpus(args.profile, args.seed);
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write '" + args.out + "'");
    }
    if (replay::corpus_format_from(args.format) == replay::CorpusFormat::csv) {
        replay::write_corpus_csv(out, records);
    } else {
        replay::write_corpus_jsonl(out, records);
    }
    return 0;
}

int run_serve_command(service::ServerOptions options, const std::string& config) {
    if (const char* port = std::getenv("EMOQ_PORT")) {
        options.port = std::stoi(port);
    }
    if (const char* dir = std::getenv("EMOQ_DATA_DIR")) {
        options.data_dir = dir;
    }
    options.settings = load_engine_settings(config.empty() ? EMOQ_DEFAULT_CONFIG : config, {"replay"});
    service::Server server(std::move(options));
    server.recover();
    std::cerr << fmt::format("listening on {}:{}\n", server.options().host, server.options().port);
    server.listen();
    return 0;
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion-regulating comment queue: replay, synthesis and live service"};
    app.require_subcommand(1);

    ReplayArgs replay_args;
    auto* replay_cmd = app.add_subcommand("replay", "Replay a corpus through the engine and write reports");
    replay_cmd->add_option("--corpus", replay_args.corpus, "Corpus file")->required();
    replay_cmd->add_option("--format", replay_args.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    replay_cmd->add_option("--config", replay_args.config, "Engine and replay config (JSON)")->required();
    replay_cmd->add_option("--out", replay_args.out, "Output directory")->required();
    replay_cmd->add_flag("--no-queue", replay_args.no_queue, "Publish every comment on arrival");
    replay_cmd->add_flag("--compare", replay_args.compare, "Run with and without the queue and compare");

    RerunArgs rerun_args;
    auto* rerun_cmd = app.add_subcommand("rerun", "Re-drive the inputs recorded in an event log");
    rerun_cmd->add_option("--events", rerun_args.events, "Event log (JSON lines)")->required();
    rerun_cmd->add_option("--config", rerun_args.config, "Engine config the log was produced with")->required();
    rerun_cmd->add_option("--out", rerun_args.out, "Reproduced event log")->required();

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a seeded synthetic thread");
    synth_cmd->add_option("--size", synth_args.profile.size, "Number of comments including the root");
    synth_cmd->add_option("--hot", synth_args.profile.hot_fraction, "Fraction of hot comments");
    synth_cmd->add_option("--seed", synth_args.seed, "RNG seed");
    synth_cmd->add_option("--format", synth_args.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    synth_cmd->add_option("--out", synth_args.out, "Output file")->required();

    service::ServerOptions serve_options;
    std::string serve_config;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP moderation service");
    serve_cmd->add_option("--config", serve_config, "Engine config (JSON)");
    serve_cmd->add_option("--host", serve_options.host, "Bind address");
    serve_cmd->add_option("--port", serve_options.port, "Port (EMOQ_PORT overrides)");
    serve_cmd->add_option("--data-dir", serve_options.data_dir, "Journal directory (EMOQ_DATA_DIR overrides)");
    serve_cmd->add_option("--idle-seconds", serve_options.idle_seconds, "Idle tick interval, 0 disables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (*replay_cmd) {
            return run_replay_command(replay_args);
        }
        if (*rerun_cmd) {
            return run_rerun_command(rerun_args);
        }
        if (*synth_cmd) {
            return run_synth_command(synth_args);
        }
        return run_serve_command(std::move(serve_options), serve_config);
    } catch (const Error& e) {
        print_error(to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        print_error("internal", e.what());
    }
    return 1;
}
