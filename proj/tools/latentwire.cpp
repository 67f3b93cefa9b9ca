// latentwire: command-line entry point for the whole pipeline.
#include <atomic>
#include <csignal>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latentwire/app/commands.hpp"
#include "latentwire/codec.hpp"
#include "latentwire/data/container.hpp"
#include "latentwire/forest/forest.hpp"
#include "latentwire/net/probe.hpp"
#include "latentwire/net/server.hpp"
#include "latentwire/nn/serialize.hpp"

using namespace latentwire;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

struct ConfigArgs {
    std::string path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", path, "experiment config JSON")->required();
        cmd->add_option("--seed", seed, "override the master seed");
        cmd->add_option("--out", out, "override the output directory");
    }
    app::ExperimentConfig load() const {
        std::optional<std::filesystem::path> o;
        if (out) o = *out;
        return app::load_experiment(path, seed, o);
    }
};

void print(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

nlohmann::json metrics_summary(const forest::MetricsReport& m) { return forest::metrics_to_json(m); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Latent-space compression and random-forest intrusion detection"};
    cli.require_subcommand(1);

    ConfigArgs ingest_args, enc_args, dec_args, search_args, forest_args, compare_args, pipeline_args;
    auto* ingest = cli.add_subcommand("ingest", "parse, split and normalize the dataset");
    ingest_args.attach(ingest);
    auto* train_encoder = cli.add_subcommand("train-encoder", "train the supervised encoder and export the compression map");
    enc_args.attach(train_encoder);
    auto* train_decoder = cli.add_subcommand("train-decoder", "train the decoder on compressed training data");
    dec_args.attach(train_decoder);
    auto* search = cli.add_subcommand("search", "Bayesian search over encoder hyperparameters");
    search_args.attach(search);
    auto* train_forest = cli.add_subcommand("train-forest", "train the random forest on compressed training data");
    forest_args.attach(train_forest);
    auto* compare = cli.add_subcommand("compare", "forest results on original, compressed and reconstructed inputs");
    compare_args.attach(compare);
    auto* pipeline = cli.add_subcommand("pipeline", "ingest, search, train-encoder, train-decoder and train-forest");
    pipeline_args.attach(pipeline);

    std::string rc_dataset, rc_map, rc_out, rc_json, rc_config;
    auto* report = cli.add_subcommand("report-compression", "container sizes before and after compression");
    report->add_option("--dataset", rc_dataset, "LWDS dataset container")->required();
    report->add_option("--map", rc_map, "compression map JSON")->required();
    report->add_option("--out", rc_out, "where to write the compressed container")->required();
    report->add_option("--json", rc_json, "also write the statistics here");

    net::ProbeConfig probe_cfg;
    std::string probe_map, probe_input;
    std::optional<std::string> probe_server, probe_out;
    std::optional<std::uint64_t> probe_stream;
    auto* probe = cli.add_subcommand("probe", "compress a dataset and stream it to the IDS server");
    probe->add_option("--map", probe_map, "compression map JSON")->required();
    probe->add_option("--input", probe_input, "LWDS dataset container")->required();
    auto* opt_server = probe->add_option("--server", probe_server, "host:port of the IDS server");
    probe->add_option("--out", probe_out, "offline transfer file")->excludes(opt_server);
    probe->add_option("--batch", probe_cfg.batch_size, "records per frame")->capture_default_str();
    probe->add_flag("--eval", probe_cfg.evaluation_mode, "send truth labels");
    probe->add_option("--stream-id", probe_stream, "stream identifier (random by default)");

    std::string srv_listen = "0.0.0.0:7070", srv_forest, srv_fingerprint;
    std::optional<std::string> srv_alerts, srv_metrics, srv_verdicts, srv_replay;
    std::size_t srv_window = 1024;
    auto* server = cli.add_subcommand("server", "classify probe streams with a trained forest");
    server->add_option("--listen", srv_listen, "listen address")->capture_default_str();
    server->add_option("--forest", srv_forest, "forest JSON")->required();
    server->add_option("--fingerprint", srv_fingerprint, "expected preprocess fingerprint (hex)")->required();
    server->add_option("--alerts", srv_alerts, "alert log (JSON lines)");
    server->add_option("--metrics", srv_metrics, "metrics JSON written at shutdown");
    server->add_option("--verdicts", srv_verdicts, "verdict log (JSON lines)");
    server->add_option("--replay", srv_replay, "classify an offline transfer file and exit");
    server->add_option("--dedup-window", srv_window, "frames remembered per stream")->capture_default_str();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*ingest) {
            auto r = app::cmd_ingest(ingest_args.load());
            print({{"dimension", r.dimension}, {"train", r.train}, {"validation", r.validation}, {"test", r.test}});
        } else if (*train_encoder) {
            auto e = app::cmd_train_encoder(enc_args.load());
            const auto& last = e.history.back();
            print({{"epochs", e.history.size()},
                   {"train_loss", last.train_loss},
                   {"validation_accuracy", last.validation_accuracy}});
        } else if (*train_decoder) {
            auto r = app::cmd_train_decoder(dec_args.load());
            print({{"validation_mse", r.mse}, {"samples", r.samples}});
        } else if (*search) {
            const auto cfg = search_args.load();
            auto r = app::cmd_search(cfg);
            print({{"trials", r.trials.size()},
                   {"best_objective", *r.best.objective},
                   {"best", search::point_to_json(cfg.search.space, r.best.point)}});
        } else if (*train_forest) {
            print(metrics_summary(app::cmd_train_forest(forest_args.load())));
        } else if (*compare) {
            auto r = app::cmd_compare(compare_args.load());
            std::cout << r.to_text();
        } else if (*pipeline) {
            const auto cfg = pipeline_args.load();
            app::run_pipeline(cfg);
            print(nn::read_json_file(app::Workspace{cfg.out}.manifest()));
        } else if (*report) {
            auto s = app::cmd_report_compression(rc_dataset, rc_map, rc_out);
            if (!rc_json.empty()) nn::write_json_file(rc_json, s.to_json());
            print(s.to_json());
        } else if (*probe) {
            probe_cfg.map_path = probe_map;
            probe_cfg.server_address = probe_server;
            if (probe_out) probe_cfg.output_path = *probe_out;
            probe_cfg.stream_id = probe_stream ? *probe_stream : std::random_device{}() | (std::uint64_t{std::random_device{}()} << 32);
            const auto ds = data::read_container(probe_input);
            auto s = net::run_probe(probe_cfg, ds.records);
            print({{"stream_id", probe_cfg.stream_id},
                   {"records_sent", s.records_sent},
                   {"frames_sent", s.frames_sent},
                   {"bytes_on_wire", s.bytes_on_wire},
                   {"retries", s.retries},
                   {"dimension_errors", s.compression.dimension_errors}});
            if (s.compression.dimension_errors > 0) return 4;
        } else if (*server) {
            net::ServerConfig cfg;
            cfg.listen_address = srv_listen;
            cfg.forest_path = srv_forest;
            cfg.expected_fingerprint = digest_from_hex(srv_fingerprint);
            if (srv_alerts) cfg.alert_log_path = *srv_alerts;
            if (srv_metrics) cfg.metrics_output_path = *srv_metrics;
            if (srv_verdicts) cfg.verdict_log_path = *srv_verdicts;
            cfg.dedup_window = srv_window;
            auto forest = forest::load_forest(cfg.forest_path);
            if (srv_replay) {
                print(net::replay_offline(*srv_replay, forest, cfg).to_json());
                return 0;
            }
            net::IdsServer ids(cfg, std::move(forest));
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            ids.start();
            std::cerr << "listening on port " << ids.port() << std::endl;
            while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
            ids.stop();
            print(ids.finalize_metrics().to_json());
        }
    } catch (const std::exception& e) {
        const int code = app::exit_code_for(e);
        const auto* err = dynamic_cast<const Error*>(&e);
        std::cerr << "latentwire: error[" << (err ? err->code() : "internal") << "]: " << e.what() << '\n';
        return code;
    }
    return 0;
}
