#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "pc2/game_service.hpp"
#include "pc2/parallel.hpp"

namespace {
httplib::Server* g_server = nullptr;
void on_signal(int) {
    if (g_server) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pc2-server: HTTP/JSON game sessions and solve jobs"};
    std::string host = "127.0.0.1";
    int port = 8080;
    unsigned workers = 0;
    unsigned threads = 0;
    app.add_option("--host", host, "Bind address")->capture_default_str();
    app.add_option("--port", port, "Port (0 picks a free one)")->capture_default_str();
    app.add_option("--workers", workers, "Concurrent solve jobs (default: hardware parallelism)");
    app.add_option("--threads", threads, "Threads per solve (default: PC2_THREADS or all cores)");
    CLI11_PARSE(app, argc, argv);
    if (threads) pc2::set_max_threads(threads);

    pc2::service::ServiceOptions opt;
    opt.workers = workers;
    pc2::service::Service svc(opt);
    httplib::Server srv;
    pc2::service::mount(srv, svc);
    g_server = &srv;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
    if (bound < 0) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    std::cerr << "listening on http://" << host << ":" << bound << "\n";
    srv.listen_after_bind();
    return 0;
}
