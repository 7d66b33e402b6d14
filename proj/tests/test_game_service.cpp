#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "pc2/cli.hpp"
#include "pc2/game_service.hpp"

using namespace pc2;
using namespace std::chrono_literals;
using io::json;

namespace {

struct FakeClock {
    std::atomic<long long> offset_s{0};
    service::Clock fn() {
        return [this] { return std::chrono::steady_clock::time_point{} + std::chrono::seconds(offset_s.load()); };
    }
};

struct Harness {
    service::Service svc;
    httplib::Server srv;
    std::thread th;
    int port{0};

    explicit Harness(service::ServiceOptions opt = {}) : svc(std::move(opt)) {
        service::mount(srv, svc);
        port = srv.bind_to_any_port("127.0.0.1");
        th = std::thread([this] { srv.listen_after_bind(); });
        srv.wait_until_ready();
    }
    ~Harness() {
        srv.stop();
        th.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(60, 0);
        return c;
    }

    std::pair<int, json> call(const std::string& method, const std::string& path, const json& body = nullptr) const {
        auto c = client();
        httplib::Result r;
        const std::string payload = body.is_null() ? "" : body.dump();
        if (method == "GET") r = c.Get(path);
        if (method == "POST") r = c.Post(path, payload, "application/json");
        if (method == "DELETE") r = c.Delete(path);
        if (!r) return {0, nullptr};
        return {r->status, r->body.empty() ? json(nullptr) : json::parse(r->body)};
    }

    std::string new_session(const json& body = json::object()) const {
        auto [code, j] = call("POST", "/sessions", body);
        EXPECT_EQ(code, 201);
        return j.at("id").get<std::string>();
    }

    json wait_job(const std::string& id, std::chrono::seconds limit = 600s) const {
        const auto stop = std::chrono::steady_clock::now() + limit;
        for (;;) {
            auto [code, j] = call("GET", "/jobs/" + id);
            EXPECT_EQ(code, 200);
            const std::string st = j.value("status", "");
            if (st == "done" || st == "cancelled" || std::chrono::steady_clock::now() > stop) return j;
            std::this_thread::sleep_for(20ms);
        }
    }

    json wait_status(const std::string& id, const std::string& status) const {
        for (int i = 0; i < 3000; ++i) {
            auto [code, j] = call("GET", "/jobs/" + id);
            if (j.value("status", "") == status) return j;
            std::this_thread::sleep_for(10ms);
        }
        return nullptr;
    }
};

json cli_doc(std::vector<std::string> args) {
    args.insert(args.begin(), "pc2");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    EXPECT_NE(cli::run(static_cast<int>(argv.size()), argv.data(), out, err), 2);
    return json::parse(out.str());
}

// nearest-neighbour distance to H + t by brute force over a lattice patch
bool brute_in_interstitium(const Point2& p, const Point2& t) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = -12; i <= 12; ++i)
        for (int j = -12; j <= 12; ++j) {
            const Point2 q{t.x + 2.0 * i + 1.0 * j, t.y + kSqrt3 * j};
            best = std::min(best, distance(p, q));
        }
    return best > 1.0;
}

}  // namespace

TEST(GameService, PresetFig1) {
    Harness h;
    auto [code, j] = h.call("GET", "/presets/fig1-55");
    ASSERT_EQ(code, 200);
    EXPECT_EQ(j["points"].size(), 55u);
    EXPECT_EQ(h.call("GET", "/presets/nope").first, 404);
}

TEST(GameService, SessionMovesAndErrors) {
    Harness h;
    const std::string id = h.new_session();
    auto [c1, s1] = h.call("POST", "/sessions/" + id + "/points", {{"x", 0.25}, {"y", -1.5}});
    ASSERT_EQ(c1, 200);
    EXPECT_EQ(s1["points"], json::array({json::array({0.25, -1.5})}));
    auto [c2, s2] = h.call("POST", "/sessions/" + id + "/points", json::array({3.0, 4.0}));
    ASSERT_EQ(c2, 200);
    EXPECT_EQ(s2["points"].size(), 2u);
    auto [c3, s3] = h.call("DELETE", "/sessions/" + id + "/points/0");
    ASSERT_EQ(c3, 200);
    EXPECT_EQ(s3["points"], json::array({json::array({3.0, 4.0})}));
    ASSERT_EQ(s3["moves"].size(), 3u);
    EXPECT_EQ(s3["moves"][2]["op"], "remove");
    EXPECT_EQ(s3["moves"][2]["index"], 0);

    EXPECT_EQ(h.call("DELETE", "/sessions/" + id + "/points/7").first, 404);
    EXPECT_EQ(h.call("GET", "/sessions/missing").first, 404);
    EXPECT_EQ(h.call("POST", "/sessions/missing/points", json::array({0.0, 0.0})).first, 404);
    EXPECT_EQ(h.call("POST", "/sessions/" + id + "/points", {{"x", nullptr}, {"y", 0}}).first, 400);
    EXPECT_EQ(h.call("POST", "/sessions/" + id + "/solve", {{"mode", "sideways"}}).first, 400);
    EXPECT_EQ(h.call("GET", "/jobs/missing").first, 404);
    EXPECT_EQ(h.call("POST", "/jobs/missing/cancel").first, 404);

    EXPECT_THROW(h.svc.add_point(id, {std::numeric_limits<double>::infinity(), 0.0}), std::invalid_argument);
    EXPECT_THROW(h.svc.add_point(id, {0.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    auto raw = h.client().Post("/sessions/" + id + "/points", "[1e999, 0]", "application/json");
    ASSERT_TRUE(raw);
    EXPECT_EQ(raw->status, 400);
    EXPECT_EQ(h.call("GET", "/sessions/" + id).second["points"].size(), 1u);

    const std::string empty = h.new_session();
    EXPECT_EQ(h.call("POST", "/sessions/" + empty + "/solve", json::object()).first, 409);
}

TEST(GameService, SinglePointFreeSolve) {
    Harness h;
    const std::string id = h.new_session();
    h.call("POST", "/sessions/" + id + "/points", json::array({1.0, 2.0}));
    auto [code, job] = h.call("POST", "/sessions/" + id + "/solve", {{"mode", "free"}});
    ASSERT_EQ(code, 202);
    const json done = h.wait_job(job["id"]);
    ASSERT_EQ(done["status"], "done");
    EXPECT_EQ(done["result"]["status"], "covered");
    EXPECT_EQ(done["result"]["centers"].size(), 1u);
    EXPECT_EQ(done["result"]["covered"], json::array({true}));

    // terminal states do not change
    auto [cc, after] = h.call("POST", "/jobs/" + done["id"].get<std::string>() + "/cancel");
    EXPECT_EQ(cc, 200);
    EXPECT_EQ(after["status"], "done");
    EXPECT_EQ(after["result"], done["result"]);
}

TEST(GameService, ResultsMatchCli) {
    Harness h;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    PointSet pts;
    for (int i = 0; i < 7; ++i) pts.emplace_back(u(rng), u(rng));
    const std::string path =
        (std::filesystem::temp_directory_path() / "pc2_service_points.json").string();
    io::write_text_file(path, io::to_json(pts).dump());

    const std::string id = h.new_session({{"points", io::to_json(pts)}});
    auto [c1, free_job] = h.call("POST", "/sessions/" + id + "/solve", {{"mode", "free"}, {"budget", 0.5}, {"seed", 7}});
    ASSERT_EQ(c1, 202);
    const json free_done = h.wait_job(free_job["id"]);
    ASSERT_EQ(free_done["status"], "done");
    EXPECT_EQ(free_done["result"].dump(),
              cli_doc({"--seed", "7", "cover", "solve", path, "--budget-scale", "0.5"}).dump());

    auto [c2, hjob] = h.call("POST", "/sessions/" + id + "/solve", {{"mode", "handicap"}});
    ASSERT_EQ(c2, 202);
    const json hdone = h.wait_job(hjob["id"]);
    ASSERT_EQ(hdone["status"], "done");
    EXPECT_EQ(hdone["result"].dump(), cli_doc({"handicap", "check", path}).dump());
}

TEST(GameService, PresetHandicapSolveCertified) {
    Harness h;
    const std::string id = h.new_session({{"preset", "fig1-55"}, {"mode", "handicap"}});
    auto [code, state] = h.call("GET", "/sessions/" + id);
    ASSERT_EQ(code, 200);
    EXPECT_EQ(state["points"].size(), 55u);
    EXPECT_EQ(state["mode"], "handicap");
    auto [c, job] = h.call("POST", "/sessions/" + id + "/solve", json::object());
    ASSERT_EQ(c, 202);
    EXPECT_EQ(job["mode"], "handicap");
    const json done = h.wait_job(job["id"]);
    ASSERT_EQ(done["status"], "done");
    EXPECT_EQ(done["result"]["verdict"], "no_translate_covers");
    EXPECT_EQ(done["result"]["certificate"]["status"], "covered");
    EXPECT_EQ(done["result"]["covered"].size(), 55u);
}

TEST(GameService, CancelRunningJob) {
    Harness h;
    const std::string id = h.new_session({{"preset", "fig1-55"}});
    auto [c, job] = h.call("POST", "/sessions/" + id + "/solve", {{"mode", "free"}, {"budget", 50}});
    ASSERT_EQ(c, 202);
    const std::string jid = job["id"];
    ASSERT_FALSE(h.wait_status(jid, "running").is_null());
    std::this_thread::sleep_for(200ms);
    const auto t0 = std::chrono::steady_clock::now();
    auto [cc, ack] = h.call("POST", "/jobs/" + jid + "/cancel");
    EXPECT_EQ(cc, 200);
    const json fin = h.wait_status(jid, "cancelled");
    ASSERT_FALSE(fin.is_null());
    EXPECT_FALSE(fin.contains("result"));
    EXPECT_LT(std::chrono::steady_clock::now() - t0, 5s);
}

TEST(GameService, QueueBackpressure) {
    service::ServiceOptions opt;
    opt.workers = 1;
    Harness h(opt);
    const std::string id = h.new_session({{"preset", "fig1-55"}});
    const json body{{"mode", "free"}, {"budget", 50}};
    auto [c0, first] = h.call("POST", "/sessions/" + id + "/solve", body);
    ASSERT_EQ(c0, 202);
    ASSERT_FALSE(h.wait_status(first["id"], "running").is_null());
    std::vector<std::string> queued;
    for (int i = 0; i < 32; ++i) {
        auto [c, j] = h.call("POST", "/sessions/" + id + "/solve", body);
        ASSERT_EQ(c, 202) << i;
        EXPECT_EQ(j["status"], "queued");
        queued.push_back(j["id"]);
    }
    EXPECT_EQ(h.call("POST", "/sessions/" + id + "/solve", body).first, 429);

    auto [cq, ack] = h.call("POST", "/jobs/" + queued.front() + "/cancel");
    EXPECT_EQ(cq, 200);
    EXPECT_EQ(ack["status"], "cancelled");
    auto [again, extra] = h.call("POST", "/sessions/" + id + "/solve", body);
    EXPECT_EQ(again, 202);
    queued.push_back(extra["id"]);

    for (const auto& q : queued) h.call("POST", "/jobs/" + q + "/cancel");
    h.call("POST", "/jobs/" + first["id"].get<std::string>() + "/cancel");
    EXPECT_FALSE(h.wait_status(first["id"], "cancelled").is_null());
    for (const auto& q : queued) EXPECT_EQ(h.call("GET", "/jobs/" + q).second["status"], "cancelled");
}

TEST(GameService, IdleExpiry) {
    FakeClock clock;
    service::ServiceOptions opt;
    opt.clock = clock.fn();
    Harness h(opt);
    const std::string a = h.new_session();
    const std::string b = h.new_session();
    clock.offset_s = 23 * 3600;
    EXPECT_EQ(h.call("POST", "/sessions/" + a + "/points", json::array({0.0, 0.0})).first, 200);
    clock.offset_s = 24 * 3600 + 1;
    EXPECT_EQ(h.call("GET", "/sessions/" + b).first, 404);
    EXPECT_EQ(h.call("GET", "/sessions/" + a).first, 200);
    clock.offset_s = 2 * 24 * 3600 + 2;
    EXPECT_EQ(h.call("GET", "/sessions/" + a).first, 404);
}

TEST(GameService, ConcurrentSessionsIsolated) {
    Harness h;
    constexpr int kClients = 6;
    std::vector<std::string> ids;
    for (int i = 0; i < kClients; ++i) ids.push_back(h.new_session());
    std::vector<PointSet> models(kClients);
    std::vector<std::size_t> moves(kClients, 0);
    std::vector<std::thread> threads;
    for (int c = 0; c < kClients; ++c) {
        threads.emplace_back([&, c] {
            std::mt19937_64 rng(100 + c);
            std::uniform_real_distribution<double> u(-5.0, 5.0);
            for (int op = 0; op < 60; ++op) {
                if (!models[c].empty() && rng() % 3 == 0) {
                    const std::size_t idx = rng() % models[c].size();
                    auto [code, s] = h.call("DELETE", "/sessions/" + ids[c] + "/points/" + std::to_string(idx));
                    if (code != 200) return;
                    models[c].erase(models[c].begin() + static_cast<long>(idx));
                } else {
                    const Point2 p{u(rng), u(rng)};
                    auto [code, s] = h.call("POST", "/sessions/" + ids[c] + "/points", io::to_json(p));
                    if (code != 200) return;
                    models[c].push_back(p);
                }
                ++moves[c];
            }
        });
    }
    for (auto& t : threads) t.join();
    for (int c = 0; c < kClients; ++c) {
        auto [code, s] = h.call("GET", "/sessions/" + ids[c]);
        ASSERT_EQ(code, 200);
        EXPECT_EQ(moves[c], 60u);
        EXPECT_EQ(s["moves"].size(), moves[c]);
        EXPECT_EQ(io::points_from_json(s["points"]), models[c]);
    }
}

TEST(GameService, HandicapOverlayRaster) {
    Harness h;
    const std::string id = h.new_session({{"points", json::array({json::array({0.0, 0.0}), json::array({2.5, 1.0})})}});
    auto [code, j] = h.call("GET", "/sessions/" + id + "/overlay?mode=handicap&t=0.3,-0.2&res=40");
    ASSERT_EQ(code, 200);
    ASSERT_EQ(j["rows"].size(), 40u);
    const double x0 = j["window"][0], y0 = j["window"][1], x1 = j["window"][2], y1 = j["window"][3];
    EXPECT_LE(x0, 0.0);
    EXPECT_GE(x1, 2.5);
    const Point2 t{0.3, -0.2};
    std::size_t inside = 0;
    for (int r = 0; r < 40; ++r) {
        const std::string row = j["rows"][r];
        ASSERT_EQ(row.size(), 40u);
        for (int c = 0; c < 40; ++c) {
            const Point2 p{x0 + (c + 0.5) * (x1 - x0) / 40, y0 + (r + 0.5) * (y1 - y0) / 40};
            EXPECT_EQ(row[c] == '1', brute_in_interstitium(p, t)) << r << "," << c;
            inside += row[c] == '1';
        }
    }
    EXPECT_GT(inside, 0u);
    EXPECT_EQ(j["points_in_interstitium"].size(), 2u);
    EXPECT_EQ(j["points_in_interstitium"][0].get<bool>(), brute_in_interstitium({0, 0}, t));

    EXPECT_EQ(h.call("GET", "/sessions/" + id + "/overlay?mode=free").first, 400);
    EXPECT_EQ(h.call("GET", "/sessions/" + id + "/overlay?mode=handicap&t=abc").first, 400);
    EXPECT_EQ(h.call("GET", "/sessions/zzz/overlay?mode=handicap").first, 404);
}
