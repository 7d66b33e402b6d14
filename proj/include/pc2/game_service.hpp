#pragma once
// Game sessions and asynchronous solve jobs, plus an HTTP/JSON front end.
// Service holds all state and is usable without HTTP; mount() wires it to
// an httplib server. Payloads are described in docs/api.md.

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>

#include "config_builder.hpp"
#include "cover_solver.hpp"
#include "interstitium_lab.hpp"
#include "json_io.hpp"

namespace pc2::service {

using io::json;
using Clock = std::function<std::chrono::steady_clock::time_point()>;

struct ApiError : std::runtime_error {
    int status;
    ApiError(int s, const std::string& msg) : std::runtime_error(msg), status(s) {}
};

enum class Mode { Free, Handicap };

inline std::string to_string(Mode m) { return m == Mode::Free ? "free" : "handicap"; }

inline Mode mode_from_string(const std::string& s) {
    if (s == "free") return Mode::Free;
    if (s == "handicap") return Mode::Handicap;
    throw ApiError(400, "mode must be 'free' or 'handicap'");
}

/// The 55-point hard configuration, at the pose the default search settles on.
inline PointSet preset_fig1_55() {
    static const PointSet pts =
        generate_configuration((1.0 - 1e-6) * kCriticalSpacing, Pose(kPi / 6, {0.0, 0.066987})).points;
    return pts;
}

inline PointSet preset(const std::string& name) {
    if (name == "fig1-55") return preset_fig1_55();
    throw ApiError(404, "unknown preset '" + name + "'");
}

struct Move {
    enum class Kind { Add, Remove } kind;
    std::size_t index;
    Point2 point;
};

struct Session {
    std::string id;
    Mode mode{Mode::Free};
    PointSet points;
    std::vector<Move> history;
    std::chrono::steady_clock::time_point last_used;
    std::mutex m;
};

enum class JobStatus { Queued, Running, Done, Cancelled };

inline std::string to_string(JobStatus s) {
    switch (s) {
        case JobStatus::Queued: return "queued";
        case JobStatus::Running: return "running";
        case JobStatus::Done: return "done";
        default: return "cancelled";
    }
}

struct Job {
    std::string id;
    std::string session;
    Mode mode{Mode::Free};
    double budget{1.0};
    std::uint64_t seed{0};
    PointSet points;  // snapshot at submission
    std::atomic<bool> cancel{false};

    mutable std::mutex m;
    JobStatus status{JobStatus::Queued};
    std::optional<json> result;
};

/// The same document `pc2 cover solve` / `pc2 handicap check` print for these inputs.
inline json run_solve(const PointSet& points, Mode mode, double budget, std::uint64_t seed,
                      const std::atomic<bool>* cancel, bool& cancelled) {
    if (mode == Mode::Handicap) {
        const HandicapResult r = handicap_oracle(points);
        cancelled = cancel && cancel->load();
        return io::to_json(r, points);
    }
    SolveOptions opt;
    opt.budget = SolveBudget{}.scaled(budget);
    opt.seed = seed;
    opt.cancel = cancel;
    const CoverSolution s = solve_cover(points, opt);
    cancelled = s.cancelled || (cancel && cancel->load());
    return io::to_json(s, points);
}

struct ServiceOptions {
    unsigned workers{0};  // 0: hardware parallelism
    std::size_t queue_capacity{32};
    std::chrono::seconds idle_ttl{std::chrono::hours(24)};
    Clock clock;  // defaults to steady_clock::now
};

class Service {
public:
    explicit Service(ServiceOptions opt = {}) : opt_(std::move(opt)) {
        if (!opt_.clock) opt_.clock = [] { return std::chrono::steady_clock::now(); };
        unsigned n = opt_.workers ? opt_.workers : std::thread::hardware_concurrency();
        n = std::max(1u, n);
        for (unsigned i = 0; i < n; ++i) workers_.emplace_back([this] { work(); });
    }

    ~Service() {
        {
            std::lock_guard lk(qm_);
            stopping_ = true;
            for (auto& j : queue_) j->cancel = true;
        }
        {
            std::lock_guard lk(rm_);
            for (auto& [id, j] : jobs_) j->cancel = true;
        }
        qcv_.notify_all();
        for (auto& t : workers_) t.join();
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // -- sessions

    json create_session(const json& body = json::object()) {
        auto s = std::make_shared<Session>();
        if (body.is_object()) {
            if (body.contains("mode")) s->mode = mode_from_string(body.at("mode").get<std::string>());
            PointSet initial;
            if (body.contains("preset")) initial = preset(body.at("preset").get<std::string>());
            if (body.contains("points")) initial = parse_points(body.at("points"));
            for (const Point2& p : initial) {
                check_finite(p);
                s->history.push_back({Move::Kind::Add, s->points.size(), p});
                s->points.push_back(p);
            }
        } else if (!body.is_null()) {
            throw ApiError(400, "session body must be an object");
        }
        std::lock_guard lk(rm_);
        expire_locked();
        s->id = "s" + std::to_string(++session_counter_);
        s->last_used = opt_.clock();
        sessions_[s->id] = s;
        std::lock_guard sl(s->m);
        return state(*s);
    }

    json get_session(const std::string& id) {
        auto s = session(id);
        std::lock_guard lk(s->m);
        return state(*s);
    }

    json add_point(const std::string& id, const Point2& p) {
        check_finite(p);
        auto s = session(id);
        std::lock_guard lk(s->m);
        s->history.push_back({Move::Kind::Add, s->points.size(), p});
        s->points.push_back(p);
        return state(*s);
    }

    json remove_point(const std::string& id, std::size_t index) {
        auto s = session(id);
        std::lock_guard lk(s->m);
        if (index >= s->points.size()) throw ApiError(404, "no point at index " + std::to_string(index));
        s->history.push_back({Move::Kind::Remove, index, s->points[index]});
        s->points.erase(s->points.begin() + static_cast<long>(index));
        return state(*s);
    }

    // -- jobs

    json submit_solve(const std::string& id, const json& body = json::object()) {
        auto job = std::make_shared<Job>();
        {
            auto s = session(id);
            std::lock_guard lk(s->m);
            job->session = s->id;
            job->mode = s->mode;
            job->points = s->points;
        }
        if (!body.is_null() && !body.is_object()) throw ApiError(400, "solve body must be an object");
        if (body.is_object()) {
            try {
                if (body.contains("mode")) job->mode = mode_from_string(body.at("mode").get<std::string>());
                if (body.contains("budget")) job->budget = body.at("budget").get<double>();
                if (body.contains("seed")) job->seed = body.at("seed").get<std::uint64_t>();
            } catch (const json::exception& e) {
                throw ApiError(400, e.what());
            }
        }
        if (!(job->budget > 0.0) || !std::isfinite(job->budget)) throw ApiError(400, "budget must be positive");
        if (job->points.empty()) throw ApiError(409, "session has no points");
        if (job->mode == Mode::Free && job->points.size() > 64) throw ApiError(400, "free solve supports at most 64 points");
        {
            std::lock_guard lk(qm_);
            if (queue_.size() >= opt_.queue_capacity) throw ApiError(429, "job queue is full");
            {
                std::lock_guard rl(rm_);
                job->id = "j" + std::to_string(++job_counter_);
                jobs_[job->id] = job;
            }
            queue_.push_back(job);
        }
        qcv_.notify_one();
        return describe(*job);
    }

    json poll_job(const std::string& id) { return describe(*find_job(id)); }

    json cancel_job(const std::string& id) {
        auto job = find_job(id);
        job->cancel = true;
        {
            std::lock_guard lk(qm_);
            const auto it = std::find(queue_.begin(), queue_.end(), job);
            if (it != queue_.end()) {
                queue_.erase(it);
                std::lock_guard jl(job->m);
                job->status = JobStatus::Cancelled;
            }
        }
        return describe(*job);
    }

    // -- display helpers

    /// Interstitium membership of H + t on a res x res raster over the session's points.
    json overlay(const std::string& id, const std::string& mode, const Point2& t, int res) {
        if (mode != "handicap") throw ApiError(400, "overlay mode must be 'handicap'");
        if (res < 1 || res > 1024) throw ApiError(400, "res must be in [1, 1024]");
        check_finite(t);
        PointSet pts;
        {
            auto s = session(id);
            std::lock_guard lk(s->m);
            pts = s->points;
        }
        double x0 = -2, y0 = -2, x1 = 2, y1 = 2;
        if (!pts.empty()) {
            x0 = x1 = pts[0].x;
            y0 = y1 = pts[0].y;
            for (const Point2& p : pts) {
                x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
            }
            x0 -= 1.5, y0 -= 1.5, x1 += 1.5, y1 += 1.5;
        }
        json rows = json::array();
        for (int r = 0; r < res; ++r) {
            std::string row(static_cast<std::size_t>(res), '0');
            const double y = y0 + (r + 0.5) * (y1 - y0) / res;
            for (int c = 0; c < res; ++c) {
                const double x = x0 + (c + 0.5) * (x1 - x0) / res;
                if (point_in_interstitium({x, y}, t)) row[static_cast<std::size_t>(c)] = '1';
            }
            rows.push_back(std::move(row));
        }
        json inside = json::array();
        for (const Point2& p : pts) inside.push_back(point_in_interstitium(p, t));
        return {{"mode", mode},
                {"t", io::to_json(t)},
                {"window", {x0, y0, x1, y1}},
                {"width", res},
                {"height", res},
                {"rows", rows},
                {"points_in_interstitium", inside}};
    }

    static PointSet parse_points(const json& j) {
        try {
            PointSet pts = io::points_from_json(j);
            for (const Point2& p : pts) check_finite(p);
            return pts;
        } catch (const std::invalid_argument& e) {
            throw ApiError(400, e.what());
        }
    }

    static Point2 parse_point(const json& j) {
        if (j.is_object()) {
            const json& x = j.contains("x") ? j.at("x") : json();
            const json& y = j.contains("y") ? j.at("y") : json();
            if (!x.is_number() || !y.is_number()) throw ApiError(400, "expected {\"x\": number, \"y\": number}");
            return {x.get<double>(), y.get<double>()};
        }
        try {
            return io::point_from_json(j);
        } catch (const std::invalid_argument& e) {
            throw ApiError(400, e.what());
        }
    }

private:
    static void check_finite(const Point2& p) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw ApiError(400, "coordinates must be finite");
    }

    static json state(const Session& s) {
        json moves = json::array();
        for (const Move& m : s.history) {
            moves.push_back({{"op", m.kind == Move::Kind::Add ? "add" : "remove"},
                             {"index", m.index},
                             {"point", io::to_json(m.point)}});
        }
        return {{"id", s.id}, {"mode", to_string(s.mode)}, {"points", io::to_json(s.points)}, {"moves", moves}};
    }

    static json describe(const Job& j) {
        std::lock_guard lk(j.m);
        json d{{"id", j.id},
               {"session", j.session},
               {"mode", to_string(j.mode)},
               {"budget", j.budget},
               {"seed", j.seed},
               {"status", to_string(j.status)}};
        if (j.result) d["result"] = *j.result;
        return d;
    }

    void expire_locked() {
        const auto now = opt_.clock();
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            if (now - it->second->last_used > opt_.idle_ttl) {
                const std::string gone = it->first;
                it = sessions_.erase(it);
                for (auto jt = jobs_.begin(); jt != jobs_.end();) {
                    std::lock_guard jl(jt->second->m);
                    const bool terminal =
                        jt->second->status == JobStatus::Done || jt->second->status == JobStatus::Cancelled;
                    jt = jt->second->session == gone && terminal ? jobs_.erase(jt) : std::next(jt);
                }
            } else {
                ++it;
            }
        }
    }

    std::shared_ptr<Session> session(const std::string& id) {
        std::lock_guard lk(rm_);
        expire_locked();
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) throw ApiError(404, "unknown session '" + id + "'");
        it->second->last_used = opt_.clock();
        return it->second;
    }

    std::shared_ptr<Job> find_job(const std::string& id) {
        std::lock_guard lk(rm_);
        const auto it = jobs_.find(id);
        if (it == jobs_.end()) throw ApiError(404, "unknown job '" + id + "'");
        return it->second;
    }

    void work() {
        for (;;) {
            std::shared_ptr<Job> job;
            {
                std::unique_lock lk(qm_);
                qcv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
                if (stopping_) return;
                job = queue_.front();
                queue_.pop_front();
                std::lock_guard jl(job->m);
                job->status = JobStatus::Running;
            }
            bool cancelled = false;
            std::optional<json> result;
            try {
                result = run_solve(job->points, job->mode, job->budget, job->seed, &job->cancel, cancelled);
            } catch (const std::exception& e) {
                result = json{{"error", e.what()}};
            }
            std::lock_guard jl(job->m);
            if (cancelled || job->cancel) {
                job->status = JobStatus::Cancelled;
            } else {
                job->status = JobStatus::Done;
                job->result = std::move(result);
            }
        }
    }

    ServiceOptions opt_;

    std::mutex rm_;  // sessions_, jobs_, counters
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::map<std::string, std::shared_ptr<Job>> jobs_;
    std::uint64_t session_counter_{0};
    std::uint64_t job_counter_{0};

    std::mutex qm_;  // queue_, stopping_
    std::condition_variable qcv_;
    std::deque<std::shared_ptr<Job>> queue_;
    bool stopping_{false};
    std::vector<std::thread> workers_;
};

namespace detail {

inline json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        return json::parse(req.body);
    } catch (const json::exception& e) {
        throw ApiError(400, std::string("malformed JSON: ") + e.what());
    }
}

inline Point2 parse_pair(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ApiError(400, "expected 'x,y'");
    try {
        std::size_t a = 0, b = 0;
        const double x = std::stod(s.substr(0, comma), &a);
        const double y = std::stod(s.substr(comma + 1), &b);
        if (a != comma || b != s.size() - comma - 1) throw std::invalid_argument(s);
        return {x, y};
    } catch (const std::logic_error&) {
        throw ApiError(400, "expected 'x,y', got '" + s + "'");
    }
}

template <class F>
httplib::Server::Handler handle(F f, int ok = 200) {
    return [f, ok](const httplib::Request& req, httplib::Response& res) {
        try {
            res.set_content(f(req).dump(), "application/json");
            res.status = ok;
        } catch (const ApiError& e) {
            res.status = e.status;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
        }
    };
}

}  // namespace detail

/// Registers the HTTP routes for `svc` on `srv`.
inline void mount(httplib::Server& srv, Service& svc) {
    using detail::handle;
    using Req = httplib::Request;
    srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    srv.Post("/sessions", handle([&svc](const Req& r) { return svc.create_session(detail::parse_body(r)); }, 201));
    srv.Get(R"(/sessions/([^/]+))", handle([&svc](const Req& r) { return svc.get_session(r.matches[1]); }));
    srv.Post(R"(/sessions/([^/]+)/points)", handle([&svc](const Req& r) {
                 return svc.add_point(r.matches[1], Service::parse_point(detail::parse_body(r)));
             }));
    srv.Delete(R"(/sessions/([^/]+)/points/(\d{1,9}))", handle([&svc](const Req& r) {
                   return svc.remove_point(r.matches[1], std::stoul(r.matches[2]));
               }));
    srv.Post(R"(/sessions/([^/]+)/solve)", handle([&svc](const Req& r) {
                 return svc.submit_solve(r.matches[1], detail::parse_body(r));
             }, 202));
    srv.Get(R"(/sessions/([^/]+)/overlay)", handle([&svc](const Req& r) {
                const Point2 t = r.has_param("t") ? detail::parse_pair(r.get_param_value("t")) : Point2{0, 0};
                int res = 128;
                if (r.has_param("res")) {
                    try {
                        res = std::stoi(r.get_param_value("res"));
                    } catch (const std::logic_error&) {
                        throw ApiError(400, "res must be an integer");
                    }
                }
                return svc.overlay(r.matches[1], r.has_param("mode") ? r.get_param_value("mode") : "handicap", t, res);
            }));
    srv.Get(R"(/jobs/([^/]+))", handle([&svc](const Req& r) { return svc.poll_job(r.matches[1]); }));
    srv.Post(R"(/jobs/([^/]+)/cancel)", handle([&svc](const Req& r) { return svc.cancel_job(r.matches[1]); }));
    srv.Get(R"(/presets/([^/]+))", handle([](const Req& r) {
                const std::string name = r.matches[1];
                return json{{"name", name}, {"points", io::to_json(preset(name))}};
            }));

    srv.set_error_handler([](const Req&, httplib::Response& res) {
        if (res.body.empty()) res.set_content(json{{"error", "not found"}}.dump(), "application/json");
    });
}

}  // namespace pc2::service
