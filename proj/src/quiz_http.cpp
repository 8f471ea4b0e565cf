#include <httplib.h>

#include <thread>

#include "memquote/error.hpp"
#include "memquote/quiz.hpp"

namespace memquote::http {

struct QuizServer::Impl {
  QuizService& service;
  ServeOptions options;
  httplib::Server server;
  std::thread thread;
  int port = -1;

  Impl(QuizService& s, ServeOptions o) : service(s), options(std::move(o)) {}

  void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <typename F>
  void guarded(httplib::Response& res, F&& f) {
    try {
      reply(res, 200, f());
    } catch (const QuizError& e) {
      reply(res, e.status(), {{"error", e.what()}});
    } catch (const nlohmann::json::exception& e) {
      reply(res, 400, {{"error", std::string("bad request body: ") + e.what()}});
    } catch (const std::exception& e) {
      reply(res, 500, {{"error", e.what()}});
    }
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });
    server.Get("/api/pair", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { return service.get_pair(req.get_param_value("subject")); });
    });
    server.Post("/api/judgment", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = nlohmann::json::parse(req.body);
        if (!body.is_object()) throw QuizError(400, "expected a JSON object");
        const auto pos = body.at("chosen_position").get<std::string>();
        if (pos != "first" && pos != "second") {
          throw QuizError(400, "chosen_position must be \"first\" or \"second\"");
        }
        return service.post_judgment(body.at("subject_id").get<std::string>(),
                                     body.at("pair_id").get<std::string>(),
                                     pos == "first" ? Position::kFirst : Position::kSecond);
      });
    });
    server.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { return service.stats().to_json(); });
    });
  }
};

QuizServer::QuizServer(QuizService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->routes();
}

QuizServer::~QuizServer() { stop(); }

int QuizServer::start() {
  if (impl_->options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
  } else {
    impl_->port = impl_->server.bind_to_port(impl_->options.host, impl_->options.port)
                      ? impl_->options.port
                      : -1;
  }
  if (impl_->port < 0) {
    throw ConfigError("cannot bind " + impl_->options.host + ":" +
                      std::to_string(impl_->options.port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void QuizServer::listen_blocking() {
  if (!impl_->thread.joinable()) start();
  impl_->thread.join();
}

void QuizServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable() && impl_->thread.get_id() != std::this_thread::get_id()) {
    impl_->thread.join();
  }
}

}  // namespace memquote::http
