#include "abm/serve/server.hpp"

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "abm/serve/session.hpp"

namespace abm::serve {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using Strand = asio::strand<asio::io_context::executor_type>;

class WsConnection;

/// A session plus its transport state: the attached connection, play timer and grace timer.
class SessionHost : public std::enable_shared_from_this<SessionHost> {
 public:
  SessionHost(asio::io_context& ioc, std::unique_ptr<Session> session, std::chrono::milliseconds grace,
              std::function<void(const std::string&)> expire)
      : strand_(asio::make_strand(ioc)),
        play_timer_(strand_),
        grace_timer_(strand_),
        session_(std::move(session)),
        grace_(grace),
        expire_(std::move(expire)) {}

  const std::string& id() const { return session_->id(); }
  Strand& strand() { return strand_; }

  void attach(std::shared_ptr<WsConnection> conn);
  void detach(const WsConnection* conn);
  void receive(std::string text);

 private:
  void send(const std::vector<json>& messages);
  void schedule_tick(bool restart);

  Strand strand_;
  asio::steady_timer play_timer_;
  asio::steady_timer grace_timer_;
  std::unique_ptr<Session> session_;
  std::weak_ptr<WsConnection> conn_;
  std::chrono::milliseconds grace_;
  std::function<void(const std::string&)> expire_;
  bool ticking_ = false;
  std::chrono::steady_clock::time_point next_tick_;
};

class WsConnection : public std::enable_shared_from_this<WsConnection> {
 public:
  explicit WsConnection(beast::tcp_stream stream) : ws_(std::move(stream)) {}

  void accept(http::request<http::string_body> req, std::shared_ptr<SessionHost> host) {
    host_ = std::move(host);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      asio::post(self->host_->strand(), [self] { self->host_->attach(self); });
      self->read();
    });
  }

  /// Queues a frame. A snapshot still waiting in the queue is dropped in favor of the newer one.
  void deliver(std::string text, bool snapshot) {
    asio::post(ws_.get_executor(), [self = shared_from_this(), text = std::move(text), snapshot]() mutable {
      if (self->closed_) return;
      if (snapshot) {
        for (auto it = self->queue_.begin(); it != self->queue_.end(); ++it) {
          if (it->snapshot && !(self->writing_ && it == self->queue_.begin())) {
            self->queue_.erase(it);
            break;
          }
        }
      }
      self->queue_.push_back({std::move(text), snapshot});
      if (!self->writing_) self->write();
    });
  }

 private:
  struct Frame {
    std::string text;
    bool snapshot;
  };

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        asio::post(self->host_->strand(), [self] { self->host_->detach(self.get()); });
        return;
      }
      std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      asio::post(self->host_->strand(), [host = self->host_, text = std::move(text)]() mutable { host->receive(std::move(text)); });
      self->read();
    });
  }

  void write() {
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front().text), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->queue_.pop_front();
      if (ec) {
        self->closed_ = true;
        self->queue_.clear();
        self->writing_ = false;
        return;
      }
      if (self->queue_.empty()) self->writing_ = false;
      else self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::shared_ptr<SessionHost> host_;
  std::deque<Frame> queue_;
  bool writing_ = false;
  bool closed_ = false;
};

void SessionHost::attach(std::shared_ptr<WsConnection> conn) {
  grace_timer_.cancel();
  conn_ = conn;
  send({session_->hello(), session_->snapshot()});
}

void SessionHost::detach(const WsConnection* conn) {
  auto current = conn_.lock();
  if (current && current.get() != conn) return;
  conn_.reset();
  session_->handle({{"type", "pause"}});
  grace_timer_.expires_after(grace_);
  grace_timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
    if (ec || !self->conn_.expired()) return;
    self->play_timer_.cancel();
    self->expire_(self->id());
  });
}

void SessionHost::receive(std::string text) {
  json message;
  try {
    message = json::parse(text);
  } catch (const json::parse_error& e) {
    send({{{"type", "error"}, {"code", "bad_message"}, {"message", std::string("invalid JSON: ") + e.what()}}});
    return;
  }
  const bool was_playing = session_->playing();
  send(session_->handle(message));
  if (session_->playing() && (!was_playing || message.value("type", "") == "play")) schedule_tick(true);
}

void SessionHost::send(const std::vector<json>& messages) {
  auto conn = conn_.lock();
  if (!conn) return;
  for (const auto& m : messages) conn->deliver(m.dump(), m["type"] == "snapshot");
}

void SessionHost::schedule_tick(bool restart) {
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / session_->steps_per_second()));
  if (restart) {
    if (ticking_) play_timer_.cancel();
    next_tick_ = std::chrono::steady_clock::now() + interval;
  } else {
    next_tick_ += interval;
  }
  ticking_ = true;
  play_timer_.expires_at(next_tick_);
  play_timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
    if (ec) return;
    self->ticking_ = false;
    if (!self->session_->playing()) return;
    self->send(self->session_->tick());
    self->schedule_tick(false);
  });
}

struct Server::Impl : std::enable_shared_from_this<Server::Impl> {
  explicit Impl(ServerOptions o) : options(std::move(o)), acceptor(ioc) {
    const tcp::endpoint endpoint(asio::ip::make_address(options.address), options.port);
    acceptor.open(endpoint.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(endpoint);
    acceptor.listen();
  }

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [self = shared_from_this()](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<HttpConnection>(self, std::move(socket))->read();
      self->accept();
    });
  }

  std::shared_ptr<SessionHost> find(const std::string& id) {
    std::lock_guard lock(mutex);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::shared_ptr<SessionHost> create(const ModelInfo& info, const Config& config, std::uint64_t seed) {
    const std::string id = "s" + std::to_string(++counter);
    auto session = std::make_unique<Session>(id, info, config, seed);
    auto weak = std::weak_ptr<Impl>(shared_from_this());
    auto host = std::make_shared<SessionHost>(ioc, std::move(session), options.grace, [weak](const std::string& sid) {
      if (auto self = weak.lock()) {
        std::lock_guard lock(self->mutex);
        self->sessions.erase(sid);
      }
    });
    std::lock_guard lock(mutex);
    sessions[id] = host;
    return host;
  }

  struct HttpConnection : std::enable_shared_from_this<HttpConnection> {
    HttpConnection(std::shared_ptr<Impl> s, tcp::socket socket) : server(std::move(s)), stream(std::move(socket)) {}

    void read() {
      req = {};
      stream.expires_after(std::chrono::seconds(30));
      http::async_read(stream, buffer, req, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) return;
        self->handle();
      });
    }

    void handle() {
      const std::string target(req.target());
      if (websocket::is_upgrade(req)) {
        const std::string prefix = "/sessions/";
        auto host = target.rfind(prefix, 0) == 0 ? server->find(target.substr(prefix.size())) : nullptr;
        if (!host) return respond(http::status::not_found, error_body("unknown_session", "no session at " + target));
        stream.expires_never();
        std::make_shared<WsConnection>(std::move(stream))->accept(std::move(req), host);
        return;
      }
      if (req.method() == http::verb::get && target == "/models") {
        json models = json::array();
        for (const auto& m : catalog()) models.push_back(model_info_json(m));
        return respond(http::status::ok, models.dump());
      }
      if (req.method() == http::verb::post && target == "/sessions") return create_session();
      if (req.method() == http::verb::get && !server->options.static_dir.empty()) return serve_file(target);
      respond(http::status::not_found, error_body("not_found", "no route for " + target));
    }

    static std::string error_body(const std::string& code, const std::string& message) {
      return json{{"error", {{"type", "error"}, {"code", code}, {"message", message}}}}.dump();
    }

    void create_session() {
      json body;
      try {
        body = json::parse(req.body());
      } catch (const json::parse_error& e) {
        return respond(http::status::bad_request, error_body("bad_message", e.what()));
      }
      if (!body.is_object() || !body.contains("model") || !body["model"].is_string())
        return respond(http::status::bad_request, error_body("bad_message", "body needs a 'model' name"));
      const auto* info = find_model(body["model"].get<std::string>());
      if (!info)
        return respond(http::status::not_found,
                       error_body("unknown_model", "unknown model '" + body["model"].get<std::string>() +
                                                       "' (available: " + model_names() + ")"));
      try {
        Config config;
        if (body.contains("config"))
          for (const auto& [k, v] : body["config"].items()) config[k] = from_json(v);
        const auto host = server->create(*info, config, body.value("seed", std::uint64_t{0}));
        respond(http::status::created, json{{"id", host->id()}, {"model", info->name}, {"ws", "/sessions/" + host->id()}}.dump());
      } catch (const std::exception& e) {
        respond(http::status::bad_request, error_body("bad_config", e.what()));
      }
    }

    void serve_file(std::string target) {
      if (target.find("..") != std::string::npos) return respond(http::status::bad_request, error_body("bad_message", "bad path"));
      if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
      if (target == "/") target = "/index.html";
      const std::filesystem::path path = std::filesystem::path(server->options.static_dir) / target.substr(1);
      std::ifstream in(path, std::ios::binary);
      if (!in) return respond(http::status::not_found, error_body("not_found", "no file " + target));
      std::ostringstream os;
      os << in.rdbuf();
      const auto ext = path.extension().string();
      const char* type = ext == ".html" ? "text/html" : ext == ".js" ? "text/javascript" : ext == ".css" ? "text/css"
                         : ext == ".json" ? "application/json" : "application/octet-stream";
      respond(http::status::ok, os.str(), type);
    }

    void respond(http::status status, std::string body, const char* type = "application/json") {
      auto res = std::make_shared<http::response<http::string_body>>(status, req.version());
      res->set(http::field::content_type, type);
      res->set(http::field::access_control_allow_origin, "*");
      res->keep_alive(req.keep_alive());
      res->body() = std::move(body);
      res->prepare_payload();
      http::async_write(stream, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
        if (ec || !res->keep_alive()) {
          beast::error_code ignored;
          self->stream.socket().shutdown(tcp::socket::shutdown_send, ignored);
          return;
        }
        self->read();
      });
    }

    std::shared_ptr<Impl> server;
    beast::tcp_stream stream;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
  };

  ServerOptions options;
  asio::io_context ioc;
  tcp::acceptor acceptor;
  std::mutex mutex;
  std::map<std::string, std::shared_ptr<SessionHost>> sessions;
  std::atomic<std::uint64_t> counter{0};
  std::vector<std::thread> threads;
  bool started = false;
};

Server::Server(ServerOptions options) : impl_(std::make_shared<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

std::size_t Server::session_count() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->sessions.size();
}

void Server::start() {
  if (impl_->started) return;
  impl_->started = true;
  impl_->accept();
  for (std::size_t i = 0; i < std::max<std::size_t>(1, impl_->options.threads); ++i)
    impl_->threads.emplace_back([impl = impl_] { impl->ioc.run(); });
}

void Server::run() {
  impl_->started = true;
  impl_->accept();
  for (std::size_t i = 1; i < impl_->options.threads; ++i) impl_->threads.emplace_back([impl = impl_] { impl->ioc.run(); });
  impl_->ioc.run();
}

void Server::stop() {
  impl_->ioc.stop();
  for (auto& t : impl_->threads)
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  impl_->threads.clear();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->sessions.clear();
  }
}

}  // namespace abm::serve
