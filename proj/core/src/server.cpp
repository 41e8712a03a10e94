#include "arreg/server.hpp"

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <fstream>
#include <iterator>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include "arreg/error.hpp"
#include "arreg/protocol.hpp"

namespace arreg {

namespace {

std::string_view to_std(boost::beast::string_view s) { return {s.data(), s.size()}; }

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using asio::awaitable;
using asio::use_awaitable;

constexpr std::string_view kSessionPath = "/session";

const char* mime_type(const std::filesystem::path& p) {
  const std::string ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js" || ext == ".mjs") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".glb") return "model/gltf-binary";
  if (ext == ".png") return "image/png";
  if (ext == ".wasm") return "application/wasm";
  return "application/octet-stream";
}

// Maps a request target to a file below `root`, or nullopt for anything
// that tries to leave it.
std::optional<std::filesystem::path> resolve_static(const std::filesystem::path& root, std::string_view target) {
  target = target.substr(0, target.find('?'));
  if (target.empty() || target.front() != '/') return std::nullopt;
  std::string rel(target.substr(1));
  if (rel.empty() || rel.back() == '/') rel += "index.html";
  const std::filesystem::path p(rel);
  for (const auto& part : p) {
    if (part == "..") return std::nullopt;
  }
  return root / p;
}

http::response<http::string_body> static_response(const std::filesystem::path& root,
                                                  const http::request<http::string_body>& req) {
  http::response<http::string_body> res;
  res.version(req.version());
  res.keep_alive(false);
  const auto path = resolve_static(root, to_std(req.target()));
  std::ifstream in;
  if (req.method() == http::verb::get && path) in.open(*path, std::ios::binary);
  if (in.is_open() && in) {
    res.result(http::status::ok);
    res.set(http::field::content_type, mime_type(*path));
    res.body().assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  } else {
    res.result(http::status::not_found);
    res.set(http::field::content_type, "text/plain");
    res.body() = "not found\n";
  }
  res.prepare_payload();
  return res;
}

}  // namespace

struct Server::Impl {
  ServerConfig cfg;
  asio::io_context io;
  std::optional<tcp::acceptor> ws_acceptor;
  std::optional<tcp::acceptor> tcp_acceptor;
  std::optional<asio::signal_set> signals;
  std::vector<std::thread> threads;
  protocol::ServiceContext ctx;
  std::atomic<std::uint64_t> next_session{1};

  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;

  explicit Impl(ServerConfig c) : cfg(std::move(c)) {
    if (cfg.record_dir.empty()) cfg.record_dir = cfg.asset_dir / "recordings";
    ctx.models = std::make_shared<protocol::ModelLibrary>(cfg.asset_dir);
    ctx.record_dir = cfg.record_dir;
  }

  tcp::acceptor bind(std::uint16_t port) {
    boost::system::error_code ec;
    const auto addr = asio::ip::make_address(cfg.bind_addr, ec);
    if (ec) throw Error(ErrorCode::Io, "bad bind address " + cfg.bind_addr + ": " + ec.message());
    const tcp::endpoint ep(addr, port);
    tcp::acceptor a(io);
    a.open(ep.protocol(), ec);
    if (!ec) a.set_option(tcp::acceptor::reuse_address(true), ec);
    if (!ec) a.bind(ep, ec);
    if (!ec) a.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error(ErrorCode::Io, fmt::format("cannot bind {}:{}: {}", cfg.bind_addr, port, ec.message()));
    return a;
  }

  std::string new_session_id() { return fmt::format("s{}", next_session.fetch_add(1)); }

  awaitable<void> accept_loop(tcp::acceptor& acceptor, bool websocket_port) {
    for (;;) {
      tcp::socket sock(io);
      try {
        sock = co_await acceptor.async_accept(use_awaitable);
      } catch (const boost::system::system_error& e) {
        if (e.code() == asio::error::operation_aborted || !acceptor.is_open()) co_return;
        continue;
      }
      sock.set_option(tcp::no_delay(true));
      if (websocket_port) {
        asio::co_spawn(io, http_session(std::move(sock)), asio::detached);
      } else {
        asio::co_spawn(io, line_session(std::move(sock)), asio::detached);
      }
    }
  }

  // Newline-delimited JSON: one message per line each way.
  awaitable<void> line_session(tcp::socket sock) {
    protocol::SessionHandler handler(ctx, new_session_id());
    std::string buf;
    bool oversized = false;
    try {
      while (!handler.closed()) {
        const std::size_t n = co_await asio::async_read_until(
            sock, asio::dynamic_buffer(buf, protocol::kMaxMessageBytes), '\n', use_awaitable);
        std::string line = buf.substr(0, n - 1);
        buf.erase(0, n);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string out;
        for (const auto& reply : handler.handle(line)) {
          out += reply;
          out += '\n';
        }
        if (!out.empty()) co_await asio::async_write(sock, asio::buffer(out), use_awaitable);
      }
    } catch (const boost::system::system_error& e) {
      oversized = e.code() == asio::error::not_found;
    }
    if (oversized) {
      const std::string err =
          protocol::error_message(protocol::WireError::ModelLoad, "message exceeds the size limit", true) + "\n";
      try {
        co_await asio::async_write(sock, asio::buffer(err), use_awaitable);
      } catch (const boost::system::system_error&) {
      }
    }
    boost::system::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
    sock.close(ec);
  }

  // HTTP on the web-socket port: upgrades at /session, static files otherwise.
  awaitable<void> http_session(tcp::socket sock) {
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    try {
      co_await http::async_read(sock, buffer, req, use_awaitable);
    } catch (const boost::system::system_error&) {
      co_return;
    }
    if (websocket::is_upgrade(req) && to_std(req.target()) == kSessionPath) {
      co_await websocket_session(websocket::stream<tcp::socket>(std::move(sock)), std::move(req));
      co_return;
    }

    http::response<http::string_body> res = static_response(cfg.asset_dir, req);
    try {
      co_await http::async_write(sock, res, use_awaitable);
    } catch (const boost::system::system_error&) {
    }
    boost::system::error_code ec;
    sock.shutdown(tcp::socket::shutdown_both, ec);
  }

  awaitable<void> websocket_session(websocket::stream<tcp::socket> ws, http::request<http::string_body> req) {
    ws.read_message_max(protocol::kMaxMessageBytes);
    protocol::SessionHandler handler(ctx, new_session_id());
    bool oversized = false;
    try {
      co_await ws.async_accept(req, use_awaitable);
      ws.text(true);
      while (!handler.closed()) {
        beast::flat_buffer msg;
        co_await ws.async_read(msg, use_awaitable);
        for (const auto& reply : handler.handle(beast::buffers_to_string(msg.data()))) {
          co_await ws.async_write(asio::buffer(reply), use_awaitable);
        }
      }
      co_await ws.async_close(websocket::close_code::policy_error, use_awaitable);
    } catch (const boost::system::system_error& e) {
      oversized = e.code() == websocket::error::message_too_big;
    }
    if (oversized) {
      const std::string err =
          protocol::error_message(protocol::WireError::ModelLoad, "message exceeds the size limit", true);
      try {
        co_await ws.async_write(asio::buffer(err), use_awaitable);
        co_await ws.async_close(websocket::close_code::too_big, use_awaitable);
      } catch (const boost::system::system_error&) {
      }
    }
  }

  void stop() {
    {
      std::lock_guard lock(mu);
      if (stopped) return;
      stopped = true;
    }
    io.stop();
    cv.notify_all();
  }

  void join() {
    for (auto& t : threads) {
      if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
    }
  }
};

Server::Server(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}

Server::~Server() {
  impl_->stop();
  impl_->join();
}

void Server::start() {
  auto& im = *impl_;
  im.ws_acceptor.emplace(im.bind(im.cfg.ws_port));
  im.tcp_acceptor.emplace(im.bind(im.cfg.tcp_port));
  asio::co_spawn(im.io, im.accept_loop(*im.ws_acceptor, true), asio::detached);
  asio::co_spawn(im.io, im.accept_loop(*im.tcp_acceptor, false), asio::detached);

  const unsigned n = im.cfg.threads ? im.cfg.threads : std::max(2u, std::thread::hardware_concurrency());
  for (unsigned i = 0; i < n; ++i) im.threads.emplace_back([&im] { im.io.run(); });
}

void Server::run_until_signal() {
  auto& im = *impl_;
  im.signals.emplace(im.io, SIGINT, SIGTERM);
  im.signals->async_wait([&im](const boost::system::error_code& ec, int) {
    if (!ec) im.stop();
  });
  std::unique_lock lock(im.mu);
  im.cv.wait(lock, [&im] { return im.stopped; });
  lock.unlock();
  im.join();
}

void Server::stop() {
  impl_->stop();
  impl_->join();
}

std::uint16_t Server::ws_port() const noexcept {
  return impl_->ws_acceptor ? impl_->ws_acceptor->local_endpoint().port() : 0;
}

std::uint16_t Server::tcp_port() const noexcept {
  return impl_->tcp_acceptor ? impl_->tcp_acceptor->local_endpoint().port() : 0;
}

}  // namespace arreg
