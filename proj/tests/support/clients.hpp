#pragma once

// Blocking test clients for the two transports.

#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace arreg::testing {

class LineClient {
 public:
  explicit LineClient(std::uint16_t port) : sock_(io_) {
    sock_.connect({boost::asio::ip::make_address("127.0.0.1"), port});
  }

  void send(const std::string& line) { boost::asio::write(sock_, boost::asio::buffer(line + "\n")); }

  /// Next reply line without the newline; empty string on EOF.
  std::string recv() {
    boost::system::error_code ec;
    const std::size_t n = boost::asio::read_until(sock_, boost::asio::dynamic_buffer(buf_), '\n', ec);
    if (ec) return {};
    std::string line = buf_.substr(0, n - 1);
    buf_.erase(0, n);
    return line;
  }

  /// True once the peer has closed the connection.
  bool at_eof() {
    if (!buf_.empty()) return false;
    boost::system::error_code ec;
    char c;
    const std::size_t n = sock_.read_some(boost::asio::buffer(&c, 1), ec);
    if (n == 1) buf_.push_back(c);
    return ec == boost::asio::error::eof || ec == boost::asio::error::connection_reset;
  }

 private:
  boost::asio::io_context io_;
  boost::asio::ip::tcp::socket sock_;
  std::string buf_;
};

class WsClient {
 public:
  explicit WsClient(std::uint16_t port, const std::string& path = "/session") : ws_(io_) {
    ws_.next_layer().connect({boost::asio::ip::make_address("127.0.0.1"), port});
    ws_.handshake("127.0.0.1:" + std::to_string(port), path);
    ws_.text(true);
  }

  void send(const std::string& msg) { ws_.write(boost::asio::buffer(msg)); }

  std::string recv() {
    boost::beast::flat_buffer b;
    boost::system::error_code ec;
    ws_.read(b, ec);
    if (ec) return {};
    return boost::beast::buffers_to_string(b.data());
  }

 private:
  boost::asio::io_context io_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
};

}  // namespace arreg::testing
