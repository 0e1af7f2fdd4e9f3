#ifndef COPGUIDE_SERVER_HPP
#define COPGUIDE_SERVER_HPP

#include <atomic>
#include <memory>
#include <string>

#include "copguide/feedback.hpp"
#include "copguide/refpath.hpp"
#include "copguide/types.hpp"

namespace copguide {

// TCP line-protocol front end for the feedback engine. One session per
// connection, each with a fresh engine. The client streams fused-CoP
// samples as `t,x,y` lines; every emitted command is written back as an
// 8-byte frame. A malformed line gets a text reply `ERR parse <lineno>`
// (`ERR order <lineno>` for a non-monotonic timestamp) and three
// consecutive bad lines close the session.
class LiveServer {
 public:
  // listen: "host:port" or ":port"; port 0 picks an ephemeral port.
  // Throws InputError when the address cannot be bound.
  LiveServer(const std::string& listen, std::shared_ptr<const ReferencePath> path,
             FeedbackConfig config);
  ~LiveServer();

  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  int port() const { return port_; }

  // Accept loop; returns after stop().
  void run();
  void stop();

 private:
  void handle_client(int fd);

  std::shared_ptr<const ReferencePath> path_;
  FeedbackConfig config_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace copguide

#endif
