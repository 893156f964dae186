#ifndef DHBB_TOOLS_REVIEW_SERVER_H_
#define DHBB_TOOLS_REVIEW_SERVER_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "dhbb/review_api.h"

namespace httplib {
class Server;
}

namespace dhbb {

// HTTP front end for ReviewApi plus static serving of the review UI bundle.
class ReviewServer {
 public:
  ReviewServer(const ReviewApi &api, std::optional<std::filesystem::path> ui_dir);
  ~ReviewServer();

  // Port 0 picks a free port. Returns the bound port; throws Error
  // "PortInUse" when the port cannot be bound.
  int bind(const std::string &host, int port);
  // Blocks until stop() is called from another thread or a signal handler.
  void listen();
  void stop();

 private:
  const ReviewApi &api_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace dhbb

#endif  // DHBB_TOOLS_REVIEW_SERVER_H_
