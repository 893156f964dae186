#include "review_server.h"

#include <algorithm>
#include <cctype>

#include "dhbb/error.h"
#include "httplib.h"

namespace dhbb {

namespace {

ReviewRequest translate(const httplib::Request &req) {
  ReviewRequest out;
  out.method = req.method;
  out.path = req.path;
  for (const auto &[k, v] : req.params) out.query.emplace(k, v);
  for (const auto &[k, v] : req.headers) {
    std::string name = k;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out.headers.emplace(std::move(name), v);
  }
  out.body = req.body;
  return out;
}

}  // namespace

ReviewServer::ReviewServer(const ReviewApi &api, std::optional<std::filesystem::path> ui_dir)
    : api_(api), server_(std::make_unique<httplib::Server>()) {
  auto handler = [this](const httplib::Request &req, httplib::Response &res) {
    ReviewResponse r = api_.handle(translate(req));
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Get(R"(/api/.*)", handler);
  server_->Post(R"(/api/.*)", handler);
  server_->Put(R"(/api/.*)", handler);
  server_->Delete(R"(/api/.*)", handler);
  if (ui_dir && !server_->set_mount_point("/", ui_dir->string())) {
    throw Error("UiDirNotFound", ui_dir->string());
  }
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string &host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("PortInUse", host + ":" + std::to_string(port));
  return bound;
}

void ReviewServer::listen() { server_->listen_after_bind(); }

void ReviewServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

}  // namespace dhbb
