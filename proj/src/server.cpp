#include "sbmltk/frontend.hpp"
#include "sbmltk/text.hpp"

#include "httplib.h"

namespace sbmltk {

void serve_http(const Service& service, const std::string& host, int port, const std::function<void(int)>& on_ready) {
  httplib::Server server;
  auto dispatch = [&service](const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    for (const auto& [k, v] : in.headers) req.headers.emplace(to_lower(k), v);
    req.body = in.body;
    auto payload = service.handle(req);
    out.status = payload.status;
    out.set_content(payload.body, payload.content_type);
  };
  server.Get(".*", dispatch);
  server.Post(".*", dispatch);
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host);
  } else if (!server.bind_to_port(host, port)) {
    throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
  }
  if (on_ready) on_ready(bound);
  server.listen_after_bind();
}

}  // namespace sbmltk
