#pragma once

#include <filesystem>
#include <memory>
#include <string>

namespace arcjet {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string static_dir;
  std::string default_model_path;
  std::filesystem::path initial_manifest;  // opened into the "default" session when set
  int process_threads = 1;
};

/// HTTP API over the pipeline. Sessions are selected by the X-Session request
/// header ("default" when absent) and hold an open frame source, a draft meta
/// and the last processing result. Each session runs one mutating request at
/// a time; others get 409 {"error":"busy"}.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds the listening socket and returns the port. Throws Error{IoFailure}.
  int bind();
  /// Blocks serving requests until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// bind() + run().
void serve(const ServiceOptions& options);

}  // namespace arcjet
