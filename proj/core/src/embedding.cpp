#include "pixelaudit/embedding.hpp"

#include <csignal>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include "pixelaudit/error.hpp"
#include "pixelaudit/imaging.hpp"

namespace pixelaudit {

std::vector<double> DownscaleEmbedding::embed(const ImageRecord& image) {
  const LumaPlane thumb = resize(to_luma(image, LumaFormula::kHsp), 8, 8, ResizeMethod::kBilinear);
  std::vector<double> v = thumb.values;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double norm = 0.0;
  for (double& x : v) {
    x -= mean;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  if (norm < 1e-9) {
    std::fill(v.begin(), v.end(), 0.0);
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

ProcessEmbedding::ProcessEmbedding(std::string command, int dimension)
    : command_(std::move(command)), dimension_(dimension) {
  start();
}

ProcessEmbedding::~ProcessEmbedding() { stop(); }

void ProcessEmbedding::start() {
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0) throw Error("pipe() failed");
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw Error("pipe() failed");
  }
  const pid_t pid = fork();
  if (pid < 0) throw Error("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  // A dead child must surface as ProviderFailure, not SIGPIPE.
  std::signal(SIGPIPE, SIG_IGN);
}

void ProcessEmbedding::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    int status = 0;
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }
}

std::vector<double> ProcessEmbedding::embed(const ImageRecord& image) {
  if (image.source_path.empty()) throw ProviderFailure(image.id, "image has no source path");
  if (to_child_ < 0) throw ProviderFailure(image.id, "provider process is not running");
  const std::string request = image.source_path + "\n";
  std::size_t written = 0;
  while (written < request.size()) {
    const ssize_t n = write(to_child_, request.data() + written, request.size() - written);
    if (n <= 0) throw ProviderFailure(image.id, "cannot write to provider process");
    written += static_cast<std::size_t>(n);
  }

  std::string line;
  while (true) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      line = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      break;
    }
    char buf[4096];
    const ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0) throw ProviderFailure(image.id, "provider process closed its output");
    pending_.append(buf, static_cast<std::size_t>(n));
  }

  std::vector<double> values;
  std::istringstream in(line);
  std::string token;
  while (in >> token) {
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ProviderFailure(image.id, "non-numeric reply '" + token + "'");
    }
  }
  if (values.empty()) throw ProviderFailure(image.id, "empty reply");
  if (dimension_ == 0) dimension_ = static_cast<int>(values.size());
  if (static_cast<int>(values.size()) != dimension_) {
    throw ProviderFailure(image.id, "expected " + std::to_string(dimension_) + " values, got " +
                                        std::to_string(values.size()));
  }
  return values;
}

namespace {

std::map<std::string, ProviderFactory>& registry() {
  static std::map<std::string, ProviderFactory> factories = {
      {"downscale", [](const std::string&) { return std::make_unique<DownscaleEmbedding>(); }},
      {"process",
       [](const std::string& arg) -> std::unique_ptr<EmbeddingProvider> {
         if (arg.empty()) throw ConfigError("process provider needs a command: process:<cmd>");
         return std::make_unique<ProcessEmbedding>(arg);
       }},
  };
  return factories;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void register_provider(const std::string& name, ProviderFactory factory) {
  std::lock_guard lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  ProviderFactory factory;
  {
    std::lock_guard lock(registry_mutex());
    const auto it = registry().find(name);
    if (it == registry().end()) throw ConfigError("unknown embedding provider '" + name + "'");
    factory = it->second;
  }
  return factory(arg);
}

}  // namespace pixelaudit
