#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gapdilate {

/// Thrown when caller-supplied input violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a computation cannot produce a meaningful result.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
struct WarningSink {
  std::mutex mutex;
  std::function<void(const std::string&)> handler = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
};

inline WarningSink& warning_sink() {
  static WarningSink sink;
  return sink;
}
}  // namespace detail

/// Emits a non-fatal diagnostic through the installed handler (stderr by default).
inline void warn(const std::string& message) {
  auto& sink = detail::warning_sink();
  std::lock_guard lock(sink.mutex);
  if (sink.handler) sink.handler(message);
}

/// Installs a warning handler and returns the previous one.
inline std::function<void(const std::string&)> set_warning_handler(
    std::function<void(const std::string&)> handler) {
  auto& sink = detail::warning_sink();
  std::lock_guard lock(sink.mutex);
  return std::exchange(sink.handler, std::move(handler));
}

/// RAII guard that collects warnings for the lifetime of the object.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture()
      : previous_(set_warning_handler([this](const std::string& m) { messages_.push_back(m); })) {}
  ~ScopedWarningCapture() { set_warning_handler(std::move(previous_)); }
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }
  bool contains(const std::string& needle) const {
    for (const auto& m : messages_)
      if (m.find(needle) != std::string::npos) return true;
    return false;
  }

 private:
  std::vector<std::string> messages_;
  std::function<void(const std::string&)> previous_;
};

}  // namespace gapdilate
