#pragma once

// Locale-independent number formatting and all-or-nothing file output.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace melink {

/// Shortest representation that round-trips to the same double; always
/// uses '.' as the decimal separator.
inline std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::size_t x) { return std::to_string(x); }
inline std::string format_number(int x) { return std::to_string(x); }

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      if (!first) os_ << ',';
      os_ << c;
      first = false;
    }
    os_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((os_ << (first ? "" : ",") << format_number(values), first = false), ...);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
};

/// Writes to a temporary file next to `path` and renames it into place on
/// commit(), so readers never observe a partial file. An empty path or "-"
/// goes to stdout.
class AtomicOutput {
 public:
  explicit AtomicOutput(std::string path) : path_(std::move(path)) {}
  AtomicOutput(const AtomicOutput&) = delete;
  AtomicOutput& operator=(const AtomicOutput&) = delete;

  std::ostream& stream() { return buf_; }

  void commit() {
    if (to_stdout()) {
      std::cout << buf_.str();
      std::cout.flush();
      return;
    }
    const std::filesystem::path target(path_);
    const std::filesystem::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot open output file: " + path_);
      out << buf_.str();
      out.flush();
      if (!out) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("failed writing output file: " + path_);
      }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("cannot move output into place: " + path_);
    }
  }

  bool to_stdout() const { return path_.empty() || path_ == "-"; }

 private:
  std::string path_;
  std::ostringstream buf_;
};

}  // namespace melink
