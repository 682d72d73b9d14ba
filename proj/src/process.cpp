#include "attishift/process.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "attishift/error.hpp"

namespace attishift {

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const char* tag) {
    std::string pattern = (std::filesystem::temp_directory_path() /
                           (std::string("attishift-") + tag + "-XXXXXX"))
                              .string();
    const int fd = ::mkstemp(pattern.data());
    if (fd < 0) throw Error("cannot create a temporary file");
    ::close(fd);
    path = pattern;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

std::vector<std::string> run_filter(const std::string& command,
                                    const std::vector<std::string>& input) {
  TempFile in("in");
  TempFile out("out");
  {
    std::ofstream f(in.path);
    for (std::string line : input) {
      std::replace(line.begin(), line.end(), '\n', ' ');
      f << line << '\n';
    }
  }
  const std::string cmd = "(" + command + ") < " + shell_quote(in.path.string()) + " > " +
                          shell_quote(out.path.string());
  const int status = std::system(cmd.c_str());
  if (status != 0) throw Error("command exited with status " + std::to_string(status) + ": " + command);
  std::ifstream f(out.path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

}  // namespace attishift
