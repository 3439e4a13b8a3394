#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "optba/errors.hpp"

namespace test_support {

namespace fs = std::filesystem;

inline std::string env_or_fail(const char* name) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') {
        throw optba::Error(std::string("environment variable ") + name +
                           " is not set; run through ctest or export it manually");
    }
    return value;
}

class TempDir {
public:
    TempDir() {
        std::string pattern = (fs::temp_directory_path() / "optba-test-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) {
            throw optba::IoError("mkdtemp failed");
        }
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

struct ProcResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs argv[0] with the given arguments, capturing stdout/stderr.
inline ProcResult run_process(const std::vector<std::string>& argv) {
    TempDir scratch;
    const fs::path out_path = scratch.path() / "stdout";
    const fs::path err_path = scratch.path() / "stderr";
    std::fflush(stdout); // keep buffered output out of the forked child
    std::fflush(stderr);
    const pid_t pid = ::fork();
    if (pid < 0) {
        throw optba::IoError("fork failed");
    }
    if (pid == 0) {
        if (std::freopen(out_path.c_str(), "w", stdout) == nullptr ||
            std::freopen(err_path.c_str(), "w", stderr) == nullptr) {
            ::_exit(125);
        }
        std::vector<char*> args;
        args.reserve(argv.size() + 1);
        for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
        args.push_back(nullptr);
        ::execvp(args[0], args.data());
        ::_exit(127);
    }
    int status = 0;
    ::waitpid(pid, &status, 0);
    ProcResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

} // namespace test_support
