#include "optba/external_eval.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <utility>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "optba/errors.hpp"

namespace optba {

namespace {

using nlohmann::json;

void write_all(int fd, const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw ChildExited(std::string("writing to evaluator child failed: ") +
                              std::strerror(errno));
        }
        done += static_cast<std::size_t>(n);
    }
}

} // namespace

ExternalEvaluator::ExternalEvaluator(std::vector<std::string> command,
                                     std::vector<std::string> param_names,
                                     std::chrono::milliseconds timeout)
    : param_names_(std::move(param_names)), timeout_(timeout) {
    if (command.empty()) {
        throw ConfigError("objective.command: external objective requires a non-empty command");
    }
    std::signal(SIGPIPE, SIG_IGN);
    spawn(command);
    reader_ = std::thread([this] { reader_loop(); });
    auto ready = handshake_.get_future();
    try {
        if (ready.wait_for(timeout_) != std::future_status::ready) {
            throw TimeoutError("evaluator child did not complete the handshake within " +
                               std::to_string(timeout_.count()) + "ms");
        }
        ready.get();
    } catch (...) {
        shutdown();
        throw;
    }
}

ExternalEvaluator::~ExternalEvaluator() { shutdown(); }

void ExternalEvaluator::spawn(const std::vector<std::string>& command) {
    int to_child[2];
    int from_child[2];
    if (::pipe(to_child) != 0 || ::pipe(from_child) != 0) {
        throw IoError(std::string("pipe failed: ") + std::strerror(errno));
    }
    const pid_t pid = ::fork();
    if (pid < 0) {
        throw IoError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::dup2(to_child[0], STDIN_FILENO);
        ::dup2(from_child[1], STDOUT_FILENO);
        ::close(to_child[0]);
        ::close(to_child[1]);
        ::close(from_child[0]);
        ::close(from_child[1]);
        std::vector<char*> argv;
        argv.reserve(command.size() + 1);
        for (const auto& arg : command) argv.push_back(const_cast<char*>(arg.c_str()));
        argv.push_back(nullptr);
        ::execvp(argv[0], argv.data());
        std::fprintf(stderr, "exec %s failed: %s\n", argv[0], std::strerror(errno));
        ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    child_pid_.store(pid);
    to_child_ = to_child[1];
    from_child_ = ::fdopen(from_child[0], "r");
    if (from_child_ == nullptr) {
        throw IoError("fdopen on child stdout failed");
    }
}

void ExternalEvaluator::reader_loop() {
    char* line = nullptr;
    std::size_t cap = 0;
    bool saw_handshake = false;
    auto terminate_stream = [&](std::exception_ptr err) {
        if (!saw_handshake) {
            saw_handshake = true;
            handshake_.set_exception(err);
        }
        fail_all(err);
    };
    while (true) {
        errno = 0;
        const ssize_t n = ::getline(&line, &cap, from_child_);
        if (n < 0) {
            int status = 0;
            std::string detail = "evaluator child closed its output stream";
            const long pid = child_pid_.load();
            if (pid > 0 && ::waitpid(static_cast<pid_t>(pid), &status, WNOHANG) > 0) {
                child_pid_.store(-1);
                if (WIFEXITED(status)) {
                    detail += " (exit status " + std::to_string(WEXITSTATUS(status)) + ")";
                } else if (WIFSIGNALED(status)) {
                    detail += " (killed by signal " + std::to_string(WTERMSIG(status)) + ")";
                }
            }
            terminate_stream(std::make_exception_ptr(ChildExited(detail)));
            break;
        }
        std::string text(line, static_cast<std::size_t>(n));
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) text.pop_back();
        json parsed = json::parse(text, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            terminate_stream(std::make_exception_ptr(
                ProtocolError("evaluator child wrote a non-JSON line: " + text)));
            break;
        }
        if (!saw_handshake) {
            if (parsed.value("protocol", "") != kProtocolName || !parsed.contains("version") ||
                !parsed["version"].is_number_integer() ||
                parsed["version"].get<int>() != kProtocolVersion) {
                terminate_stream(std::make_exception_ptr(
                    ProtocolError("evaluator child sent an invalid handshake: " + text)));
                break;
            }
            saw_handshake = true;
            handshake_.set_value();
            continue;
        }
        if (!parsed.contains("id") || !parsed["id"].is_number_unsigned()) {
            terminate_stream(std::make_exception_ptr(
                ProtocolError("evaluator response lacks an unsigned id: " + text)));
            break;
        }
        const std::uint64_t id = parsed["id"].get<std::uint64_t>();
        std::promise<double> promise;
        bool unknown_id = false;
        {
            std::lock_guard<std::mutex> lock(state_mu_);
            auto it = pending_.find(id);
            if (it == pending_.end()) {
                unknown_id = true;
            } else {
                promise = std::move(it->second);
                pending_.erase(it);
            }
        }
        if (unknown_id) {
            terminate_stream(std::make_exception_ptr(ProtocolError(
                "evaluator response id " + std::to_string(id) +
                " does not match an outstanding request")));
            break;
        }
        if (parsed.contains("error")) {
            const std::string message =
                parsed["error"].is_string() ? parsed["error"].get<std::string>() : text;
            promise.set_exception(std::make_exception_ptr(
                ObjectiveFailure("evaluator child reported: " + message)));
            continue;
        }
        if (!parsed.contains("fitness") || !parsed["fitness"].is_number() ||
            !std::isfinite(parsed["fitness"].get<double>())) {
            auto err = std::make_exception_ptr(
                ProtocolError("evaluator response fitness is not a finite number: " + text));
            promise.set_exception(err);
            fail_all(err);
            break;
        }
        promise.set_value(parsed["fitness"].get<double>());
    }
    std::free(line);
}

void ExternalEvaluator::fail_all(std::exception_ptr reason) {
    std::unordered_map<std::uint64_t, std::promise<double>> orphans;
    std::exception_ptr cause;
    {
        std::lock_guard<std::mutex> lock(state_mu_);
        if (!terminal_) terminal_ = reason;
        cause = terminal_;
        orphans.swap(pending_);
    }
    for (auto& entry : orphans) {
        entry.second.set_exception(cause);
    }
}

std::future<double> ExternalEvaluator::submit(const ParamVector& params, std::uint64_t id) {
    if (params.size() != param_names_.size()) {
        throw DimensionMismatch("external request has " + std::to_string(params.size()) +
                                " params; space has " + std::to_string(param_names_.size()));
    }
    std::future<double> future;
    {
        std::lock_guard<std::mutex> lock(state_mu_);
        if (terminal_) std::rethrow_exception(terminal_);
        auto [it, inserted] = pending_.emplace(id, std::promise<double>());
        if (!inserted) {
            throw ProtocolError("request id " + std::to_string(id) + " is already outstanding");
        }
        future = it->second.get_future();
    }
    json request;
    request["id"] = id;
    json obj = json::object();
    for (std::size_t i = 0; i < params.size(); ++i) {
        obj[param_names_[i]] = params[i];
    }
    request["params"] = obj;
    const std::string wire = request.dump() + "\n";
    try {
        std::lock_guard<std::mutex> lock(write_mu_);
        write_all(to_child_, wire);
    } catch (...) {
        std::lock_guard<std::mutex> lock(state_mu_);
        pending_.erase(id);
        throw;
    }
    return future;
}

double ExternalEvaluator::evaluate(const ParamVector& params, std::uint64_t eval_id) {
    auto future = submit(params, eval_id);
    if (future.wait_for(timeout_) != std::future_status::ready) {
        bool timed_out = false;
        {
            std::lock_guard<std::mutex> lock(state_mu_);
            auto it = pending_.find(eval_id);
            if (it != pending_.end()) {
                pending_.erase(it);
                if (!terminal_) {
                    terminal_ = std::make_exception_ptr(TimeoutError(
                        "evaluation " + std::to_string(eval_id) + " timed out after " +
                        std::to_string(timeout_.count()) + "ms"));
                }
                timed_out = true;
            }
        }
        if (timed_out) {
            const long pid = child_pid_.load();
            if (pid > 0) ::kill(static_cast<pid_t>(pid), SIGKILL);
            throw TimeoutError("evaluation " + std::to_string(eval_id) + " timed out after " +
                               std::to_string(timeout_.count()) + "ms");
        }
        // the response landed between the deadline and the lock; fall through
    }
    return future.get();
}

void ExternalEvaluator::shutdown() noexcept {
    if (to_child_ >= 0) {
        ::close(to_child_);
        to_child_ = -1;
    }
    const long pid = child_pid_.exchange(-1);
    if (pid > 0) {
        int status = 0;
        bool reaped = false;
        for (int i = 0; i < 200; ++i) {
            const pid_t r = ::waitpid(static_cast<pid_t>(pid), &status, WNOHANG);
            if (r != 0) {
                reaped = true;
                break;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
        if (!reaped) {
            ::kill(static_cast<pid_t>(pid), SIGKILL);
            ::waitpid(static_cast<pid_t>(pid), &status, 0);
        }
    }
    if (reader_.joinable()) reader_.join();
    if (from_child_ != nullptr) {
        std::fclose(from_child_);
        from_child_ = nullptr;
    }
}

} // namespace optba
