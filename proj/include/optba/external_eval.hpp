#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <future>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "optba/objectives.hpp"
#include "optba/param_space.hpp"

namespace optba {

inline constexpr const char* kProtocolName = "optba-eval";
inline constexpr int kProtocolVersion = 1;

// Drives one long-lived child process over the newline-delimited JSON
// protocol. The child announces {"protocol":"optba-eval","version":1} on
// startup; each request {"id":N,"params":{...}} resolves to
// {"id":N,"fitness":F} or {"id":N,"error":"..."}. Writes are serialized,
// responses are demultiplexed by id, so any number of requests may be in
// flight at once.
class ExternalEvaluator final : public Evaluator {
public:
    ExternalEvaluator(std::vector<std::string> command, std::vector<std::string> param_names,
                      std::chrono::milliseconds timeout);
    ~ExternalEvaluator() override;

    ExternalEvaluator(const ExternalEvaluator&) = delete;
    ExternalEvaluator& operator=(const ExternalEvaluator&) = delete;

    // Blocks for the matching response; throws TimeoutError, ProtocolError,
    // ChildExited or ObjectiveFailure (remote error response).
    double evaluate(const ParamVector& params, std::uint64_t eval_id) override;

    // Sends without waiting; the caller resolves the future.
    std::future<double> submit(const ParamVector& params, std::uint64_t id);

private:
    void spawn(const std::vector<std::string>& command);
    void reader_loop();
    // Marks the stream unusable and fails every outstanding request.
    void fail_all(std::exception_ptr reason);
    void shutdown() noexcept;

    std::vector<std::string> param_names_;
    std::chrono::milliseconds timeout_;

    std::atomic<long> child_pid_{-1};
    int to_child_ = -1;
    std::FILE* from_child_ = nullptr;
    std::thread reader_;

    std::mutex write_mu_;
    std::mutex state_mu_;
    std::unordered_map<std::uint64_t, std::promise<double>> pending_;
    std::exception_ptr terminal_;
    std::promise<void> handshake_;
};

} // namespace optba
