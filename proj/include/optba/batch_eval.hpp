#pragma once

#include <cstddef>
#include <functional>
#include <memory>

namespace optba {

// Runs `count` independent work items, invoking fn exactly once per index.
// fn must not throw; callers capture errors per slot.
class BatchDispatcher {
public:
    virtual ~BatchDispatcher() = default;
    virtual void run(std::size_t count, const std::function<void(std::size_t)>& fn) const = 0;
    virtual int workers() const = 0;
};

// Reference implementation; the parallel dispatcher must match its results
// slot for slot.
class SerialDispatcher final : public BatchDispatcher {
public:
    void run(std::size_t count, const std::function<void(std::size_t)>& fn) const override;
    int workers() const override { return 1; }
};

class OmpDispatcher final : public BatchDispatcher {
public:
    explicit OmpDispatcher(int workers);
    void run(std::size_t count, const std::function<void(std::size_t)>& fn) const override;
    int workers() const override { return workers_; }

private:
    int workers_;
};

std::unique_ptr<BatchDispatcher> make_dispatcher(int workers);

} // namespace optba
