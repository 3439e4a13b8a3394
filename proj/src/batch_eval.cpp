#include "optba/batch_eval.hpp"

#include <cstdint>

#include "optba/errors.hpp"

namespace optba {

void SerialDispatcher::run(std::size_t count, const std::function<void(std::size_t)>& fn) const {
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

OmpDispatcher::OmpDispatcher(int workers) : workers_(workers) {
    if (workers_ < 1) {
        throw InvalidConfig("workers must be >= 1");
    }
}

void OmpDispatcher::run(std::size_t count, const std::function<void(std::size_t)>& fn) const {
#ifdef _OPENMP
    const std::int64_t n = static_cast<std::int64_t>(count);
#pragma omp parallel for num_threads(workers_) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        fn(static_cast<std::size_t>(i));
    }
#else
    for (std::size_t i = 0; i < count; ++i) fn(i);
#endif
}

std::unique_ptr<BatchDispatcher> make_dispatcher(int workers) {
    if (workers <= 1) return std::make_unique<SerialDispatcher>();
    return std::make_unique<OmpDispatcher>(workers);
}

} // namespace optba
