#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace landsense {

/// Worker count: LANDSENSE_THREADS if set to a positive integer, else the hardware count.
inline std::size_t worker_count()
{
	if (const char* env = std::getenv("LANDSENSE_THREADS")) {
		try {
			const long v = std::stol(env);
			if (v > 0)
				return static_cast<std::size_t>(v);
		} catch (...) {
		}
	}
	return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n). Callers must write results to slot i only; output is then
/// independent of the worker count. The first exception thrown is rethrown here.
template <typename Body>
void parallel_for(std::size_t n, Body&& body, std::size_t workers = worker_count())
{
	workers = std::min(workers, n);
	if (workers <= 1) {
		for (std::size_t i = 0; i < n; ++i)
			body(i);
		return;
	}
	std::atomic<std::size_t> next{0};
	std::exception_ptr failure;
	std::mutex failure_mutex;
	const auto run = [&] {
		for (std::size_t i = next++; i < n; i = next++) {
			try {
				body(i);
			} catch (...) {
				std::lock_guard lock(failure_mutex);
				if (!failure)
					failure = std::current_exception();
				next = n;
			}
		}
	};
	std::vector<std::thread> pool;
	pool.reserve(workers - 1);
	for (std::size_t w = 1; w < workers; ++w)
		pool.emplace_back(run);
	run();
	for (auto& t : pool)
		t.join();
	if (failure)
		std::rethrow_exception(failure);
}

} // namespace landsense
