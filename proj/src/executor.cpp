#include "hsolve/executor.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>

namespace hsolve {

void Completion::wait() {
  if (!state_) return;
  std::unique_lock lock(state_->mutex);
  state_->done_cv.wait(lock, [&] { return state_->done; });
  if (state_->error) std::rethrow_exception(state_->error);
}

namespace detail {

WorkerPool::WorkerPool(std::size_t workers, double slowdown)
    : slowdown_(slowdown) {
  if (workers == 0) throw ConfigError("executor needs at least one worker");
  threads_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) {
    threads_.emplace_back([this] { worker_loop(); });
  }
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  work_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

std::shared_ptr<TaskState> WorkerPool::submit(
    std::size_t begin, std::size_t end, std::function<void(std::size_t)> body) {
  auto state = std::make_shared<TaskState>();
  state->body = std::move(body);
  state->end = end;
  state->next = begin;
  state->remaining = end - begin;
  state->chunk =
      std::max<std::size_t>(1, (end - begin + 4 * workers() - 1) / (4 * workers()));
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(state);
  }
  work_cv_.notify_all();
  return state;
}

void WorkerPool::run_chunk(TaskState& task, std::size_t lo, std::size_t hi,
                           double& owed_stall) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  try {
    for (std::size_t i = lo; i < hi; ++i) task.body(i);
  } catch (...) {
    std::lock_guard lock(task.mutex);
    if (!task.error) task.error = std::current_exception();
  }
  if (slowdown_ > 1.0) {
    // Sleeping (not spinning) models a slower device: while this executor is
    // "busy" the host core stays free for the other executor, so throttled
    // runs overlap even on a single-core machine. The OS timer can oversleep
    // by milliseconds, so stall debt is paid in slices and measured oversleep
    // is credited back; long-run throughput then matches the factor.
    const auto t1 = Clock::now();
    owed_stall += std::chrono::duration<double>(t1 - t0).count() *
                  (slowdown_ - 1.0);
    constexpr double kStallSlice = 0.003;  // seconds
    if (owed_stall >= kStallSlice) {
      std::this_thread::sleep_for(std::chrono::duration<double>(owed_stall));
      owed_stall -= std::chrono::duration<double>(Clock::now() - t1).count();
    }
  }
}

void WorkerPool::worker_loop() {
  double owed_stall = 0.0;
  std::unique_lock lock(mutex_);
  for (;;) {
    work_cv_.wait(lock, [&] { return stop_ || !queue_.empty(); });
    if (stop_) return;
    auto task = queue_.front();
    if (task->next >= task->end) {
      // Fully claimed but not finished; task sets run strictly in order, so
      // wait for the stragglers before looking at the next set.
      work_cv_.wait(lock);
      continue;
    }
    const std::size_t lo = task->next;
    const std::size_t hi = std::min(task->end, lo + task->chunk);
    task->next = hi;
    lock.unlock();
    run_chunk(*task, lo, hi, owed_stall);
    lock.lock();
    task->remaining -= hi - lo;
    if (task->remaining == 0) {
      if (!queue_.empty() && queue_.front() == task) queue_.pop_front();
      {
        std::lock_guard task_lock(task->mutex);
        task->done = true;
      }
      task->done_cv.notify_all();
      work_cv_.notify_all();
    }
  }
}

}  // namespace detail

Runtime::Runtime(std::size_t workers_a, std::size_t workers_b,
                 double slowdown_a, double slowdown_b, bool audit)
    : pool_a_(std::make_unique<detail::WorkerPool>(workers_a, slowdown_a)),
      pool_b_(std::make_unique<detail::WorkerPool>(workers_b, slowdown_b)),
      audit_(audit) {
  if (!(slowdown_a >= 1.0) || !(slowdown_b >= 1.0)) {
    throw ConfigError("slowdown factors must be >= 1.0");
  }
}

Runtime::Runtime(const SolverConfig& cfg)
    : Runtime(cfg.workers_a, cfg.workers_b, cfg.slowdown_a, cfg.slowdown_b) {}

Runtime::~Runtime() {
  for (auto& c : outstanding_) {
    try {
      c.wait();
    } catch (...) {
      // destructor must not throw; errors were the caller's to collect
    }
  }
}

ObjectId Runtime::register_object(std::string name, std::size_t index_count,
                                  std::size_t elems_per_index,
                                  std::size_t logical_n, double* space_a,
                                  double* space_b, bool resident_a,
                                  bool resident_b) {
  ObjectInfo info;
  info.name = std::move(name);
  info.index_count = index_count;
  info.elems_per_index = elems_per_index;
  info.logical_n = logical_n;
  info.space[0] = space_a;
  info.space[1] = space_b;
  info.resident[0].assign(index_count, resident_a ? 1 : 0);
  info.resident[1].assign(index_count, resident_b ? 1 : 0);
  objects_.push_back(std::move(info));
  return static_cast<ObjectId>(objects_.size() - 1);
}

Runtime::ObjectInfo& Runtime::object_at(ObjectId id) {
  if (id >= objects_.size()) throw ConfigError("unknown object id");
  return objects_[id];
}

const Runtime::ObjectInfo& Runtime::object_at(ObjectId id) const {
  if (id >= objects_.size()) throw ConfigError("unknown object id");
  return objects_[id];
}

void Runtime::require_resident(const ObjectInfo& info, ExecutorId e,
                               std::size_t lo, std::size_t hi,
                               const char* what) const {
  if (hi > info.index_count || lo > hi) {
    throw ConfigError("region [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + ") out of range for object " +
                      info.name);
  }
  const auto& map = info.resident[static_cast<std::size_t>(e)];
  for (std::size_t i = lo; i < hi; ++i) {
    if (!map[i]) {
      throw ResidencyError(std::string(what) + ": object " + info.name +
                           " index " + std::to_string(i) +
                           " is not resident on executor " + to_string(e));
    }
  }
}

std::uint64_t Runtime::logical_bytes(const ObjectInfo& info, std::size_t lo,
                                     std::size_t hi) const {
  if (info.logical_n == 0) {
    return static_cast<std::uint64_t>(hi - lo) * info.elems_per_index * 8;
  }
  const std::size_t lo_elem = std::min(lo * info.elems_per_index, info.logical_n);
  const std::size_t hi_elem = std::min(hi * info.elems_per_index, info.logical_n);
  return static_cast<std::uint64_t>(hi_elem - lo_elem) * 8;
}

Completion Runtime::submit(ExecutorId e, TaskSet ts) {
  if (audit_) {
    for (const auto& region : ts.regions) {
      require_resident(object_at(region.object), e, region.lo, region.hi,
                       ts.kernel);
    }
  }
  if (ts.end <= ts.begin) return Completion{};
  // Writes make the other space's copy stale.
  for (const auto& region : ts.regions) {
    if (region.access != Access::read_write) continue;
    auto& stale = object_at(region.object)
                      .resident[static_cast<std::size_t>(other(e))];
    for (std::size_t i = region.lo; i < region.hi; ++i) stale[i] = 0;
  }
  Completion c(pool(e).submit(ts.begin, ts.end, std::move(ts.body)));
  outstanding_.push_back(c);
  return c;
}

void Runtime::barrier() {
  std::exception_ptr first;
  for (auto& c : outstanding_) {
    try {
      c.wait();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  outstanding_.clear();
  if (first) std::rethrow_exception(first);
}

void Runtime::transfer(ObjectId object, std::size_t lo, std::size_t hi,
                       ExecutorId from, ExecutorId to, TransferKind kind,
                       std::int64_t step) {
  if (!outstanding_.empty()) {
    throw ConfigError("transfer requires a quiescent runtime; barrier first");
  }
  auto& info = object_at(object);
  require_resident(info, from, lo, hi, "transfer");
  double* dst = info.space[static_cast<std::size_t>(to)];
  const double* src = info.space[static_cast<std::size_t>(from)];
  if (dst == nullptr || src == nullptr) {
    throw ConfigError("object " + info.name + " has no buffer in that space");
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::memcpy(dst + lo * info.elems_per_index, src + lo * info.elems_per_index,
              (hi - lo) * info.elems_per_index * sizeof(double));
  transfer_seconds_ +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  auto& res = info.resident[static_cast<std::size_t>(to)];
  for (std::size_t i = lo; i < hi; ++i) res[i] = 1;
  const std::uint64_t bytes = logical_bytes(info, lo, hi);
  observed_bytes_ += bytes;
  ledger_.append({kind,
                  from == ExecutorId::a ? Direction::a_to_b
                                        : Direction::b_to_a,
                  bytes, step});
}

void Runtime::exchange_subvector(ObjectId object, std::size_t split,
                                 std::int64_t step) {
  if (!outstanding_.empty()) {
    throw ConfigError("exchange requires a quiescent runtime; barrier first");
  }
  auto& info = object_at(object);
  if (split > info.index_count) {
    throw ConfigError("exchange split out of range for object " + info.name);
  }
  require_resident(info, ExecutorId::b, 0, split, "exchange");
  require_resident(info, ExecutorId::a, split, info.index_count, "exchange");
  double* a = info.space[0];
  double* b = info.space[1];
  const auto t0 = std::chrono::steady_clock::now();
  std::memcpy(a, b, split * info.elems_per_index * sizeof(double));
  std::memcpy(b + split * info.elems_per_index,
              a + split * info.elems_per_index,
              (info.index_count - split) * info.elems_per_index *
                  sizeof(double));
  transfer_seconds_ +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  info.resident[0].assign(info.index_count, 1);
  info.resident[1].assign(info.index_count, 1);
  const std::uint64_t bytes = logical_bytes(info, 0, info.index_count);
  observed_bytes_ += bytes;
  ledger_.append({TransferKind::subvector, Direction::bidirectional, bytes,
                  step});
}

bool Runtime::resident(ObjectId object, ExecutorId e, std::size_t lo,
                       std::size_t hi) const {
  const auto& info = object_at(object);
  const auto& map = info.resident[static_cast<std::size_t>(e)];
  for (std::size_t i = lo; i < hi && i < info.index_count; ++i) {
    if (!map[i]) return false;
  }
  return true;
}

Dd Runtime::read_slot(ObjectId object, ExecutorId e) const {
  const auto& info = object_at(object);
  const double* buf = info.space[static_cast<std::size_t>(e)];
  if (buf == nullptr || info.elems_per_index < 2) {
    throw ConfigError("object " + info.name + " is not a scalar slot");
  }
  require_resident(info, e, 0, 1, "read_slot");
  return Dd{buf[0], buf[1]};
}

}  // namespace hsolve
