#pragma once

#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "hsolve/dd.hpp"
#include "hsolve/errors.hpp"
#include "hsolve/solver_config.hpp"
#include "hsolve/transfer_ledger.hpp"

namespace hsolve {

// The two-device abstraction: executor A plays the host role, executor B the
// accelerator role. Each executor owns a worker pool and a logical memory
// space; data moves between the spaces only through explicit transfers, which
// are recorded in the ledger.
enum class ExecutorId : std::uint8_t { a = 0, b = 1 };

inline ExecutorId other(ExecutorId e) {
  return e == ExecutorId::a ? ExecutorId::b : ExecutorId::a;
}
inline const char* to_string(ExecutorId e) {
  return e == ExecutorId::a ? "A" : "B";
}

enum class Access : std::uint8_t { read, read_write };

using ObjectId = std::uint32_t;

// Half-open index interval of one registered object. The index space is
// block rows for vectors and packed triangular block offsets for matrices.
struct Region {
  ObjectId object;
  std::size_t lo;
  std::size_t hi;
  Access access;
};

struct TaskSet {
  const char* kernel = "";  // diagnostic tag
  std::vector<Region> regions;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::function<void(std::size_t)> body;  // invoked once per index
};

namespace detail {
struct TaskState;
class WorkerPool;
}  // namespace detail

class Completion {
public:
  Completion() = default;
  // Blocks until the task set finished; rethrows its first error.
  void wait();

private:
  friend class Runtime;
  friend class detail::WorkerPool;
  explicit Completion(std::shared_ptr<detail::TaskState> state)
      : state_(std::move(state)) {}
  std::shared_ptr<detail::TaskState> state_;
};

namespace detail {

struct TaskState {
  std::function<void(std::size_t)> body;
  std::size_t end = 0;
  std::size_t next = 0;       // next unclaimed index
  std::size_t remaining = 0;  // indices not yet finished
  std::size_t chunk = 1;
  bool done = false;
  std::exception_ptr error;  // first error wins

  std::mutex mutex;
  std::condition_variable done_cv;
};

// Fixed set of threads executing task sets strictly in submission order (an
// in-order queue); the indices of the front task set are split into chunks
// across the workers. An optional slowdown factor stretches every chunk's
// wall time, which models a slower device without changing any results.
class WorkerPool {
public:
  WorkerPool(std::size_t workers, double slowdown);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  std::size_t workers() const { return threads_.size(); }
  std::shared_ptr<TaskState> submit(std::size_t begin, std::size_t end,
                                    std::function<void(std::size_t)> body);

private:
  void worker_loop();
  // Runs a chunk and accrues throttle debt; owed_stall is the worker's
  // carry-over between chunks.
  void run_chunk(TaskState& task, std::size_t lo, std::size_t hi,
                 double& owed_stall);

  double slowdown_;
  std::mutex mutex_;
  std::condition_variable work_cv_;
  std::deque<std::shared_ptr<TaskState>> queue_;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace detail

// The executor pair plus the bookkeeping shared by one solver run: object
// registry, per-space residency maps, and the transfer ledger. The
// orchestrator (the thread that owns the Runtime) is single-threaded and is
// the only writer of ledger and residency state. By convention the
// orchestrator shares executor A's view of memory, mirroring a host thread
// that launches device kernels.
class Runtime {
public:
  Runtime(std::size_t workers_a, std::size_t workers_b, double slowdown_a,
          double slowdown_b, bool audit = true);
  explicit Runtime(const SolverConfig& cfg);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  // Registers an object backed by one buffer per memory space. index_count is
  // the length of the residency index space and elems_per_index the number of
  // contiguous doubles behind each index. logical_n limits per-transfer byte
  // accounting to the leading logical elements (vectors); 0 means all stored
  // elements count (matrices, scalars). Buffers for spaces the object never
  // visits may be null.
  ObjectId register_object(std::string name, std::size_t index_count,
                           std::size_t elems_per_index, std::size_t logical_n,
                           double* space_a, double* space_b,
                           bool resident_a, bool resident_b);

  // Submits a task set to executor e. All declared regions must be resident
  // in e's space (ResidencyError otherwise); read_write regions immediately
  // lose residency on the other executor. Empty task sets complete inline.
  Completion submit(ExecutorId e, TaskSet ts);

  // Returns once both executors drained every prior submission; rethrows the
  // first task error in submission order.
  void barrier();

  // Copies [lo, hi) of an object between the spaces (copy semantics: the
  // source stays resident) and appends one ledger entry. Requires a quiescent
  // runtime (call barrier() first) and residency at `from`.
  void transfer(ObjectId object, std::size_t lo, std::size_t hi,
                ExecutorId from, ExecutorId to, TransferKind kind,
                std::int64_t step);

  // Bidirectional sub-vector exchange at a row split: B's rows [0, split) go
  // to A and A's rows [split, rows) go to B, after which the object is fully
  // resident on both. Logged as a single subvector entry of logical_n * 8
  // bytes, the per-iteration accounting unit of the iterative solver.
  void exchange_subvector(ObjectId object, std::size_t split,
                          std::int64_t step);

  bool resident(ObjectId object, ExecutorId e, std::size_t lo,
                std::size_t hi) const;

  // Host-side scalar readback, used by the orchestrator for control flow in
  // homogeneous-B mode (mirrors reading back a device scalar); not a logged
  // transfer.
  Dd read_slot(ObjectId object, ExecutorId e) const;

  TransferLedger& ledger() { return ledger_; }
  const TransferLedger& ledger() const { return ledger_; }

  // Cumulative wall time spent inside transfer copies, for separating
  // compute-only time from transfer time.
  double transfer_seconds() const { return transfer_seconds_; }

  // Doubles physically copied across spaces, counted with the same logical
  // clipping as the ledger; in audit mode this mirror must equal the ledger.
  std::uint64_t observed_transfer_bytes() const { return observed_bytes_; }

  bool audit() const { return audit_; }

private:
  struct ObjectInfo {
    std::string name;
    std::size_t index_count;
    std::size_t elems_per_index;
    std::size_t logical_n;  // 0: all stored elements are logical
    double* space[2];
    std::vector<std::uint8_t> resident[2];
  };

  ObjectInfo& object_at(ObjectId id);
  const ObjectInfo& object_at(ObjectId id) const;
  void require_resident(const ObjectInfo& info, ExecutorId e, std::size_t lo,
                        std::size_t hi, const char* what) const;
  std::uint64_t logical_bytes(const ObjectInfo& info, std::size_t lo,
                              std::size_t hi) const;
  detail::WorkerPool& pool(ExecutorId e) {
    return e == ExecutorId::a ? *pool_a_ : *pool_b_;
  }

  std::unique_ptr<detail::WorkerPool> pool_a_;
  std::unique_ptr<detail::WorkerPool> pool_b_;
  std::vector<ObjectInfo> objects_;
  std::vector<Completion> outstanding_;
  TransferLedger ledger_;
  double transfer_seconds_ = 0.0;
  std::uint64_t observed_bytes_ = 0;
  bool audit_ = true;
};

}  // namespace hsolve
