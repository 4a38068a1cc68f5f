#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hsolve {

enum class TransferKind : std::uint8_t {
  scalar,
  subvector,
  block,
  block_row,
  initial_matrix,
  result,
};

enum class Direction : std::uint8_t {
  a_to_b,
  b_to_a,
  bidirectional,
};

const char* to_string(TransferKind kind);
const char* to_string(Direction direction);

struct TransferEntry {
  TransferKind kind;
  Direction direction;
  std::uint64_t bytes;
  std::int64_t step;  // iteration (CG) or column (Cholesky); -1 for setup
};

// Append-only record of every cross-memory-space transfer of one solver run.
// Written only by the orchestrator thread.
class TransferLedger {
public:
  void append(const TransferEntry& entry) { entries_.push_back(entry); }

  const std::vector<TransferEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  std::uint64_t total_bytes() const;
  std::uint64_t bytes_of(TransferKind kind) const;
  std::size_t count_of(TransferKind kind) const;
  std::size_t count_of(TransferKind kind, Direction direction) const;

  void clear() { entries_.clear(); }

private:
  std::vector<TransferEntry> entries_;
};

}  // namespace hsolve
