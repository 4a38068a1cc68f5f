#include "hsolve/transfer_ledger.hpp"

#include "hsolve/errors.hpp"

namespace hsolve {

const char* to_string(TransferKind kind) {
  switch (kind) {
    case TransferKind::scalar: return "scalar";
    case TransferKind::subvector: return "subvector";
    case TransferKind::block: return "block";
    case TransferKind::block_row: return "block_row";
    case TransferKind::initial_matrix: return "initial_matrix";
    case TransferKind::result: return "result";
  }
  return "unknown";
}

const char* to_string(Direction direction) {
  switch (direction) {
    case Direction::a_to_b: return "a_to_b";
    case Direction::b_to_a: return "b_to_a";
    case Direction::bidirectional: return "bidirectional";
  }
  return "unknown";
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return "config_error";
    case ErrorKind::not_spd: return "not_spd";
    case ErrorKind::singular_block: return "singular_block";
    case ErrorKind::numerical: return "numerical_error";
    case ErrorKind::not_converged: return "not_converged";
    case ErrorKind::residency: return "residency_error";
    case ErrorKind::format: return "format_error";
    case ErrorKind::version_mismatch: return "version_mismatch";
    case ErrorKind::truncated_file: return "truncated_file";
    case ErrorKind::io: return "io_error";
  }
  return "unknown";
}

std::uint64_t TransferLedger::total_bytes() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) total += e.bytes;
  return total;
}

std::uint64_t TransferLedger::bytes_of(TransferKind kind) const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) {
    if (e.kind == kind) total += e.bytes;
  }
  return total;
}

std::size_t TransferLedger::count_of(TransferKind kind) const {
  std::size_t count = 0;
  for (const auto& e : entries_) {
    if (e.kind == kind) ++count;
  }
  return count;
}

std::size_t TransferLedger::count_of(TransferKind kind,
                                     Direction direction) const {
  std::size_t count = 0;
  for (const auto& e : entries_) {
    if (e.kind == kind && e.direction == direction) ++count;
  }
  return count;
}

}  // namespace hsolve
