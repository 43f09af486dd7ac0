// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "cotflow/sandbox/run_record.hpp"

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

namespace cotflow::sandbox {

inline constexpr std::size_t kDefaultCaptureCap = 64 * 1024;

struct ExecOptions {
    std::chrono::milliseconds timeout{600'000};
    std::size_t capture_cap = kDefaultCaptureCap;
};

/// Keeps at most `cap` bytes of a stream: the head and the tail, joined by a
/// marker that states how many bytes were dropped.
class CappedBuffer {
public:
    explicit CappedBuffer(std::size_t cap);

    void append(std::string_view bytes);
    std::string str() const;
    std::size_t total_bytes() const { return total_; }

private:
    std::size_t cap_;
    std::size_t head_cap_;
    std::size_t tail_cap_;
    std::size_t total_ = 0;
    std::string head_;
    std::string tail_;
};

/// Runs `command` through /bin/sh with `workdir` as cwd in its own process
/// group. A nonzero exit is a normal record; failure to launch raises
/// Error(ExecutorFault). On timeout the whole group is killed and the record
/// carries exit code 124, timed_out, outcome run_fail and a note.
RunRecord execute(const std::string& command, const std::filesystem::path& workdir,
                  const ExecOptions& options = {});

}  // namespace cotflow::sandbox
