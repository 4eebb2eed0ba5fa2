#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "confgraph/bitvec.hpp"

namespace confgraph {

enum class Feedback : std::uint8_t { idle, ack, nack };

// k sessions of activation and feedback, stored column-wise (one bit
// vector per node) so estimator scans are word-parallel. Feedback is
// idle exactly when the node did not transmit.
class SessionTrace {
public:
    SessionTrace() = default;
    SessionTrace(std::uint64_t k, int n)
        : k_(k), capacity_(k), n_(n), x_(n, BitVec(k)), nack_(n, BitVec(k)) {}

    // Pre-sized trace for incremental simulation; set_k advances the
    // logical session count as sessions are filled in.
    static SessionTrace with_capacity(std::uint64_t capacity, int n) {
        SessionTrace t(capacity, n);
        t.k_ = 0;
        return t;
    }
    void set_k(std::uint64_t k) { k_ = std::min(k, capacity_); }

    std::uint64_t k() const { return k_; }
    std::uint64_t capacity() const { return capacity_; }
    int n() const { return n_; }

    bool x(std::uint64_t t, int i) const { return x_[i].test(t); }
    Feedback y(std::uint64_t t, int i) const {
        if (!x_[i].test(t)) return Feedback::idle;
        return nack_[i].test(t) ? Feedback::nack : Feedback::ack;
    }

    void set(std::uint64_t t, int i, bool transmitted, bool nacked) {
        if (transmitted) {
            x_[i].set(t);
            if (nacked) nack_[i].set(t);
        }
    }

    const BitVec& x_col(int i) const { return x_[i]; }
    const BitVec& nack_col(int i) const { return nack_[i]; }
    BitVec& x_col_mut(int i) { return x_[i]; }
    BitVec& nack_col_mut(int i) { return nack_[i]; }

    std::vector<int> active_nodes(std::uint64_t t) const {
        std::vector<int> out;
        for (int i = 0; i < n_; ++i)
            if (x_[i].test(t)) out.push_back(i);
        return out;
    }

    friend bool operator==(const SessionTrace& a, const SessionTrace& b) {
        return a.k_ == b.k_ && a.n_ == b.n_ && a.x_ == b.x_ && a.nack_ == b.nack_;
    }

private:
    std::uint64_t k_ = 0;
    std::uint64_t capacity_ = 0;
    int n_ = 0;
    std::vector<BitVec> x_;
    std::vector<BitVec> nack_;
};

// CSV form: header "t,node,x,y" with y in {A, N, -}; one row per
// (session, node) pair.
std::string trace_to_csv(const SessionTrace& trace);
SessionTrace trace_from_csv(const std::string& csv);

// Compact binary form (little endian):
//   magic "CGTR", u32 version = 1, u64 k, u32 n,
//   then per session ceil(n/8) bytes of activation bits followed by
//   ceil(n/8) bytes of failure bits, node index ascending from bit 0.
std::vector<std::uint8_t> trace_to_binary(const SessionTrace& trace);
SessionTrace trace_from_binary(const std::vector<std::uint8_t>& bytes);

void write_file(const std::string& path, const std::string& contents);
void write_file(const std::string& path, const std::vector<std::uint8_t>& contents);
std::string read_text_file(const std::string& path);
std::vector<std::uint8_t> read_binary_file(const std::string& path);

}  // namespace confgraph
