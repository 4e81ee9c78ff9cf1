#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "bellvqc/qsim/state_vector.hpp"

// Debug snapshot format: 8-byte little-endian qubit count, then 2^N pairs of
// little-endian IEEE-754 doubles (re, im).

namespace bellvqc::qsim {

namespace detail {

inline void put_u64_le(std::ostream &os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(b, 8);
}

inline std::uint64_t get_u64_le(std::istream &is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char *>(b), 8);
    if (!is) throw InvalidArgument("truncated state dump");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

} // namespace detail

inline void write_state(const StateVector &s, const std::string &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw InvalidArgument("cannot open " + path + " for writing");
    detail::put_u64_le(os, s.num_qubits());
    for (const auto &a : s.amplitudes()) {
        detail::put_u64_le(os, std::bit_cast<std::uint64_t>(a.real()));
        detail::put_u64_le(os, std::bit_cast<std::uint64_t>(a.imag()));
    }
}

[[nodiscard]] inline StateVector read_state(const std::string &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidArgument("cannot open " + path);
    const auto n = detail::get_u64_le(is);
    if (n < 1 || n > max_qubits) throw CapacityError("state dump has unsupported qubit count");
    std::vector<cplx> amps(std::size_t{1} << n);
    for (auto &a : amps) {
        const double re = std::bit_cast<double>(detail::get_u64_le(is));
        const double im = std::bit_cast<double>(detail::get_u64_le(is));
        a = {re, im};
    }
    return StateVector(n, std::move(amps));
}

} // namespace bellvqc::qsim
