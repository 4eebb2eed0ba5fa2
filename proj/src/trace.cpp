#include "confgraph/trace.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace confgraph {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }
}

std::string trace_to_csv(const SessionTrace& trace) {
    std::ostringstream out;
    out << "t,node,x,y\n";
    for (std::uint64_t t = 0; t < trace.k(); ++t) {
        for (int i = 0; i < trace.n(); ++i) {
            const bool x = trace.x(t, i);
            const char y = !x ? '-' : (trace.y(t, i) == Feedback::nack ? 'N' : 'A');
            out << t << ',' << i << ',' << (x ? 1 : 0) << ',' << y << '\n';
        }
    }
    return out.str();
}

SessionTrace trace_from_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "t,node,x,y") fail("trace csv: bad header");

    struct Row {
        std::uint64_t t;
        int node;
        bool x;
        char y;
    };
    std::vector<Row> rows;
    std::uint64_t kmax = 0;
    int nmax = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Row r;
        char c1, c2, c3;
        std::istringstream ls(line);
        int xv;
        if (!(ls >> r.t >> c1 >> r.node >> c2 >> xv >> c3 >> r.y) || c1 != ',' || c2 != ',' ||
            c3 != ',')
            fail("trace csv: malformed row");
        r.x = xv != 0;
        if ((r.x && r.y == '-') || (!r.x && r.y != '-'))
            fail("trace csv: feedback must be '-' exactly when x=0");
        if (r.x && r.y != 'A' && r.y != 'N') fail("trace csv: feedback must be A, N or -");
        kmax = std::max(kmax, r.t + 1);
        nmax = std::max(nmax, r.node);
        rows.push_back(r);
    }
    if (rows.empty()) fail("trace csv: no rows");
    SessionTrace trace(kmax, nmax + 1);
    for (const auto& r : rows) trace.set(r.t, r.node, r.x, r.y == 'N');
    return trace;
}

std::vector<std::uint8_t> trace_to_binary(const SessionTrace& trace) {
    const std::uint32_t n = static_cast<std::uint32_t>(trace.n());
    const std::uint64_t k = trace.k();
    const std::size_t row_bytes = (n + 7) / 8;
    std::vector<std::uint8_t> out;
    out.reserve(16 + 2 * row_bytes * k);
    const char magic[4] = {'C', 'G', 'T', 'R'};
    out.insert(out.end(), magic, magic + 4);
    auto push_u32 = [&out](std::uint32_t v) {
        for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    };
    auto push_u64 = [&out](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    };
    push_u32(1);
    push_u64(k);
    push_u32(n);
    for (std::uint64_t t = 0; t < k; ++t) {
        std::vector<std::uint8_t> xb(row_bytes, 0), nb(row_bytes, 0);
        for (std::uint32_t i = 0; i < n; ++i) {
            if (trace.x(t, i)) xb[i / 8] |= 1u << (i % 8);
            if (trace.y(t, i) == Feedback::nack) nb[i / 8] |= 1u << (i % 8);
        }
        out.insert(out.end(), xb.begin(), xb.end());
        out.insert(out.end(), nb.begin(), nb.end());
    }
    return out;
}

SessionTrace trace_from_binary(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 20 || std::memcmp(bytes.data(), "CGTR", 4) != 0)
        fail("trace binary: bad magic");
    auto read_u32 = [&bytes](std::size_t off) {
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= std::uint32_t(bytes[off + b]) << (8 * b);
        return v;
    };
    auto read_u64 = [&bytes](std::size_t off) {
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= std::uint64_t(bytes[off + b]) << (8 * b);
        return v;
    };
    if (read_u32(4) != 1) fail("trace binary: unsupported version");
    const std::uint64_t k = read_u64(8);
    const std::uint32_t n = read_u32(16);
    const std::size_t row_bytes = (n + 7) / 8;
    if (bytes.size() != 20 + 2 * row_bytes * k) fail("trace binary: truncated payload");
    SessionTrace trace(k, static_cast<int>(n));
    std::size_t off = 20;
    for (std::uint64_t t = 0; t < k; ++t) {
        const std::uint8_t* xb = bytes.data() + off;
        const std::uint8_t* nb = xb + row_bytes;
        for (std::uint32_t i = 0; i < n; ++i) {
            const bool x = (xb[i / 8] >> (i % 8)) & 1;
            const bool nk = (nb[i / 8] >> (i % 8)) & 1;
            if (nk && !x) fail("trace binary: failure bit without activation");
            trace.set(t, i, x, nk);
        }
        off += 2 * row_bytes;
    }
    return trace;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(contents.data()),
              static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<std::uint8_t> out((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
    return out;
}

}  // namespace confgraph
