#include "chemflow/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <zlib.h>

#include "chemflow/errors.hpp"

namespace chemflow {

namespace {

constexpr std::uint32_t kSnapshotVersion = 1;
constexpr double kBurnIn = 1.0;
constexpr double kYSlack = 1.05;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put_u32(std::string& buf, std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_f64(std::string& buf, double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
        pos_ += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }
    std::size_t pos() const { return pos_; }
    std::size_t size() const { return data_.size(); }
    const std::string& raw() const { return data_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw SnapshotFormatError("snapshot truncated");
    }
    std::string data_;
    std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

void write_records(const std::vector<DiagnosticsRecord>& records,
                   const std::vector<double>& p_norms, const std::string& path) {
    std::ostringstream out;
    out << "t,mass_n,min_n,max_n,sup_c,int_c,grad_c_sq,kinetic,enstrophy_like,F,G,y_p,z_p,"
           "clamp_flags";
    for (double p : p_norms) out << ",n_Lp_" << fmt(p);
    for (double p : p_norms) out << ",u_Lp_" << fmt(p);
    out << "\n";
    for (const auto& r : records) {
        out << fmt(r.t) << ',' << fmt(r.mass_n) << ',' << fmt(r.min_n) << ',' << fmt(r.max_n)
            << ',' << fmt(r.sup_c) << ',' << fmt(r.int_c) << ',' << fmt(r.grad_c_sq) << ','
            << fmt(r.kinetic) << ',' << fmt(r.enstrophy_like) << ',' << fmt(r.F) << ','
            << fmt(r.G) << ',' << fmt(r.y_p) << ',' << fmt(r.z_p) << ',' << r.clamp_flags;
        for (double v : r.lp_n) out << ',' << fmt(v);
        for (double v : r.lp_u) out << ',' << fmt(v);
        out << "\n";
    }
    write_file(path, out.str());
}

RecordsFile read_records(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("records file '" + path + "' is empty");

    RecordsFile rf;
    {
        std::istringstream hdr(line);
        std::string col;
        std::vector<std::string> cols;
        while (std::getline(hdr, col, ',')) cols.push_back(col);
        if (cols.size() < 14 || cols[0] != "t" || cols[13] != "clamp_flags")
            throw IoError("records file '" + path + "' has an unexpected header");
        const std::size_t extra = cols.size() - 14;
        if (extra % 2 != 0) throw IoError("records header has unpaired norm columns");
        for (std::size_t q = 0; q < extra / 2; ++q) {
            const std::string& name = cols[14 + q];
            if (name.rfind("n_Lp_", 0) != 0)
                throw IoError("records header: unexpected column '" + name + "'");
            rf.p_norms.push_back(std::strtod(name.c_str() + 5, nullptr));
        }
    }
    const std::size_t np = rf.p_norms.size();
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string item;
        std::vector<double> vals;
        while (std::getline(row, item, ',')) {
            char* end = nullptr;
            vals.push_back(std::strtod(item.c_str(), &end));
            if (end == item.c_str()) throw IoError("records file: bad number '" + item + "'");
        }
        if (vals.size() != 14 + 2 * np) throw IoError("records file: wrong column count in a row");
        DiagnosticsRecord r;
        r.t = vals[0];
        r.mass_n = vals[1];
        r.min_n = vals[2];
        r.max_n = vals[3];
        r.sup_c = vals[4];
        r.int_c = vals[5];
        r.grad_c_sq = vals[6];
        r.kinetic = vals[7];
        r.enstrophy_like = vals[8];
        r.F = vals[9];
        r.G = vals[10];
        r.y_p = vals[11];
        r.z_p = vals[12];
        r.clamp_flags = static_cast<int>(vals[13]);
        r.lp_n.assign(vals.begin() + 14, vals.begin() + 14 + np);
        r.lp_u.assign(vals.begin() + 14 + np, vals.end());
        rf.records.push_back(std::move(r));
    }
    return rf;
}

void write_snapshot(const SimState& state, const std::string& path) {
    const Domain& d = state.n.domain();
    std::string payload;
    put_u32(payload, static_cast<std::uint32_t>(d.dim));
    for (int a = 0; a < d.dim; ++a) put_u32(payload, static_cast<std::uint32_t>(d.cells[a]));
    for (int a = 0; a < d.dim; ++a) put_f64(payload, d.length[a]);
    put_f64(payload, state.t);
    put_f64(payload, state.eps);
    for (double v : state.n.data()) put_f64(payload, v);
    for (double v : state.c.data()) put_f64(payload, v);
    for (int a = 0; a < d.dim; ++a)
        for (double v : state.u.component(a)) put_f64(payload, v);

    std::string file = "CHFL";
    put_u32(file, kSnapshotVersion);
    file += payload;
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), payload.size()));
    put_u32(file, crc);
    write_file(path, file);
}

SimState read_snapshot(const std::string& path) {
    Reader r(read_file(path));
    if (r.size() < 12) throw SnapshotFormatError("snapshot too small");
    if (r.raw().compare(0, 4, "CHFL") != 0)
        throw SnapshotFormatError("bad magic bytes (not a CHFL snapshot)");
    Reader body(r.raw().substr(4));
    const std::uint32_t version = body.u32();
    if (version != kSnapshotVersion)
        throw UnsupportedVersion("snapshot format version " + std::to_string(version) +
                                 " not supported");
    const std::string& whole = r.raw();
    if (whole.size() < 12) throw SnapshotFormatError("snapshot truncated");
    const std::string payload = whole.substr(8, whole.size() - 12);
    std::uint32_t stored = 0;
    for (int b = 0; b < 4; ++b)
        stored |= static_cast<std::uint32_t>(
                      static_cast<unsigned char>(whole[whole.size() - 4 + b]))
                  << (8 * b);
    const auto crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(payload.data()), payload.size()));
    if (crc != stored) throw SnapshotFormatError("snapshot checksum mismatch");

    Reader p(payload);
    const std::uint32_t dim = p.u32();
    if (dim != 2 && dim != 3) throw SnapshotFormatError("snapshot dim out of range");
    std::vector<int> cells;
    for (std::uint32_t a = 0; a < dim; ++a) cells.push_back(static_cast<int>(p.u32()));
    std::vector<double> lengths;
    for (std::uint32_t a = 0; a < dim; ++a) lengths.push_back(p.f64());
    SimState st;
    const Domain d = make_domain(static_cast<int>(dim), lengths, cells);
    st.t = p.f64();
    st.eps = p.f64();
    st.n = ScalarField(d);
    for (double& v : st.n.data()) v = p.f64();
    st.c = ScalarField(d);
    for (double& v : st.c.data()) v = p.f64();
    st.u = VectorField(d);
    for (std::uint32_t a = 0; a < dim; ++a)
        for (double& v : st.u.component(a)) v = p.f64();
    if (p.pos() != p.size()) throw SnapshotFormatError("snapshot has trailing bytes");
    st.P = ScalarField(d, 0.0);
    return st;
}

CheckReport check_records(const std::vector<DiagnosticsRecord>& records) {
    CheckReport rep;
    auto fail = [&](double t, const std::string& msg) {
        rep.ok = false;
        rep.problems.push_back("t = " + fmt(t) + ": " + msg);
    };
    if (records.empty()) {
        rep.ok = false;
        rep.problems.push_back("no records");
        return rep;
    }

    auto finite = [](const DiagnosticsRecord& r) {
        bool ok = std::isfinite(r.t) && std::isfinite(r.mass_n) && std::isfinite(r.min_n) &&
                  std::isfinite(r.max_n) && std::isfinite(r.sup_c) && std::isfinite(r.int_c) &&
                  std::isfinite(r.grad_c_sq) && std::isfinite(r.kinetic) &&
                  std::isfinite(r.enstrophy_like) && std::isfinite(r.F) && std::isfinite(r.G) &&
                  std::isfinite(r.y_p) && std::isfinite(r.z_p);
        for (double v : r.lp_n) ok = ok && std::isfinite(v);
        for (double v : r.lp_u) ok = ok && std::isfinite(v);
        return ok;
    };

    const double sup_c0 = records.front().sup_c;
    const double n_scale = std::max(1.0, records.front().max_n);
    const double g_scale = std::abs(records.front().G);

    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!finite(r)) fail(r.t, "non-finite entry (invariant: all entries finite)");
        if (r.min_n < -1e-9 * n_scale)
            fail(r.t, "min_n below the positivity floor (invariant: n >= -pos_tol)");
        if (i == 0) continue;
        const auto& q = records[i - 1];
        if (!(r.t > q.t)) fail(r.t, "sample times not strictly increasing (invariant: t ascending)");
        if (r.sup_c > q.sup_c + 1e-12 * sup_c0)
            fail(r.t, "sup_c increased (invariant: sup-norm of c nonincreasing)");
        if (r.int_c > q.int_c) fail(r.t, "int_c increased (invariant: integral of c nonincreasing)");
        if (q.t >= kBurnIn && r.G >= 0.0 && q.G >= 0.0 &&
            r.G > q.G + 1e-8 * std::abs(q.G) + 1e-12 * g_scale)
            fail(r.t, "G increased (invariant: G nonincreasing after burn-in)");
        if (r.y_p >= 0.0 && r.z_p > 0.0 && r.y_p > kYSlack * r.z_p)
            fail(r.t, "y above 1.05 z (invariant: ODE comparison bound)");
    }
    return rep;
}

} // namespace chemflow
