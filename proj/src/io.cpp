#include "ch3/io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ch3 {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_bytes(std::ifstream& in, void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("snapshot file truncated");
}

void write_header(std::ofstream& out, const char magic[4], std::uint64_t n, double L) {
    write_bytes(out, magic, 4);
    write_bytes(out, &n, 8);
    write_bytes(out, &L, 8);
}

struct Header {
    std::uint64_t n;
    double L;
};

Header read_header(std::ifstream& in, const char magic[4]) {
    char m[4];
    read_bytes(in, m, 4);
    if (std::memcmp(m, magic, 4) != 0) throw std::runtime_error("bad snapshot magic");
    Header h{};
    read_bytes(in, &h.n, 8);
    read_bytes(in, &h.L, 8);
    return h;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field(const std::filesystem::path& path, const Field& f) {
    auto out = open_out(path);
    write_header(out, "C3F1", f.size(), f.grid->half_width());
    write_bytes(out, f.values.data(), f.size() * sizeof(double));
}

Field read_field(const std::filesystem::path& path) {
    auto in = open_in(path);
    const Header h = read_header(in, "C3F1");
    Field f = make_field(make_grid(h.n, h.L));
    read_bytes(in, f.values.data(), h.n * sizeof(double));
    return f;
}

void write_state(const std::filesystem::path& path, const StateTriple& z) {
    auto out = open_out(path);
    write_header(out, "C3S1", z.u.size(), z.u.grid->half_width());
    write_bytes(out, &z.t, 8);
    for (const Field* f : {&z.u, &z.v, &z.w})
        write_bytes(out, f->values.data(), f->size() * sizeof(double));
}

StateTriple read_state(const std::filesystem::path& path) {
    auto in = open_in(path);
    const Header h = read_header(in, "C3S1");
    StateTriple z = make_state(make_grid(h.n, h.L));
    read_bytes(in, &z.t, 8);
    for (Field* f : {&z.u, &z.v, &z.w})
        read_bytes(in, f->values.data(), h.n * sizeof(double));
    return z;
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
    auto out = open_out(path);
    out << "x,value\n";
    for (std::size_t i = 0; i < f.size(); ++i)
        out << format_double(f.grid->node(i)) << ',' << format_double(f[i]) << '\n';
}

void write_state_csv(const std::filesystem::path& path, const StateTriple& z) {
    auto out = open_out(path);
    out << "x,u,v,w\n";
    for (std::size_t i = 0; i < z.u.size(); ++i)
        out << format_double(z.u.grid->node(i)) << ',' << format_double(z.u[i]) << ','
            << format_double(z.v[i]) << ',' << format_double(z.w[i]) << '\n';
}

void write_diagnostics_csv(const std::filesystem::path& path,
                           std::span<const DiagnosticsRecord> records) {
    auto out = open_out(path);
    out << "t,E,Q,min_ux,min_vx,min_wx,sup_sq_sum";
    if (!records.empty())
        for (const auto& [name, value] : records.front().weighted) out << ',' << name;
    out << '\n';
    for (const auto& r : records) {
        out << format_double(r.t) << ',' << format_double(r.E) << ',' << format_double(r.Q)
            << ',' << format_double(r.min_ux) << ',' << format_double(r.min_vx) << ','
            << format_double(r.min_wx) << ',' << format_double(r.sup_sq_sum);
        for (const auto& [name, value] : r.weighted) out << ',' << format_double(value);
        out << '\n';
    }
}

void write_termination_report(const std::filesystem::path& path,
                              const TerminationReport& report, double E0, double Q0) {
    nlohmann::json doc;
    doc["reason"] = to_string(report.reason);
    doc["t_final"] = report.t_final;
    doc["E0"] = E0;
    doc["Q0"] = Q0;
    doc["slope_threshold"] = report.slope_threshold_used;
    if (E0 > 0.0) {
        doc["blowup_threshold"] = blowup_threshold(E0);
        if (auto bound = lifespan_bound(Q0, E0)) doc["lifespan_bound"] = *bound;
    }
    nlohmann::json history = nlohmann::json::array();
    const std::size_t m = report.min_slope_history.size();
    const std::size_t first = m > 200 ? m - 200 : 0;  // keep the tail
    for (std::size_t i = first; i < m; ++i)
        history.push_back({{"t", report.min_slope_history[i].t},
                           {"min_slope", report.min_slope_history[i].min_slope}});
    doc["min_slope_history_tail"] = std::move(history);

    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

}  // namespace ch3
