#include "ichaos/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "ichaos/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "snapshot writers assume a little-endian host");

namespace ichaos {

namespace {

void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void put(std::ofstream& out, T v) {
    put_bytes(out, &v, sizeof v);
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return in;
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("truncated snapshot: " + path);
    return v;
}

void expect_magic(std::ifstream& in, const char* magic, const std::string& path) {
    char buf[4];
    in.read(buf, 4);
    if (!in || std::memcmp(buf, magic, 4) != 0)
        throw IoError(std::string("bad magic (want ") + magic + "): " + path);
}

}  // namespace

void save_field(const std::string& path, const SpectralField& f) {
    std::ofstream out = open_out(path);
    put_bytes(out, "ICLF", 4);
    put(out, kSnapshotVersion);
    put(out, kTagSpectral);
    put(out, static_cast<std::uint32_t>(f.modes));
    put(out, static_cast<std::uint32_t>(f.modes));
    put(out, 0.0);
    put_bytes(out, f.amp.data(), f.amp.size() * sizeof(double));
    if (!out) throw IoError("write failed: " + path);
}

void save_field(const std::string& path, const LatticeField& f) {
    std::ofstream out = open_out(path);
    put_bytes(out, "ICLF", 4);
    put(out, kSnapshotVersion);
    put(out, kTagExactScalingLattice);
    put(out, static_cast<std::uint32_t>(f.n));
    put(out, static_cast<std::uint32_t>(f.n));
    put(out, f.h);
    put_bytes(out, f.values.data(), f.values.size() * sizeof(double));
    if (!out) throw IoError("write failed: " + path);
}

FieldSnapshot load_field(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_magic(in, "ICLF", path);
    FieldSnapshot s;
    s.version = get<std::uint16_t>(in, path);
    if (s.version != kSnapshotVersion)
        throw IoError("unsupported snapshot version: " + path);
    s.model_tag = get<std::uint8_t>(in, path);
    s.rows = get<std::uint32_t>(in, path);
    s.cols = get<std::uint32_t>(in, path);
    s.spacing = get<double>(in, path);
    s.payload.resize(static_cast<std::size_t>(s.rows) * s.cols);
    in.read(reinterpret_cast<char*>(s.payload.data()),
            static_cast<std::streamsize>(s.payload.size() * sizeof(double)));
    if (!in) throw IoError("truncated snapshot: " + path);
    return s;
}

void save_chaos(const std::string& path, const ChaosField& c) {
    std::ofstream out = open_out(path);
    put_bytes(out, "ICCF", 4);
    put(out, kSnapshotVersion);
    put(out, c.params.beta);
    put(out, c.params.eps);
    put(out, static_cast<std::uint32_t>(c.n));
    put(out, static_cast<std::uint32_t>(c.n));
    put(out, c.h);
    put_bytes(out, c.values.data(), c.values.size() * sizeof(std::complex<double>));
    if (!out) throw IoError("write failed: " + path);
}

ChaosSnapshot load_chaos(const std::string& path) {
    std::ifstream in = open_in(path);
    expect_magic(in, "ICCF", path);
    ChaosSnapshot s;
    s.version = get<std::uint16_t>(in, path);
    if (s.version != kSnapshotVersion)
        throw IoError("unsupported snapshot version: " + path);
    s.beta = get<double>(in, path);
    s.eps = get<double>(in, path);
    s.rows = get<std::uint32_t>(in, path);
    s.cols = get<std::uint32_t>(in, path);
    s.spacing = get<double>(in, path);
    s.payload.resize(static_cast<std::size_t>(s.rows) * s.cols);
    in.read(reinterpret_cast<char*>(s.payload.data()),
            static_cast<std::streamsize>(s.payload.size() * sizeof(std::complex<double>)));
    if (!in) throw IoError("truncated snapshot: " + path);
    return s;
}

// ------------------------------- CSV -------------------------------

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvWriter::Impl {
    std::ofstream out;
    std::size_t n_cols = 0;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl) {
    impl_->out.open(path, std::ios::trunc);
    if (!impl_->out) {
        delete impl_;
        throw IoError("cannot open for writing: " + path);
    }
    impl_->n_cols = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        impl_->out << (i ? "," : "") << header[i];
    impl_->out << '\n';
}

CsvWriter::~CsvWriter() {
    delete impl_;
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != impl_->n_cols)
        throw IoError("csv row width does not match the header");
    for (std::size_t i = 0; i < values.size(); ++i)
        impl_->out << (i ? "," : "") << format_double(values[i]);
    impl_->out << '\n';
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    if (cells.size() != impl_->n_cols)
        throw IoError("csv row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i)
        impl_->out << (i ? "," : "") << cells[i];
    impl_->out << '\n';
}

void CsvWriter::close() {
    impl_->out.flush();
    impl_->out.close();
}

// ------------------------------- JSON -------------------------------

void write_json(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open for reading: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw IoError("invalid json in " + path + ": " + e.what());
    }
    return j;
}

// ------------------------------ checksums ------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t n_bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t i = 0; i < n_bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream in = open_in(path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    return h;
}

}  // namespace ichaos
