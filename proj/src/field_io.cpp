#include "field_io.hpp"

#include <bit>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bsq {

static_assert(std::endian::native == std::endian::little,
              "field container writes little-endian payloads; byte-swapped hosts are unsupported");

namespace {

constexpr const char* kMagic = "BSQFIELD 1";
constexpr const char* kConvention = "c-exp-parseval-L3";

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& os, const BoxSpec& box, const char* kind, bool divfree) {
    os << kMagic << "\n";
    os << "convention " << kConvention << "\n";
    os << "kind " << kind << "\n";
    os << "period_L " << fmt_double(box.period_L) << "\n";
    os << "resolution_N " << box.resolution_N << "\n";
    os << "dealias_fraction " << fmt_double(box.dealias_fraction) << "\n";
    os << "divergence_free " << (divfree ? 1 : 0) << "\n";
    os << "data complex128-le row-major-k\n";
}

void write_payload(std::ostream& os, const std::vector<Complex>& coeffs) {
    os.write(reinterpret_cast<const char*>(coeffs.data()),
             static_cast<std::streamsize>(coeffs.size() * sizeof(Complex)));
}

struct Header {
    BoxSpec box;
    std::string kind;
    bool divergence_free = false;
};

Header read_header(std::istream& is, const std::string& path) {
    auto fail = [&path](const std::string& why) {
        throw Error(ErrorCode::io_error, "load_field(" + path + "): " + why);
    };
    std::string line;
    if (!std::getline(is, line) || line != kMagic) fail("bad magic (expected '" + std::string(kMagic) + "')");

    Header h;
    bool saw_data = false;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "convention") {
            std::string tag;
            ls >> tag;
            if (tag != kConvention) fail("unknown convention tag '" + tag + "'");
        } else if (key == "kind") {
            ls >> h.kind;
        } else if (key == "period_L") {
            ls >> h.box.period_L;
        } else if (key == "resolution_N") {
            ls >> h.box.resolution_N;
        } else if (key == "dealias_fraction") {
            ls >> h.box.dealias_fraction;
        } else if (key == "divergence_free") {
            int v = 0;
            ls >> v;
            h.divergence_free = v != 0;
        } else if (key == "data") {
            saw_data = true;
            break;
        } else {
            fail("unknown header key '" + key + "'");
        }
    }
    if (!saw_data) fail("truncated header (no data line)");
    if (h.kind != "scalar" && h.kind != "vector") fail("unknown field kind '" + h.kind + "'");
    h.box.validate();
    return h;
}

void read_payload(std::istream& is, std::vector<Complex>& coeffs, const std::string& path) {
    is.read(reinterpret_cast<char*>(coeffs.data()),
            static_cast<std::streamsize>(coeffs.size() * sizeof(Complex)));
    if (static_cast<std::size_t>(is.gcount()) != coeffs.size() * sizeof(Complex))
        throw Error(ErrorCode::io_error, "load_field(" + path + "): truncated payload");
}

} // namespace

void save_field(const ScalarField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::io_error, "save_field: cannot open '" + path + "' for writing");
    write_header(os, f.box, "scalar", false);
    write_payload(os, f.coeffs);
    if (!os) throw Error(ErrorCode::io_error, "save_field: write failed for '" + path + "'");
}

void save_field(const VectorField& v, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::io_error, "save_field: cannot open '" + path + "' for writing");
    write_header(os, v.box(), "vector", v.divergence_free);
    for (int d = 0; d < 3; ++d) write_payload(os, v.comp[d].coeffs);
    if (!os) throw Error(ErrorCode::io_error, "save_field: write failed for '" + path + "'");
}

AnyField load_field(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorCode::io_error, "load_field: cannot open '" + path + "'");
    const Header h = read_header(is, path);
    if (h.kind == "scalar") {
        ScalarField f(h.box);
        read_payload(is, f.coeffs, path);
        return f;
    }
    VectorField v(h.box);
    for (int d = 0; d < 3; ++d) read_payload(is, v.comp[d].coeffs, path);
    v.divergence_free = h.divergence_free;
    return v;
}

ScalarField load_scalar_field(const std::string& path) {
    AnyField any = load_field(path);
    if (auto* f = std::get_if<ScalarField>(&any)) return std::move(*f);
    throw Error(ErrorCode::io_error, "load_scalar_field: '" + path + "' holds a vector field");
}

VectorField load_vector_field(const std::string& path) {
    AnyField any = load_field(path);
    if (auto* v = std::get_if<VectorField>(&any)) return std::move(*v);
    throw Error(ErrorCode::io_error, "load_vector_field: '" + path + "' holds a scalar field");
}

} // namespace bsq
