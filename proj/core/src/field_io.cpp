#include "segreg/field_io.hpp"
#include "segreg/common.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace segreg {

namespace {

template <typename T>
void put(std::ofstream& os, T v) {
    // assumes a little-endian host; the format is defined little-endian
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

} // namespace

FieldSet to_field_set(const DensityVector& state) {
    const Grid& g = state.grid();
    FieldSet fs;
    fs.dim = g.dim;
    fs.n = g.n;
    fs.origin = g.origin;
    fs.h = g.h;
    fs.k = state.k;
    for (int c = 0; c < state.k; ++c)
        fs.values.push_back(state.fields[static_cast<std::size_t>(c)].v);
    return fs;
}

DensityVector from_field_set(const FieldSet& fs, std::shared_ptr<const Grid> grid,
                             ProblemTag tag) {
    require(grid->n == fs.n && grid->dim == fs.dim, "from_field_set: lattice mismatch");
    require(std::abs(grid->h - fs.h) < 1e-12 * fs.h, "from_field_set: spacing mismatch");
    DensityVector state;
    state.problem = tag;
    state.k = fs.k;
    for (int c = 0; c < fs.k; ++c) {
        ScalarField f(grid);
        f.v = fs.values[static_cast<std::size_t>(c)];
        state.fields.push_back(std::move(f));
    }
    if (tag == ProblemTag::A) {
        // fixed-node values double as the Dirichlet data
        for (int c = 0; c < fs.k; ++c) {
            ScalarField d(grid);
            for (int i = 0; i < grid->nodes(); ++i)
                if (grid->omega1[i] && !grid->interior[i])
                    d[i] = state.fields[static_cast<std::size_t>(c)][i];
            state.dirichlet_data.push_back(std::move(d));
        }
    }
    return state;
}

std::shared_ptr<const Grid> grid_from_field_set(const FieldSet& fs) {
    const int pad = static_cast<int>(std::ceil(1.0 / fs.h - 1e-12));
    GridSpec spec;
    spec.dim = fs.dim;
    spec.h = fs.h;
    for (int a = 0; a < fs.dim; ++a) {
        spec.lo[a] = fs.origin[a] + pad * fs.h;
        spec.hi[a] = fs.origin[a] + (fs.n[a] - 1 - pad) * fs.h;
    }
    auto g = std::make_shared<const Grid>(build_grid(spec));
    require(g->n == fs.n, "grid_from_field_set: lattice reconstruction mismatch");
    return g;
}

void write_sgrf(const std::string& path, const FieldSet& fs) {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), "write_sgrf: cannot open " + path);
    os.write("SGRF", 4);
    put<std::uint16_t>(os, 1);
    put<std::uint8_t>(os, static_cast<std::uint8_t>(fs.dim));
    for (int a = 0; a < fs.dim; ++a) put<std::uint32_t>(os, static_cast<std::uint32_t>(fs.n[a]));
    for (int a = 0; a < fs.dim; ++a) put<double>(os, fs.origin[a]);
    put<double>(os, fs.h);
    put<std::uint16_t>(os, static_cast<std::uint16_t>(fs.k));
    for (const auto& comp : fs.values)
        os.write(reinterpret_cast<const char*>(comp.data()),
                 static_cast<std::streamsize>(comp.size() * sizeof(double)));
    require(os.good(), "write_sgrf: write failed for " + path);
}

FieldSet read_sgrf(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), "read_sgrf: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    require(is.good() && std::memcmp(magic, "SGRF", 4) == 0, "read_sgrf: bad magic");
    const auto version = get<std::uint16_t>(is);
    require(version == 1, "read_sgrf: unsupported version");
    FieldSet fs;
    fs.dim = get<std::uint8_t>(is);
    require(fs.dim == 1 || fs.dim == 2, "read_sgrf: bad dim");
    fs.n = {1, 1};
    for (int a = 0; a < fs.dim; ++a) fs.n[a] = static_cast<int>(get<std::uint32_t>(is));
    for (int a = 0; a < fs.dim; ++a) fs.origin[a] = get<double>(is);
    fs.h = get<double>(is);
    fs.k = get<std::uint16_t>(is);
    require(fs.h > 0 && fs.k >= 1 && fs.nodes() > 0, "read_sgrf: corrupt header");
    for (int c = 0; c < fs.k; ++c) {
        std::vector<double> comp(static_cast<std::size_t>(fs.nodes()));
        is.read(reinterpret_cast<char*>(comp.data()),
                static_cast<std::streamsize>(comp.size() * sizeof(double)));
        require(is.good(), "read_sgrf: truncated payload");
        fs.values.push_back(std::move(comp));
    }
    return fs;
}

void write_field_csv(const std::string& path, const FieldSet& fs, int comp) {
    require(comp >= 0 && comp < fs.k, "write_field_csv: bad component");
    std::ofstream os(path);
    require(os.good(), "write_field_csv: cannot open " + path);
    os.precision(17);
    const auto& v = fs.values[static_cast<std::size_t>(comp)];
    for (int iy = 0; iy < fs.n[1]; ++iy)
        for (int ix = 0; ix < fs.n[0]; ++ix) {
            const double x = fs.origin[0] + ix * fs.h;
            if (fs.dim == 1)
                os << x << ',' << v[static_cast<std::size_t>(ix)] << '\n';
            else
                os << x << ',' << fs.origin[1] + iy * fs.h << ','
                   << v[static_cast<std::size_t>(ix + fs.n[0] * iy)] << '\n';
        }
}

void write_contours_csv(const std::string& path, const std::vector<Polyline>& pls) {
    std::ofstream os(path);
    require(os.good(), "write_contours_csv: cannot open " + path);
    os.precision(17);
    for (std::size_t p = 0; p < pls.size(); ++p)
        for (const auto& pt : pls[p].pts)
            os << p << ',' << pt[0] << ',' << pt[1] << '\n';
}

void write_samples_csv(const std::string& path, const std::vector<FreeBoundarySample>& samples) {
    std::ofstream os(path);
    require(os.good(), "write_samples_csv: cannot open " + path);
    os.precision(17);
    os << "x0x,x0y,nux,nuy,chi,dnu,y0x,y0y,chi_j,dnu_j,lhs,rhs\n";
    for (const auto& s : samples)
        os << s.x0[0] << ',' << s.x0[1] << ',' << s.nu[0] << ',' << s.nu[1] << ','
           << s.chi << ',' << s.dnu << ',' << s.y0[0] << ',' << s.y0[1] << ','
           << s.chi_j << ',' << s.dnu_j << ',' << s.lhs << ',' << s.rhs << '\n';
}

} // namespace segreg
