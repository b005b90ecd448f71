#include "mkin/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mkin/spectral.hpp"

namespace mkin {

namespace {

void put_i32(std::ostream& os, std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::int32_t get_i32(std::istream& is) {
  std::int32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

}  // namespace

void write_snapshot(const std::string& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
  os.write("MKIN1", 5);
  put_i32(os, f.grid.dim_x);
  put_i32(os, f.grid.n_x);
  put_i32(os, f.grid.n_v);
  put_f64(os, f.grid.l_v);
  put_f64(os, f.time);
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!os) throw std::runtime_error("write_snapshot: short write to " + path);
}

Field read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, "MKIN1", 5) != 0)
    throw std::runtime_error("read_snapshot: bad magic in " + path);
  PhaseGrid g;
  g.dim_x = get_i32(is);
  g.n_x = get_i32(is);
  g.n_v = get_i32(is);
  g.l_v = get_f64(is);
  g.validate();
  Field f(g);
  f.time = get_f64(is);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_snapshot: truncated data in " + path);
  return f;
}

void write_density_csv(const std::string& path, const Field& f,
                       const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_density_csv: cannot open " + path);
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "ix,x0,rho\n";
  const Eigen::ArrayXd rho = density(f);
  char buf[96];
  for (long ix = 0; ix < f.grid.n_space(); ++ix) {
    const double x0 = f.grid.x_coord(static_cast<int>(
        f.grid.dim_x == 1 ? ix : ix / (static_cast<long>(f.grid.n_x) * f.grid.n_x)));
    std::snprintf(buf, sizeof buf, "%ld,%.17g,%.17g\n", ix, x0, rho[ix]);
    os << buf;
  }
}

void write_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostics>& series,
                           const std::string& header_comment) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_diagnostics_csv: cannot open " + path);
  if (!header_comment.empty()) os << "# " << header_comment << "\n";
  os << "t,mass,px,py,pz,energy,min_f,rho_min,wsup_k0\n";
  char buf[320];
  for (const auto& d : series) {
    std::snprintf(buf, sizeof buf,
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", d.time,
                  d.mass, d.momentum[0], d.momentum[1], d.momentum[2], d.energy, d.min_f,
                  d.rho_min, d.wsup_k0);
    os << buf;
  }
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mkin
