#include "bchlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace bchlab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add(std::string name, std::vector<double> values) {
  header.push_back(std::move(name));
  columns.push_back(std::move(values));
}

std::size_t CsvTable::rows() const { return columns.empty() ? 0 : columns.front().size(); }

std::string CsvTable::str() const {
  if (header.size() != columns.size()) throw std::runtime_error("CsvTable: header/column mismatch");
  const std::size_t n = rows();
  for (const auto& c : columns) {
    if (c.size() != n) throw std::runtime_error("CsvTable: ragged columns");
  }
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out += ',';
      out += format_double(columns[i][r]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  const auto text = table.str();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

CsvTable profile_table(const WaveProfile& profile) {
  CsvTable t;
  t.add("xi", profile.xi);
  t.add("phi", profile.phi);
  t.add("phi_xi", profile.phi_xi);
  t.add("mu", profile.mu);
  t.add("mu_xi", profile.mu_xi);
  t.add("mu_xixi", profile.mu_xixi);
  return t;
}

CsvTable orbit_table(const Orbit& orbit) {
  std::vector<double> phi;
  std::vector<double> psi;
  phi.reserve(orbit.points.size());
  psi.reserve(orbit.points.size());
  for (const auto& p : orbit.points) {
    phi.push_back(p.phi);
    psi.push_back(p.psi);
  }
  CsvTable t;
  t.add("phi", std::move(phi));
  t.add("psi", std::move(psi));
  return t;
}

CsvTable sweep_table(std::span<const CriterionRow> rows) {
  std::vector<double> h;
  std::vector<double> q;
  std::vector<double> dq;
  for (const auto& r : rows) {
    h.push_back(r.h);
    q.push_back(r.Qcal);
    dq.push_back(r.dQcal_dh);
  }
  CsvTable t;
  t.add("h", std::move(h));
  t.add("Qcal", std::move(q));
  t.add("dQcal_dh", std::move(dq));
  return t;
}

CsvTable eigenfunction_table(const WaveProfile& profile, const SpectrumReport& report) {
  CsvTable t;
  t.add("xi", profile.xi);
  t.add("psi0", report.ground_state);
  t.add("psi_zero", report.zero_mode);
  return t;
}

CsvTable trace_table(const EvolutionTrace& trace) {
  CsvTable t;
  t.add("t", trace.times);
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> col;
    col.reserve(trace.invariants.size());
    for (const auto& inv : trace.invariants) col.push_back(inv[i]);
    t.add(trace.names[i], std::move(col));
  }
  auto dist = trace.orbital_distances;
  if (dist.size() != trace.times.size()) {
    dist.assign(trace.times.size(), std::numeric_limits<double>::quiet_NaN());
  }
  t.add("orbital_distance", std::move(dist));
  return t;
}

CsvTable snapshot_table(const Field& field) {
  std::vector<double> x(field.size());
  for (std::size_t j = 0; j < x.size(); ++j) x[j] = field.x(j);
  CsvTable t;
  t.add("x", std::move(x));
  t.add("m", field.m);
  return t;
}

}  // namespace bchlab
