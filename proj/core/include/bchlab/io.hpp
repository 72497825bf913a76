#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "bchlab/conserved.hpp"
#include "bchlab/criterion.hpp"
#include "bchlab/evolution.hpp"
#include "bchlab/spectral.hpp"
#include "bchlab/wave.hpp"

namespace bchlab {

// CSV output. Numbers carry 17 significant digits so that a value read back
// is bit-identical; rows end in '\n' on every platform.

/// %.17g, with "nan", "inf" and "-inf" for non-finite values.
[[nodiscard]] std::string format_double(double v);

/// Column-major table: header[i] names columns[i]; all columns equally long.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values);
  [[nodiscard]] std::size_t rows() const;
  [[nodiscard]] std::string str() const;
};

/// Writes the table, creating parent directories. Throws std::runtime_error
/// on I/O failure or ragged columns.
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// xi,phi,phi_xi,mu,mu_xi,mu_xixi
[[nodiscard]] CsvTable profile_table(const WaveProfile& profile);
/// phi,psi along one closed orbit.
[[nodiscard]] CsvTable orbit_table(const Orbit& orbit);
/// h,Qcal,dQcal_dh
[[nodiscard]] CsvTable sweep_table(std::span<const CriterionRow> rows);
/// xi,psi0,psi_zero
[[nodiscard]] CsvTable eigenfunction_table(const WaveProfile& profile,
                                           const SpectrumReport& report);
/// t,<invariant names>,orbital_distance (nan when no reference was tracked).
[[nodiscard]] CsvTable trace_table(const EvolutionTrace& trace);
/// x,m
[[nodiscard]] CsvTable snapshot_table(const Field& field);

}  // namespace bchlab
