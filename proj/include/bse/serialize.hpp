#ifndef BSE_SERIALIZE_HPP
#define BSE_SERIALIZE_HPP

#include <string>
#include <vector>

#include "bse/assembly.hpp"
#include "bse/eigensolve.hpp"
#include "bse/oracle.hpp"
#include "bse/verify.hpp"
#include "bse/wave.hpp"

namespace bse {

// Self-description envelope embedded in every structured output file: the
// verbatim config echo, tool version, input content hashes, and the single
// timestamp field (the only part allowed to differ between reruns).
struct Provenance {
  std::string tool_version;
  std::string config_json; // verbatim JSON echo of the parsed run config
  std::vector<std::pair<std::string, std::string>> input_hashes; // path, hash
  std::string timestamp;
};

std::string fnv1a_hex(const std::string& bytes);
std::string file_content_hash(const std::string& path);

// Spectrum JSON: lambda[], residual[], k_requested, mesh_ref, diagnostics,
// optional vectors (vertex-indexed, Gamma0 zeros materialized).
void save_spectrum(const Spectrum& spectrum, const DiscreteSystem& system,
                   bool with_vectors, const Provenance* provenance,
                   const std::string& path);

// Loads a spectrum written with vectors; the system rebuilds the free-dof
// restriction and must match the stored mesh_ref.
Spectrum load_spectrum(const std::string& path, const DiscreteSystem& system);

void save_oracle(const OracleSpectrum& oracle, const Provenance* provenance,
                 const std::string& path);
OracleSpectrum load_oracle(const std::string& path);

void save_report(const VerificationReport& report, const Provenance* provenance,
                 const std::string& path);

// Legacy ASCII VTK unstructured grid with one point-data scalar field per
// eigenfunction (Gamma0 zeros materialized).
void export_vtk(const Mesh& mesh, const Spectrum& spectrum,
                const DiscreteSystem& system, const std::string& title,
                const std::string& path);

// Energy time series: '#'-prefixed provenance comments, then
// t,E[,probe columns].
void write_wave_csv(const DiscreteSystem& system, const Spectrum& spectrum,
                    const WaveState& state, const std::vector<double>& times,
                    const std::vector<int>& probe_vertices,
                    const Provenance* provenance, const std::string& path);

} // namespace bse

#endif
