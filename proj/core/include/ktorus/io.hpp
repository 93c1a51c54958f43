#pragma once

#include <optional>
#include <string>

#include "ktorus/field.hpp"
#include "ktorus/geodesic.hpp"
#include "ktorus/killing.hpp"
#include "ktorus/lattice.hpp"
#include "ktorus/reconstruct.hpp"
#include "ktorus/search.hpp"
#include "ktorus/trilinear.hpp"

namespace ktorus::io {

/// Library version string.
const char* version();

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::string& path);

/// Field files: {"schema":1, "lattice": {"basis":[[..],[..]]} | {"pq":{...}},
/// "coeffs":[{"n":[n1,n2],"re":r,"im":r}, ...]} listing the zero mode and
/// lexicographically positive indices only; loading mirrors the parity
/// condition.  The lattice descriptor specifies the dual lattice.
struct FieldFile {
  FourierField field;
  std::optional<ThreeLineConfig> pq;  // present when the descriptor was a pq pair
};

FieldFile load_field(const std::string& path);
void save_field(const std::string& path, const FourierField& f,
                const std::optional<ThreeLineConfig>& pq = std::nullopt);

KillingConstants load_constants(const std::string& path);
void save_constants(const std::string& path, const KillingConstants& k);

/// Sequence files: {"schema":1, "band":N, "x":[{"n":i,"re":r,"im":r},...],
/// "y":[...], "z":[...]} with n >= 1 only; parity is mirrored on load.
TripleSequence load_sequence(const std::string& path);
void save_sequence(const std::string& path, const TripleSequence& s);

Potential load_potential(const std::string& path);
void save_potential(const std::string& path, const Potential& u,
                    const std::optional<ThreeLineConfig>& pq = std::nullopt);

SearchProblem load_problem(const std::string& path);
void save_problem(const std::string& path, const SearchProblem& p);

/// t,x,y,vx,vy rows; positions are reduced to the fundamental domain.
void save_trajectory_csv(const std::string& path, const FourierField& f,
                         const Trajectory& traj);

}  // namespace ktorus::io
