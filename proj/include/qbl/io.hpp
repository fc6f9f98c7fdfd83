#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qbl/apps.hpp"
#include "qbl/datum.hpp"
#include "qbl/entropy.hpp"

namespace qbl {

struct DatumFile {
    int version = 1;
    BLDatum datum;
    std::vector<std::string> labels;  // empty or one per map
};

/// Parses a datum from text. Two formats are accepted:
///
/// JSON: {"version": 1, "m": 1, "maps": [{"rows": [[1, 0]], "kind": "classical",
///        "label": "Q"}, ...], "p": [1, 1]}
///
/// CSV blocks: one directive per line, '#' starts a comment.
///     version,1
///     m,1
///     map,classical,Q      (kind and label optional)
///     1,0                  (matrix rows follow until the next directive)
///     map
///     0,1
///     p,1,1
///
/// Declared kinds are checked against classify_map.
DatumFile parse_datum_text(const std::string& text, const std::string& source = "<string>");
DatumFile parse_datum(const std::filesystem::path& path);

/// JSON text in the format above, with round-trip number formatting.
std::string serialize_datum(const BLDatum& d, const std::vector<std::string>& labels = {});

/// {"gamma": [[...]], "x_dim": n, "x_kind": "quantum" | "classical"}.
/// x_dim defaults to the full size (no memory).
GaussianJoint parse_joint_text(const std::string& text, const std::string& source = "<string>");
GaussianJoint parse_joint(const std::filesystem::path& path);
std::string serialize_joint(const GaussianJoint& joint);

/// {"H": [[...]], "m1": 1, "m2": 1}.
QuadHamiltonian parse_hamiltonian_text(const std::string& text,
                                       const std::string& source = "<string>");
QuadHamiltonian parse_hamiltonian(const std::filesystem::path& path);

/// Reads {"<key>": [[...]]} from a JSON file.
Matrix parse_matrix_file(const std::filesystem::path& path, const std::string& key);

/// printf("%.17g").
std::string format_double(double v);

} // namespace qbl
