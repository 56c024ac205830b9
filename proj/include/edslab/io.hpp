#pragma once

#include "edslab/resonances.hpp"

#include <string>
#include <variant>

#include "json.hpp"

namespace edslab {

/// Failure to write an output file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using AnyPotential = std::variant<PotentialP, PotentialQ, DiracPotential>;

/// "P", "Q" or "D".
std::string potential_class(const AnyPotential& pot);
const Grid& potential_grid(const AnyPotential& pot);

nlohmann::json potential_to_json(const AnyPotential& pot);
AnyPotential potential_from_json(const nlohmann::json& j);

AnyPotential load_potential(const std::string& path);
/// Writes the potential JSON, merging `extra` keys into the top-level object.
void save_potential(const std::string& path, const AnyPotential& pot,
                    const nlohmann::json& extra = nlohmann::json::object());

std::string read_text(const std::string& path);
/// Writes to a temporary sibling and renames it over `path` on success.
void write_text_atomic(const std::string& path, const std::string& text);

struct ResonanceFile {
  ResonanceList list;
  double gamma = 1.0;
  double tol = 0.0;
  Rect rect;
};

std::string resonance_csv(const ResonanceFile& f);
ResonanceFile parse_resonance_csv(const std::string& text);

std::string scattering_csv(const ScatteringTable& t);
ScatteringTable parse_scattering_csv(const std::string& text);

}  // namespace edslab
