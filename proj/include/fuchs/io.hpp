#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fuchs/malgrange.hpp"
#include "fuchs/system.hpp"

namespace fuchs {

using Json = nlohmann::json;

/// Complex numbers are stored as [re, im]; a bare number is read as real.
cplx complex_from_json(const Json& j);
Json complex_to_json(cplx z);
Mat matrix_from_json(const Json& j, int n);
Json matrix_to_json(const Mat& m);

/// Builds the system without throwing on invariant violations, so the caller
/// can report them; malformed files throw Io / InvalidArgument.
FuchsianSystem system_from_json(const Json& j);
Json system_to_json(const FuchsianSystem& s);

/// Family file: {"system": <system object or relative path>, "directions": [[A'_1, ...], ...]}.
ResidueFamily family_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json family_to_json(const ResidueFamily& f);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

FuchsianSystem load_system(const std::filesystem::path& path);
ResidueFamily load_family(const std::filesystem::path& path);

}  // namespace fuchs
