#include "fuchs/io.hpp"

#include <fstream>

namespace fuchs {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); }

}  // namespace

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    bad("complex number must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Mat matrix_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) bad("matrix must have " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n)
      bad("matrix row must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

Json matrix_to_json(const Mat& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

FuchsianSystem system_from_json(const Json& j) {
  if (!j.is_object()) bad("system must be a JSON object");
  if (!j.contains("N") || !j["N"].is_number_integer()) bad("missing integer field N");
  const int n = j["N"].get<int>();
  if (n < 2) bad("N must be at least 2");
  if (!j.contains("punctures") || !j["punctures"].is_array()) bad("missing punctures");
  if (!j.contains("residues") || !j["residues"].is_array()) bad("missing residues");
  std::vector<cplx> z;
  for (const auto& p : j["punctures"]) z.push_back(complex_from_json(p));
  std::vector<Mat> a;
  for (const auto& m : j["residues"]) a.push_back(matrix_from_json(m, n));
  if (z.size() != a.size()) bad("punctures and residues differ in length");

  SystemOptions o;
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    o.transport_tol = t.value("transport", o.transport_tol);
    o.clearance = t.value("clearance", o.clearance);
    o.genericity_tol = t.value("genericity", o.genericity_tol);
    o.resonance_tol = t.value("resonance", o.resonance_tol);
    if (!(o.transport_tol > 0) || o.clearance < 0 || !(o.genericity_tol > 0) || !(o.resonance_tol > 0))
      bad("tolerances must be positive");
  }
  if (j.contains("basepoint")) o.basepoint = complex_from_json(j["basepoint"]);
  return FuchsianSystem(LieAlgebra::sl(n), std::move(z), std::move(a), o);
}

Json system_to_json(const FuchsianSystem& s) {
  Json j;
  j["N"] = s.n();
  j["punctures"] = Json::array();
  for (cplx z : s.punctures()) j["punctures"].push_back(complex_to_json(z));
  j["residues"] = Json::array();
  for (const Mat& a : s.residues()) j["residues"].push_back(matrix_to_json(a));
  const auto& o = s.options();
  j["tolerances"] = {{"transport", o.transport_tol},
                     {"clearance", o.clearance},
                     {"genericity", o.genericity_tol},
                     {"resonance", o.resonance_tol}};
  if (o.basepoint) j["basepoint"] = complex_to_json(*o.basepoint);
  return j;
}

ResidueFamily family_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("system") || !j.contains("directions")) bad("family needs system and directions");
  FuchsianSystem base = j["system"].is_string() ? load_system(base_dir / j["system"].get<std::string>())
                                                : system_from_json(j["system"]);
  ResidueFamily f{base, {}};
  for (const auto& d : j["directions"]) {
    if (!d.is_array() || static_cast<int>(d.size()) != base.num_punctures())
      bad("each direction needs one matrix per puncture");
    std::vector<Mat> dir;
    for (const auto& m : d) dir.push_back(matrix_from_json(m, base.n()));
    f.directions.push_back(std::move(dir));
  }
  return f;
}

Json family_to_json(const ResidueFamily& f) {
  Json j;
  j["system"] = system_to_json(f.base);
  j["directions"] = Json::array();
  for (const auto& d : f.directions) {
    Json row = Json::array();
    for (const Mat& m : d) row.push_back(matrix_to_json(m));
    j["directions"].push_back(row);
  }
  return j;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

FuchsianSystem load_system(const std::filesystem::path& path) { return system_from_json(read_json(path)); }

ResidueFamily load_family(const std::filesystem::path& path) {
  return family_from_json(read_json(path), path.parent_path());
}

}  // namespace fuchs
