#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "nemlat/energy.hpp"
#include "nemlat/envelope.hpp"
#include "nemlat/homogenize.hpp"
#include "nemlat/vortex.hpp"

namespace nemlat {

using Json = nlohmann::ordered_json;

// shortest round-trip decimal, independent of the global locale
std::string format_number(double x);
double parse_number(const std::string& s);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& os, const CsvTable& t);
// header row required; every row must match its width
CsvTable read_csv(std::istream& is);
CsvTable read_csv(std::istream& is, const std::vector<std::string>& expected_header);

// i1,i2,ux,uy
void write_directors(std::ostream& os, const DirectorField2& f);
DirectorField2 read_directors(std::istream& is, const Grid2& g);
// i1,i2,q11,q12,q22
void write_qfield(std::ostream& os, const PCQField& f);
PCQField read_qfield(std::istream& is, const Grid2& g);

// t,value
void write_sampled(std::ostream& os, const SampledFunction1D& h);
SampledFunction1D read_sampled(std::istream& is);
// q1,q2,value
void write_surface(std::ostream& os, const SampledSurface& s);
SampledSurface read_surface(std::istream& is);

// tri_index,cx,cy,area,det
void write_jacobian(std::ostream& os, const JacobianField& j);

Json to_json(const EnergyBreakdown& b);
EnergyBreakdown breakdown_from_json(const Json& j);
Json to_json(const ConcentrationFit& f);
Json to_json(const CellProblemResult2& r, const std::string& config_csv);
Json to_json(const CellProblemResult3& r, const std::string& config_csv);

}  // namespace nemlat
