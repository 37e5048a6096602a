#ifndef HJRA_IO_HPP
#define HJRA_IO_HPP

#include <string>
#include <vector>

#include "hjra/reach_avoid.hpp"
#include "hjra/solver.hpp"

namespace hjra {

// Field CSV: header "axis0,axis1,...,value", one node per line in row-major
// order, 17 significant digits for bit-exact decimal round-trip.
void write_field_csv(const ScalarField& field, const std::string& path);
ScalarField read_field_csv(const std::string& path);

// Tube export: one field CSV per recorded time plus an index file of
// "time,filename" lines. record_every subsamples the recorded frames; the
// first and last frames are always written.
std::vector<std::string> write_tube_csv(const ValueTube& tube, const std::string& dir, std::size_t record_every = 1);
ValueTube read_tube_csv(const std::string& index_path);

// Contour polylines: "polyline,axis0,axis1,..." one vertex per line.
void write_contours_csv(const LevelSetExtract& extract, std::size_t dim, const std::string& path);

// One line per conflict event: time, both aircraft, the obstacle box.
void write_conflict_report(const std::vector<ConflictEvent>& events, const std::vector<std::string>& names,
                           const std::string& path);

// Line-oriented "key = value" manifest.
class Manifest {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value);
    void add(const std::string& key, std::size_t value);
    void write(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string format_double(double v); // %.17g

} // namespace hjra

#endif
