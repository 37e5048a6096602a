#include "hjra/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hjra {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_csv(const ScalarField& field, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    const Grid& g = field.grid();
    for (std::size_t a = 0; a < g.dim(); ++a) out << "axis" << a << ",";
    out << "value\n";
    std::vector<double> x(g.dim());
    for (std::size_t i = 0; i < g.total_nodes(); ++i) {
        g.node_point(i, x);
        for (double c : x) out << format_double(c) << ",";
        out << format_double(field[i]) << "\n";
    }
    if (!out) throw ValidationError("write failed: " + path);
}

ScalarField read_field_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open: " + path);
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("empty field CSV: " + path);
    const std::size_t dim = static_cast<std::size_t>(std::count(header.begin(), header.end(), ','));
    if (dim == 0) throw ValidationError("malformed field CSV header: " + path);

    std::vector<std::vector<double>> coords(dim);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        for (std::size_t a = 0; a < dim; ++a) {
            if (!std::getline(ls, tok, ',')) throw ValidationError("short row in field CSV: " + path);
            coords[a].push_back(std::stod(tok));
        }
        if (!std::getline(ls, tok, ',')) throw ValidationError("short row in field CSV: " + path);
        values.push_back(std::stod(tok));
    }

    // Row-major layout: recover the per-axis node sets from distinct coords.
    std::vector<AxisSpec> axes(dim);
    for (std::size_t a = 0; a < dim; ++a) {
        std::vector<double> u = coords[a];
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        if (u.size() < 2) throw ValidationError("field CSV axis " + std::to_string(a) + " has fewer than 2 nodes");
        axes[a] = AxisSpec{u.front(), u.back(), u.size()};
    }
    Grid grid(axes);
    if (grid.total_nodes() != values.size()) throw ValidationError("field CSV node count mismatch: " + path);
    return ScalarField(std::move(grid), std::move(values));
}

std::vector<std::string> write_tube_csv(const ValueTube& tube, const std::string& dir, std::size_t record_every)
{
    if (record_every < 1) record_every = 1;
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream index(dir + "/index.csv");
    if (!index) throw ValidationError("cannot open for writing: " + dir + "/index.csv");
    index << "time,filename\n";
    std::vector<std::string> written;
    for (std::size_t k = 0; k < tube.frames(); ++k) {
        if (k % record_every != 0 && k + 1 != tube.frames()) continue;
        char name[32];
        std::snprintf(name, sizeof name, "t_%05zu.csv", k);
        write_field_csv(tube.fields[k], dir + "/" + name);
        index << format_double(tube.times[k]) << "," << name << "\n";
        written.push_back(dir + "/" + name);
    }
    written.push_back(dir + "/index.csv");
    return written;
}

ValueTube read_tube_csv(const std::string& index_path)
{
    std::ifstream in(index_path);
    if (!in) throw ValidationError("cannot open: " + index_path);
    const std::string dir = std::filesystem::path(index_path).parent_path().string();
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty tube index: " + index_path);
    ValueTube tube;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ValidationError("malformed tube index line: " + line);
        const double t = std::stod(line.substr(0, comma));
        const std::string file = line.substr(comma + 1);
        ScalarField field = read_field_csv(dir.empty() ? file : dir + "/" + file);
        if (tube.frames() == 0) tube.grid = field.grid();
        else if (!(field.grid() == tube.grid))
            throw ValidationError("tube frames use inconsistent grids: " + file);
        tube.times.push_back(t);
        tube.fields.push_back(std::move(field));
    }
    if (tube.frames() == 0) throw ValidationError("tube index lists no frames: " + index_path);
    return tube;
}

void write_contours_csv(const LevelSetExtract& extract, std::size_t dim, const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << "polyline";
    for (std::size_t a = 0; a < dim; ++a) out << ",axis" << a;
    out << "\n";
    for (std::size_t p = 0; p < extract.polylines.size(); ++p) {
        for (const auto& pt : extract.polylines[p]) {
            out << p;
            for (double c : pt) out << "," << format_double(c);
            out << "\n";
        }
    }
}

void write_conflict_report(const std::vector<ConflictEvent>& events, const std::vector<std::string>& names,
                           const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (const auto& e : events) {
        const std::string own = e.own < names.size() ? names[e.own] : std::to_string(e.own);
        const std::string intr = e.intruder < names.size() ? names[e.intruder] : std::to_string(e.intruder);
        out << "t=" << format_double(e.t) << " aircraft=" << own << " intruder=" << intr << " box_s=["
            << format_double(e.bbox_lo[0]) << "," << format_double(e.bbox_hi[0]) << "] box_z=["
            << format_double(e.bbox_lo[1]) << "," << format_double(e.bbox_hi[1]) << "]\n";
    }
}

void Manifest::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
void Manifest::add(const std::string& key, double value) { entries_.emplace_back(key, format_double(value)); }
void Manifest::add(const std::string& key, std::size_t value) { entries_.emplace_back(key, std::to_string(value)); }

void Manifest::write(const std::string& path) const
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
}

} // namespace hjra
