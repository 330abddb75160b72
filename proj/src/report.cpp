#include "hardylab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hardylab/error.hpp"

namespace hardylab {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string join_point(const Point& x) {
    std::string s;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i ? " " : "") + format_number(x[i]);
    return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
    out << content;
}

void collect_leaves(const json& j, const std::string& path, std::vector<std::pair<std::string, const json*>>& out) {
    if (j.is_object())
        for (auto it = j.begin(); it != j.end(); ++it) collect_leaves(it.value(), path + "." + it.key(), out);
    else if (j.is_array())
        for (std::size_t i = 0; i < j.size(); ++i) collect_leaves(j[i], path + "[" + std::to_string(i) + "]", out);
    else
        out.emplace_back(path, &j);
}

}  // namespace

std::string CsvTable::render() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
        os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

void write_bundle(const ReportBundle& b, const std::string& dir, const OutputFormats& f) {
    std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    require(!ec && std::filesystem::is_directory(root), ErrorKind::InvalidArgument,
            "output directory '" + dir + "' is not writable");
    if (f.csv)
        for (const auto& t : b.tables) write_file(root / (t.name + ".csv"), t.render());
    if (f.json) {
        json s = b.summary;
        s["provenance"] = b.provenance;
        write_file(root / "summary.json", s.dump(2) + "\n");
    }
    if (f.svg)
        for (const auto& p : b.plots) write_file(root / (p.name + ".svg"), p.content);
}

std::vector<std::string> untraceable_fields(const ReportBundle& b) {
    std::set<std::string> text;
    std::vector<double> numbers;
    for (const auto& t : b.tables)
        for (const auto& row : t.rows)
            for (const auto& cell : row) {
                text.insert(cell);
                std::istringstream ss(cell);
                std::string tok;
                while (ss >> tok) {
                    double v = 0.0;
                    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
                    if (res.ec == std::errc() && res.ptr == tok.data() + tok.size()) numbers.push_back(v);
                }
            }
    std::vector<std::pair<std::string, const json*>> leaves;
    if (b.summary.contains("results")) collect_leaves(b.summary.at("results"), "results", leaves);
    std::vector<std::string> missing;
    for (const auto& [path, v] : leaves) {
        bool found = true;
        if (v->is_number()) {
            double x = v->get<double>();
            found = std::find(numbers.begin(), numbers.end(), x) != numbers.end();
        } else if (v->is_string()) {
            found = text.count(v->get<std::string>()) > 0;
        } else if (v->is_boolean()) {
            found = text.count(v->get<bool>() ? "true" : "false") > 0;
        }
        if (!found) missing.push_back(path);
    }
    return missing;
}

CsvTable samples_table(const std::string& name, const std::vector<const DimensionEstimate*>& estimates) {
    CsvTable t{name, {"kind", "x", "R", "r", "N_or_ratio", "slope"}, {}};
    for (const auto* e : estimates)
        for (const auto& s : e->samples)
            t.add({to_string(e->kind), join_point(s.x), format_number(s.R), format_number(s.r), format_number(s.value),
                   format_number(s.slope)});
    return t;
}

CsvTable trace_table(const RayleighResult& r) {
    CsvTable t{"trace", {"iter", "quotient", "residual"}, {}};
    for (std::size_t i = 0; i < r.trace.size(); ++i)
        t.add({std::to_string(i), format_number(r.trace[i]),
               i < r.residual_trace.size() ? format_number(r.residual_trace[i]) : ""});
    return t;
}

CsvTable refinement_table(const RefinementOutcome& o) {
    CsvTable t{"refinement", {"h", "lambda", "hardy_constant", "converged", "iterations", "ratio_to_previous"}, {}};
    for (std::size_t i = 0; i < o.runs.size(); ++i) {
        const auto& r = o.runs[i];
        t.add({format_number(r.h), format_number(r.lambda), format_number(1.0 / r.lambda), r.converged ? "true" : "false",
               std::to_string(r.iterations), i ? format_number(o.ratios[i - 1]) : ""});
    }
    t.add({"slope", format_number(o.slope), "", "", "", to_string(o.label)});
    return t;
}

CsvTable witness_table(const RefinementOutcome& o) {
    CsvTable t{"witness", {"j", "quotient", "bound_3_over_j_ln2", "certified"}, {}};
    for (std::size_t i = 0; i < o.witness_values.size(); ++i) {
        int j = i < o.witness_j.size() ? o.witness_j[i] : static_cast<int>(i);
        t.add({std::to_string(j), format_number(o.witness_values[i]), format_number(3.0 / (j * std::log(2.0))),
               o.witness_certified ? "true" : "false"});
    }
    return t;
}

CsvTable scan_table(const AdmissibilityMap& map) {
    CsvTable t{"scan", {"p", "beta", "predicted", "numeric", "lambda_h", "slope", "witness_certified", "disagreement"}, {}};
    for (const auto& pt : map.points) {
        std::string lams;
        for (std::size_t i = 0; i < pt.numeric.runs.size(); ++i)
            lams += (i ? " " : "") + format_number(pt.numeric.runs[i].lambda);
        bool solved = !pt.numeric.runs.empty();
        t.add({format_number(pt.p), format_number(pt.beta), to_string(pt.predicted),
               solved ? to_string(pt.numeric.label) : "not-run", lams, solved ? format_number(pt.numeric.slope) : "",
               pt.numeric.witness_certified ? "true" : "false", pt.disagreement ? "true" : "false"});
    }
    return t;
}

json tree_json(const PackingTree& tree, const MeasureDistribution& nu) {
    json nodes = json::array();
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        const auto& nd = tree.nodes[i];
        nodes.push_back({{"id", i},
                         {"parent", nd.parent},
                         {"level", nd.level},
                         {"center", nd.center},
                         {"radius", nd.radius},
                         {"mass", i < nu.mass.size() ? static_cast<double>(nu.mass[i]) : 0.0}});
    }
    return {{"dim", tree.dim}, {"R", tree.R}, {"delta", tree.delta}, {"depth", tree.depth}, {"nodes", nodes}};
}

SvgPlot scan_heatmap(const AdmissibilityMap& map) {
    const int cell = 48, left = 70, top = 30;
    const int W = left + cell * static_cast<int>(map.beta_grid.size()) + 180;
    const int H = top + cell * static_cast<int>(map.p_grid.size()) + 50;
    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<style>text{font-family:sans-serif;font-size:11px}</style>\n";
    auto colour = [](const ScanPoint& pt) {
        if (pt.numeric.runs.empty()) return "#dddddd";
        switch (pt.numeric.label) {
            case NumericLabel::HoldsEvidence: return "#4daf4a";
            case NumericLabel::FailsEvidence: return "#e41a1c";
            case NumericLabel::Inconclusive: return "#ffd92f";
        }
        return "#dddddd";
    };
    auto mark = [](Predicted p) {
        switch (p) {
            case Predicted::Admits: return "A";
            case Predicted::Fails: return "F";
            case Predicted::Boundary: return "B";
            case Predicted::OutOfTheory: return "-";
        }
        return "?";
    };
    const std::size_t nb = map.beta_grid.size();
    for (std::size_t k = 0; k < map.points.size(); ++k) {
        const auto& pt = map.points[k];
        std::size_t row = k / nb, col = k % nb;
        int x = left + cell * static_cast<int>(col), y = top + cell * static_cast<int>(map.p_grid.size() - 1 - row);
        s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << colour(pt) << "\" stroke=\"" << (pt.disagreement ? "#000000" : "#ffffff") << "\" stroke-width=\""
          << (pt.disagreement ? 3 : 1) << "\"/>\n"
          << "<text x=\"" << x + cell / 2 - 4 << "\" y=\"" << y + cell / 2 + 4 << "\">" << mark(pt.predicted)
          << "</text>\n";
    }
    for (std::size_t r = 0; r < map.p_grid.size(); ++r)
        s << "<text x=\"8\" y=\"" << top + cell * static_cast<int>(map.p_grid.size() - 1 - r) + cell / 2 + 4
          << "\">p=" << format_number(map.p_grid[r]) << "</text>\n";
    for (std::size_t c = 0; c < nb; ++c)
        s << "<text x=\"" << left + cell * static_cast<int>(c) + 4 << "\" y=\"" << top + cell * map.p_grid.size() + 16
          << "\">b=" << format_number(map.beta_grid[c]) << "</text>\n";
    int lx = left + cell * static_cast<int>(nb) + 16;
    const char* legend[][2] = {{"#4daf4a", "holds-evidence"},
                               {"#e41a1c", "fails-evidence"},
                               {"#ffd92f", "inconclusive"},
                               {"#dddddd", "not run"}};
    for (int i = 0; i < 4; ++i)
        s << "<rect x=\"" << lx << "\" y=\"" << top + 20 * i << "\" width=\"12\" height=\"12\" fill=\"" << legend[i][0]
          << "\"/><text x=\"" << lx + 18 << "\" y=\"" << top + 20 * i + 10 << "\">" << legend[i][1] << "</text>\n";
    s << "<text x=\"" << lx << "\" y=\"" << top + 100 << "\">A admits, F fails,</text>\n"
      << "<text x=\"" << lx << "\" y=\"" << top + 114 << "\">B boundary, - out of theory</text>\n"
      << "</svg>\n";
    return {"scan", s.str()};
}

SvgPlot line_plot(const std::string& name, const std::string& xlabel, const std::string& ylabel,
                  const std::vector<PlotSeries>& series, bool logx, bool logy) {
    const double W = 560, H = 360, left = 70, right = 160, top = 20, bottom = 50;
    auto tx = [&](double v) { return logx ? std::log10(v) : v; };
    auto ty = [&](double v) { return logy ? std::log10(v) : v; };
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if ((logx && !(s.x[i] > 0)) || (logy && !(s.y[i] > 0))) continue;
            double a = tx(s.x[i]), b = ty(s.y[i]);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
        }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-300) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double a) { return left + (a - x0) / (x1 - x0) * (W - left - right); };
    auto py = [&](double b) { return H - bottom - (b - y0) / (y1 - y0) * (H - top - bottom); };
    const char* colours[] = {"#377eb8", "#e41a1c", "#4daf4a", "#984ea3", "#ff7f00", "#a65628"};

    std::ostringstream s;
    s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n"
      << "<style>text{font-family:sans-serif;font-size:11px}</style>\n"
      << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
      << H - top - bottom << "\" fill=\"none\" stroke=\"#000000\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double a = x0 + (x1 - x0) * k / 4, b = y0 + (y1 - y0) * k / 4;
        s << "<text x=\"" << px(a) - 12 << "\" y=\"" << H - bottom + 16 << "\">" << format_number(std::round(a * 1e3) / 1e3)
          << "</text>\n<text x=\"4\" y=\"" << py(b) + 4 << "\">" << format_number(std::round(b * 1e3) / 1e3)
          << "</text>\n";
    }
    s << "<text x=\"" << left << "\" y=\"" << H - 8 << "\">" << (logx ? "log10 " : "") << xlabel << "</text>\n"
      << "<text x=\"4\" y=\"" << top - 6 << "\">" << (logy ? "log10 " : "") << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& sr = series[k];
        const char* c = colours[k % 6];
        std::string pts;
        for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
            if ((logx && !(sr.x[i] > 0)) || (logy && !(sr.y[i] > 0))) continue;
            double X = px(tx(sr.x[i])), Y = py(ty(sr.y[i]));
            if (!std::isfinite(X) || !std::isfinite(Y)) continue;
            pts += format_number(std::round(X * 100) / 100) + "," + format_number(std::round(Y * 100) / 100) + " ";
            if (sr.x.size() <= 64)
                s << "<circle cx=\"" << X << "\" cy=\"" << Y << "\" r=\"3\" fill=\"" << c << "\"/>\n";
        }
        s << "<polyline fill=\"none\" stroke=\"" << c << "\" points=\"" << pts << "\"/>\n"
          << "<text x=\"" << W - right + 12 << "\" y=\"" << top + 14 + 16 * static_cast<double>(k) << "\" fill=\"" << c
          << "\">" << sr.label << "</text>\n";
    }
    s << "</svg>\n";
    return {name, s.str()};
}

}  // namespace hardylab
