#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "hardylab/dimension.hpp"
#include "hardylab/frostman.hpp"
#include "hardylab/hardy.hpp"

namespace hardylab {

// Shortest round-trip decimal form, independent of the locale.
std::string format_number(double v);

struct CsvTable {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    std::string render() const;  // RFC 4180 quoting, CRLF-free
};

struct SvgPlot {
    std::string name;
    std::string content;
};

struct ReportBundle {
    nlohmann::json summary;  // {"command", "results": {...}}
    std::vector<CsvTable> tables;
    std::vector<SvgPlot> plots;
    nlohmann::json provenance;
};

struct OutputFormats {
    bool csv = true;
    bool json = true;
    bool svg = true;
};

// Writes <dir>/<table>.csv, <dir>/summary.json (with provenance) and <dir>/<plot>.svg.
void write_bundle(const ReportBundle& bundle, const std::string& dir, const OutputFormats& formats = {});

// Summary results whose numbers (or strings) appear in no CSV cell.
std::vector<std::string> untraceable_fields(const ReportBundle& bundle);

CsvTable samples_table(const std::string& name, const std::vector<const DimensionEstimate*>& estimates);
CsvTable trace_table(const RayleighResult& r);
CsvTable refinement_table(const RefinementOutcome& o);
CsvTable witness_table(const RefinementOutcome& o);
CsvTable scan_table(const AdmissibilityMap& map);
nlohmann::json tree_json(const PackingTree& tree, const MeasureDistribution& nu);
SvgPlot scan_heatmap(const AdmissibilityMap& map);

struct PlotSeries {
    std::string label;
    std::vector<double> x, y;
};

// Polyline plot with markers; log axes take log10 of positive values.
SvgPlot line_plot(const std::string& name, const std::string& xlabel, const std::string& ylabel,
                  const std::vector<PlotSeries>& series, bool logx = false, bool logy = false);

}  // namespace hardylab
