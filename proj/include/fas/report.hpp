#pragma once

#include "json.hpp"

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace fas {

inline constexpr const char* kFaslabVersion = "0.1.0";

// Provenance block stamped on every artifact so outputs can be traced back
// to the exact inputs that produced them.
struct MetaInfo {
    std::string command;
    std::string config_hash;
    std::string grid_desc; // human-readable grid/parameter summary
};

// Shortest decimal form that parses back to the same double; keeps CSV rows
// byte-stable across runs while staying readable.
std::string format_double(double v);

// CSV writer with a commented provenance header. Only the generated_at line
// varies between identical runs; everything below it is byte-stable.
class CsvFile {
  public:
    CsvFile(const std::string& path, const MetaInfo& meta, const std::string& columns);
    void row(const std::string& line);
    const std::string& path() const { return path_; }

  private:
    std::ofstream out_;
    std::string path_;
};

// joins cells with commas; numeric helpers format via format_double
std::string csv_row(const std::vector<std::string>& cells);

// Summary with the same provenance under "meta" and the payload under
// "results"; keys are emitted sorted, so bodies are byte-stable too.
void write_json_summary(const std::string& path, const MetaInfo& meta,
                        const nlohmann::json& results);

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

// Small self-contained SVG line chart (fixed size, tick labels, legend).
// log_y drops non-positive values instead of failing.
void svg_line_chart(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<ChartSeries>& series, bool log_y = false);

} // namespace fas
