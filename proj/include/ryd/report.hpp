#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ryd/master.hpp"
#include "ryd/observables.hpp"
#include "ryd/trajectory.hpp"

namespace ryd {

// CSV with '#'-prefixed metadata lines (resolved config, seeds) before the
// header row; numeric cells are written with %.17g so reruns are
// byte-identical.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    void comment(const std::string& line);
    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& cells);
    void row_mixed(const std::vector<std::string>& cells);

    static std::string format(double v);

  private:
    struct Impl;
    Impl* impl_;
};

void write_json(const std::string& path, const nlohmann::json& j);

// Time-series CSV for a single run or an ensemble.  Appends the Mandel Q
// and the per-time Gaussian fit of the mean profile; ensemble outputs gain
// *_se columns.
void write_series_csv(const std::string& path, const EnsembleResult& result,
                      const nlohmann::json& meta);
void write_series_csv(const std::string& path, const MasterResult& result,
                      const nlohmann::json& meta);

// Gaussian-fit helper on a flattened layout row.
GaussianFit fit_profile_row(const ObservableLayout& layout, const double* row);

std::string fit_status_name(FitStatus s);

}  // namespace ryd
