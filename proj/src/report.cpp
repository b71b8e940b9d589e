#include "ryd/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ryd {

struct CsvWriter::Impl {
    std::FILE* f = nullptr;
    bool header_written = false;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->f = std::fopen(path.c_str(), "w");
    if (!impl_->f) {
        delete impl_;
        throw std::runtime_error("cannot open for writing: " + path);
    }
}

CsvWriter::~CsvWriter() {
    if (impl_->f) std::fclose(impl_->f);
    delete impl_;
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::comment(const std::string& line) {
    std::fprintf(impl_->f, "# %s\n", line.c_str());
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i)
        std::fprintf(impl_->f, "%s%s", i ? "," : "", columns[i].c_str());
    std::fputc('\n', impl_->f);
    impl_->header_written = true;
}

void CsvWriter::row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
        std::fprintf(impl_->f, "%s%.17g", i ? "," : "", cells[i]);
    std::fputc('\n', impl_->f);
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
        std::fprintf(impl_->f, "%s%s", i ? "," : "", cells[i].c_str());
    std::fputc('\n', impl_->f);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

GaussianFit fit_profile_row(const ObservableLayout& layout, const double* row) {
    std::vector<double> profile(layout.n_sites);
    for (int j = 1; j <= layout.n_sites; ++j) profile[j - 1] = row[layout.profile(j)];
    return fit_gaussian_width(profile, (layout.n_sites + 1) / 2);
}

std::string fit_status_name(FitStatus s) {
    switch (s) {
        case FitStatus::Ok: return "ok";
        case FitStatus::SubResolution: return "sub-resolution";
        case FitStatus::Degenerate: return "degenerate";
    }
    return "?";
}

namespace {

template <typename GetRow, typename GetSe>
void write_series(const std::string& path, const std::vector<double>& times,
                  const ObservableLayout& layout, const nlohmann::json& meta, bool with_se,
                  const std::vector<double>& q, const std::vector<double>& q_se, GetRow&& get_row,
                  GetSe&& get_se) {
    CsvWriter csv(path);
    csv.comment(meta.dump());
    std::vector<std::string> cols{"t_us"};
    for (const auto& n : layout.names()) {
        cols.push_back(n);
        if (with_se) cols.push_back(n + "_se");
    }
    cols.push_back("Q");
    if (with_se) cols.push_back("Q_se");
    cols.push_back("w");
    cols.push_back("A");
    cols.push_back("fit_status");
    csv.header(cols);

    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        const double* row = get_row(ti);
        std::vector<std::string> cells{CsvWriter::format(times[ti] * 1e6)};
        for (std::size_t c = 0; c < layout.count(); ++c) {
            cells.push_back(CsvWriter::format(row[c]));
            if (with_se) cells.push_back(CsvWriter::format(get_se(ti)[c]));
        }
        cells.push_back(CsvWriter::format(q[ti]));
        if (with_se) cells.push_back(CsvWriter::format(q_se[ti]));
        const GaussianFit fit = fit_profile_row(layout, row);
        cells.push_back(CsvWriter::format(fit.width));
        cells.push_back(CsvWriter::format(fit.amplitude));
        cells.push_back(fit_status_name(fit.status));
        csv.row_mixed(cells);
    }
}

}  // namespace

void write_series_csv(const std::string& path, const EnsembleResult& result,
                      const nlohmann::json& meta) {
    const bool with_se = result.trajectories > 1;
    write_series(
        path, result.times, result.layout, meta, with_se, result.q, result.q_stderr,
        [&](std::size_t ti) { return &result.mean[ti * result.layout.count()]; },
        [&](std::size_t ti) { return &result.stderror[ti * result.layout.count()]; });
}

void write_series_csv(const std::string& path, const MasterResult& result,
                      const nlohmann::json& meta) {
    static const std::vector<double> empty;
    write_series(
        path, result.times, result.layout, meta, false, result.q, empty,
        [&](std::size_t ti) { return &result.values[ti * result.layout.count()]; },
        [&](std::size_t) -> const double* { return nullptr; });
}

}  // namespace ryd
