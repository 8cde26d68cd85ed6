#include <hdsparse/data.hpp>
#include <hdsparse/rng.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace hdsparse {

FeatureMatrix::FeatureMatrix(MatrixXd values, std::vector<std::string> column_names,
                             bool standardized)
    : values_(std::move(values)), names_(std::move(column_names)), standardized_(standardized)
{
    require(values_.rows() >= 1 && values_.cols() >= 1, "FeatureMatrix needs n >= 1 and p >= 1");
    require(names_.empty() || static_cast<Index>(names_.size()) == values_.cols(),
            "column name count does not match column count");
    for (Index j = 0; j < values_.cols(); ++j) {
        if (!values_.col(j).allFinite()) {
            throw InvalidArgument("non-finite entry in column " + std::to_string(j));
        }
    }
}

std::string FeatureMatrix::name(Index j) const
{
    if (!names_.empty()) return names_[static_cast<std::size_t>(j)];
    return "x" + std::to_string(j);
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<Index>& idx) const
{
    MatrixXd out(static_cast<Index>(idx.size()), values_.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = values_.row(idx[i]);
    return FeatureMatrix(std::move(out), names_, false);
}

ResponseVector::ResponseVector(VectorXd values, ResponseKind kind)
    : values_(std::move(values)), kind_(kind)
{
    require(values_.allFinite(), "response contains non-finite values");
    if (kind_ == ResponseKind::binary) {
        for (Index i = 0; i < values_.size(); ++i) {
            require(values_[i] == 0.0 || values_[i] == 1.0,
                    "binary response must contain only 0/1 (row " + std::to_string(i) + ")");
        }
    }
}

ResponseVector ResponseVector::select(const std::vector<Index>& idx) const
{
    VectorXd out(static_cast<Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = values_[idx[i]];
    return ResponseVector(std::move(out), kind_);
}

MatrixXd StandardizationRecord::invert(const MatrixXd& standardized) const
{
    MatrixXd out = standardized;
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = out.col(j).array() * sds[j] + means[j];
    return out;
}

MatrixXd StandardizationRecord::apply(const MatrixXd& raw) const
{
    MatrixXd out = raw;
    for (Index j = 0; j < out.cols(); ++j) out.col(j) = (out.col(j).array() - means[j]) / sds[j];
    return out;
}

std::pair<FeatureMatrix, StandardizationRecord> standardize_columns(const FeatureMatrix& m)
{
    const Index n = m.rows();
    const Index p = m.cols();
    require(n >= 2, "standardize_columns needs at least 2 rows");

    StandardizationRecord rec;
    rec.means.resize(p);
    rec.sds.resize(p);
    rec.constant.assign(static_cast<std::size_t>(p), false);

    MatrixXd out(n, p);
    for (Index j = 0; j < p; ++j) {
        const auto col = m.values().col(j);
        const double mean = col.mean();
        const double ss = (col.array() - mean).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        rec.means[j] = mean;
        if (!(sd > 0.0) || sd <= 1e-14 * std::max(1.0, std::abs(mean))) {
            rec.sds[j] = 1.0;
            rec.constant[static_cast<std::size_t>(j)] = true;
            rec.warnings.push_back("column " + std::to_string(j) + " (" + m.name(j) +
                                   ") is constant; set to zero");
            out.col(j).setZero();
        } else {
            rec.sds[j] = sd;
            out.col(j) = (col.array() - mean) / sd;
        }
    }
    return {FeatureMatrix(std::move(out), m.column_names(), true), std::move(rec)};
}

namespace {

// Equal-frequency bin label for each observation; ties broken by index.
std::vector<int> quantile_bins(const VectorXd& y, int bins)
{
    const Index n = y.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return y[a] < y[b]; });
    std::vector<int> label(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) {
        label[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] =
            static_cast<int>((r * bins) / n);
    }
    return label;
}

} // namespace

DataSplit split_stratified(const ResponseVector& y, std::array<double, 3> fractions, int bins,
                           std::uint64_t seed)
{
    const Index n = y.size();
    double total = 0.0;
    int nsplits = 0;
    for (double f : fractions) {
        require(f >= 0.0, "split fractions must be nonnegative");
        total += f;
        if (f > 0.0) ++nsplits;
    }
    require(nsplits >= 1 && total <= 1.0 + 1e-12, "split fractions must be positive and sum to <= 1");

    std::vector<int> label;
    DataSplit split;
    if (y.kind() == ResponseKind::binary) {
        label.resize(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) label[static_cast<std::size_t>(i)] = static_cast<int>(y.values()[i]);
        split.strata_bins = 2;
    } else {
        require(bins >= 2, "continuous stratification needs bins >= 2");
        label = quantile_bins(y.values(), bins);
        split.strata_bins = bins;
    }

    std::map<int, std::vector<Index>> strata;
    for (Index i = 0; i < n; ++i) strata[label[static_cast<std::size_t>(i)]].push_back(i);
    for (const auto& [s, members] : strata) {
        if (static_cast<int>(members.size()) < nsplits) {
            throw InvalidArgument("stratum " + std::to_string(s) + " has " +
                                  std::to_string(members.size()) + " observation(s), fewer than the " +
                                  std::to_string(nsplits) + " requested splits");
        }
    }

    // Controlled rounding: per split, every stratum gets floor(s*f) and the
    // leftover of round(n*f) goes to strata with the largest remainders.
    const std::size_t nstrata = strata.size();
    std::vector<std::size_t> sizes;
    for (const auto& kv : strata) sizes.push_back(kv.second.size());
    std::vector<std::array<std::size_t, 3>> counts(nstrata, {0, 0, 0});
    std::vector<std::size_t> used(nstrata, 0);
    // Targets come from rounding cumulative fractions so they add up to round(n * sum f).
    double cum = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double f = fractions[static_cast<std::size_t>(k)];
        if (f <= 0.0) continue;
        const auto before = std::llround(static_cast<double>(n) * cum);
        cum += f;
        const auto target = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cum) - before);
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::size_t>> rema;
        for (std::size_t s = 0; s < nstrata; ++s) {
            const double exact = static_cast<double>(sizes[s]) * f;
            auto base = static_cast<std::size_t>(std::floor(exact));
            base = std::min(base, sizes[s] - used[s]);
            counts[s][static_cast<std::size_t>(k)] = base;
            used[s] += base;
            assigned += base;
            rema.emplace_back(exact - std::floor(exact), s);
        }
        std::stable_sort(rema.begin(), rema.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (bool progress = true; assigned < target && progress;) {
            progress = false;
            for (const auto& [r, s] : rema) {
                if (assigned >= target) break;
                if (used[s] < sizes[s]) {
                    ++counts[s][static_cast<std::size_t>(k)];
                    ++used[s];
                    ++assigned;
                    progress = true;
                }
            }
        }
    }

    Rng rng(seed);
    std::size_t s = 0;
    for (auto& [lab, members] : strata) {
        std::shuffle(members.begin(), members.end(), rng);
        std::size_t pos = 0;
        for (int k = 0; k < 3; ++k) {
            auto& dst = k == 0 ? split.train_idx : (k == 1 ? split.val_idx : split.test_idx);
            for (std::size_t c = 0; c < counts[s][static_cast<std::size_t>(k)]; ++c) dst.push_back(members[pos++]);
        }
        ++s;
    }
    std::sort(split.train_idx.begin(), split.train_idx.end());
    std::sort(split.val_idx.begin(), split.val_idx.end());
    std::sort(split.test_idx.begin(), split.test_idx.end());
    return split;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, std::size_t col)
{
    const std::string cell = trim(raw);
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last) {
        throw InvalidArgument("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                              ", column " + std::to_string(col));
    }
    if (!std::isfinite(v)) {
        throw InvalidArgument("non-finite cell '" + cell + "' at row " + std::to_string(row) +
                              ", column " + std::to_string(col));
    }
    return v;
}

std::vector<std::vector<double>> read_numeric_rows(std::ifstream& in, std::size_t first_row,
                                                   std::size_t expected_cols)
{
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t row = first_row;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (expected_cols == 0) expected_cols = cells.size();
        if (cells.size() != expected_cols) {
            throw InvalidArgument("ragged row " + std::to_string(row) + ": expected " +
                                  std::to_string(expected_cols) + " cells, found " +
                                  std::to_string(cells.size()));
        }
        std::vector<double> vals(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) vals[c] = parse_cell(cells[c], row, c + 1);
        rows.push_back(std::move(vals));
    }
    return rows;
}

} // namespace

Table read_table(const std::string& path, bool has_header, const OutcomeColumn& outcome)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);

    std::vector<std::string> header;
    std::size_t line_no = 0;
    if (has_header) {
        std::string line;
        if (!std::getline(in, line)) throw InvalidArgument(path + ": empty file");
        ++line_no;
        for (auto& h : split_csv_line(line)) header.push_back(trim(h));
    }
    const auto rows = read_numeric_rows(in, line_no, header.size());
    if (rows.empty()) throw InvalidArgument(path + ": no data rows");

    const auto ncols = static_cast<Index>(rows.front().size());
    Index ycol = -1;
    if (const auto* name = std::get_if<std::string>(&outcome)) {
        const auto it = std::find(header.begin(), header.end(), *name);
        if (it == header.end()) throw InvalidArgument("outcome column '" + *name + "' not found");
        ycol = static_cast<Index>(it - header.begin());
    } else if (const auto* idx = std::get_if<Index>(&outcome)) {
        require(*idx >= 0 && *idx < ncols, "outcome column index out of range");
        ycol = *idx;
    }

    const auto n = static_cast<Index>(rows.size());
    const Index p = ycol >= 0 ? ncols - 1 : ncols;
    MatrixXd x(n, p);
    VectorXd y(ycol >= 0 ? n : 0);
    for (Index i = 0; i < n; ++i) {
        Index jj = 0;
        for (Index j = 0; j < ncols; ++j) {
            const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (j == ycol) y[i] = v;
            else x(i, jj++) = v;
        }
    }
    std::vector<std::string> names;
    for (Index j = 0; j < static_cast<Index>(header.size()); ++j)
        if (j != ycol) names.push_back(header[static_cast<std::size_t>(j)]);

    Table t{FeatureMatrix(std::move(x), std::move(names)), std::nullopt};
    if (ycol >= 0) {
        const bool binary = (y.array() == 0.0 || y.array() == 1.0).all();
        t.outcome = ResponseVector(std::move(y), binary ? ResponseKind::binary : ResponseKind::continuous);
    }
    return t;
}

void write_table(const std::string& path, const MatrixXd& values, const std::vector<std::string>& header)
{
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path);
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
        out << '\n';
    }
    char buf[32];
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", values(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

MatrixXd read_matrix_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    const auto rows = read_numeric_rows(in, 0, 0);
    if (rows.empty()) throw InvalidArgument(path + ": empty matrix file");
    MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    return m;
}

} // namespace hdsparse
