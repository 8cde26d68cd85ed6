#pragma once
#include <hdsparse/common.hpp>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hdsparse {

/**
 * Dense n x p design matrix.
 *
 * Entries are always finite; construction rejects NaN/Inf with the
 * offending column index. `standardized` is set by standardize_columns.
 */
class FeatureMatrix {
  public:
    FeatureMatrix() = default;
    explicit FeatureMatrix(MatrixXd values,
                           std::vector<std::string> column_names = {},
                           bool standardized = false);

    const MatrixXd& values() const { return values_; }
    const std::vector<std::string>& column_names() const { return names_; }
    bool standardized() const { return standardized_; }
    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }

    /// Column name, or "x<j>" when the matrix carries no names.
    std::string name(Index j) const;

    /// Rows selected by `idx`, names and flag carried over.
    FeatureMatrix select_rows(const std::vector<Index>& idx) const;

  private:
    MatrixXd values_;
    std::vector<std::string> names_;
    bool standardized_ = false;
};

enum class ResponseKind { continuous, binary };

class ResponseVector {
  public:
    ResponseVector() = default;
    ResponseVector(VectorXd values, ResponseKind kind);

    const VectorXd& values() const { return values_; }
    ResponseKind kind() const { return kind_; }
    Index size() const { return values_.size(); }

    ResponseVector select(const std::vector<Index>& idx) const;

  private:
    VectorXd values_;
    ResponseKind kind_ = ResponseKind::continuous;
};

struct StandardizationRecord {
    VectorXd means;
    VectorXd sds;               // 1 for constant columns
    std::vector<bool> constant; // flagged constant columns
    Warnings warnings;

    /// Maps standardized values back to the original scale.
    MatrixXd invert(const MatrixXd& standardized) const;
    /// Applies the stored transform to new rows.
    MatrixXd apply(const MatrixXd& raw) const;
};

struct DataSplit {
    std::vector<Index> train_idx;
    std::vector<Index> val_idx;
    std::vector<Index> test_idx;
    int strata_bins = 0;
};

/// Centers each column by its mean and scales by its sample sd (n-1 denominator).
std::pair<FeatureMatrix, StandardizationRecord> standardize_columns(const FeatureMatrix& m);

/// Seeded stratified split into (train, val, test); zero fractions give empty sets.
DataSplit split_stratified(const ResponseVector& y, std::array<double, 3> fractions, int bins,
                           std::uint64_t seed);

/// Outcome column selector for read_table: by header name or by 0-based index.
using OutcomeColumn = std::variant<std::monostate, std::string, Index>;

struct Table {
    FeatureMatrix features;
    std::optional<ResponseVector> outcome;
};

/// Reads a comma-separated numeric table. Binary kind is inferred when the outcome is all 0/1.
Table read_table(const std::string& path, bool has_header, const OutcomeColumn& outcome = {});

/// Writes values with 17 significant digits so read_table round-trips them exactly.
void write_table(const std::string& path, const MatrixXd& values,
                 const std::vector<std::string>& header = {});

/// Reads a headerless numeric CSV as a dense matrix (used for Psi files).
MatrixXd read_matrix_csv(const std::string& path);

} // namespace hdsparse
