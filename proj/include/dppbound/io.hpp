#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dppbound/likelihood.hpp"
#include "dppbound/mcmc.hpp"
#include "dppbound/types.hpp"
#include "dppbound/vi.hpp"

namespace dppbound {

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

/// Writes to a temporary file beside `path`, then renames over it.
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// Samples of a point process, in file order.
struct PointPatterns {
  Index dim = 1;
  std::vector<std::string> ids;
  std::vector<PointSet> patterns;
};

/// CSV with header `sample_id,x1[,x2,...]`, rows grouped by sample id. An
/// empty sample has no rows and therefore does not appear in the file.
std::string format_point_patterns(const PointPatterns& p);
PointPatterns parse_point_patterns(const std::string& text);
void write_point_patterns(const std::string& path, const PointPatterns& p);
PointPatterns read_point_patterns(const std::string& path);

/// Ground-set items: CSV with header `x1[,x2,...]`.
PointSet read_ground_set(const std::string& path);
std::string format_ground_set(const PointSet& items);

/// Maps pattern coordinates onto ground items; every point must equal an
/// item bit for bit.
FiniteDataset finite_dataset_from_patterns(const PointSet& ground, const PointPatterns& p);
PointPatterns patterns_from_finite(const FiniteDataset& data);

/// `iter,theta_1..theta_p,accepted,u,logalpha_lo,logalpha_hi,m_cur,m_prop,refinements,fallback_flag`
std::string format_chain_csv(const ChainTrace& trace);

/// `m,lower,upper,gap,exact,seconds`; exact left blank when absent.
std::string format_bounds_csv(const std::vector<SweepRow>& rows, const std::vector<std::optional<double>>& exact);

/// Flat `key = value` lines.
using Summary = std::vector<std::pair<std::string, std::string>>;
std::string format_summary(const Summary& s);
Summary parse_summary(const std::string& text);

/// Parses a CSV file written by this module into a header and numeric rows.
struct NumericTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;   ///< blank cells are NaN
  Index column(const std::string& name) const;
};
NumericTable parse_numeric_csv(const std::string& text);

}  // namespace dppbound
