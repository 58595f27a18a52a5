#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "infodemic/emotion.hpp"
#include "infodemic/timeutil.hpp"

namespace infodemic {

inline constexpr const char* kUnknownCountry = "Unknown";

// Maps free-text profile locations to ISO-3166 alpha-2 codes.
class LocationResolver {
 public:
  virtual ~LocationResolver() = default;
  virtual std::optional<std::string> resolve(std::string_view location) const = 0;
};

// Ordered (pattern -> country) table; the first matching pattern wins. A
// pattern matches when it occurs in the lowercased location with no letter or
// digit directly before or after it, so "us" does not match "houston".
class Gazetteer : public LocationResolver {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<std::pair<std::string, std::string>> patterns);

  // TSV "pattern<TAB>country_code"; '#' starts a comment line.
  static Gazetteer load(const std::filesystem::path& path);

  std::optional<std::string> resolve(std::string_view location) const override;
  const std::vector<std::pair<std::string, std::string>>& patterns() const { return patterns_; }

 private:
  std::vector<std::pair<std::string, std::string>> patterns_;
};

// Country code, or kUnknownCountry.
std::string resolve_country(std::string_view location, const LocationResolver& resolver);

enum class Wave { First, Delta, Omicron, Other };

std::string_view wave_name(Wave w);

// Inclusive calendar-month windows: First 2020-01..2020-06,
// Delta 2021-04..2021-10, Omicron 2021-12..2022-03; anything else is Other.
Wave assign_wave(Date d);

struct GroupRate {
  std::size_t total = 0;
  std::size_t misinfo = 0;
  double rate = 0.0;  // 100 * misinfo / total
};

// "x.xxxx": 100 * misinfo / total cut (not rounded) to 4 decimals, computed in
// integer arithmetic.
std::string format_rate4(std::size_t misinfo, std::size_t total);

// Groups with total <= min_count are omitted.
std::map<std::string, GroupRate> misinfo_rate_by(std::span<const std::pair<std::string, bool>> records,
                                                 std::size_t min_count);

struct EmotionCountryRecord {
  std::string country;
  Emotion emotion;
  bool misinfo;
};

struct EmotionMatrix {
  std::vector<std::string> countries;  // by misinformation count, descending
  std::vector<std::size_t> misinfo_counts;
  std::vector<std::array<double, kEmotionCount>> percent;  // each row sums to 100
};

// Misinformation records only; the top_n countries by misinformation count
// (ties by code). Unknown countries are excluded.
EmotionMatrix emotion_country_matrix(std::span<const EmotionCountryRecord> records, std::size_t top_n);

struct CategoryRecord {
  std::string country;
  Date date;
  std::string category;
};

struct CategoryPeriodRow {
  std::string period;  // "2020-H1"
  std::string country;
  std::vector<std::size_t> counts;  // aligned with CategoryPeriodTable::categories
  std::vector<double> percent;      // rounded to 2 decimals
  std::size_t total = 0;
};

struct CategoryPeriodTable {
  std::vector<std::string> categories;
  std::vector<CategoryPeriodRow> rows;  // sorted by period then country
};

std::string half_year_label(Date d);

double round_to(double value, int decimals);

// Calendar half-year buckets (Jan 1 / Jul 1). Periods with no records do not
// appear. Records whose category is not listed throw DataError.
CategoryPeriodTable category_period_table(std::span<const CategoryRecord> records,
                                          const std::vector<std::string>& categories);

enum class Granularity { Daily, Monthly };
enum class SeriesMode { Rate, Count };

std::string_view granularity_name(Granularity g);
std::optional<Granularity> granularity_from_name(std::string_view name);

struct TimeSeries {
  Granularity granularity = Granularity::Monthly;
  std::vector<std::pair<Date, double>> points;  // strictly increasing dates
  std::string label;
};

// Rate: 100 * misinfo / total per bucket; Count: misinformation count per
// bucket. Buckets without tweets are not emitted. Monthly points are dated on
// the first of the month.
TimeSeries build_series(std::span<const std::pair<Date, bool>> records, Granularity granularity, SeriesMode mode,
                        std::string label = {});

enum class Resample { Sum, Mean };

// Daily -> monthly. A monthly series is returned unchanged.
TimeSeries to_monthly(const TimeSeries& series, Resample how);

// CSV with header "date,value". Rows are sorted by date; duplicate dates and
// non-finite values throw DataError. For Monthly, dates are normalized to the
// first of the month before the duplicate check.
TimeSeries load_external_series(const std::filesystem::path& path, Granularity granularity,
                                std::string label = {});

void write_series_csv(const TimeSeries& series, const std::filesystem::path& path);

struct LagResult {
  std::map<int, double> correlations;  // lag -> Pearson r
  int best_lag = 0;
  double best_r = 0.0;
  std::size_t overlap = 0;  // aligned points used
};

// r(k) = corr(a(t), b(t + k)) over the dates both series share; positive k
// means a leads b. best_lag maximizes |r| (ties: smaller |k|, then negative
// first) and best_r keeps its sign. Lags leaving fewer than 3 pairs or a
// constant side are skipped. Throws std::invalid_argument on a granularity
// mismatch or negative max_lag, DataError when the overlap is shorter than
// max_lag + 3 or has zero variance.
LagResult lead_lag(const TimeSeries& a, const TimeSeries& b, int max_lag);

struct PeriodShare {
  double fraction = 0.0;
  bool undefined = false;  // whole-series sum was zero
};

// Sum over [from, to] (inclusive) divided by the whole-series sum.
PeriodShare period_share(const TimeSeries& series, Date from, Date to);

}  // namespace infodemic
