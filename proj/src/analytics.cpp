#include "infodemic/analytics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "infodemic/csv.hpp"
#include "infodemic/errors.hpp"

namespace infodemic {
namespace {

using namespace std::chrono;

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

int month_index(Date d) { return static_cast<int>(d.year()) * 12 + static_cast<int>(static_cast<unsigned>(d.month())) - 1; }

Date bucket_of(Date d, Granularity g) { return g == Granularity::Monthly ? first_of_month(d) : d; }

Date shift(Date d, int k, Granularity g) {
  if (g == Granularity::Monthly) return first_of_month(d) + months{k};
  return Date{sys_days{d} + days{k}};
}

std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void zscore(std::vector<double>& v) {
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(v.size()));
  if (!(sd > 0.0)) throw DataError("lead-lag: series is constant over the overlapping period");
  for (double& x : v) x = (x - mean) / sd;
}

}  // namespace

Gazetteer::Gazetteer(std::vector<std::pair<std::string, std::string>> patterns) : patterns_(std::move(patterns)) {
  for (auto& [pattern, code] : patterns_) {
    if (pattern.empty()) throw DataError("gazetteer pattern must not be empty");
    if (pattern != lower(pattern)) throw DataError("gazetteer pattern must be lowercase: " + pattern);
    if (code.empty()) throw DataError("gazetteer pattern '" + pattern + "' has no country code");
  }
}

Gazetteer Gazetteer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gazetteer: " + path.string());
  std::vector<std::pair<std::string, std::string>> patterns;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected pattern<TAB>country_code");
    patterns.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return Gazetteer(std::move(patterns));
}

std::optional<std::string> Gazetteer::resolve(std::string_view location) const {
  const std::string text = lower(location);
  if (text.empty()) return std::nullopt;
  for (const auto& [pattern, code] : patterns_) {
    for (auto pos = text.find(pattern); pos != std::string::npos; pos = text.find(pattern, pos + 1)) {
      const bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
      const auto end = pos + pattern.size();
      const bool right_ok = end == text.size() || !is_word_char(text[end]);
      if (left_ok && right_ok) return code;
    }
  }
  return std::nullopt;
}

std::string resolve_country(std::string_view location, const LocationResolver& resolver) {
  auto code = resolver.resolve(location);
  return code ? *code : std::string(kUnknownCountry);
}

std::string_view wave_name(Wave w) {
  switch (w) {
    case Wave::First: return "First";
    case Wave::Delta: return "Delta";
    case Wave::Omicron: return "Omicron";
    case Wave::Other: return "Other";
  }
  return "Other";
}

Wave assign_wave(Date d) {
  const int m = month_index(d);
  auto in = [m](int y0, int m0, int y1, int m1) { return m >= y0 * 12 + m0 - 1 && m <= y1 * 12 + m1 - 1; };
  if (in(2020, 1, 2020, 6)) return Wave::First;
  if (in(2021, 4, 2021, 10)) return Wave::Delta;
  if (in(2021, 12, 2022, 3)) return Wave::Omicron;
  return Wave::Other;
}

std::string format_rate4(std::size_t misinfo, std::size_t total) {
  if (total == 0) throw std::invalid_argument("rate of an empty group");
  const unsigned long long scaled = static_cast<unsigned long long>(misinfo) * 1000000ULL / total;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%llu.%04llu", scaled / 10000ULL, scaled % 10000ULL);
  return buf;
}

std::map<std::string, GroupRate> misinfo_rate_by(std::span<const std::pair<std::string, bool>> records,
                                                 std::size_t min_count) {
  std::map<std::string, GroupRate> groups;
  for (const auto& [key, misinfo] : records) {
    auto& g = groups[key];
    ++g.total;
    if (misinfo) ++g.misinfo;
  }
  for (auto it = groups.begin(); it != groups.end();) {
    if (it->second.total <= min_count) {
      it = groups.erase(it);
    } else {
      it->second.rate = 100.0 * static_cast<double>(it->second.misinfo) / static_cast<double>(it->second.total);
      ++it;
    }
  }
  return groups;
}

EmotionMatrix emotion_country_matrix(std::span<const EmotionCountryRecord> records, std::size_t top_n) {
  std::map<std::string, std::array<std::size_t, kEmotionCount>> counts;
  for (const auto& r : records) {
    if (!r.misinfo || r.country == kUnknownCountry || r.country.empty()) continue;
    ++counts[r.country][static_cast<std::size_t>(r.emotion)];
  }
  std::vector<std::pair<std::string, std::size_t>> totals;
  for (const auto& [country, row] : counts) {
    std::size_t t = 0;
    for (auto c : row) t += c;
    totals.emplace_back(country, t);
  }
  std::stable_sort(totals.begin(), totals.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (totals.size() > top_n) totals.resize(top_n);

  EmotionMatrix m;
  for (const auto& [country, total] : totals) {
    m.countries.push_back(country);
    m.misinfo_counts.push_back(total);
    std::array<double, kEmotionCount> row{};
    const auto& c = counts[country];
    for (std::size_t e = 0; e < kEmotionCount; ++e)
      row[e] = 100.0 * static_cast<double>(c[e]) / static_cast<double>(total);
    m.percent.push_back(row);
  }
  return m;
}

std::string half_year_label(Date d) {
  const unsigned month = static_cast<unsigned>(d.month());
  return std::to_string(static_cast<int>(d.year())) + (month <= 6 ? "-H1" : "-H2");
}

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

CategoryPeriodTable category_period_table(std::span<const CategoryRecord> records,
                                          const std::vector<std::string>& categories) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < categories.size(); ++i) index[categories[i]] = i;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> cells;
  for (const auto& r : records) {
    auto it = index.find(r.category);
    if (it == index.end()) throw DataError("unknown category '" + r.category + "'");
    auto& row = cells[{half_year_label(r.date), r.country}];
    if (row.empty()) row.assign(categories.size(), 0);
    ++row[it->second];
  }
  CategoryPeriodTable table;
  table.categories = categories;
  for (const auto& [key, counts] : cells) {
    CategoryPeriodRow row;
    row.period = key.first;
    row.country = key.second;
    row.counts = counts;
    for (auto c : counts) row.total += c;
    for (auto c : counts)
      row.percent.push_back(round_to(100.0 * static_cast<double>(c) / static_cast<double>(row.total), 2));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string_view granularity_name(Granularity g) { return g == Granularity::Daily ? "daily" : "monthly"; }

std::optional<Granularity> granularity_from_name(std::string_view name) {
  if (name == "daily") return Granularity::Daily;
  if (name == "monthly") return Granularity::Monthly;
  return std::nullopt;
}

TimeSeries build_series(std::span<const std::pair<Date, bool>> records, Granularity granularity, SeriesMode mode,
                        std::string label) {
  std::map<sys_days, std::pair<std::size_t, std::size_t>> buckets;  // total, misinfo
  for (const auto& [date, misinfo] : records) {
    auto& b = buckets[sys_days{bucket_of(date, granularity)}];
    ++b.first;
    if (misinfo) ++b.second;
  }
  TimeSeries s;
  s.granularity = granularity;
  s.label = std::move(label);
  for (const auto& [day, b] : buckets) {
    const double value = mode == SeriesMode::Rate
                             ? 100.0 * static_cast<double>(b.second) / static_cast<double>(b.first)
                             : static_cast<double>(b.second);
    s.points.emplace_back(Date{day}, value);
  }
  return s;
}

TimeSeries to_monthly(const TimeSeries& series, Resample how) {
  if (series.granularity == Granularity::Monthly) return series;
  std::map<sys_days, std::pair<double, std::size_t>> months_acc;
  for (const auto& [date, value] : series.points) {
    auto& acc = months_acc[sys_days{first_of_month(date)}];
    acc.first += value;
    ++acc.second;
  }
  TimeSeries out;
  out.granularity = Granularity::Monthly;
  out.label = series.label;
  for (const auto& [day, acc] : months_acc) {
    const double v = how == Resample::Sum ? acc.first : acc.first / static_cast<double>(acc.second);
    out.points.emplace_back(Date{day}, v);
  }
  return out;
}

TimeSeries load_external_series(const std::filesystem::path& path, Granularity granularity, std::string label) {
  std::ifstream in(path);
  if (!in) throw MissingDependency("cannot open external series: " + path.string());
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() < 2 || lower((*header)[0]) != "date" || lower((*header)[1]) != "value")
    throw DataError(path.string() + ": expected header 'date,value'");
  std::map<sys_days, double> points;
  while (auto row = reader.next()) {
    if (row->size() == 1 && (*row)[0].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(reader.line());
    if (row->size() != 2) throw DataError(where + ": expected 2 fields");
    auto date = parse_date((*row)[0]);
    if (!date) throw DataError(where + ": bad date '" + (*row)[0] + "'");
    double value = 0;
    try {
      std::size_t used = 0;
      value = std::stod((*row)[1], &used);
      if (used != (*row)[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(where + ": bad value '" + (*row)[1] + "'");
    }
    if (!std::isfinite(value)) throw DataError(where + ": value is not finite");
    const sys_days key{bucket_of(*date, granularity)};
    if (!points.emplace(key, value).second) throw DataError(where + ": duplicate date " + format_date(Date{key}));
  }
  TimeSeries s;
  s.granularity = granularity;
  s.label = label.empty() ? path.stem().string() : std::move(label);
  for (const auto& [day, v] : points) s.points.emplace_back(Date{day}, v);
  return s;
}

void write_series_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "date,value\n";
  char buf[64];
  for (const auto& [date, value] : series.points) {
    std::snprintf(buf, sizeof buf, "%.10g", value);
    out << (series.granularity == Granularity::Monthly ? format_month(date) : format_date(date)) << ',' << buf
        << '\n';
  }
}

LagResult lead_lag(const TimeSeries& a, const TimeSeries& b, int max_lag) {
  if (max_lag < 0) throw std::invalid_argument("max_lag must be non-negative");
  if (a.granularity != b.granularity) throw std::invalid_argument("lead-lag series must share a granularity");
  const Granularity g = a.granularity;
  std::map<sys_days, double> av, bv;
  for (const auto& [d, v] : a.points) av[sys_days{bucket_of(d, g)}] = v;
  for (const auto& [d, v] : b.points) bv[sys_days{bucket_of(d, g)}] = v;

  // Aligned overlap: the dates present in both series.
  std::vector<sys_days> shared;
  for (const auto& [d, _] : av) {
    if (bv.count(d)) shared.push_back(d);
  }
  const std::size_t required = static_cast<std::size_t>(max_lag) + 3;
  if (shared.size() < required)
    throw DataError("lead-lag needs at least " + std::to_string(required) + " overlapping points, found " +
                    std::to_string(shared.size()));
  std::vector<double> za, zb;
  for (auto d : shared) {
    za.push_back(av[d]);
    zb.push_back(bv[d]);
  }
  zscore(za);
  zscore(zb);
  std::map<sys_days, std::size_t> pos;
  for (std::size_t i = 0; i < shared.size(); ++i) pos[shared[i]] = i;

  LagResult result;
  result.overlap = shared.size();
  bool found = false;
  for (int k = -max_lag; k <= max_lag; ++k) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < shared.size(); ++i) {
      auto j = pos.find(sys_days{shift(Date{shared[i]}, k, g)});
      if (j == pos.end()) continue;
      x.push_back(za[i]);
      y.push_back(zb[j->second]);
    }
    if (x.size() < 3) continue;
    auto r = pearson(x, y);
    if (!r) continue;
    result.correlations[k] = *r;
    const double score = std::abs(*r), best = std::abs(result.best_r);
    const bool better = !found || score > best + 1e-12 ||
                        (std::abs(score - best) <= 1e-12 &&
                         (std::abs(k) < std::abs(result.best_lag) ||
                          (std::abs(k) == std::abs(result.best_lag) && k < result.best_lag)));
    if (better) {
      result.best_lag = k;
      result.best_r = *r;
      found = true;
    }
  }
  if (!found) throw DataError("lead-lag: no lag has a defined correlation");
  return result;
}

PeriodShare period_share(const TimeSeries& series, Date from, Date to) {
  double whole = 0, window = 0;
  const sys_days lo{from}, hi{to};
  for (const auto& [d, v] : series.points) {
    whole += v;
    const sys_days day{d};
    if (day >= lo && day <= hi) window += v;
  }
  if (whole == 0.0) return {0.0, true};
  return {window / whole, false};
}

}  // namespace infodemic
