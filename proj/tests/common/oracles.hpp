#pragma once

// Independent reference computations shared by the unit and acceptance tests.
// Written without calling into the library so they can check it.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Exact fraction over 64-bit integers (small fixtures only), always reduced, denominator > 0.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d = 1) : num(n), den(d) { reduce(); }

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long a = num < 0 ? -num : num, b = den;
    while (b != 0) {
      long long t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      num /= a;
      den /= a;
    }
  }
  double to_double() const { return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den)); }

  friend Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
  friend Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }
  friend bool operator==(Rational a, Rational b) { return a.num == b.num && a.den == b.den; }
};

struct ExactMetrics {
  Rational accuracy, precision, recall, f1;
};

// Support-weighted binary metrics from raw label vectors (0 or 1).
inline ExactMetrics weighted_metrics(const std::vector<int>& preds, const std::vector<int>& golds) {
  const long long n = static_cast<long long>(golds.size());
  ExactMetrics out;
  long long correct = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) correct += preds[i] == golds[i];
  out.accuracy = Rational(correct, n);
  for (int c = 0; c < 2; ++c) {
    long long tp = 0, support = 0, predicted = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      tp += golds[i] == c && preds[i] == c;
      support += golds[i] == c;
      predicted += preds[i] == c;
    }
    const Rational p = predicted ? Rational(tp, predicted) : Rational(0);
    const Rational r = support ? Rational(tp, support) : Rational(0);
    const Rational f = (p.num == 0 && r.num == 0) ? Rational(0) : Rational(2) * p * r / (p + r);
    const Rational w(support, n);
    out.precision = out.precision + w * p;
    out.recall = out.recall + w * r;
    out.f1 = out.f1 + w * f;
  }
  return out;
}

// Brute-force class TF-IDF: term -> per-class weight.
inline std::map<std::string, std::vector<double>> ctfidf(
    const std::vector<std::vector<std::vector<std::string>>>& classes) {
  const std::size_t k = classes.size();
  std::map<std::string, std::vector<long long>> tf;
  long long tokens = 0;
  for (std::size_t c = 0; c < k; ++c) {
    for (const auto& doc : classes[c]) {
      std::vector<std::string> terms(doc.begin(), doc.end());
      for (std::size_t i = 1; i < doc.size(); ++i) terms.push_back(doc[i - 1] + ' ' + doc[i]);
      for (const auto& t : terms) {
        auto& row = tf[t];
        row.resize(k, 0);
        row[c] += 1;
        tokens += 1;
      }
    }
  }
  const long double avg = static_cast<long double>(tokens) / static_cast<long double>(k);
  std::map<std::string, std::vector<double>> out;
  for (const auto& [t, row] : tf) {
    long long f = 0;
    for (auto x : row) f += x;
    const long double idf = std::log1p(avg / static_cast<long double>(f));
    auto& w = out[t];
    for (auto x : row) w.push_back(static_cast<double>(static_cast<long double>(x) * idf));
  }
  return out;
}

inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return std::nullopt;
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Pearson r between a[i] and b[i + k] for equally spaced, fully aligned
// series, for every k in [-max_lag, max_lag] with at least 3 pairs.
inline std::map<int, double> lagged_correlations(const std::vector<double>& a, const std::vector<double>& b,
                                                 int max_lag) {
  std::map<int, double> out;
  const int n = static_cast<int>(a.size());
  for (int k = -max_lag; k <= max_lag; ++k) {
    std::vector<double> x, y;
    for (int i = 0; i < n; ++i) {
      if (i + k < 0 || i + k >= n) continue;
      x.push_back(a[i]);
      y.push_back(b[i + k]);
    }
    if (x.size() < 3) continue;
    if (auto r = pearson(x, y)) out[k] = *r;
  }
  return out;
}

// Percentage 100*m/t cut (not rounded) to `places` decimals.
inline std::string truncated_percent(long long m, long long t, int places) {
  long long scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  const long long v = static_cast<long long>(m) * 100 * scale / t;
  const long long whole = static_cast<long long>(v / scale), frac = static_cast<long long>(v % scale);
  std::string f = std::to_string(frac);
  f.insert(0, static_cast<std::size_t>(places) - f.size(), '0');
  return std::to_string(whole) + "." + f;
}

// `value` cut to as many decimals as `shown` carries, formatted the same way.
// A 1e-9 nudge keeps exact decimals such as 0.92 from dropping a digit.
inline std::string truncate_like(double value, const std::string& shown) {
  const auto dot = shown.find('.');
  const int places = dot == std::string::npos ? 0 : static_cast<int>(shown.size() - dot - 1);
  const double scale = std::pow(10.0, places);
  const long long cut = static_cast<long long>(std::floor(value * scale + 1e-9));
  std::string digits = std::to_string(cut);
  if (places == 0) return digits;
  if (digits.size() <= static_cast<std::size_t>(places)) digits.insert(0, places + 1 - digits.size(), '0');
  digits.insert(digits.size() - places, ".");
  return digits;
}

}  // namespace oracle
