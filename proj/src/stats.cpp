#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "posmark/error.hpp"
#include "posmark/stats.hpp"

namespace posmark {

__extension__ using u128 = unsigned __int128;

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

/// Stirling series remainder: ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)].
double stirling_correction(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 -
               r2 * (1.0 / 360 -
                     r2 * (1.0 / 1260 -
                           r2 * (1.0 / 1680 -
                                 r2 * (1.0 / 1188 - r2 * (691.0 / 360360 - r2 * (1.0 / 156)))))));
}

/// Lanczos approximation, g = 7, n = 9.
double lanczos_log_gamma(double x) {
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  x -= 1.0;
  double sum = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) sum += c[i] / (x + static_cast<double>(i));
  const double t = x + 7.5;
  return kHalfLog2Pi + (x + 0.5) * std::log(t) - t + std::log(sum);
}

/// ln Γ(a) - ln Γ(a + b) for a >= 10, without cancelling two huge numbers.
double log_gamma_ratio(double a, double b) {
  return -(a - 0.5) * std::log1p(b / a) - b * std::log(a + b) + b + stirling_correction(a) -
         stirling_correction(a + b);
}

/// Continued fraction for I_x(a, b) (modified Lentz). Converges quickly for
/// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  constexpr int max_iter = 200000;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < eps) return h;
  }
  throw Error("incomplete beta: continued fraction did not converge");
}

/// I_x(a, b) given x, y = 1 - x and their logarithms, each supplied
/// separately so callers can keep full precision near 0 and 1.
double incomplete_beta_parts(double a, double b, double x, double y, double log_x, double log_y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double lnb = log_beta(a, b);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    const double front = std::exp(a * log_x + b * log_y - lnb) / a;
    return front * beta_continued_fraction(a, b, x);
  }
  const double front = std::exp(b * log_y + a * log_x - lnb) / b;
  return 1.0 - front * beta_continued_fraction(b, a, y);
}

} // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error("log_gamma: argument must be positive");
  if (x >= 10.0) return (x - 0.5) * std::log(x) - x + kHalfLog2Pi + stirling_correction(x);
  if (x < 1.0) return lanczos_log_gamma(x + 1.0) - std::log(x);
  return lanczos_log_gamma(x);
}

double log_beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("log_beta: arguments must be positive");
  const double big = std::max(a, b), small = std::min(a, b);
  if (big >= 10.0) return log_gamma(small) + log_gamma_ratio(big, small);
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete_beta: a and b must be positive");
  if (x < 0.0 || x > 1.0) throw Error("incomplete_beta: x outside [0, 1]");
  const double y = 1.0 - x;
  return incomplete_beta_parts(a, b, x, y, x > 0 ? std::log(x) : 0.0, y > 0 ? std::log(y) : 0.0);
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw Error("student t: degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  // p = I_x(df/2, 1/2) with x = df / (df + t²).
  const double t2 = t * t;
  const double x = df / (df + t2);
  const double y = t2 / (df + t2);
  const double log_x = -std::log1p(t2 / df);
  const double log_y = -std::log1p(df / t2);
  const double p = incomplete_beta_parts(0.5 * df, 0.5, x, y, log_x, log_y);
  return std::clamp(p, 0.0, 1.0);
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw Error("student_t_cdf: degrees of freedom must be positive");
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return 0.5;
  const double half_tail = 0.5 * student_t_two_sided_p(x, df);
  return x > 0.0 ? 1.0 - half_tail : half_tail;
}

// ---------------------------------------------------------------------------

TTestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error("welch_t: each sample needs at least two values");
  auto moments = [](std::span<const double> s) {
    double sum = 0;
    for (double v : s) sum += v;
    const double mean = sum / static_cast<double>(s.size());
    double ss = 0;
    for (double v : s) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(s.size() - 1)};
  };
  const auto [ma, var_a] = moments(a);
  const auto [mb, var_b] = moments(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());

  TTestResult r;
  r.mean_a = ma;
  r.mean_b = mb;
  r.n_a = a.size();
  r.n_b = b.size();
  const double va = var_a / na, vb = var_b / nb;
  const double se2 = va + vb;
  if (se2 == 0.0) {
    r.degenerate = true;
    r.df = na + nb - 2.0;
    if (ma == mb) {
      r.t = 0.0;
      r.p_two_sided = 1.0;
    } else {
      r.t = ma > mb ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
      r.p_two_sided = 0.0;
    }
    return r;
  }
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  r.p_two_sided = student_t_two_sided_p(r.t, r.df);
  return r;
}

// ---------------------------------------------------------------------------

double log_likelihood_g2(std::size_t o1, std::size_t n1, std::size_t o2, std::size_t n2) {
  if (n1 == 0 || n2 == 0) throw Error("keyness: corpus totals must be positive");
  const double O1 = static_cast<double>(o1), O2 = static_cast<double>(o2);
  const double N1 = static_cast<double>(n1), N2 = static_cast<double>(n2);
  const double e1 = N1 * (O1 + O2) / (N1 + N2);
  const double e2 = N2 * (O1 + O2) / (N1 + N2);
  const double t1 = o1 > 0 ? O1 * std::log(O1 / e1) : 0.0;
  const double t2 = o2 > 0 ? O2 * std::log(O2 / e2) : 0.0;
  return std::max(0.0, 2.0 * (t1 + t2));
}

KeynessResult keyness(const WordCounts& target_counts, const WordCounts& reference_counts,
                      const KeynessOptions& options) {
  std::size_t n1 = 0, n2 = 0;
  for (const auto& [w, c] : target_counts) n1 += c;
  for (const auto& [w, c] : reference_counts) n2 += c;
  if (n1 == 0 || n2 == 0) throw Error("keyness: both corpora need at least one counted word");

  WordCounts vocabulary;
  for (const auto& [w, c] : target_counts) vocabulary[w];
  for (const auto& [w, c] : reference_counts) vocabulary[w];

  KeynessResult result;
  for (const auto& [word, unused] : vocabulary) {
    auto count = [&](const WordCounts& m) {
      auto it = m.find(word);
      return it == m.end() ? std::size_t{0} : it->second;
    };
    KeynessEntry e;
    e.word = word;
    e.count_target = count(target_counts);
    e.count_reference = count(reference_counts);
    if (e.count_target + e.count_reference < options.min_total) continue;
    e.total_target = n1;
    e.total_reference = n2;
    e.g2 = log_likelihood_g2(e.count_target, n1, e.count_reference, n2);
    const auto lhs = static_cast<u128>(e.count_target) * n2;
    const auto rhs = static_cast<u128>(e.count_reference) * n1;
    e.overused_in = lhs > rhs ? Label::Target : Label::Control;
    (e.overused_in == Label::Target ? result.overused_in_target : result.overused_in_reference)
        .push_back(std::move(e));
  }
  auto rank = [&](std::vector<KeynessEntry>& list) {
    std::sort(list.begin(), list.end(), [](const KeynessEntry& x, const KeynessEntry& y) {
      if (x.g2 != y.g2) return x.g2 > y.g2;
      return x.word < y.word;
    });
    if (list.size() > options.top_k) list.resize(options.top_k);
  };
  rank(result.overused_in_target);
  rank(result.overused_in_reference);
  return result;
}

WordCounts word_counts(std::span<const TaggedDocument> documents, const std::set<Upos>& filter,
                       bool use_lemmas) {
  WordCounts counts;
  for (const auto& doc : documents)
    for (const auto& sentence : doc.sentences)
      for (const auto& tok : sentence) {
        if (!filter.contains(tok.upos)) continue;
        std::string key = use_lemmas && !tok.lemma.empty() ? tok.lemma : tok.form;
        for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        ++counts[key];
      }
  return counts;
}

} // namespace posmark
