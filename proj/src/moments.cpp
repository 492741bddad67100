#include "ncfbm/moments.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "ncfbm/combinat.hpp"
#include "ncfbm/errors.hpp"
#include "ncfbm/numerics.hpp"

namespace ncfbm {

namespace {

Eigen::MatrixXd word_gram(const CovKernel& K, const Word& w) { return letter_gram(K, w); }

void check_word_length(std::size_t len, int cap, const char* what) {
  if (len > static_cast<std::size_t>(cap)) {
    throw SizeLimitError(std::string(what) + ": word length " + std::to_string(len) +
                         " exceeds the cap " + std::to_string(cap));
  }
}

class WordParser {
 public:
  explicit WordParser(const std::string& s) : s_(s) {}

  Word parse() {
    Word w;
    skip_ws();
    if (pos_ == s_.size()) return w;
    while (true) {
      w.push_back(letter());
      skip_ws();
      if (pos_ == s_.size()) break;
      expect(';');
    }
    return w;
  }

 private:
  Letter letter() {
    Letter out;
    bool first = true;
    while (true) {
      skip_ws();
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        break;
      }
      skip_ws();
      double coef = 1.0;
      if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.') {
        coef = number();
        skip_ws();
        expect('*');
        skip_ws();
      }
      coef *= sign;
      if (peek() == 'd') {
        ++pos_;
        expect('X');
        expect('(');
        const double a = number();
        expect(',');
        const double b = number();
        expect(')');
        out.terms.push_back({coef, b});
        out.terms.push_back({-coef, a});
      } else {
        expect('X');
        expect('(');
        const double t = number();
        expect(')');
        out.terms.push_back({coef, t});
      }
      first = false;
      skip_ws();
      if (pos_ == s_.size() || peek() == ';') break;
    }
    return out.canonical();
  }

  double number() {
    skip_ws();
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(end - begin);
    skip_ws();
    return v;
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
    skip_ws();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParameterError("word spec \"" + s_ + "\": " + msg + " at offset " + std::to_string(pos_));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

WordSum WordSum::adjoint() const {
  WordSum out;
  for (const auto& [c, w] : terms) out.add(c, Word(w.rbegin(), w.rend()));
  return out;
}

std::size_t WordSum::max_length() const {
  std::size_t m = 0;
  for (const auto& [c, w] : terms) m = std::max(m, w.size());
  return m;
}

double noncrossing_pairing_sum(const Eigen::MatrixXd& cov) {
  const auto n = cov.rows();
  if (n % 2 != 0) return 0.0;
  if (n == 0) return 1.0;
  // S(i,j): sum over non-crossing pairings of the positions [i,j).
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) S(i, i) = 1.0;
  for (Eigen::Index len = 2; len <= n; len += 2) {
    for (Eigen::Index i = 0; i + len <= n; ++i) {
      const Eigen::Index j = i + len;
      double acc = 0.0;
      for (Eigen::Index k = i + 1; k < j; k += 2) acc += cov(i, k) * S(i + 1, k) * S(k + 1, j);
      S(i, j) = acc;
    }
  }
  return S(0, n);
}

double q_pairing_sum(const Eigen::MatrixXd& cov, double q) {
  const auto n = cov.rows();
  if (n % 2 != 0) return 0.0;
  if (n == 0) return 1.0;
  const int m = static_cast<int>(n / 2);
  std::vector<double> qpow(static_cast<std::size_t>(m * (m - 1) / 2 + 1), 1.0);
  for (std::size_t c = 1; c < qpow.size(); ++c) qpow[c] = qpow[c - 1] * q;
  KahanSum acc;
  for_each_pairing(m, [&](const std::vector<std::pair<int, int>>& blocks, std::int64_t cr) {
    double prod = qpow[static_cast<std::size_t>(cr)];
    for (const auto& [p, r] : blocks) prod *= cov(p, r);
    acc += prod;
  });
  return acc.value();
}

MomentValue wick_moment_counted(const CovKernel& K, const Word& w) {
  check_word_length(w.size(), kWickWordCap, "wick_moment");
  if (w.size() % 2 != 0) return {0.0, 0};
  return {noncrossing_pairing_sum(word_gram(K, w)), catalan(static_cast<int>(w.size() / 2))};
}

double wick_moment(const CovKernel& K, const Word& w) { return wick_moment_counted(K, w).value; }

double wick_moment(const CovKernel& K, const WordSum& ws) {
  KahanSum acc;
  for (const auto& [c, w] : ws.terms) acc += c * wick_moment(K, w);
  return acc.value();
}

MomentValue q_wick_moment_counted(const CovKernel& K, const Word& w, double q) {
  if (!(q > -1.0 && q < 1.0)) throw ParameterError("q must lie in (-1,1)");
  check_word_length(w.size(), kQWickWordCap, "q_wick_moment");
  if (w.size() % 2 != 0) return {0.0, 0};
  if (w.empty()) return {1.0, 1};
  return {q_pairing_sum(word_gram(K, w), q), double_factorial_odd(static_cast<int>(w.size() / 2))};
}

double q_wick_moment(const CovKernel& K, const Word& w, double q) {
  return q_wick_moment_counted(K, w, q).value;
}

double q_wick_moment(const CovKernel& K, const WordSum& ws, double q) {
  KahanSum acc;
  for (const auto& [c, w] : ws.terms) acc += c * q_wick_moment(K, w, q);
  return acc.value();
}

std::vector<double> norm_estimate(const CovKernel& K, const Letter& element, int r_max) {
  WordSum ws;
  ws.add(1.0, Word{element});
  return norm_estimate(K, ws, r_max);
}

std::vector<double> norm_estimate(const CovKernel& K, const WordSum& element, int r_max) {
  if (r_max < 1) throw ParameterError("norm_estimate needs r_max >= 1");
  // A sum of one-letter words is a single letter.
  bool all_single = !element.terms.empty();
  for (const auto& [c, w] : element.terms) all_single = all_single && w.size() == 1;
  WordSum a = element;
  if (all_single && element.terms.size() > 1) {
    Letter folded;
    for (const auto& [c, w] : element.terms) folded += c * w.front();
    a = WordSum{};
    a.add(1.0, Word{folded});
  }
  const std::size_t len = a.max_length();
  if (2 * static_cast<std::size_t>(r_max) * len > static_cast<std::size_t>(kWickWordCap)) {
    throw SizeLimitError("norm_estimate: 2 r_max |w| = " + std::to_string(2 * r_max * len) +
                         " exceeds the word cap " + std::to_string(kWickWordCap));
  }
  const double expanded = std::pow(static_cast<double>(a.terms.size()), 2.0 * r_max);
  if (expanded > 1e6) {
    throw SizeLimitError("norm_estimate: expansion of (A A*)^r would produce " +
                         std::to_string(expanded) + " words");
  }
  const WordSum astar = a.adjoint();
  // (A A*)^r built by repeated multiplication of the expansion.
  WordSum power;
  power.add(1.0, Word{});
  std::vector<double> out;
  for (int r = 1; r <= r_max; ++r) {
    WordSum next;
    for (const auto& [c0, w0] : power.terms) {
      for (const auto& [c1, w1] : a.terms) {
        for (const auto& [c2, w2] : astar.terms) {
          Word w = w0;
          w.insert(w.end(), w1.begin(), w1.end());
          w.insert(w.end(), w2.begin(), w2.end());
          next.add(c0 * c1 * c2, std::move(w));
        }
      }
    }
    power = std::move(next);
    const double m = wick_moment(K, power);
    out.push_back(std::pow(std::max(m, 0.0), 1.0 / (2.0 * r)));
  }
  return out;
}

double richardson_limit(const std::vector<double>& seq) {
  if (seq.size() < 2) throw ParameterError("richardson_limit needs two entries");
  const double r = static_cast<double>(seq.size());
  return r * seq.back() - (r - 1.0) * seq[seq.size() - 2];
}

SemicircleLaw::SemicircleLaw(double var) : variance(var) {
  if (!(var > 0.0)) throw ParameterError("semicircle variance must be positive");
}

double SemicircleLaw::radius() const { return 2.0 * std::sqrt(variance); }

double semicircle_density(const SemicircleLaw& law, double x) {
  const double r2 = 4.0 * law.variance - x * x;
  if (r2 <= 0.0) return 0.0;
  return std::sqrt(r2) / (2.0 * std::numbers::pi * law.variance);
}

double semicircle_moment(const SemicircleLaw& law, int k) {
  if (k < 0) throw ParameterError("moment order must be >= 0");
  if (k % 2 != 0) return 0.0;
  return static_cast<double>(catalan(k / 2)) * std::pow(law.variance, k / 2);
}

Word parse_word(const std::string& spec) { return WordParser(spec).parse(); }

}  // namespace ncfbm
