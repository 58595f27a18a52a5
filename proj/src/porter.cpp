#include "infodemic/porter.hpp"

namespace infodemic {
namespace {

// Index conventions follow the reference: b[0..k] is the current word,
// j marks the end of the stem once ends() has matched a suffix.
class PorterStemmer {
 public:
  explicit PorterStemmer(std::string_view word) : b_(word), k_(static_cast<int>(word.size()) - 1) {}

  std::string run() {
    if (k_ <= 1) return b_;
    step1ab();
    if (k_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return b_.substr(0, static_cast<std::size_t>(k_ + 1));
  }

 private:
  bool cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int m() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!cons(i)) return true;
    }
    return false;
  }

  bool double_consonant(int j) const {
    if (j < 1) return false;
    if (b_[j] != b_[j - 1]) return false;
    return cons(j);
  }

  // consonant-vowel-consonant ending at i, where the last consonant is not w, x or y.
  bool cvc(int i) const {
    if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
    char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view s) {
    int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (std::string_view(b_).substr(static_cast<std::size_t>(k_ + 1 - len), s.size()) != s) return false;
    j_ = k_ - len;
    return true;
  }

  void set_to(std::string_view s) {
    b_.replace(static_cast<std::size_t>(j_ + 1), static_cast<std::size_t>(k_ - j_), s);
    k_ = j_ + static_cast<int>(s.size());
  }

  void replace_if_measure(std::string_view s) {
    if (m() > 0) set_to(s);
  }

  // Plurals and -ed / -ing.
  void step1ab() {
    if (b_[k_] == 's') {
      if (ends("sses")) {
        k_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
    }
    if (ends("eed")) {
      if (m() > 0) --k_;
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      k_ = j_;
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(k_)) {
        --k_;
        char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else if (m() == 1 && cvc(k_)) {
        set_to("e");
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  template <std::size_t N>
  void apply_first(const Rule (&rules)[N]) {
    for (const auto& rule : rules) {
      if (ends(rule.suffix)) {
        replace_if_measure(rule.replacement);
        return;
      }
    }
  }

  void step2() {
    switch (b_[k_ - 1]) {
      case 'a': {
        static constexpr Rule r[] = {{"ational", "ate"}, {"tional", "tion"}};
        apply_first(r);
        break;
      }
      case 'c': {
        static constexpr Rule r[] = {{"enci", "ence"}, {"anci", "ance"}};
        apply_first(r);
        break;
      }
      case 'e': {
        static constexpr Rule r[] = {{"izer", "ize"}};
        apply_first(r);
        break;
      }
      case 'l': {
        static constexpr Rule r[] = {{"bli", "ble"}, {"alli", "al"}, {"entli", "ent"}, {"eli", "e"}, {"ousli", "ous"}};
        apply_first(r);
        break;
      }
      case 'o': {
        static constexpr Rule r[] = {{"ization", "ize"}, {"ation", "ate"}, {"ator", "ate"}};
        apply_first(r);
        break;
      }
      case 's': {
        static constexpr Rule r[] = {{"alism", "al"}, {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"}};
        apply_first(r);
        break;
      }
      case 't': {
        static constexpr Rule r[] = {{"aliti", "al"}, {"iviti", "ive"}, {"biliti", "ble"}};
        apply_first(r);
        break;
      }
      case 'g': {
        static constexpr Rule r[] = {{"logi", "log"}};
        apply_first(r);
        break;
      }
      default:
        break;
    }
  }

  void step3() {
    switch (b_[k_]) {
      case 'e': {
        static constexpr Rule r[] = {{"icate", "ic"}, {"ative", ""}, {"alize", "al"}};
        apply_first(r);
        break;
      }
      case 'i': {
        static constexpr Rule r[] = {{"iciti", "ic"}};
        apply_first(r);
        break;
      }
      case 'l': {
        static constexpr Rule r[] = {{"ical", "ic"}, {"ful", ""}};
        apply_first(r);
        break;
      }
      case 's': {
        static constexpr Rule r[] = {{"ness", ""}};
        apply_first(r);
        break;
      }
      default:
        break;
    }
  }

  bool ends_any(std::initializer_list<std::string_view> suffixes) {
    for (auto s : suffixes) {
      if (ends(s)) return true;
    }
    return false;
  }

  // Strips -ant, -ence etc. in context <c>vcvc<v>.
  void step4() {
    bool matched = false;
    switch (b_[k_ - 1]) {
      case 'a': matched = ends_any({"al"}); break;
      case 'c': matched = ends_any({"ance", "ence"}); break;
      case 'e': matched = ends_any({"er"}); break;
      case 'i': matched = ends_any({"ic"}); break;
      case 'l': matched = ends_any({"able", "ible"}); break;
      case 'n': matched = ends_any({"ant", "ement", "ment", "ent"}); break;
      case 'o':
        if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) {
          matched = true;
        } else {
          matched = ends_any({"ou"});
        }
        break;
      case 's': matched = ends_any({"ism"}); break;
      case 't': matched = ends_any({"ate", "iti"}); break;
      case 'u': matched = ends_any({"ous"}); break;
      case 'v': matched = ends_any({"ive"}); break;
      case 'z': matched = ends_any({"ize"}); break;
      default: break;
    }
    if (matched && m() > 1) k_ = j_;
  }

  // Final -e and -ll.
  void step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      int a = m();
      if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && double_consonant(k_) && m() > 1) --k_;
  }

  std::string b_;
  int k_;
  int j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) { return PorterStemmer(word).run(); }

}  // namespace infodemic
