#include "xlc/porter.hpp"

#include <algorithm>
#include <initializer_list>
#include <utility>

namespace xlc::porter {

namespace {

class Stemmer {
  public:
    explicit Stemmer(std::string word) : b_(std::move(word)) {}

    std::string run() && {
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5();
        return std::move(b_);
    }

  private:
    std::string b_;

    bool cons(std::size_t i) const {
        switch (b_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 || !cons(i - 1);
            default: return true;
        }
    }

    /// Measure of b_[0, len): the number of VC sequences.
    int measure(std::size_t len) const {
        int m = 0;
        std::size_t i = 0;
        while (i < len && cons(i)) ++i;
        while (i < len) {
            while (i < len && !cons(i)) ++i;
            if (i >= len) break;
            while (i < len && cons(i)) ++i;
            ++m;
        }
        return m;
    }

    bool has_vowel(std::size_t len) const {
        for (std::size_t i = 0; i < len; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(std::size_t len) const {
        return len >= 2 && b_[len - 1] == b_[len - 2] && cons(len - 1);
    }

    /// consonant-vowel-consonant ending at len-1, last not w, x or y.
    bool cvc(std::size_t len) const {
        if (len < 3 || !cons(len - 1) || cons(len - 2) || !cons(len - 3)) return false;
        const char c = b_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view s) const {
        return b_.size() >= s.size() && std::string_view(b_).substr(b_.size() - s.size()) == s;
    }

    std::size_t stem_len(std::string_view suffix) const { return b_.size() - suffix.size(); }

    void replace(std::string_view suffix, std::string_view with) {
        b_.resize(stem_len(suffix));
        b_ += with;
    }

    using Rules = std::initializer_list<std::pair<std::string_view, std::string_view>>;

    /// Longest matching suffix wins; applied when the stem measure exceeds min_m.
    void apply_longest(Rules rules, int min_m) {
        const std::pair<std::string_view, std::string_view>* best = nullptr;
        for (const auto& r : rules)
            if (ends(r.first) && (!best || r.first.size() > best->first.size())) best = &r;
        if (best && measure(stem_len(best->first)) > min_m) replace(best->first, best->second);
    }

    void step1a() {
        if (ends("sses")) replace("sses", "ss");
        else if (ends("ies")) replace("ies", "i");
        else if (ends("ss")) return;
        else if (ends("s")) replace("s", "");
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(stem_len("eed")) > 0) replace("eed", "ee");
            return;
        }
        bool stripped = false;
        for (std::string_view suf : {"ed", "ing"}) {
            if (ends(suf) && has_vowel(stem_len(suf))) {
                replace(suf, "");
                stripped = true;
                break;
            }
        }
        if (!stripped) return;
        if (ends("at")) replace("at", "ate");
        else if (ends("bl")) replace("bl", "ble");
        else if (ends("iz")) replace("iz", "ize");
        else if (double_cons(b_.size())) {
            const char c = b_.back();
            if (c != 'l' && c != 's' && c != 'z') b_.pop_back();
        } else if (measure(b_.size()) == 1 && cvc(b_.size())) {
            b_ += 'e';
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(stem_len("y"))) b_.back() = 'i';
    }

    void step2() {
        apply_longest({{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},
                       {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
                       {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                       {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
                       {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}},
                      0);
    }

    void step3() {
        apply_longest({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                       {"ical", "ic"},  {"ful", ""},   {"ness", ""}},
                      0);
    }

    void step4() {
        static constexpr std::string_view suffixes[] = {"al",  "ance", "ence", "er",  "ic",  "able", "ible",
                                                        "ant", "ement", "ment", "ent", "ion", "ou",  "ism",
                                                        "ate", "iti",  "ous",  "ive", "ize"};
        std::string_view best;
        for (auto s : suffixes)
            if (ends(s) && s.size() > best.size()) best = s;
        if (best.empty()) return;
        const auto len = stem_len(best);
        if (measure(len) <= 1) return;
        if (best == "ion" && !(len > 0 && (b_[len - 1] == 's' || b_[len - 1] == 't'))) return;
        replace(best, "");
    }

    void step5() {
        if (ends("e")) {
            const auto len = stem_len("e");
            const int m = measure(len);
            if (m > 1 || (m == 1 && !cvc(len))) b_.pop_back();
        }
        if (measure(b_.size()) > 1 && double_cons(b_.size()) && b_.back() == 'l') b_.pop_back();
    }
};

}  // namespace

std::string stem(std::string_view word) {
    if (word.size() <= 2 || !std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; }))
        return std::string(word);
    return Stemmer(std::string(word)).run();
}

}  // namespace xlc::porter
