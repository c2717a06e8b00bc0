#include <array>
#include <string>
#include <vector>

#include "groundkit/phonetics.hpp"

// Built-in inventory and lexicon. Feature layout (13 dims, all in [0,1]):
//   [0]     voicing
//   [1..4]  place one-hot: labial, coronal, dorsal, laryngeal
//   [5..10] manner one-hot: stop, fricative, nasal, approximant, vowel, pause
//   [11]    vowel height (doubles as liquid coloring for approximants)
//   [12]    vowel backness
//
// The word list is a toy English-rendered lexicon. Pronunciations are
// deliberately engineered so that several name pairs across object
// classes are near-minimal pairs (pin/bin, cart/card, pane/pan): a
// noisy recognizer has believable sound-alike traps to fall into.

namespace groundkit::phon {

namespace {

constexpr int kDim = 13;

enum Place { kNoPlace = -1, kLabial = 0, kCoronal = 1, kDorsal = 2, kLaryngeal = 3 };
enum Manner { kStop = 0, kFricative = 1, kNasal = 2, kApproximant = 3, kVowel = 4, kPause = 5 };

std::vector<double> feat(double voiced, Place place, int manner, double height = 0.0,
                         double backness = 0.0) {
  std::vector<double> f(kDim, 0.0);
  f[0] = voiced;
  if (place != kNoPlace) f[1 + place] = 1.0;
  f[5 + manner] = 1.0;
  f[11] = height;
  f[12] = backness;
  return f;
}

std::vector<double> vowel(double height, double backness) {
  return feat(1.0, kNoPlace, kVowel, height, backness);
}

}  // namespace

PhoneticModel PhoneticModel::defaults() {
  PhoneticModel model;
  auto& inv = model.inventory;
  auto add = [&](const std::string& sym, std::vector<double> f) {
    inv.symbols.push_back(sym);
    inv.features.push_back(std::move(f));
  };

  add("-", std::vector<double>(kDim, 0.0));  // blank, reserved index 0
  add("|", feat(0.0, kNoPlace, kPause));     // word-boundary pause, index 1

  add("p", feat(0.0, kLabial, kStop));
  add("b", feat(1.0, kLabial, kStop));
  add("t", feat(0.0, kCoronal, kStop));
  add("d", feat(1.0, kCoronal, kStop));
  add("k", feat(0.0, kDorsal, kStop));
  add("g", feat(1.0, kDorsal, kStop));
  add("m", feat(1.0, kLabial, kNasal));
  add("n", feat(1.0, kCoronal, kNasal));
  add("f", feat(0.0, kLabial, kFricative));
  add("v", feat(1.0, kLabial, kFricative));
  add("s", feat(0.0, kCoronal, kFricative));
  add("z", feat(1.0, kCoronal, kFricative));
  add("x", feat(0.0, kDorsal, kFricative));
  add("h", feat(0.0, kLaryngeal, kFricative));
  add("l", feat(1.0, kCoronal, kApproximant, 0.2, 0.2));
  add("r", feat(1.0, kCoronal, kApproximant, 0.2, 0.8));
  add("w", feat(1.0, kLabial, kApproximant, 0.8, 0.8));
  add("y", feat(1.0, kDorsal, kApproximant, 0.8, 0.2));

  add("a", vowel(1.0, 0.5));
  add("e", vowel(0.5, 0.25));
  add("i", vowel(0.0, 0.0));
  add("o", vowel(0.5, 0.75));
  add("u", vowel(0.0, 1.0));

  inv.validate();

  auto& lex = model.lexicon;
  auto entry = [&](const std::string& word, std::vector<std::string> prons) {
    lex[word] = std::move(prons);
  };

  // verbs
  entry("go", {"g", "o"});
  entry("move", {"m", "u", "v"});
  entry("walk", {"w", "a", "k"});
  entry("run", {"r", "u", "n"});
  entry("drive", {"d", "r", "a", "i", "v"});
  entry("head", {"h", "e", "d"});
  entry("roll", {"r", "o", "l"});
  entry("step", {"s", "t", "e", "p"});

  // prepositions
  entry("to", {"t", "u"});
  entry("toward", {"t", "o", "w", "a", "r", "d"});
  entry("near", {"n", "i", "r"});
  entry("by", {"b", "a", "i"});
  entry("at", {"a", "t"});

  // object names
  entry("bicycle", {"b", "a", "i", "s", "i", "k", "e", "l"});
  entry("bike", {"b", "a", "i", "k"});
  entry("cycle", {"s", "a", "i", "k", "e", "l"});
  entry("pedal", {"p", "e", "d", "a", "l"});
  entry("sign", {"s", "a", "i", "n"});
  entry("board", {"b", "o", "r", "d"});
  entry("pin", {"p", "i", "n"});
  entry("marker", {"m", "a", "r", "k", "e", "r"});
  entry("desk", {"d", "e", "s", "k"});
  entry("table", {"t", "e", "i", "b", "e", "l"});
  entry("card", {"k", "a", "r", "d"});
  entry("stand", {"s", "t", "a", "n", "d"});
  entry("door", {"d", "o", "r"});
  entry("gate", {"g", "e", "i", "t"});
  entry("portal", {"p", "o", "r", "t", "a", "l"});
  entry("window", {"w", "i", "n", "d", "o"});
  entry("pane", {"p", "e", "i", "n"});
  entry("glass", {"g", "l", "a", "s"});
  entry("red", {"r", "e", "d"});
  entry("box", {"b", "a", "k", "s"});
  entry("pan", {"p", "a", "n"});
  entry("carton", {"k", "a", "r", "t", "o", "n"});
  entry("blue", {"b", "l", "u"});
  entry("bin", {"b", "i", "n"});
  entry("crate", {"k", "r", "e", "i", "t"});
  entry("black", {"b", "l", "a", "k"});
  entry("chest", {"x", "e", "s", "t"});
  entry("trunk", {"t", "r", "u", "n", "k"});
  entry("car", {"k", "a", "r"});
  entry("auto", {"a", "u", "t", "o"});
  entry("cart", {"k", "a", "r", "t"});
  entry("motor", {"m", "o", "t", "o", "r"});
  entry("suitcase", {"s", "u", "t", "k", "e", "i", "s"});
  entry("bag", {"b", "a", "g"});
  entry("case", {"k", "e", "i", "s"});
  entry("sack", {"s", "a", "k"});

  // latent-visualization word bank: five initial-phoneme groups, each
  // crossing the five vowels with finals p/t
  const std::array<std::string, 5> initials = {"b", "s", "m", "k", "l"};
  const std::array<std::string, 5> vowels = {"a", "e", "i", "o", "u"};
  const std::array<std::string, 2> finals = {"p", "t"};
  for (const auto& c0 : initials)
    for (const auto& v0 : vowels)
      for (const auto& c1 : finals) entry(c0 + v0 + c1, {c0, v0, c1});

  return model;
}

std::vector<std::string> default_latent_word_bank() {
  std::vector<std::string> words;
  const std::array<std::string, 5> initials = {"b", "s", "m", "k", "l"};
  const std::array<std::string, 5> vowels = {"a", "e", "i", "o", "u"};
  const std::array<std::string, 2> finals = {"p", "t"};
  for (const auto& c0 : initials)
    for (const auto& v0 : vowels)
      for (const auto& c1 : finals) words.push_back(c0 + v0 + c1);
  return words;
}

}  // namespace groundkit::phon
