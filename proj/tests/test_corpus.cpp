#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "memquote/corpus.hpp"
#include "memquote/error.hpp"
#include "oracles/oracles.hpp"

using namespace memquote;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> words(std::string_view t) { return token_strings(tokenize(t), false); }

Script make_script(std::vector<std::pair<std::string, std::string>> lines) {
  Script s{"m1", {}};
  for (std::size_t i = 0; i < lines.size(); ++i) {
    s.lines.push_back({i, lines[i].first, lines[i].second});
  }
  return s;
}

const std::vector<std::string> kSentences = {
    "Go now.",        "Stay here.",       "I know you.",     "We ride tonight.",
    "Run. Hide.",     "Who are you?",     "It is cold out.", "Bring me the map.",
    "Yes.",           "Leave it. Now.",   "Do you see it?",  "The door is open now.",
    "Hand it over.",  "This is my ship.", "...",             "Nobody moves until dawn."};

Script random_script(std::mt19937_64& rng, const std::string& id) {
  Script s{id, {}};
  const std::size_t n = 5 + rng() % 40;
  std::size_t index = rng() % 3;
  for (std::size_t i = 0; i < n; ++i) {
    s.lines.push_back({index, std::string(1, static_cast<char>('A' + rng() % 3)),
                       kSentences[rng() % kSentences.size()]});
    index += 1 + rng() % 3;
  }
  return s;
}

Alignment random_alignment(std::mt19937_64& rng, const Script& s) {
  Alignment a;
  for (std::size_t i = 0; i < s.lines.size(); ++i) {
    LineLabel l;
    l.memorable = rng() % 5 == 0 && is_single_sentence(s.lines[i].text);
    l.covered = l.memorable || rng() % 10 == 0;
    a.labels.push_back(l);
  }
  return a;
}

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("normalized word edit distance") {
  const auto a = words("I am your father.");
  const auto b = words("No, I am your father.");
  CHECK(normalized_edit_distance(a, b) == doctest::Approx(0.2));
  CHECK(normalized_edit_distance(a, a) == 0.0);
  CHECK(normalized_edit_distance(std::vector<std::string>{}, std::vector<std::string>{}) == 0.0);
  CHECK(normalized_edit_distance(a, std::vector<std::string>{}) == 1.0);
  CHECK(normalized_edit_distance(words("a b c"), words("c b a")) == doctest::Approx(2.0 / 3));
}

TEST_CASE("entry decorations") {
  CHECK(strip_entry_decorations("Vader: I am your father.") == "I am your father.");
  CHECK(strip_entry_decorations("[laughs] Go now.") == "Go now.");
  CHECK(strip_entry_decorations("Dr. Evil: One million dollars.") == "One million dollars.");
  // Not a name: too many words before the colon.
  CHECK(strip_entry_decorations("He said it like this: go") == "He said it like this: go");
}

TEST_CASE("alignment labels") {
  const auto s = make_script({{"V", "No, I am your father."},
                              {"L", "That's not true."},
                              {"L", "That's impossible!"},
                              {"V", "Search your feelings."},
                              {"V", "Join me."}});
  const MemorableList list{"m1", {"I am your father.", "Luke: That's not true.\nLuke: That's impossible!",
                                  "Search your feelings. You know it to be true."}};
  const auto a = align_memorable(s, list);
  REQUIRE(a.labels.size() == 5);
  CHECK(a.labels[0].memorable);
  CHECK(a.labels[0].covered);
  CHECK_FALSE(a.labels[1].memorable);
  CHECK(a.labels[1].covered);
  CHECK(a.labels[2].covered);
  CHECK_FALSE(a.labels[3].memorable);
  CHECK(a.labels[3].covered);
  CHECK_FALSE(a.labels[4].covered);
  // A tighter threshold rejects the one-word difference.
  CHECK_FALSE(align_memorable(s, list, 0.1).labels[0].memorable);
}

TEST_CASE("pairing worked example") {
  const auto s = make_script({{"A", "Go now."},           // 0 eligible, distance 2
                              {"B", "Stay here."},        // 1 other speaker
                              {"A", "I know you."},       // 2 memorable
                              {"A", "Run. Hide."},        // 3 two sentences
                              {"A", "Stay here."}});      // 4 eligible, distance 2
  Alignment a;
  a.labels.resize(5);
  a.labels[2] = {true, true};
  // Word counts differ for line 2 (3 words); make it 2 words.
  auto s2 = s;
  s2.lines[2].text = "Know you.";
  const auto pairs = build_pairs(s2, a);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].nonmemorable.line_index == 0);
  CHECK(pairs[0].line_distance == 2);
  CHECK(pairs[0].speaker_line_distance == 1);
  CHECK_NOTHROW(check_pair(pairs[0]));
  CHECK(is_eligible_foil(s2, a, 2, 4, {}));
  CHECK_FALSE(is_eligible_foil(s2, a, 2, 1, {}));
  CHECK_FALSE(is_eligible_foil(s2, a, 2, 3, {}));
  PairingOptions loose;
  loose.single_sentence_foil = false;
  CHECK(is_eligible_foil(s2, a, 2, 3, loose));
  CHECK(build_pairs(s, a).empty());
}

TEST_CASE("pairing agrees with the brute-force oracle") {
  std::mt19937_64 rng(23);
  std::size_t total = 0;
  for (int movie = 0; movie < 50; ++movie) {
    const auto s = random_script(rng, "mv" + std::to_string(movie));
    const auto a = random_alignment(rng, s);
    const auto got = build_pairs(s, a);
    const auto expect = oracle::brute_pairs(s, a);
    REQUIRE(got.size() == expect.size());
    total += got.size();
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].memorable.line_index == s.lines[expect[i].m_index].line_index);
      CHECK(got[i].nonmemorable.line_index == s.lines[expect[i].n_index].line_index);
      CHECK(got[i].line_distance == expect[i].line_distance);
      CHECK(got[i].speaker_line_distance == expect[i].speaker_line_distance);
      CHECK_NOTHROW(check_pair(got[i]));
    }
  }
  CHECK(total > 20);
}

TEST_CASE("count rule truth table") {
  for (std::uint64_t m : {4, 5, 6}) {
    for (std::uint64_t n : {0, 3, 6}) {
      const bool expect = m == 6 && n <= 3;
      CHECK_MESSAGE(passes_count_rule(m, n) == expect, m, " ", n);
    }
  }
  QuotePair p{make_quote("m", 1, "A", "Go now.", true), make_quote("m", 2, "A", "Stay here.", false), 1, 1};
  QuotePair q{make_quote("m", 5, "A", "Go now.", true), make_quote("m", 7, "A", "Stay here.", false), 2, 1};
  QuotePair r{make_quote("m", 9, "A", "Go now.", true), make_quote("m", 8, "A", "Stay here.", false), 1, 1};
  const std::unordered_map<std::string, std::uint64_t> counts = {
      {"m:1", 10}, {"m:2", 5}, {"m:5", 5}, {"m:7", 0}, {"m:9", 7}};
  const std::vector<QuotePair> all = {p, q, r};
  const auto f = filter_by_counts(all, counts);
  REQUIRE(f.kept.size() == 1);
  CHECK(f.kept[0].memorable.line_index == 1);
  REQUIRE(f.missing.size() == 1);
  CHECK(f.missing[0].memorable.line_index == 9);
}

TEST_CASE("decile histogram and median distance") {
  Script s{"m", {}};
  for (std::size_t i = 0; i < 20; ++i) s.lines.push_back({i, "A", "Go."});
  Alignment a;
  a.labels.resize(20);
  a.labels[0].memorable = a.labels[1].memorable = a.labels[10].memorable = a.labels[19].memorable = true;
  const std::vector<Script> ss = {s};
  const std::vector<Alignment> as = {a};
  const auto h = decile_histogram(ss, as);
  CHECK(h[0] == 2);
  CHECK(h[5] == 1);
  CHECK(h[9] == 1);
  const auto d = decile_histogram(ss, as, true);
  CHECK(d[0] == 1);
  CHECK(d[9] == 0);

  std::vector<QuotePair> pairs(3);
  pairs[0].speaker_line_distance = 1;
  pairs[1].speaker_line_distance = 5;
  pairs[2].speaker_line_distance = 2;
  CHECK(median_speaker_distance(pairs) == 2.0);
  pairs.pop_back();
  CHECK(median_speaker_distance(pairs) == 3.0);
}

TEST_CASE("file formats") {
  const auto dir = temp_dir("memquote_corpus_io");
  {
    std::ofstream(dir / "b.jsonl") << R"({"movie_id":"b","line_index":2,"speaker":"X","text":"Hi there."})" "\n"
                                   << R"({"movie_id":"b","line_index":0,"speaker":"Y","text":"Hello."})" "\n";
    std::ofstream(dir / "a.jsonl") << R"({"movie_id":"a","line_index":0,"speaker":"X","text":"Go."})" "\n";
  }
  const auto scripts = read_scripts(dir);
  REQUIRE(scripts.size() == 2);
  CHECK(scripts[0].movie_id == "a");
  CHECK(scripts[1].lines[0].line_index == 0);
  CHECK(scripts[1].lines[1].text == "Hi there.");

  std::ofstream(dir / "dup.jsonl") << R"({"movie_id":"c","line_index":1,"speaker":"X","text":"a"})" "\n"
                                   << R"({"movie_id":"c","line_index":1,"speaker":"X","text":"b"})" "\n";
  CHECK_THROWS(read_scripts(dir / "dup.jsonl"));
  std::ofstream(dir / "bad.jsonl") << "{not json\n";
  CHECK_THROWS(read_scripts(dir / "bad.jsonl"));
  CHECK_THROWS(read_scripts(dir / "nope"));

  std::ofstream(dir / "counts.tsv") << "# comment\nm:1\t12\nm:2\t3\n";
  const auto counts = read_counts(dir / "counts.tsv");
  CHECK(counts.at("m:1") == 12);
  CHECK(counts.size() == 2);
  std::ofstream(dir / "badcounts.tsv") << "m:1 twelve\n";
  CHECK_THROWS(read_counts(dir / "badcounts.tsv"));

  std::ofstream(dir / "mem.jsonl") << R"({"movie_id":"a","entry_text":"Go."})" "\n"
                                   << R"({"movie_id":"a","entry_text":"X: Stay.\nY: No."})" "\n";
  const auto lists = read_memorable_lists(dir / "mem.jsonl");
  REQUIRE(lists.size() == 1);
  CHECK(lists[0].entries.size() == 2);

  const std::vector<QuotePair> pairs = {
      {make_quote("a", 3, "X", "Go now.", true), make_quote("a", 5, "X", "Stay here.", false), 2, 1}};
  write_pairs(dir / "pairs.jsonl", pairs);
  const auto back = read_pairs(dir / "pairs.jsonl");
  REQUIRE(back.size() == 1);
  CHECK(back[0].memorable.text == "Go now.");
  CHECK(back[0].nonmemorable.line_index == 5);
  CHECK(back[0].line_distance == 2);
  CHECK(back[0].memorable.tokens == pairs[0].memorable.tokens);
  fs::remove_all(dir);
}
