#include <atomic>
#include <csignal>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "memquote/corpus.hpp"
#include "memquote/error.hpp"
#include "memquote/io.hpp"
#include "memquote/kernels.hpp"
#include "memquote/metrics.hpp"
#include "memquote/ngram.hpp"
#include "memquote/pos.hpp"
#include "memquote/predictor.hpp"
#include "memquote/quiz.hpp"
#include "memquote/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace memquote;

namespace {

// Every key a config file may carry. Flags override file values.
struct RunConfig {
  std::string scripts;
  std::string memorable;
  std::string counts;
  std::string pairs;
  std::string brown;
  std::string brown_format = "text";
  std::string slogans;
  std::string slogans_format = "text";
  std::string tagger;
  std::string curse_words;
  std::string out;
  std::string log;
  std::string corpus;
  std::string input;
  std::string host = "127.0.0.1";
  std::string feature_sets = "bow,distinctiveness,generality,slogan_sim,all3";
  double alpha = 0.2;
  double threshold = kDefaultAlignThreshold;
  std::uint64_t seed = 1;
  int k = 10;
  int iterations = 10;
  int port = 8080;
  std::size_t session_length = 12;
  std::size_t bow_min_count = 10;
  bool exclude_possessives = false;
  bool exclude_punctuation = false;
  bool reuse_foils = false;
};

// Binds a flag to a config field; the file value applies when the flag is
// absent.
class Binder {
 public:
  explicit Binder(RunConfig& cfg) : cfg_(cfg) {}

  template <typename T>
  CLI::Option* option(CLI::App* app, const std::string& flag, const std::string& key,
                      T RunConfig::*field, const std::string& help) {
    CLI::Option* o = app->add_option(flag, cfg_.*field, help);
    o->capture_default_str();
    add_applier(app, o, key, field);
    return o;
  }

  CLI::Option* flag(CLI::App* app, const std::string& flag, const std::string& key,
                    bool RunConfig::*field, const std::string& help) {
    CLI::Option* o = app->add_flag(flag, cfg_.*field, help);
    add_applier(app, o, key, field);
    return o;
  }

  // Loads the file and fills fields whose flags were not given.
  void apply(const std::string& path, const CLI::App* active) const {
    if (path.empty()) return;
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw ConfigError(path + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError(path + ": config must be a JSON object");
    std::set<std::string> known;
    for (const auto& a : appliers_) known.insert(a.key);
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) throw ConfigError(path + ": unknown config key '" + key + "'");
    }
    for (const auto& a : appliers_) {
      if (a.app != active || !j.contains(a.key)) continue;
      try {
        a.apply(j.at(a.key));
      } catch (const json::exception& e) {
        throw ConfigError(path + ": bad value for '" + a.key + "': " + e.what());
      }
    }
  }

 private:
  struct Applier {
    const CLI::App* app;
    std::string key;
    std::function<void(const json&)> apply;
  };

  template <typename T>
  void add_applier(const CLI::App* app, CLI::Option* o, const std::string& key,
                   T RunConfig::*field) {
    appliers_.push_back({app, key, [this, o, field](const json& v) {
                           if (o->count() == 0) cfg_.*field = v.get<T>();
                         }});
  }

  RunConfig& cfg_;
  std::vector<Applier> appliers_;
};

void require(const std::string& value, const char* what) {
  if (value.empty()) throw ConfigError(std::string("missing required setting: ") + what);
}

void require_path(const std::string& value, const char* what) {
  require(value, what);
  if (!fs::exists(value)) throw ConfigError(std::string(what) + " does not exist: " + value);
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::vector<TaggedQuote> load_corpus(const std::string& path, const std::string& format,
                                     const std::string& name, const TaggerModel* tagger) {
  if (format == "tagged") return ingest_pretagged(path);
  if (format != "text") throw ConfigError(name + " format must be 'text' or 'tagged'");
  if (!tagger) throw ConfigError("a tagger model is needed for plain-text " + name);
  std::vector<TaggedQuote> out;
  std::size_t i = 0;
  for (const auto& line : read_lines(path)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(tag(*tagger, make_quote(name, i++, "", line, false)));
  }
  if (out.empty()) throw ConfigError(name + " corpus is empty: " + path);
  return out;
}

std::vector<TaggedPair> load_tagged_pairs(const RunConfig& cfg, const TaggerModel& tagger) {
  require_path(cfg.pairs, "pairs");
  const auto pairs = read_pairs(cfg.pairs);
  if (pairs.empty()) throw ConfigError("no pairs in " + cfg.pairs);
  std::vector<TaggedPair> tagged(pairs.size());
  const auto n = static_cast<std::int64_t>(pairs.size());
  std::vector<std::exception_ptr> errors(pairs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      tagged[i] = tag_pair(tagger, pairs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return tagged;
}

std::string histogram_tsv(const DecileHistogram& all, const DecileHistogram& inner) {
  std::string out = "decile\tmemorable\tmemorable_drop_first_last\n";
  for (std::size_t d = 0; d < 10; ++d) {
    out += std::to_string(d + 1) + "\t" + std::to_string(all[d]) + "\t" +
           std::to_string(inner[d]) + "\n";
  }
  return out;
}

int cmd_build_pairs(const RunConfig& cfg) {
  require_path(cfg.scripts, "scripts");
  require_path(cfg.memorable, "memorable");
  require(cfg.out, "out");
  const auto scripts = read_scripts(cfg.scripts);
  if (scripts.empty()) throw ConfigError("no scripts found in " + cfg.scripts);
  const auto lists = read_memorable_lists(cfg.memorable);
  PairingOptions popt;
  popt.one_to_one = !cfg.reuse_foils;
  const auto movies = kernels::build_all_pairs(scripts, lists, cfg.threshold, popt);

  std::vector<QuotePair> pairs;
  std::vector<Alignment> alignments;
  std::size_t memorable_lines = 0;
  for (const auto& m : movies) {
    pairs.insert(pairs.end(), m.pairs.begin(), m.pairs.end());
    alignments.push_back(m.alignment);
    for (const auto& l : m.alignment.labels) memorable_lines += l.memorable ? 1 : 0;
  }
  if (pairs.empty()) throw ConfigError("no pairs could be built from the inputs");

  const fs::path out = cfg.out;
  write_pairs(out / "pairs.jsonl", pairs);
  const auto all = decile_histogram(scripts, alignments, false);
  const auto inner = decile_histogram(scripts, alignments, true);
  write_file_atomic(out / "deciles.tsv", histogram_tsv(all, inner));
  write_json(out / "deciles.json", {{"memorable", all}, {"memorable_drop_first_last", inner}});

  json summary = {{"movies", scripts.size()},
                  {"memorable_lines", memorable_lines},
                  {"pairs", pairs.size()},
                  {"median_speaker_line_distance", median_speaker_distance(pairs)},
                  {"threshold", cfg.threshold}};
  if (!cfg.counts.empty()) {
    require_path(cfg.counts, "counts");
    const auto filtered = filter_by_counts(pairs, read_counts(cfg.counts));
    write_pairs(out / "pairs_google.jsonl", filtered.kept);
    summary["google_pairs"] = filtered.kept.size();
    summary["google_missing_counts"] = filtered.missing.size();
  }
  write_json(out / "summary.json", summary);
  std::string tsv = "key\tvalue\n";
  for (const auto& [k, v] : summary.items()) tsv += k + "\t" + v.dump() + "\n";
  write_file_atomic(out / "summary.tsv", tsv);
  std::cout << "pairs: " << pairs.size() << " (from " << memorable_lines
            << " memorable lines in " << scripts.size() << " movies)\n";
  return 0;
}

int cmd_train_tagger(const RunConfig& cfg) {
  require_path(cfg.corpus, "corpus");
  require(cfg.out, "out");
  const auto corpus = read_tagged_corpus(cfg.corpus);
  const auto model = train_tagger(corpus, cfg.iterations, cfg.seed);
  model.save(cfg.out);
  std::cout << "trained on " << corpus.size() << " sentences, training accuracy "
            << 100.0 * tagging_accuracy(model, corpus) << "%\n";
  return 0;
}

int cmd_tag(const RunConfig& cfg) {
  require_path(cfg.tagger, "tagger");
  require_path(cfg.input, "input");
  require(cfg.out, "out");
  const auto model = TaggerModel::load(cfg.tagger);
  std::string out;
  std::size_t i = 0;
  for (const auto& line : read_lines(cfg.input)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cased = tokenize_cased(line);
    const auto toks = token_strings(cased, true);
    if (toks.empty()) continue;
    out += format_tagged_line(toks, model.tag_tokens(toks)) + "\n";
    ++i;
  }
  write_file_atomic(cfg.out, out);
  std::cout << "tagged " << i << " lines\n";
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  require_path(cfg.tagger, "tagger");
  require_path(cfg.brown, "brown");
  require_path(cfg.slogans, "slogans");
  require(cfg.out, "out");
  const auto tagger = TaggerModel::load(cfg.tagger);
  const auto tagged = load_tagged_pairs(cfg, tagger);
  const auto brown = load_corpus(cfg.brown, cfg.brown_format, "brown", &tagger);
  const auto slogans = load_corpus(cfg.slogans, cfg.slogans_format, "slogans", &tagger);

  std::vector<QuotePair> pairs;
  std::vector<TaggedQuote> mem, non;
  for (const auto& tp : tagged) {
    pairs.push_back({tp.memorable.quote, tp.nonmemorable.quote, 0, 0});
    mem.push_back(tp.memorable);
    non.push_back(tp.nonmemorable);
  }
  const fs::path out = cfg.out;
  GeneralityOptions gopt;
  gopt.include_possessives = !cfg.exclude_possessives;

  // Distinctiveness against the common-language models.
  const bool punct = !cfg.exclude_punctuation;
  const auto common = train_bank(brown, cfg.alpha, punct);
  std::vector<MetricReport> t3;
  for (const auto& lm : common.models) {
    t3.push_back(distinctiveness_eval(pairs, lm, tagged, punct));
  }
  write_file_atomic(out / "table3_distinctiveness.tsv", reports_tsv(t3));
  json j3 = json::array();
  for (const auto& r : t3) j3.push_back(to_json(r));
  write_json(out / "table3_distinctiveness.json", j3);

  std::vector<MetricReport> t4;
  for (auto m : kGeneralityMetrics) t4.push_back(generality_eval(tagged, m, gopt));
  write_file_atomic(out / "table4_generality.tsv", reports_tsv(t4));
  json j4 = json::array();
  for (const auto& r : t4) j4.push_back(to_json(r));
  write_json(out / "table4_generality.json", j4);

  // Memorable-trained vs non-memorable-trained models on slogans and newswire.
  const auto mem_bank = train_bank(mem, cfg.alpha, punct);
  const auto non_bank = train_bank(non, cfg.alpha, punct);
  std::vector<PreferenceReport> t5;
  const char* names[] = {"lexical 1-gram", "lexical 2-gram", "lexical 3-gram",
                         "pos 1-gram",     "pos 2-gram",     "pos 3-gram"};
  for (const auto* corpus : {&slogans, &brown}) {
    const std::string label = corpus == &slogans ? "slogans" : "newswire";
    for (std::size_t i = 0; i < 6; ++i) {
      std::vector<TokenSequence> seqs;
      for (const auto& tq : *corpus) {
        seqs.push_back(i < 3 ? word_sequence(tq.quote, punct) : tag_sequence(tq, punct));
      }
      t5.push_back(preference_eval(label + ": " + names[i], mem_bank.models[i],
                                   non_bank.models[i], seqs));
    }
  }
  write_file_atomic(out / "table5_slogans.tsv", preferences_tsv(t5));
  json j5 = json::array();
  for (const auto& r : t5) j5.push_back(to_json(r));
  write_json(out / "table5_slogans.json", j5);

  const auto t6 = slogan_spectrum(slogans, mem, non, gopt);
  write_file_atomic(out / "table6_spectrum.tsv", rates_tsv(t6));
  json j6 = json::array();
  for (const auto& r : t6) j6.push_back(to_json(r));
  write_json(out / "table6_spectrum.json", j6);

  AuxConfig aux;
  if (!cfg.curse_words.empty()) {
    require_path(cfg.curse_words, "curse_words");
    aux.curse_words = load_word_list(cfg.curse_words);
  }
  const auto ta = aux_eval(tagged, aux);
  write_file_atomic(out / "aux_metrics.tsv", reports_tsv(ta));
  json ja = json::array();
  for (const auto& r : ta) ja.push_back(to_json(r));
  write_json(out / "aux_metrics.json", ja);

  std::cout << reports_tsv(t3) << reports_tsv(t4);
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  require_path(cfg.tagger, "tagger");
  require(cfg.out, "out");
  const auto tagger = TaggerModel::load(cfg.tagger);
  const auto tagged = load_tagged_pairs(cfg, tagger);

  std::vector<FeatureSet> sets;
  std::stringstream ss(cfg.feature_sets);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) sets.push_back(parse_feature_set(item));
  }
  if (sets.empty()) throw ConfigError("no feature sets requested");

  bool need_common = false, need_slogan = false;
  for (auto s : sets) {
    need_common |= s == FeatureSet::kDistinctiveness || s == FeatureSet::kAll3;
    need_slogan |= s == FeatureSet::kSloganSim || s == FeatureSet::kAll3;
  }
  LmBank common, slogan;
  FeatureContext ctx;
  ctx.generality.include_possessives = !cfg.exclude_possessives;
  ctx.include_punctuation = !cfg.exclude_punctuation;
  if (need_common) {
    require_path(cfg.brown, "brown");
    common = train_bank(load_corpus(cfg.brown, cfg.brown_format, "brown", &tagger), cfg.alpha,
                        ctx.include_punctuation);
    ctx.common = &common;
  }
  if (need_slogan) {
    require_path(cfg.slogans, "slogans");
    slogan = train_bank(load_corpus(cfg.slogans, cfg.slogans_format, "slogans", &tagger),
                        cfg.alpha, ctx.include_punctuation);
    ctx.slogan = &slogan;
  }

  const auto data = present_pairs(tagged, cfg.seed);
  CvOptions cv;
  cv.k = cfg.k;
  cv.seed = cfg.seed;
  cv.svm.seed = cfg.seed;
  cv.bow_min_count = cfg.bow_min_count;

  std::vector<FoldReport> reports;
  for (auto s : sets) reports.push_back(cross_validate(data, s, ctx, cv));
  const FoldReport* bow = nullptr;
  for (const auto& r : reports) {
    if (r.feature_set == "bow") bow = &r;
  }

  std::string tsv = "feature_set\tfeature_count\tmean_accuracy\tt_vs_bow\tp_vs_bow\tsignificance";
  for (int f = 0; f < cfg.k; ++f) tsv += "\tfold" + std::to_string(f + 1);
  tsv += "\n";
  json jr = json::array();
  for (const auto& r : reports) {
    json row = r.to_json();
    std::optional<stats::TestResult> t;
    if (bow && &r != bow) t = stats::paired_t_test(r.per_fold_accuracy, bow->per_fold_accuracy);
    row["t_vs_bow"] = t ? json(t->statistic) : json(nullptr);
    row["p_vs_bow"] = t ? json(t->p_value) : json(nullptr);
    jr.push_back(row);
    std::ostringstream line;
    line.precision(6);
    line << r.feature_set << "\t" << r.feature_count << "\t" << 100.0 * r.mean_accuracy << "\t"
         << (t ? std::to_string(t->statistic) : "NA") << "\t"
         << (t ? std::to_string(t->p_value) : "NA") << "\t"
         << stats::significance_stars(t ? std::optional<double>(t->p_value) : std::nullopt);
    for (double a : r.per_fold_accuracy) line << "\t" << a;
    tsv += line.str() + "\n";
  }
  const fs::path out = cfg.out;
  write_file_atomic(out / "table7_prediction.tsv", tsv);
  write_json(out / "table7_prediction.json", jr);
  std::cout << tsv;
  return 0;
}

std::atomic<http::QuizServer*> g_server{nullptr};

extern "C" void on_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const RunConfig& cfg) {
  require_path(cfg.pairs, "pairs");
  require(cfg.log, "log");
  QuizOptions qo;
  qo.session_length = cfg.session_length;
  qo.seed = cfg.seed;
  qo.log_path = cfg.log;
  QuizService service(quiz_items(read_pairs(cfg.pairs)), qo);
  http::QuizServer server(service, {cfg.host, cfg.port, "*"});
  const int port = server.start();
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "serving " << service.item_count() << " pairs on http://" << cfg.host << ":"
            << port << std::endl;
  server.listen_blocking();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memquote: memorable-quote pairs, metrics, prediction, and quiz service"};
  app.require_subcommand(1);
  RunConfig cfg;
  Binder b(cfg);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys")
      ->check(CLI::ExistingFile);

  auto* build = app.add_subcommand("build-pairs", "align scripts and build controlled pairs");
  b.option(build, "--scripts", "scripts", &RunConfig::scripts, "script JSONL file or directory");
  b.option(build, "--memorable", "memorable", &RunConfig::memorable, "memorable-quote JSONL");
  b.option(build, "--counts", "counts", &RunConfig::counts, "search counts TSV (adds +Google subset)");
  b.option(build, "--threshold", "threshold", &RunConfig::threshold, "alignment edit-distance threshold");
  b.flag(build, "--reuse-foils", "reuse_foils", &RunConfig::reuse_foils,
         "let one line serve as the foil for several memorable lines");
  b.option(build, "--out", "out", &RunConfig::out, "output directory");

  auto* train = app.add_subcommand("train-tagger", "train the POS tagger on a token_TAG corpus");
  b.option(train, "--corpus", "corpus", &RunConfig::corpus, "token_TAG training file");
  b.option(train, "--iterations", "iterations", &RunConfig::iterations, "perceptron passes");
  b.option(train, "--seed", "seed", &RunConfig::seed, "shuffle seed");
  b.option(train, "--out", "out", &RunConfig::out, "model JSON path");

  auto* tagcmd = app.add_subcommand("tag", "tag plain-text lines into token_TAG lines");
  b.option(tagcmd, "--tagger", "tagger", &RunConfig::tagger, "tagger model JSON");
  b.option(tagcmd, "--input", "input", &RunConfig::input, "one sentence per line");
  b.option(tagcmd, "--out", "out", &RunConfig::out, "token_TAG output path");

  auto* analyze = app.add_subcommand("analyze", "distinctiveness, generality, slogan tables");
  auto* predict = app.add_subcommand("predict", "10-fold SVM prediction table");
  for (auto* sc : {analyze, predict}) {
    b.option(sc, "--pairs", "pairs", &RunConfig::pairs, "pairs JSONL");
    b.option(sc, "--tagger", "tagger", &RunConfig::tagger, "tagger model JSON");
    b.option(sc, "--brown", "brown", &RunConfig::brown, "common-language corpus");
    b.option(sc, "--brown-format", "brown_format", &RunConfig::brown_format, "text or tagged");
    b.option(sc, "--slogans", "slogans", &RunConfig::slogans, "slogan corpus");
    b.option(sc, "--slogans-format", "slogans_format", &RunConfig::slogans_format, "text or tagged");
    b.option(sc, "--alpha", "alpha", &RunConfig::alpha, "Laplace smoothing constant");
    b.flag(sc, "--exclude-possessives", "exclude_possessives", &RunConfig::exclude_possessives,
           "leave possessive pronouns out of the 3rd-person count");
    b.flag(sc, "--exclude-punctuation", "exclude_punctuation", &RunConfig::exclude_punctuation,
           "drop punctuation tokens from language-model input");
    b.option(sc, "--out", "out", &RunConfig::out, "output directory");
  }
  b.option(analyze, "--curse-words", "curse_words", &RunConfig::curse_words, "word list removed before sound counts");
  b.option(predict, "--k", "k", &RunConfig::k, "cross-validation folds");
  b.option(predict, "--seed", "seed", &RunConfig::seed, "order, fold, and solver seed");
  b.option(predict, "--feature-sets", "feature_sets", &RunConfig::feature_sets, "comma-separated feature sets");
  b.option(predict, "--bow-min-count", "bow_min_count", &RunConfig::bow_min_count, "bag-of-words frequency floor");

  auto* serve = app.add_subcommand("serve", "run the quiz HTTP service");
  b.option(serve, "--pairs", "pairs", &RunConfig::pairs, "pairs JSONL");
  b.option(serve, "--log", "log", &RunConfig::log, "judgment log (JSONL, append-only)");
  b.option(serve, "--host", "host", &RunConfig::host, "bind address");
  b.option(serve, "--port", "port", &RunConfig::port, "port, 0 for any free port");
  b.option(serve, "--session-length", "session_length", &RunConfig::session_length, "pairs per subject");
  b.option(serve, "--seed", "seed", &RunConfig::seed, "serving order seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    b.apply(config_path, active);
    if (active == build) return cmd_build_pairs(cfg);
    if (active == train) return cmd_train_tagger(cfg);
    if (active == tagcmd) return cmd_tag(cfg);
    if (active == analyze) return cmd_analyze(cfg);
    if (active == predict) return cmd_predict(cfg);
    if (active == serve) return cmd_serve(cfg);
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
