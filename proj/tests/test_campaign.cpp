// Campaign config, dataset loading, record persistence and end-to-end runs
// against the in-process toy models.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmark/campaign.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Scratch directory, wiped per test.
class CampaignTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("campaign-test-" + std::string(::testing::UnitTest::GetInstance()
                                               ->current_test_info()
                                               ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write_file(const std::string& name, const std::string& body) {
    const std::string p = path(name);
    std::ofstream out(p, std::ios::binary);
    out << body;
    return p;
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  fs::path dir_;
};

// ---- config ------------------------------------------------------------------

TEST(CampaignConfig, DefaultsFromMinimalJson) {
  const dmark::CampaignConfig c =
      dmark::parse_campaign_config(json::parse(R"({"dataset":"builtin:toxicity"})"));
  EXPECT_EQ(c.dataset, "builtin:toxicity");
  EXPECT_EQ(c.task.kind, "generate");
  EXPECT_EQ(c.task.metric, "chrf");
  EXPECT_EQ(c.budgets, (std::vector<int>{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(c.de.population_size, 32u);
  EXPECT_EQ(c.de.generations, 10u);
  EXPECT_DOUBLE_EQ(c.de.crossover, 0.7);
  EXPECT_DOUBLE_EQ(c.de.f_min, 0.5);
  EXPECT_DOUBLE_EQ(c.de.f_max, 1.0);
  EXPECT_EQ(c.adapter.kind, "toy");
  EXPECT_EQ(c.adapter.model, "identity");
  EXPECT_EQ(c.adapter.mode, "text");
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.out_dir, "campaign-out");
}

TEST(CampaignConfig, UnknownKeysRejectedAtEveryLevel) {
  EXPECT_THROW(dmark::parse_campaign_config(
                   json::parse(R"({"dataset":"x","bogus":1})")),
               dmark::ConfigError);
  EXPECT_THROW(dmark::parse_campaign_config(
                   json::parse(R"({"dataset":"x","task":{"flavor":"hot"}})")),
               dmark::ConfigError);
  EXPECT_THROW(dmark::parse_campaign_config(
                   json::parse(R"({"dataset":"x","de":{"popsize":8}})")),
               dmark::ConfigError);
  EXPECT_THROW(dmark::parse_campaign_config(
                   json::parse(R"({"dataset":"x","adapter":{"kindd":"toy"}})")),
               dmark::ConfigError);
}

TEST(CampaignConfig, ValidationCatchesBadValues) {
  auto parse = [](const char* body) { return dmark::parse_campaign_config(json::parse(body)); };
  EXPECT_THROW(parse(R"({"dataset":""})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","budgets":[]})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","budgets":[2,1]})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","budgets":[1,1]})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","budgets":[-1,0]})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","task":{"kind":"rank"}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","task":{"metric":"bleu"}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","adapter":{"kind":"grpc"}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","adapter":{"model":"bert"}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","adapter":{"kind":"command"}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","adapter":{"kind":"http"}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","adapter":{"mode":"image","canvas_width":1}})"),
               dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","de":{"population":2}})"), dmark::ConfigError);
  EXPECT_THROW(parse(R"({"dataset":"x","de":{"crossover":1.5}})"), dmark::ConfigError);
}

TEST_F(CampaignTest, LoadConfigFromFile) {
  const std::string p = write_file("c.json", R"({
    "dataset": "builtin:toxicity",
    "task": {"kind": "classify", "metric": "accuracy", "use_logit": true},
    "budgets": [0, 2],
    "de": {"population": 8, "generations": 3, "eval_threads": 2},
    "adapter": {"kind": "toy", "model": "toxic"},
    "seed": 7,
    "out": "somewhere",
    "max_inputs": 5,
    "timings": true
  })");
  const dmark::CampaignConfig c = dmark::load_campaign_config(p);
  EXPECT_EQ(c.task.kind, "classify");
  EXPECT_TRUE(c.task.use_logit);
  EXPECT_EQ(c.budgets, (std::vector<int>{0, 2}));
  EXPECT_EQ(c.de.eval_threads, 2u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.max_inputs, 5u);
  EXPECT_TRUE(c.record_timings);

  EXPECT_THROW(dmark::load_campaign_config(path("missing.json")), dmark::ConfigError);
  EXPECT_THROW(dmark::load_campaign_config(write_file("bad.json", "{nope")),
               dmark::ConfigError);
}

// ---- datasets ------------------------------------------------------------------

TEST(Dataset, Builtins) {
  const std::vector<dmark::DatasetItem> sentences = dmark::load_dataset("builtin:ocr-sentences");
  EXPECT_EQ(sentences.size(), 50u);
  EXPECT_FALSE(sentences[0].label.has_value());
  for (const dmark::DatasetItem& item : sentences) EXPECT_FALSE(item.input.empty());

  const std::vector<dmark::DatasetItem> tox = dmark::load_dataset("builtin:toxicity");
  EXPECT_EQ(tox.size(), 20u);
  std::size_t toxic = 0;
  for (const dmark::DatasetItem& item : tox) {
    ASSERT_TRUE(item.label.has_value());
    if (*item.label == dmark::kToxicLabel) ++toxic;
  }
  EXPECT_EQ(toxic, 10u);

  EXPECT_THROW(dmark::load_dataset("builtin:imagenet"), dmark::DatasetError);
}

TEST_F(CampaignTest, PlainTextDataset) {
  const std::string p = write_file("lines.txt", "first line\n\nsecond line\n");
  const std::vector<dmark::DatasetItem> items = dmark::load_dataset(p);
  ASSERT_EQ(items.size(), 2u);  // blank lines skipped
  EXPECT_EQ(items[0].id, "line-0001");
  EXPECT_EQ(items[0].input, "first line");
  EXPECT_EQ(items[1].id, "line-0002");
  EXPECT_FALSE(items[0].reference.has_value());
}

TEST_F(CampaignTest, JsonlDataset) {
  const std::string p = write_file("data.jsonl",
      R"({"id":"a","input":"hello","reference":"bonjour","label":"toxic"})" "\n"
      R"({"input":"no id here"})" "\n");
  const std::vector<dmark::DatasetItem> items = dmark::load_dataset(p);
  ASSERT_EQ(items.size(), 2u);
  EXPECT_EQ(items[0].id, "a");
  EXPECT_EQ(items[0].reference.value(), "bonjour");
  EXPECT_EQ(items[0].label.value(), "toxic");
  EXPECT_EQ(items[1].id, "line-2");
  EXPECT_FALSE(items[1].reference.has_value());
}

TEST_F(CampaignTest, DatasetErrorsCarryLineNumbers) {
  const std::string p = write_file("broken.jsonl",
      R"({"id":"a","input":"ok"})" "\n"
      "{broken json\n");
  try {
    dmark::load_dataset(p);
    FAIL() << "expected DatasetError";
  } catch (const dmark::DatasetError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }

  // A first line without "input" reads as plain text, so break line 2 instead.
  const std::string missing_input = write_file("noinput.jsonl",
      R"({"id":"a","input":"ok"})" "\n" R"({"id":"b"})" "\n");
  EXPECT_THROW(dmark::load_dataset(missing_input), dmark::DatasetError);
  EXPECT_THROW(dmark::load_dataset(write_file("empty.txt", "\n\n")), dmark::DatasetError);
  EXPECT_THROW(dmark::load_dataset(path("missing.txt")), dmark::DatasetError);
}

// ---- seed derivation and helpers ----------------------------------------------

TEST(CampaignDetail, DerivedSeedsDifferAcrossInputsAndBudgets) {
  const std::uint64_t a = dmark::campaign_detail::derived_seed(7, "t01", 0);
  const std::uint64_t b = dmark::campaign_detail::derived_seed(7, "t01", 1);
  const std::uint64_t c = dmark::campaign_detail::derived_seed(7, "t02", 0);
  const std::uint64_t d = dmark::campaign_detail::derived_seed(8, "t01", 0);
  EXPECT_NE(a, b);
  EXPECT_NE(a, c);
  EXPECT_NE(a, d);
  EXPECT_EQ(a, dmark::campaign_detail::derived_seed(7, "t01", 0));
}

TEST(CampaignDetail, ClassifyFitnessProbabilityAndLogit) {
  const std::map<std::string, double> probs{{"toxic", 0.88}, {"non-toxic", 0.12}};
  EXPECT_DOUBLE_EQ(dmark::campaign_detail::classify_fitness(probs, "toxic", false), 0.88);
  EXPECT_NEAR(dmark::campaign_detail::classify_fitness(probs, "toxic", true),
              std::log(0.88 / 0.12), 1e-12);
  const std::map<std::string, double> hard{{"yes", 1.0}, {"no", 0.0}};
  // Saturated probabilities clamp instead of producing infinities.
  EXPECT_TRUE(std::isfinite(dmark::campaign_detail::classify_fitness(hard, "yes", true)));
  EXPECT_TRUE(std::isfinite(dmark::campaign_detail::classify_fitness(hard, "no", true)));
  EXPECT_THROW(dmark::campaign_detail::classify_fitness(probs, "neutral", false),
               dmark::AdapterError);
}

TEST(CampaignDetail, ArgmaxBreaksTiesTowardLastLabel) {
  EXPECT_EQ(dmark::campaign_detail::argmax_label({{"a", 0.5}, {"b", 0.5}}), "b");
  EXPECT_EQ(dmark::campaign_detail::argmax_label(
                {{"non-toxic", 0.5}, {"toxic", 0.5}}),
            "toxic");
  EXPECT_EQ(dmark::campaign_detail::argmax_label({{"a", 0.9}, {"b", 0.1}}), "a");
}

// ---- end-to-end campaigns -------------------------------------------------------

dmark::CampaignConfig toxicity_config(const std::string& out, int max_inputs = 4) {
  dmark::CampaignConfig c;
  c.dataset = "builtin:toxicity";
  c.task.kind = "classify";
  c.task.metric = "accuracy";
  c.budgets = {0, 2};
  c.de.population_size = 8;
  c.de.generations = 4;
  c.de.seed = 0;
  c.adapter.kind = "toy";
  c.adapter.model = "toxic";
  c.seed = 11;
  c.out_dir = out;
  c.max_inputs = max_inputs;
  return c;
}

TEST_F(CampaignTest, RunsAreByteIdentical) {
  const dmark::CampaignResult first = dmark::run_campaign(toxicity_config(path("run1")));
  const dmark::CampaignResult second = dmark::run_campaign(toxicity_config(path("run2")));
  EXPECT_EQ(slurp(first.records_path), slurp(second.records_path));
  EXPECT_EQ(slurp(first.aggregates_path), slurp(second.aggregates_path));
  EXPECT_FALSE(slurp(first.records_path).empty());
}

TEST_F(CampaignTest, RecordsAreSortedAsciiOnlyAndRoundTrip) {
  const dmark::CampaignResult result = dmark::run_campaign(toxicity_config(path("run")));
  const std::string raw = slurp(result.records_path);
  for (unsigned char byte : raw) EXPECT_LT(byte, 0x80u);

  const std::vector<dmark::AttackRecord> loaded = dmark::load_records(result.records_path);
  ASSERT_EQ(loaded.size(), result.records.size());
  for (std::size_t i = 1; i < loaded.size(); ++i) {
    const bool ordered = loaded[i - 1].id < loaded[i].id ||
                         (loaded[i - 1].id == loaded[i].id &&
                          loaded[i - 1].budget < loaded[i].budget);
    EXPECT_TRUE(ordered) << "records out of order at " << i;
  }
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    EXPECT_EQ(loaded[i].id, result.records[i].id);
    EXPECT_EQ(loaded[i].budget, result.records[i].budget);
    EXPECT_EQ(loaded[i].perturbed, result.records[i].perturbed);
    EXPECT_DOUBLE_EQ(loaded[i].fitness_after, result.records[i].fitness_after);
    EXPECT_EQ(loaded[i].metrics, result.records[i].metrics);
  }
}

TEST_F(CampaignTest, BudgetZeroRecordsIdentity) {
  const dmark::CampaignResult result = dmark::run_campaign(toxicity_config(path("run")));
  std::size_t zero_records = 0;
  for (const dmark::AttackRecord& r : result.records) {
    if (r.budget != 0) continue;
    ++zero_records;
    EXPECT_EQ(r.perturbed, r.original);
    EXPECT_EQ(r.mark_count, 0u);
    EXPECT_DOUBLE_EQ(r.fitness_after, r.fitness_before);
    EXPECT_EQ(r.evaluations, 1u);
    EXPECT_FALSE(r.success);
  }
  EXPECT_EQ(zero_records, 4u);
}

TEST_F(CampaignTest, FitnessNeverWorsensAndSuccessMeansStrictDrop) {
  // 12 inputs reaches past the toxic half of the corpus into examples the
  // attack cannot move (marks never create lexicon words), exercising the
  // equal-fitness path alongside the flips.
  const dmark::CampaignResult result = dmark::run_campaign(toxicity_config(path("run"), 12));
  for (const dmark::AttackRecord& r : result.records) {
    ASSERT_FALSE(r.failed);
    EXPECT_LE(r.fitness_after, r.fitness_before + 1e-12) << r.id << " b" << r.budget;
    EXPECT_EQ(r.success, r.fitness_after < r.fitness_before);
  }
}

TEST_F(CampaignTest, ClassifyWithoutLabelsRejected) {
  dmark::CampaignConfig c = toxicity_config(path("run"));
  c.dataset = "builtin:ocr-sentences";  // unlabeled
  EXPECT_THROW(dmark::run_campaign(c), dmark::ConfigError);
}

TEST_F(CampaignTest, GenerateCampaignOverRenderedOcr) {
  dmark::CampaignConfig c;
  c.dataset = "builtin:ocr-sentences";
  c.task.kind = "generate";
  c.task.metric = "neg-levenshtein";
  c.budgets = {0, 3};
  c.de.population_size = 8;
  c.de.generations = 3;
  c.adapter.kind = "toy";
  c.adapter.model = "ocr";
  c.adapter.mode = "image";
  c.adapter.canvas_width = 40;
  c.seed = 3;
  c.out_dir = path("ocr-run");
  c.max_inputs = 3;
  const dmark::CampaignResult result = dmark::run_campaign(c);
  ASSERT_EQ(result.records.size(), 6u);
  for (const dmark::AttackRecord& r : result.records) {
    ASSERT_FALSE(r.failed);
    ASSERT_TRUE(r.metrics.count("levenshtein"));
    if (r.budget == 0) {
      // Clean channel: the OCR reads the sentence back exactly.
      EXPECT_DOUBLE_EQ(r.metrics.at("levenshtein"), 0.0);
      EXPECT_EQ(r.output_after, r.original);
    }
  }

  const std::string csv = slurp(result.aggregates_path);
  EXPECT_NE(csv.find("mean_levenshtein"), std::string::npos);
  EXPECT_EQ(csv.find("accuracy"), std::string::npos);  // no labels in play
}

TEST_F(CampaignTest, AggregatesCarryAccuracyForLabeledClassify) {
  const dmark::CampaignResult result = dmark::run_campaign(toxicity_config(path("run")));
  const std::string csv = slurp(result.aggregates_path);
  EXPECT_NE(csv.find("accuracy"), std::string::npos);
  EXPECT_NE(csv.find("budget,count,failed,success_rate"), std::string::npos);
}

TEST_F(CampaignTest, ReportNormalizesAgainstBudgetZero) {
  const dmark::CampaignResult result = dmark::run_campaign(toxicity_config(path("run")));
  (void)result;
  const std::string table = dmark::report(path("run"));
  EXPECT_NE(table.find("budget,column,baseline,value,relative"), std::string::npos);
  EXPECT_NE(table.find("fitness"), std::string::npos);

  std::istringstream lines(table);
  std::string line;
  std::getline(lines, line);  // header
  bool saw_budget0 = false;
  while (std::getline(lines, line)) {
    if (line.rfind("0,", 0) == 0) {
      saw_budget0 = true;
      // budget-0 rows are their own baseline: relative is exactly 1.
      EXPECT_NE(line.find(",1.0"), std::string::npos) << line;
    }
  }
  EXPECT_TRUE(saw_budget0);
}

TEST_F(CampaignTest, ReportDemandsBaseline) {
  dmark::CampaignConfig c = toxicity_config(path("nobase"));
  c.budgets = {1};
  dmark::run_campaign(c);
  EXPECT_THROW(dmark::report(path("nobase")), std::runtime_error);
  EXPECT_THROW(dmark::report(path("never-ran")), std::runtime_error);
}

}  // namespace
