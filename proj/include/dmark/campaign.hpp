#pragma once

// Campaign harness: runs the optimizer over a dataset across budgets and
// persists one JSONL record per (input, budget) plus per-budget CSV
// aggregates. Outputs are byte-stable for a fixed config: records are sorted
// by (id, budget), doubles print in shortest round-trip form, non-ASCII text
// is escaped, and wall-clock timing is zeroed unless explicitly enabled.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmark/adapter.hpp"
#include "dmark/corpus.hpp"
#include "dmark/de.hpp"
#include "dmark/http.hpp"
#include "dmark/metrics.hpp"
#include "dmark/serve.hpp"
#include "dmark/subprocess.hpp"

namespace dmark {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TaskSpec {
  std::string kind = "generate";  // "classify" | "generate"
  std::string target_label;       // classify: empty = use each item's label
  bool use_logit = false;         // classify fitness on logit instead of probability
  std::string metric = "chrf";    // generate fitness metric
};

struct AdapterSpec {
  std::string kind = "toy";  // "toy" | "command" | "http"
  std::string model = "identity";
  std::vector<std::string> command;
  std::string url;
  std::string mode = "text";  // "text" | "image"
  unsigned canvas_width = 40;
  std::size_t max_canvases = 64;
  long timeout_ms = -1;
};

struct CampaignConfig {
  std::string dataset;  // path, or builtin:ocr-sentences / builtin:toxicity
  TaskSpec task;
  std::vector<int> budgets = {0, 1, 2, 3, 4, 5};
  DEParams de;  // de.budget and de.seed are overridden per (input, budget)
  AdapterSpec adapter;
  std::uint64_t seed = 0;
  std::string out_dir = "campaign-out";
  std::size_t max_inputs = 0;  // 0 = whole dataset
  bool record_timings = false;

  void validate() const {
    if (dataset.empty()) throw ConfigError("config: dataset is required");
    if (task.kind != "classify" && task.kind != "generate")
      throw ConfigError("config: task.kind must be classify or generate");
    if (budgets.empty()) throw ConfigError("config: budgets must not be empty");
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      if (budgets[i] < 0) throw ConfigError("config: budgets must be non-negative");
      if (i > 0 && budgets[i] <= budgets[i - 1])
        throw ConfigError("config: budgets must be strictly ascending");
    }
    try {
      if (task.kind == "generate") metric_higher_is_better(task.metric);
      de.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (adapter.kind != "toy" && adapter.kind != "command" && adapter.kind != "http")
      throw ConfigError("config: adapter.kind must be toy, command or http");
    if (adapter.kind == "toy" && !valid_toy_model(adapter.model))
      throw ConfigError("config: unknown toy model: " + adapter.model);
    if (adapter.kind == "command" && adapter.command.empty())
      throw ConfigError("config: adapter.command is required for kind=command");
    if (adapter.kind == "http" && adapter.url.empty())
      throw ConfigError("config: adapter.url is required for kind=http");
    if (adapter.mode != "text" && adapter.mode != "image")
      throw ConfigError("config: adapter.mode must be text or image");
    if (adapter.mode == "image" && adapter.canvas_width < 2)
      throw ConfigError("config: canvas_width must be at least 2");
  }
};

namespace campaign_detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const char* where,
                                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) known = true;
    if (!known)
      throw ConfigError(std::string("config: unknown key \"") + key + "\" in " + where);
  }
}

}  // namespace campaign_detail

inline CampaignConfig parse_campaign_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  campaign_detail::reject_unknown_keys(
      j, "config", {"dataset", "task", "budgets", "de", "adapter", "seed", "out",
                    "max_inputs", "timings"});
  CampaignConfig config;
  try {
    config.dataset = j.at("dataset").get<std::string>();
    if (j.contains("task")) {
      const auto& t = j["task"];
      campaign_detail::reject_unknown_keys(t, "task",
                                           {"kind", "target_label", "use_logit", "metric"});
      if (t.contains("kind")) config.task.kind = t["kind"].get<std::string>();
      if (t.contains("target_label"))
        config.task.target_label = t["target_label"].get<std::string>();
      if (t.contains("use_logit")) config.task.use_logit = t["use_logit"].get<bool>();
      if (t.contains("metric")) config.task.metric = t["metric"].get<std::string>();
    }
    if (j.contains("budgets")) config.budgets = j["budgets"].get<std::vector<int>>();
    if (j.contains("de")) {
      const auto& d = j["de"];
      campaign_detail::reject_unknown_keys(
          d, "de", {"population", "generations", "crossover", "f_min", "f_max",
                    "eval_threads"});
      if (d.contains("population")) config.de.population_size = d["population"].get<std::size_t>();
      if (d.contains("generations")) config.de.generations = d["generations"].get<std::size_t>();
      if (d.contains("crossover")) config.de.crossover = d["crossover"].get<double>();
      if (d.contains("f_min")) config.de.f_min = d["f_min"].get<double>();
      if (d.contains("f_max")) config.de.f_max = d["f_max"].get<double>();
      if (d.contains("eval_threads")) config.de.eval_threads = d["eval_threads"].get<unsigned>();
    }
    if (j.contains("adapter")) {
      const auto& a = j["adapter"];
      campaign_detail::reject_unknown_keys(
          a, "adapter", {"kind", "model", "command", "url", "mode", "canvas_width",
                         "max_canvases", "timeout_ms"});
      if (a.contains("kind")) config.adapter.kind = a["kind"].get<std::string>();
      if (a.contains("model")) config.adapter.model = a["model"].get<std::string>();
      if (a.contains("command"))
        config.adapter.command = a["command"].get<std::vector<std::string>>();
      if (a.contains("url")) config.adapter.url = a["url"].get<std::string>();
      if (a.contains("mode")) config.adapter.mode = a["mode"].get<std::string>();
      if (a.contains("canvas_width")) config.adapter.canvas_width = a["canvas_width"].get<unsigned>();
      if (a.contains("max_canvases")) config.adapter.max_canvases = a["max_canvases"].get<std::size_t>();
      if (a.contains("timeout_ms")) config.adapter.timeout_ms = a["timeout_ms"].get<long>();
    }
    if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) config.out_dir = j["out"].get<std::string>();
    if (j.contains("max_inputs")) config.max_inputs = j["max_inputs"].get<std::size_t>();
    if (j.contains("timings")) config.record_timings = j["timings"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  config.validate();
  return config;
}

inline CampaignConfig load_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path);
  return parse_campaign_config(j);
}

struct DatasetItem {
  std::string id;
  std::string input;
  std::optional<std::string> reference;
  std::optional<std::string> label;
};

struct AttackRecord {
  std::string id;
  int budget = 0;
  std::string original;
  std::string perturbed;
  std::size_t mark_count = 0;
  double fitness_before = 0.0;
  double fitness_after = 0.0;
  std::string output_before;
  std::string output_after;
  std::map<std::string, double> metrics;
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  std::uint64_t wall_clock_ms = 0;
  bool success = false;
  bool failed = false;
  std::string error;
};

namespace campaign_detail {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t derived_seed(std::uint64_t campaign_seed, const std::string& id,
                                  int budget) {
  return campaign_seed ^ fnv1a64(id + "|" + std::to_string(budget));
}

// Shortest round-trip decimal form, the same one the JSON writer emits.
inline std::string format_double(double v) { return nlohmann::json(v).dump(); }

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

inline double mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// Ties take the lexicographically last label, matching the toy classifier's
// behavior at probability exactly 0.5.
inline std::string argmax_label(const std::map<std::string, double>& probs) {
  std::string best;
  double best_p = 0.0;
  for (const auto& [label, p] : probs) {
    if (best.empty() || p >= best_p) {
      best = label;
      best_p = p;
    }
  }
  return best;
}

}  // namespace campaign_detail

inline std::vector<DatasetItem> builtin_dataset(const std::string& name) {
  std::vector<DatasetItem> items;
  if (name == "ocr-sentences") {
    for (const CorpusSentence& s : kOcrCorpus) items.push_back({s.id, s.text, {}, {}});
    return items;
  }
  if (name == "toxicity") {
    for (const LabeledExample& e : kToxicCorpus)
      items.push_back({e.id, e.text, {}, e.label});
    return items;
  }
  throw DatasetError("unknown builtin dataset: " + name);
}

// JSONL with {id, input, reference?, label?} when the first non-empty line is
// a JSON object carrying "input"; otherwise plain text, one input per line,
// ids generated as line-0001, line-0002, ...
inline std::vector<DatasetItem> load_dataset(const std::string& spec) {
  if (spec.rfind("builtin:", 0) == 0) return builtin_dataset(spec.substr(8));
  std::ifstream in(spec);
  if (!in) throw DatasetError("cannot open dataset: " + spec);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  bool jsonl = false;
  for (const std::string& l : lines) {
    if (l.empty()) continue;
    const auto probe = nlohmann::json::parse(l, nullptr, false);
    jsonl = probe.is_object() && probe.contains("input");
    break;
  }
  std::vector<DatasetItem> items;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    if (!jsonl) {
      char id[16];
      std::snprintf(id, sizeof id, "line-%04zu", items.size() + 1);
      items.push_back({id, lines[n], {}, {}});
      continue;
    }
    const auto parsed = nlohmann::json::parse(lines[n], nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
      throw DatasetError(spec + ":" + std::to_string(n + 1) + ": malformed JSON record");
    try {
      DatasetItem item;
      item.id = parsed.contains("id") ? parsed.at("id").get<std::string>()
                                      : "line-" + std::to_string(n + 1);
      item.input = parsed.at("input").get<std::string>();
      if (parsed.contains("reference")) item.reference = parsed["reference"].get<std::string>();
      if (parsed.contains("label")) item.label = parsed["label"].get<std::string>();
      items.push_back(std::move(item));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(spec + ":" + std::to_string(n + 1) + ": " + e.what());
    }
  }
  if (items.empty()) throw DatasetError("dataset is empty: " + spec);
  return items;
}

inline std::unique_ptr<ModelAdapter> make_adapter(const AdapterSpec& spec) {
  if (spec.kind == "toy") return std::make_unique<InProcessAdapter>(spec.model);
  if (spec.kind == "command")
    return std::make_unique<LineProtocolAdapter>(
        std::make_unique<SubprocessTransport>(spec.command), spec.timeout_ms);
  if (spec.kind == "http") return std::make_unique<HttpAdapter>(spec.url, spec.timeout_ms);
  throw ConfigError("unknown adapter kind: " + spec.kind);
}

namespace campaign_detail {

struct ModelProbe {
  std::string output;                  // generate
  std::map<std::string, double> probs; // classify
};

inline ModelProbe query_model(ModelAdapter& adapter, const AdapterSpec& spec,
                              const std::string& task, const std::string& text) {
  const AdapterResult r =
      spec.mode == "image"
          ? query_rendered(adapter, task, text, spec.canvas_width, spec.max_canvases)
          : adapter.query_text(task, text);
  ModelProbe probe;
  if (task == "generate") {
    if (!r.output) throw AdapterError("generate response lacked output");
    probe.output = *r.output;
  } else {
    if (r.probs.empty()) throw AdapterError("classify response lacked probs");
    probe.probs = r.probs;
  }
  return probe;
}

inline double classify_fitness(const std::map<std::string, double>& probs,
                               const std::string& target, bool use_logit) {
  auto it = probs.find(target);
  if (it == probs.end()) throw AdapterError("model reported no probability for label: " + target);
  if (!use_logit) return it->second;
  const double p = std::min(1.0 - 1e-12, std::max(1e-12, it->second));
  return std::log(p / (1.0 - p));
}

}  // namespace campaign_detail

// Fitness objective per the task: classify minimizes the probability (or
// logit) of the target class; generate minimizes metric(model output,
// reference). Pick a metric whose minimization damages the model
// (neg-levenshtein, chrf, token-f1).
inline FitnessObjective build_objective(const TaskSpec& task, const AdapterSpec& spec,
                                        ModelAdapter& adapter, const std::string& target_label,
                                        const std::string& reference) {
  FitnessObjective obj;
  // The line-protocol adapter is internally synchronized and the in-process
  // toy handler is pure; the HTTP client is not safe for concurrent calls.
  obj.concurrent_safe = spec.kind != "http";
  if (task.kind == "classify") {
    obj.descriptor = "classify:" + target_label + (task.use_logit ? " (logit)" : " (probability)");
    obj.evaluate = [&adapter, spec, target_label, use_logit = task.use_logit](const std::string& text) {
      const auto probe = campaign_detail::query_model(adapter, spec, "classify", text);
      return campaign_detail::classify_fitness(probe.probs, target_label, use_logit);
    };
  } else {
    obj.descriptor = "generate:" + task.metric;
    obj.evaluate = [&adapter, spec, metric = task.metric, reference](const std::string& text) {
      const auto probe = campaign_detail::query_model(adapter, spec, "generate", text);
      return similarity_metric(metric, probe.output, reference);
    };
  }
  return obj;
}

namespace campaign_detail {

inline nlohmann::ordered_json record_to_json(const AttackRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["budget"] = r.budget;
  j["original"] = escape_non_ascii(r.original);
  j["perturbed"] = escape_non_ascii(r.perturbed);
  j["mark_count"] = r.mark_count;
  j["fitness_before"] = r.fitness_before;
  j["fitness_after"] = r.fitness_after;
  j["output_before"] = escape_non_ascii(r.output_before);
  j["output_after"] = escape_non_ascii(r.output_after);
  nlohmann::ordered_json metrics;
  for (const auto& [name, value] : r.metrics) metrics[name] = value;
  j["metrics"] = metrics;
  j["generations"] = r.generations;
  j["evaluations"] = r.evaluations;
  j["wall_clock_ms"] = r.wall_clock_ms;
  j["success"] = r.success;
  j["failed"] = r.failed;
  if (r.failed) j["error"] = r.error;
  return j;
}

inline AttackRecord record_from_json(const nlohmann::json& j) {
  AttackRecord r;
  r.id = j.at("id").get<std::string>();
  r.budget = j.at("budget").get<int>();
  r.original = unescape_non_ascii(j.at("original").get<std::string>());
  r.perturbed = unescape_non_ascii(j.at("perturbed").get<std::string>());
  r.mark_count = j.at("mark_count").get<std::size_t>();
  r.fitness_before = j.at("fitness_before").get<double>();
  r.fitness_after = j.at("fitness_after").get<double>();
  r.output_before = unescape_non_ascii(j.at("output_before").get<std::string>());
  r.output_after = unescape_non_ascii(j.at("output_after").get<std::string>());
  for (const auto& [name, value] : j.at("metrics").items())
    r.metrics[name] = value.get<double>();
  r.generations = j.at("generations").get<std::size_t>();
  r.evaluations = j.at("evaluations").get<std::size_t>();
  r.wall_clock_ms = j.at("wall_clock_ms").get<std::uint64_t>();
  r.success = j.at("success").get<bool>();
  r.failed = j.at("failed").get<bool>();
  if (j.contains("error")) r.error = j.at("error").get<std::string>();
  return r;
}

}  // namespace campaign_detail

// Per-budget aggregate CSV over the records. Pure function of the records,
// so reports can always be recomputed from raw output.
inline std::string aggregate_csv(const std::vector<AttackRecord>& records) {
  std::set<int> budgets;
  std::set<std::string> metric_names;
  bool any_labels = false;
  for (const AttackRecord& r : records) {
    budgets.insert(r.budget);
    for (const auto& [name, value] : r.metrics) metric_names.insert(name);
    if (r.metrics.count("label_correct")) any_labels = true;
  }
  metric_names.erase("label_correct");

  std::ostringstream out;
  out << "budget,count,failed,success_rate,fitness_before_mean,fitness_after_mean,fitness_after_median";
  if (any_labels) out << ",accuracy";
  for (const std::string& name : metric_names)
    out << ",mean_" << name << ",median_" << name;
  out << "\n";

  using campaign_detail::format_double;
  for (int budget : budgets) {
    std::size_t count = 0, failed = 0, successes = 0;
    std::vector<double> before, after;
    std::map<std::string, std::vector<double>> per_metric;
    std::vector<double> correct;
    for (const AttackRecord& r : records) {
      if (r.budget != budget) continue;
      ++count;
      if (r.failed) {
        ++failed;
        continue;
      }
      if (r.success) ++successes;
      before.push_back(r.fitness_before);
      after.push_back(r.fitness_after);
      for (const auto& [name, value] : r.metrics) {
        if (name == "label_correct") correct.push_back(value);
        else per_metric[name].push_back(value);
      }
    }
    const std::size_t ok = count - failed;
    out << budget << ',' << count << ',' << failed << ','
        << format_double(ok ? static_cast<double>(successes) / static_cast<double>(ok) : 0.0)
        << ',' << format_double(campaign_detail::mean(before)) << ','
        << format_double(campaign_detail::mean(after)) << ','
        << format_double(campaign_detail::median(after));
    if (any_labels) out << ',' << format_double(campaign_detail::mean(correct));
    for (const std::string& name : metric_names) {
      auto it = per_metric.find(name);
      if (it == per_metric.end()) {
        out << ",,";
        continue;
      }
      out << ',' << format_double(campaign_detail::mean(it->second)) << ','
          << format_double(campaign_detail::median(it->second));
    }
    out << "\n";
  }
  return out.str();
}

struct CampaignResult {
  std::vector<AttackRecord> records;
  std::string records_path;
  std::string aggregates_path;
};

inline CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  std::vector<DatasetItem> items = load_dataset(config.dataset);
  if (config.max_inputs > 0 && items.size() > config.max_inputs)
    items.resize(config.max_inputs);
  if (config.task.kind == "classify" && config.task.target_label.empty())
    for (const DatasetItem& item : items)
      if (!item.label)
        throw ConfigError("config: classify without target_label needs labeled dataset items (missing on " +
                          item.id + ")");

  std::unique_ptr<ModelAdapter> adapter = make_adapter(config.adapter);
  const DiacriticAlphabet alphabet = DiacriticAlphabet::standard();

  std::vector<AttackRecord> records;
  records.reserve(items.size() * config.budgets.size());
  for (const DatasetItem& item : items) {
    const std::string target_label =
        config.task.target_label.empty() ? item.label.value_or("") : config.task.target_label;
    const std::string reference = item.reference.value_or(item.input);

    // Baseline on the unperturbed input, shared by every budget.
    double fitness_before = 0.0;
    std::string output_before;
    std::string baseline_error;
    try {
      const auto probe = campaign_detail::query_model(*adapter, config.adapter,
                                                      config.task.kind, item.input);
      if (config.task.kind == "classify") {
        fitness_before = campaign_detail::classify_fitness(probe.probs, target_label,
                                                           config.task.use_logit);
        output_before = campaign_detail::argmax_label(probe.probs);
      } else {
        fitness_before = similarity_metric(config.task.metric, probe.output, reference);
        output_before = probe.output;
      }
    } catch (const AdapterError& e) {
      baseline_error = e.what();
    }

    for (int budget : config.budgets) {
      AttackRecord rec;
      rec.id = item.id;
      rec.budget = budget;
      rec.original = item.input;
      rec.generations = config.de.generations;
      if (!baseline_error.empty()) {
        rec.failed = true;
        rec.error = "baseline query failed: " + baseline_error;
        records.push_back(std::move(rec));
        continue;
      }
      rec.fitness_before = fitness_before;
      rec.output_before = output_before;

      DEParams params = config.de;
      params.budget = static_cast<std::size_t>(budget);
      params.seed = campaign_detail::derived_seed(config.seed, item.id, budget);
      const FitnessObjective objective = build_objective(
          config.task, config.adapter, *adapter, target_label, reference);

      const auto started = std::chrono::steady_clock::now();
      try {
        OptimizeResult opt = optimize(item.input, objective, params, alphabet);
        // The record never regresses past doing nothing: a best trial that is
        // worse than the clean input is discarded in favor of the identity.
        if (opt.trace.best_fitness.back() > fitness_before) {
          rec.perturbed = item.input;
          rec.fitness_after = fitness_before;
        } else {
          rec.perturbed = opt.perturbed;
          rec.fitness_after = opt.trace.best_fitness.back();
        }
        rec.evaluations = opt.trace.evaluation_count;
        rec.mark_count = count_marks(rec.perturbed, alphabet);
        rec.success = rec.fitness_after < rec.fitness_before;

        const auto probe = campaign_detail::query_model(*adapter, config.adapter,
                                                        config.task.kind, rec.perturbed);
        if (config.task.kind == "classify") {
          rec.output_after = campaign_detail::argmax_label(probe.probs);
          rec.metrics["target_prob"] = probe.probs.at(target_label);
          if (item.label)
            rec.metrics["label_correct"] = rec.output_after == *item.label ? 1.0 : 0.0;
        } else {
          rec.output_after = probe.output;
          rec.metrics["levenshtein"] =
              static_cast<double>(levenshtein(probe.output, reference));
          rec.metrics[config.task.metric] =
              similarity_metric(config.task.metric, probe.output, reference);
        }
      } catch (const AdapterError& e) {
        rec.failed = true;
        rec.error = e.what();
      }
      if (config.record_timings) {
        rec.wall_clock_ms = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started)
                .count());
      }
      records.push_back(std::move(rec));
    }
  }

  std::sort(records.begin(), records.end(), [](const AttackRecord& a, const AttackRecord& b) {
    return a.id != b.id ? a.id < b.id : a.budget < b.budget;
  });

  std::filesystem::create_directories(config.out_dir);
  CampaignResult result;
  result.records = std::move(records);
  result.records_path = (std::filesystem::path(config.out_dir) / "records.jsonl").string();
  result.aggregates_path = (std::filesystem::path(config.out_dir) / "aggregates.csv").string();
  {
    std::ofstream out(result.records_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + result.records_path);
    for (const AttackRecord& r : result.records)
      out << campaign_detail::record_to_json(r).dump() << '\n';
  }
  {
    std::ofstream out(result.aggregates_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + result.aggregates_path);
    out << aggregate_csv(result.records);
  }
  return result;
}

inline std::vector<AttackRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<AttackRecord> records;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded())
      throw std::runtime_error(path + ":" + std::to_string(n) + ": malformed record");
    records.push_back(campaign_detail::record_from_json(parsed));
  }
  return records;
}

// Normalized view of a finished campaign: every aggregate column divided by
// its budget-0 value (baseline row = 1.0). A zero baseline cannot be scaled;
// those cells stay raw with a trailing marker column.
inline std::string report(const std::string& results_dir) {
  const std::string records_path =
      (std::filesystem::path(results_dir) / "records.jsonl").string();
  const std::vector<AttackRecord> records = load_records(records_path);
  if (records.empty()) throw std::runtime_error("no records in " + records_path);

  std::set<int> budgets;
  for (const AttackRecord& r : records) budgets.insert(r.budget);
  if (!budgets.count(0)) throw std::runtime_error("missing budget-0 baseline in " + records_path);

  // Column values per budget: mean fitness plus every metric mean.
  std::set<std::string> metric_names;
  for (const AttackRecord& r : records)
    for (const auto& [name, value] : r.metrics) metric_names.insert(name);

  auto column_means = [&](int budget) {
    std::map<std::string, std::vector<double>> columns;
    for (const AttackRecord& r : records) {
      if (r.budget != budget || r.failed) continue;
      columns["fitness"].push_back(r.fitness_after);
      for (const auto& [name, value] : r.metrics) columns[name].push_back(value);
    }
    std::map<std::string, double> means;
    for (const std::string& name : metric_names)
      if (columns.count(name)) means[name] = campaign_detail::mean(columns[name]);
    means["fitness"] = campaign_detail::mean(columns["fitness"]);
    return means;
  };

  const auto baseline = column_means(0);
  std::ostringstream out;
  out << "budget,column,baseline,value,relative\n";
  using campaign_detail::format_double;
  for (int budget : budgets) {
    const auto means = column_means(budget);
    for (const auto& [name, base] : baseline) {
      auto it = means.find(name);
      if (it == means.end()) continue;
      out << budget << ',' << name << ',' << format_double(base) << ','
          << format_double(it->second) << ',';
      if (base != 0.0) out << format_double(it->second / base);
      out << "\n";
    }
  }
  return out.str();
}

} // namespace dmark
