// Command-line surface: attack campaigns, reports, the sanitizer filter,
// canvas dumps, chunk-plan inspection and the toy model servers.
//
// Exit codes: 0 success, 1 usage/config error, 2 adapter failure,
// 3 dataset error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dmark/campaign.hpp"
#include "dmark/http.hpp"
#include "dmark/render.hpp"
#include "dmark/sanitize.hpp"
#include "dmark/serve.hpp"
#include "dmark/unicode.hpp"

namespace {

int run_attack(const std::string& config_path, const std::string& seed_override,
               const std::vector<int>& budgets_override, const std::string& out_override) {
  dmark::CampaignConfig config = dmark::load_campaign_config(config_path);
  if (!seed_override.empty()) config.seed = std::stoull(seed_override);
  if (!budgets_override.empty()) {
    config.budgets = budgets_override;
    config.validate();
  }
  if (!out_override.empty()) config.out_dir = out_override;

  const dmark::CampaignResult result = dmark::run_campaign(config);
  std::size_t failed = 0;
  for (const dmark::AttackRecord& r : result.records)
    if (r.failed) ++failed;
  std::cout << "wrote " << result.records.size() << " records ("
            << failed << " failed) to " << result.records_path << "\n"
            << "aggregates: " << result.aggregates_path << "\n";
  if (!result.records.empty() && failed == result.records.size()) {
    std::cerr << "error: every record failed; adapter is unusable\n";
    return 2;
  }
  return 0;
}

int run_report(const std::string& dir, const std::string& out_path) {
  const std::string table = dmark::report(dir);
  if (out_path.empty()) {
    std::cout << table;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << table;
  }
  return 0;
}

int run_sanitize(const std::string& mode, bool detect_only) {
  dmark::SanitizePolicy policy;
  if (mode == "decompose") {
    policy.mode = dmark::SanitizePolicy::Mode::DecomposeStripRecompose;
  } else if (mode != "strip") {
    std::cerr << "error: --mode must be strip or decompose\n";
    return 1;
  }
  std::string line;
  while (std::getline(std::cin, line)) {
    if (detect_only) {
      const dmark::DetectResult r = dmark::detect(line, policy);
      std::cout << r.count << '\t' << line << '\n';
    } else {
      std::cout << dmark::sanitize(line, policy) << '\n';
    }
  }
  return 0;
}

std::string numbered_path(const std::string& base, std::size_t index) {
  const std::filesystem::path p(base);
  const std::filesystem::path out = p.parent_path() / p.stem();
  const std::string digits = std::to_string(index);
  const std::string suffix = "-" + std::string(digits.size() < 2 ? "0" : "") + digits;
  return out.string() + suffix + p.extension().string();
}

int run_render(std::string text, bool escaped, unsigned width, const std::string& out_path,
               const std::string& format) {
  if (escaped) text = dmark::unescape_non_ascii(text);
  const dmark::ChunkPlan plan = dmark::chunk(text, width);
  const std::vector<std::string> chunks =
      plan.chunks.empty() ? std::vector<std::string>{""} : plan.chunks;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    dmark::RenderReport report;
    const dmark::Canvas canvas = dmark::render(chunks[i], width, &report);
    const std::string bytes =
        format == "pbm" ? dmark::encode_pbm(canvas) : dmark::encode_pgm(canvas);
    const std::string path = chunks.size() == 1 ? out_path : numbered_path(out_path, i + 1);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << bytes;
    std::cout << path << "\n";
    for (const dmark::TofuSubstitution& sub : report.substitutions)
      std::cerr << "warning: no glyph for U+" << std::hex << std::uppercase
                << static_cast<unsigned>(sub.code_point) << std::dec
                << " (cell " << sub.cell << "), drew placeholder box\n";
  }
  return 0;
}

int run_chunk(std::string text, bool escaped, unsigned width) {
  if (escaped) text = dmark::unescape_non_ascii(text);
  const dmark::ChunkPlan plan = dmark::chunk(text, width);
  nlohmann::ordered_json j;
  j["width_cells"] = plan.width_cells;
  j["chunks"] = nlohmann::json::array();
  for (const std::string& c : plan.chunks)
    j["chunks"].push_back(dmark::escape_non_ascii(c));
  j["joins"] = nlohmann::json::array();
  for (const dmark::Join& join : plan.joins) {
    nlohmann::ordered_json jj;
    jj["kind"] = join.kind == dmark::Join::Kind::Whitespace ? "whitespace" : "intra-word";
    jj["separator"] = dmark::escape_non_ascii(join.separator);
    j["joins"].push_back(jj);
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_serve(const std::string& model, int port, const std::string& host) {
  if (!dmark::valid_toy_model(model)) {
    std::cerr << "error: unknown toy model: " << model << "\n";
    return 1;
  }
  if (port > 0) {
    if (!dmark::run_http_server(model, host, port)) {
      std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
      return 2;
    }
    return 0;
  }
  dmark::run_stdio_server(model);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diacritic attack toolkit"};
  app.require_subcommand(1);

  auto* attack = app.add_subcommand("attack", "run an attack campaign from a config file");
  std::string config_path, seed_override, out_override;
  std::vector<int> budgets_override;
  attack->add_option("--config", config_path, "campaign config JSON")->required();
  attack->add_option("--seed", seed_override, "override campaign seed");
  attack->add_option("--budgets", budgets_override, "override budget list")->delimiter(',');
  attack->add_option("--out", out_override, "override output directory");

  auto* report = app.add_subcommand("report", "normalize campaign aggregates against budget 0");
  std::string report_dir, report_out;
  report->add_option("dir", report_dir, "campaign output directory")->required();
  report->add_option("--out", report_out, "write table here instead of stdout");

  auto* sanitize = app.add_subcommand("sanitize", "strip combining marks from stdin lines");
  std::string mode = "strip";
  bool detect_only = false;
  sanitize->add_option("--mode", mode, "strip | decompose");
  sanitize->add_flag("--detect", detect_only, "report counts instead of rewriting");

  auto* render = app.add_subcommand("render", "rasterize text to image files");
  std::string render_text, render_out, render_format = "pgm";
  unsigned render_width = 40;
  bool render_escaped = false;
  render->add_option("--text", render_text, "text to draw")->required();
  render->add_flag("--escaped", render_escaped, "text uses \\u{...} escapes");
  render->add_option("--width", render_width, "canvas width in cells");
  render->add_option("--out", render_out, "output image path")->required();
  render->add_option("--format", render_format, "pgm | pbm");

  auto* chunk = app.add_subcommand("chunk", "print the chunk plan for a text");
  std::string chunk_text;
  unsigned chunk_width = 40;
  bool chunk_escaped = false;
  chunk->add_option("--text", chunk_text, "text to plan")->required();
  chunk->add_flag("--escaped", chunk_escaped, "text uses \\u{...} escapes");
  chunk->add_option("--width", chunk_width, "canvas width in cells");

  auto* serve = app.add_subcommand("serve-toy", "host a toy model over the adapter protocol");
  std::string serve_model, serve_host = "127.0.0.1";
  int serve_port = 0;
  serve->add_option("--model", serve_model, "identity|ocr|translate|ocr-translate|toxic|ocr-toxic")
      ->required();
  serve->add_option("--port", serve_port, "serve HTTP on this port instead of stdio");
  serve->add_option("--host", serve_host, "HTTP bind address");

  try {
    app.parse(argc, argv);
    if (attack->parsed())
      return run_attack(config_path, seed_override, budgets_override, out_override);
    if (report->parsed()) return run_report(report_dir, report_out);
    if (sanitize->parsed()) return run_sanitize(mode, detect_only);
    if (render->parsed())
      return run_render(render_text, render_escaped, render_width, render_out, render_format);
    if (chunk->parsed()) return run_chunk(chunk_text, chunk_escaped, chunk_width);
    if (serve->parsed()) return run_serve(serve_model, serve_port, serve_host);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints message / help text
    return rc == 0 ? 0 : 1;
  } catch (const dmark::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const dmark::DatasetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dmark::AdapterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
