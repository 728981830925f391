#include "mbl/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mbl/classifier.hpp"
#include "mbl/evaluation.hpp"
#include "mbl/tasks.hpp"
#include "mbl/weighting.hpp"

namespace mbl {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::ifstream open_input(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw FileError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw FileError("cannot write '" + path + "'");
  return out;
}

std::optional<std::vector<FeatureKind>> parse_kinds_flag(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  std::vector<FeatureKind> kinds;
  try {
    for (const auto& tok : split_list(flag, ',')) kinds.push_back(parse_kind(tok));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return kinds;
}

Dataset load_dataset(const std::string& path, const std::string& kinds_flag) {
  auto in = open_input(path);
  return parse_dataset(in, parse_kinds_flag(kinds_flag));
}

TrainConfig make_config(const std::string& weighting, const std::string& metric, std::size_t k) {
  TrainConfig config;
  config.ig_weighting = weighting == "ig";
  config.k = k;
  if (!metric.empty()) {
    try {
      for (const auto& tok : split_list(metric, ',')) config.metrics.push_back(parse_metric(tok));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  return config;
}

InstanceBase load_model(const std::string& path) {
  auto in = open_input(path, true);
  return load_base(in);
}

std::optional<TagSet> parse_fallback(const std::string& flag) {
  if (flag.empty()) return std::nullopt;
  try {
    return TagSet(split_list(flag, kTagSeparator));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

struct Options {
  std::string input, output, model, lexicon, kinds, weighting = "ig", metric, mode = "ident", pad = "_";
  std::string fallback, positional;
  std::size_t k = 1;
  std::optional<std::size_t> k_override;
  std::optional<std::size_t> left, right;
  std::uint64_t seed = 0;
  bool json = false, normalize = false, stratify = false;
};

}  // namespace

int cli_main(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Memory-based learning: nearest-neighbour classification with information-gain weights"};
  app.name("mbl");
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Store a training set as an instance base");
  train->add_option("-i,--input", o.input, "Instance file")->required();
  train->add_option("-o,--output", o.output, "Model file to write")->required();
  train->add_option("--weighting", o.weighting, "Feature weighting")->check(CLI::IsMember({"ig", "none"}));
  train->add_option("--metric", o.metric, "overlap|vdm|tagset, or one metric per feature separated by commas");
  train->add_option("-k", o.k, "Default number of neighbours")->check(CLI::PositiveNumber);
  train->add_option("--kinds", o.kinds, "Column kinds, e.g. sym,num,tag");

  auto* test = app.add_subcommand("test", "Score a model on a labelled instance file");
  test->add_option("-m,--model", o.model, "Model file")->required();
  test->add_option("-i,--input", o.input, "Instance file")->required();
  test->add_option("-k", o.k_override, "Number of neighbours")->check(CLI::PositiveNumber);
  test->add_option("--kinds", o.kinds, "Column kinds");
  test->add_flag("--json", o.json, "Print a JSON object");

  auto* classify_cmd = app.add_subcommand("classify", "Classify comma-separated patterns from standard input");
  classify_cmd->add_option("-m,--model", o.model, "Model file")->required();
  classify_cmd->add_option("-k", o.k_override, "Number of neighbours")->check(CLI::PositiveNumber);

  auto* xval = app.add_subcommand("xval", "Ten seeded random 90/10 train/test runs");
  xval->add_option("-i,--input", o.input, "Instance file")->required();
  xval->add_option("--seed", o.seed, "Random seed")->required();
  xval->add_option("--weighting", o.weighting, "Feature weighting")->check(CLI::IsMember({"ig", "none"}));
  xval->add_option("--metric", o.metric, "Metric(s)");
  xval->add_option("-k", o.k, "Number of neighbours")->check(CLI::PositiveNumber);
  xval->add_option("--kinds", o.kinds, "Column kinds");
  xval->add_flag("--stratify", o.stratify, "Stratify splits by category");
  xval->add_flag("--json", o.json, "Print a JSON object");

  auto* report = app.add_subcommand("ig-report", "Print the information-gain profile of a dataset");
  report->add_option("datafile", o.positional, "Instance file")->required();
  report->add_option("--kinds", o.kinds, "Column kinds");
  report->add_flag("--normalize", o.normalize, "Show gains scaled to sum 1");

  auto* window = app.add_subcommand("window", "Turn a sequence file into windowed instances");
  window->add_option("seqfile", o.positional, "Sequence file")->required();
  window->add_option("--mode", o.mode, "ident|segment|tag")->check(CLI::IsMember({"ident", "segment", "tag"}));
  window->add_option("--left", o.left, "Left context width");
  window->add_option("--right", o.right, "Right context width");
  window->add_option("--pad", o.pad, "Padding symbol");
  window->add_option("-l,--lexicon", o.lexicon, "Lexicon for --mode tag (derived from the input when absent)");
  window->add_option("--fallback", o.fallback, "Ambiguous category for unknown words, tags joined by '|'");
  window->add_option("-o,--output", o.output, "Output file (default standard output)");

  auto* lexicon = app.add_subcommand("lexicon", "Derive a word -> tag-count lexicon from a tagged corpus");
  lexicon->add_option("corpus", o.positional, "Tagged corpus (word/tag tokens)")->required();
  lexicon->add_option("-o,--output", o.output, "Output file (default standard output)");

  auto* tag_cmd = app.add_subcommand("tag", "Tag space-separated word lines from standard input");
  tag_cmd->add_option("-m,--model", o.model, "Model trained on tagging windows")->required();
  tag_cmd->add_option("-l,--lexicon", o.lexicon, "Lexicon file")->required();
  tag_cmd->add_option("--left", o.left, "Left context width (default: from model arity)");
  tag_cmd->add_option("--right", o.right, "Right context width (default: from model arity)");
  tag_cmd->add_option("--pad", o.pad, "Padding tag");
  tag_cmd->add_option("--fallback", o.fallback, "Ambiguous category for unknown words, tags joined by '|'");

  std::vector<std::string> argv_storage{"mbl"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) {
      auto config = make_config(o.weighting, o.metric, o.k);
      auto base = InstanceBase::train(load_dataset(o.input, o.kinds), config);
      auto file = open_output(o.output, true);
      save_base(base, file);
      out << "stored " << base.size() << " instances with " << base.arity() << " features\n";
    } else if (*test) {
      const auto base = load_model(o.model);
      auto in_file = open_input(o.input);
      const auto kinds = o.kinds.empty() ? std::optional(base.schema().kinds()) : parse_kinds_flag(o.kinds);
      const auto data = parse_dataset(in_file, kinds);
      const auto r = evaluate(base, data, o.k_override.value_or(base.default_k()));
      if (o.json) {
        out << report_json(r) << '\n';
      } else {
        print_report(r, out);
      }
    } else if (*classify_cmd) {
      const auto base = load_model(o.model);
      const auto kinds = base.schema().kinds();
      const auto k = o.k_override.value_or(base.default_k());
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = std::count(line.begin(), line.end(), ',') + 1;
        const bool labelled = static_cast<std::size_t>(fields) == kinds.size() + 1;
        out << base.classify(parse_pattern(line, kinds, labelled), k).category << '\n';
      }
    } else if (*xval) {
      const auto config = make_config(o.weighting, o.metric, o.k);
      const auto r = cross_validate(load_dataset(o.input, o.kinds), config, o.seed, o.stratify);
      if (o.json) {
        out << cv_report_json(r) << '\n';
      } else {
        print_cv_report(r, out);
      }
    } else if (*report) {
      render_gain_profile(gain_profile(load_dataset(o.positional, o.kinds)), out, o.normalize);
    } else if (*window) {
      auto in_file = open_input(o.positional);
      const auto sequences = read_sequences(in_file);
      WindowConfig wc{o.left.value_or(3), o.right.value_or(3), o.pad};
      Dataset data = [&] {
        if (o.mode == "ident") return window_identification(sequences, wc);
        if (o.mode == "segment") return window_segmentation(sequences, wc);
        Lexicon lex;
        if (o.lexicon.empty()) {
          lex = derive_lexicon(sequences);
        } else {
          auto lex_in = open_input(o.lexicon);
          lex = read_lexicon(lex_in);
        }
        const auto fallback = parse_fallback(o.fallback).value_or(lex.all_tags());
        return build_tagging_dataset(retag_corpus(sequences, lex, fallback), wc);
      }();
      if (o.output.empty()) {
        serialize_dataset(data, out);
      } else {
        auto file = open_output(o.output);
        serialize_dataset(data, file);
      }
    } else if (*lexicon) {
      auto in_file = open_input(o.positional);
      const auto lex = derive_lexicon(read_sequences(in_file));
      if (o.output.empty()) {
        write_lexicon(lex, out);
      } else {
        auto file = open_output(o.output);
        write_lexicon(lex, file);
      }
    } else if (*tag_cmd) {
      const auto base = load_model(o.model);
      auto lex_in = open_input(o.lexicon);
      const auto lex = read_lexicon(lex_in);
      TaggerConfig tc;
      const std::size_t context = base.arity() - 1;
      tc.window.left = o.left.value_or(o.right ? context - std::min(context, *o.right) : context / 2);
      tc.window.right = o.right.value_or(context - tc.window.left);
      tc.window.pad = o.pad;
      tc.fallback = parse_fallback(o.fallback);
      std::string line;
      while (std::getline(in, line)) {
        const auto seq = parse_sequence_line(line);
        const auto tags = tag(seq.items, lex, base, tc);
        for (std::size_t i = 0; i < tags.size(); ++i) out << (i ? " " : "") << seq.items[i] << '/' << tags[i];
        out << '\n';
      }
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const FileError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace mbl
