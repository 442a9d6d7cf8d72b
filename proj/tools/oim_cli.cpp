// oim: command-line front end over the liboim C API.
//
//   oim run [config.ini] [--<key> <value> ...]
//   oim baseline [config.ini] [--<key> <value> ...]
//   oim plot-data a.csv label=b.csv [-o merged.csv]
//   oim graph-info edges.txt [--undirected]

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "oim/oim.h"

namespace {

int report(oim_status status, const char* what) {
  std::cerr << "oim: " << what << " failed (" << oim_status_name(status) << "): " << oim_last_error()
            << "\n";
  return 2;
}

template <typename Fn>
std::optional<std::string> fetch_string(Fn&& fn) {
  size_t needed = 0;
  oim_status st = fn(nullptr, 0, &needed);
  if (st != OIM_OK && st != OIM_ERR_CAPACITY) return std::nullopt;
  std::string buffer(needed, '\0');
  st = fn(buffer.data(), buffer.size(), &needed);
  if (st != OIM_OK) return std::nullopt;
  buffer.resize(needed - 1);
  return buffer;
}

struct ConfigFlags {
  std::string path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd) {
    cmd->add_option("config", path, "INI config file (optional)");
    for (size_t i = 0; i < oim_config_key_count(); ++i) {
      const std::string name = oim_config_key_name(i);
      cmd->add_option_function<std::string>(
             "--" + name, [this, name](const std::string& v) { values[name] = v; },
             std::string("[") + oim_config_key_section(i) + "] " + oim_config_key_help(i))
          ->type_name("VALUE");
    }
  }

  // Returns nullptr after printing a diagnostic.
  oim_config* build() const {
    oim_config* cfg = nullptr;
    oim_status st = path.empty() ? oim_config_new(&cfg) : oim_config_load(path.c_str(), &cfg);
    if (st != OIM_OK) {
      report(st, "loading config");
      return nullptr;
    }
    for (const auto& [key, value] : values) {
      st = oim_config_set(cfg, key.c_str(), value.c_str());
      if (st != OIM_OK) {
        report(st, ("setting --" + key).c_str());
        oim_config_free(cfg);
        return nullptr;
      }
    }
    st = oim_config_validate(cfg);
    if (st != OIM_OK) {
      report(st, "validating config");
      oim_config_free(cfg);
      return nullptr;
    }
    return cfg;
  }
};

int cmd_run(const ConfigFlags& flags) {
  oim_config* cfg = flags.build();
  if (cfg == nullptr) return 2;
  auto output = fetch_string([&](char* b, size_t c, size_t* n) {
    return oim_config_get(cfg, "output", b, c, n);
  });
  auto strategy = fetch_string([&](char* b, size_t c, size_t* n) {
    return oim_config_get(cfg, "strategy", b, c, n);
  });
  std::string prefix = output && !output->empty() ? *output : "results/" + strategy.value_or("run");

  oim_run* run = nullptr;
  oim_status st = oim_run_experiment(cfg, &run);
  oim_config_free(cfg);
  if (st != OIM_OK) return report(st, "run");
  st = oim_run_emit(run, prefix.c_str());
  if (st != OIM_OK) {
    oim_run_free(run);
    return report(st, "writing results");
  }
  const size_t rounds = oim_run_round_count(run);
  double spread = 0.0, regret = 0.0, cum = 0.0;
  oim_run_round(run, rounds - 1, &spread, &regret, &cum);
  std::printf("%s: %zu rounds x %zu repetitions, f_opt %.4f, final cumulative regret %.4f\n",
              strategy.value_or("?").c_str(), rounds, oim_run_repetition_count(run),
              oim_run_f_opt(run), cum);
  std::printf("wrote %s.csv and %s.json\n", prefix.c_str(), prefix.c_str());
  oim_run_free(run);
  return 0;
}

int cmd_baseline(const ConfigFlags& flags) {
  oim_config* cfg = flags.build();
  if (cfg == nullptr) return 2;
  double f_opt = 0.0;
  size_t count = 0;
  oim_status st = oim_baseline_compute(cfg, &f_opt, nullptr, 0, &count);
  std::vector<uint32_t> seeds(count);
  if (st == OIM_OK) st = oim_baseline_compute(cfg, &f_opt, seeds.data(), seeds.size(), &count);
  oim_config_free(cfg);
  if (st != OIM_OK) return report(st, "baseline");
  std::printf("{\"f_opt\":%.10g,\"seeds\":[", f_opt);
  for (size_t i = 0; i < seeds.size(); ++i) std::printf("%s%u", i ? "," : "", seeds[i]);
  std::printf("]}\n");
  return 0;
}

int cmd_plot_data(const std::vector<std::string>& inputs, const std::string& out_path) {
  std::vector<const char*> raw;
  for (const auto& s : inputs) raw.push_back(s.c_str());
  auto merged = fetch_string([&](char* b, size_t c, size_t* n) {
    return oim_plot_data(raw.data(), raw.size(), b, c, n);
  });
  if (!merged) return report(OIM_ERR_IO, "plot-data");
  if (out_path.empty()) {
    std::cout << *merged;
    return 0;
  }
  FILE* f = std::fopen(out_path.c_str(), "wb");
  if (f == nullptr) {
    std::cerr << "oim: cannot write " << out_path << "\n";
    return 2;
  }
  std::fwrite(merged->data(), 1, merged->size(), f);
  std::fclose(f);
  return 0;
}

int cmd_graph_info(const std::string& path, bool undirected) {
  oim_graph* graph = nullptr;
  oim_status st = oim_graph_load_file(path.c_str(), undirected ? 1 : 0, &graph);
  if (st != OIM_OK) return report(st, "loading graph");
  auto json = fetch_string([&](char* b, size_t c, size_t* n) {
    return oim_graph_summary_json(graph, b, c, n);
  });
  oim_graph_free(graph);
  if (!json) return report(OIM_ERR_INTERNAL, "graph summary");
  std::cout << *json << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online influence maximization experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", oim_version());

  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "run an experiment and write <output>.csv/.json");
  run_flags.attach(run);

  ConfigFlags baseline_flags;
  auto* baseline = app.add_subcommand("baseline", "oracle seed set and spread on true probabilities");
  baseline_flags.attach(baseline);

  std::vector<std::string> plot_inputs;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot-data", "merge result CSVs into aligned columns");
  plot->add_option("inputs", plot_inputs, "CSV paths, optionally label=path")->required();
  plot->add_option("-o,--output", plot_out, "output path (default stdout)");

  std::string graph_path;
  bool undirected = false;
  auto* info = app.add_subcommand("graph-info", "print node and edge counts as JSON");
  info->alias("graph-summary");
  info->add_option("graph", graph_path, "edge-list file")->required();
  info->add_flag("--undirected", undirected, "expand each pair into two directed edges");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(run_flags);
  if (baseline->parsed()) return cmd_baseline(baseline_flags);
  if (plot->parsed()) return cmd_plot_data(plot_inputs, plot_out);
  if (info->parsed()) return cmd_graph_info(graph_path, undirected);
  return 1;
}
