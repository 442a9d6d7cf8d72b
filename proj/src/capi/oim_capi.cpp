#include "oim/oim.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/harness.hpp"

struct oim_graph {
  oim::LoadResult loaded;
};

struct oim_config {
  oim::ExperimentConfig cfg;
};

struct oim_run {
  oim::ExperimentConfig cfg;
  oim::RunSummary summary;
};

namespace {

thread_local std::string g_last_error;

oim_status to_status(oim::ErrorCode code) {
  switch (code) {
    case oim::ErrorCode::kArgument: return OIM_ERR_ARGUMENT;
    case oim::ErrorCode::kParse: return OIM_ERR_PARSE;
    case oim::ErrorCode::kIo: return OIM_ERR_IO;
    case oim::ErrorCode::kNumeric: return OIM_ERR_NUMERIC;
    case oim::ErrorCode::kCapacity: return OIM_ERR_CAPACITY;
    case oim::ErrorCode::kDimension: return OIM_ERR_DIMENSION;
    case oim::ErrorCode::kInternal: return OIM_ERR_INTERNAL;
  }
  return OIM_ERR_INTERNAL;
}

oim_status fail(oim_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
oim_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    fn();
    return OIM_OK;
  } catch (const oim::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(OIM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OIM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OIM_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) oim::throw_error(oim::ErrorCode::kArgument, std::string(what) + " is null");
}

oim_status copy_out(const std::string& text, char* buffer, size_t capacity, size_t* needed) {
  if (needed != nullptr) *needed = text.size() + 1;
  if (buffer == nullptr || capacity < text.size() + 1) {
    return fail(OIM_ERR_CAPACITY,
                "buffer too small: need " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return OIM_OK;
}

// Runs `make` under the exception guard, then copies its result out.
template <typename Fn>
oim_status string_result(Fn&& make, char* buffer, size_t capacity, size_t* needed) {
  std::string text;
  const oim_status st = guarded([&] { text = make(); });
  if (st != OIM_OK) return st;
  return copy_out(text, buffer, capacity, needed);
}

}  // namespace

extern "C" {

const char* oim_version(void) { return "1.0.0"; }

const char* oim_status_name(oim_status status) {
  switch (status) {
    case OIM_OK: return "ok";
    case OIM_ERR_ARGUMENT: return "argument";
    case OIM_ERR_PARSE: return "parse";
    case OIM_ERR_IO: return "io";
    case OIM_ERR_NUMERIC: return "numeric";
    case OIM_ERR_CAPACITY: return "capacity";
    case OIM_ERR_DIMENSION: return "dimension";
    case OIM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* oim_last_error(void) { return g_last_error.c_str(); }

oim_status oim_graph_load_file(const char* path, int symmetrize, oim_graph** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new oim_graph{oim::load_edge_list_file(path, {symmetrize != 0})};
  });
}

oim_status oim_graph_load_text(const char* text, size_t length, int symmetrize, oim_graph** out) {
  return guarded([&] {
    require(out, "out");
    if (text == nullptr && length > 0) require(text, "text");
    std::istringstream in(std::string(text == nullptr ? "" : text, length));
    *out = new oim_graph{oim::load_edge_list(in, {symmetrize != 0})};
  });
}

size_t oim_graph_node_count(const oim_graph* graph) {
  return graph == nullptr ? 0 : graph->loaded.graph.node_count();
}

size_t oim_graph_edge_count(const oim_graph* graph) {
  return graph == nullptr ? 0 : graph->loaded.graph.edge_count();
}

size_t oim_graph_duplicate_count(const oim_graph* graph) {
  return graph == nullptr ? 0 : graph->loaded.report.duplicate_count;
}

size_t oim_graph_rejected_count(const oim_graph* graph) {
  return graph == nullptr ? 0 : graph->loaded.report.rejected.size();
}

oim_status oim_graph_summary_json(const oim_graph* graph, char* buffer, size_t capacity,
                                  size_t* needed) {
  return string_result(
      [&] {
        require(graph, "graph");
        nlohmann::ordered_json doc;
        doc["nodes"] = graph->loaded.graph.node_count();
        doc["edges"] = graph->loaded.graph.edge_count();
        doc["duplicates"] = graph->loaded.report.duplicate_count;
        nlohmann::json rejected = nlohmann::json::array();
        for (const auto& r : graph->loaded.report.rejected) {
          rejected.push_back({{"line", r.line}, {"reason", r.reason}});
        }
        doc["rejected"] = rejected;
        return doc.dump();
      },
      buffer, capacity, needed);
}

void oim_graph_free(oim_graph* graph) { delete graph; }

oim_status oim_config_new(oim_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new oim_config{};
  });
}

oim_status oim_config_load(const char* path, oim_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new oim_config{oim::load_config(path)};
  });
}

oim_status oim_config_set(oim_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    oim::set_config_value(config->cfg, key, value);
  });
}

oim_status oim_config_get(const oim_config* config, const char* key, char* buffer,
                          size_t capacity, size_t* needed) {
  return string_result(
      [&] {
        require(config, "config");
        require(key, "key");
        for (const auto& k : oim::config_keys()) {
          if (k.name == key) return k.get(config->cfg);
        }
        oim::throw_error(oim::ErrorCode::kArgument, std::string("unknown config key \"") + key + "\"");
      },
      buffer, capacity, needed);
}

oim_status oim_config_validate(const oim_config* config) {
  return guarded([&] {
    require(config, "config");
    config->cfg.validate();
  });
}

void oim_config_free(oim_config* config) { delete config; }

size_t oim_config_key_count(void) { return oim::config_keys().size(); }

const char* oim_config_key_name(size_t index) {
  const auto& keys = oim::config_keys();
  return index < keys.size() ? keys[index].name.c_str() : nullptr;
}

const char* oim_config_key_section(size_t index) {
  const auto& keys = oim::config_keys();
  return index < keys.size() ? keys[index].section.c_str() : nullptr;
}

const char* oim_config_key_help(size_t index) {
  const auto& keys = oim::config_keys();
  return index < keys.size() ? keys[index].help.c_str() : nullptr;
}

oim_status oim_baseline_compute(const oim_config* config, double* f_opt, uint32_t* seeds,
                                size_t seed_capacity, size_t* seed_count) {
  oim::OptimalBaseline baseline;
  const oim_status st = guarded([&] {
    require(config, "config");
    baseline = oim::prepare_environment(config->cfg, false).baseline;
  });
  if (st != OIM_OK) return st;
  if (f_opt != nullptr) *f_opt = baseline.f_opt;
  if (seed_count != nullptr) *seed_count = baseline.seeds.size();
  if (seeds != nullptr) {
    if (seed_capacity < baseline.seeds.size()) {
      return fail(OIM_ERR_CAPACITY, "seed buffer too small: need " +
                                        std::to_string(baseline.seeds.size()) + " entries");
    }
    std::copy(baseline.seeds.begin(), baseline.seeds.end(), seeds);
  }
  return OIM_OK;
}

oim_status oim_run_experiment(const oim_config* config, oim_run** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    auto run = std::make_unique<oim_run>();
    run->cfg = config->cfg;
    run->summary = oim::run_experiment(run->cfg);
    *out = run.release();
  });
}

size_t oim_run_round_count(const oim_run* run) {
  return run == nullptr ? 0 : run->summary.mean_spread.size();
}

size_t oim_run_repetition_count(const oim_run* run) {
  return run == nullptr ? 0 : run->summary.repetitions.size();
}

double oim_run_f_opt(const oim_run* run) { return run == nullptr ? 0.0 : run->summary.f_opt; }

oim_status oim_run_round(const oim_run* run, size_t round, double* mean_spread,
                         double* mean_regret, double* cum_regret) {
  return guarded([&] {
    require(run, "run");
    if (round >= run->summary.mean_spread.size()) {
      oim::throw_error(oim::ErrorCode::kArgument, "round index out of range");
    }
    if (mean_spread != nullptr) *mean_spread = run->summary.mean_spread[round];
    if (mean_regret != nullptr) *mean_regret = run->summary.mean_regret[round];
    if (cum_regret != nullptr) *cum_regret = run->summary.cum_regret[round];
  });
}

oim_status oim_run_csv(const oim_run* run, char* buffer, size_t capacity, size_t* needed) {
  return string_result(
      [&] {
        require(run, "run");
        return oim::format_summary_csv(run->summary);
      },
      buffer, capacity, needed);
}

oim_status oim_run_metadata_json(const oim_run* run, char* buffer, size_t capacity,
                                 size_t* needed) {
  return string_result(
      [&] {
        require(run, "run");
        return oim::format_summary_json(run->summary, run->cfg);
      },
      buffer, capacity, needed);
}

oim_status oim_run_emit(const oim_run* run, const char* prefix) {
  return guarded([&] {
    require(run, "run");
    require(prefix, "prefix");
    oim::emit_results(run->summary, run->cfg, prefix);
  });
}

void oim_run_free(oim_run* run) { delete run; }

oim_status oim_plot_data(const char* const* inputs, size_t input_count, char* buffer,
                         size_t capacity, size_t* needed) {
  return string_result(
      [&] {
        if (input_count > 0) require(inputs, "inputs");
        std::vector<std::string> list;
        for (size_t i = 0; i < input_count; ++i) {
          require(inputs[i], "input path");
          list.emplace_back(inputs[i]);
        }
        return oim::merge_plot_data(list);
      },
      buffer, capacity, needed);
}

}  // extern "C"
