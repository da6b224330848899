// Copyright 2026 The PVisRec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// User-centric visualization corpus: users, tabular datasets and the
// visualizations each user produced. Visualizations are abstracted into
// data-independent configurations so preferences transfer across datasets.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pvis/common.hpp"

namespace pvis {

enum class AttributeType { quantitative, nominal, ordinal, temporal };

inline constexpr std::array<std::string_view, 4> kAttributeTypeNames = {
    "quantitative", "nominal", "ordinal", "temporal"};

inline std::string_view to_string(AttributeType t) {
  return kAttributeTypeNames[static_cast<int>(t)];
}

enum class FeedbackKind { generated, clicked, liked, added_to_dashboard };

inline constexpr std::array<std::string_view, 4> kFeedbackNames = {
    "generated", "clicked", "liked", "added-to-dashboard"};

inline std::string_view to_string(FeedbackKind f) { return kFeedbackNames[static_cast<int>(f)]; }

inline FeedbackKind parse_feedback(std::string_view s) {
  for (std::size_t i = 0; i < kFeedbackNames.size(); ++i)
    if (kFeedbackNames[i] == s) return static_cast<FeedbackKind>(i);
  throw ValidationError("unknown feedback kind '" + std::string(s) + "'");
}

// A cell is missing, a number, or a string.
using Cell = std::variant<std::monostate, double, std::string>;

// Data-bound channels, in canonical binding order. Attribute ids of a
// visualization are always listed in this order.
enum class DataChannel { x, y, color, size };
inline constexpr std::array<std::string_view, 4> kDataChannelNames = {"x", "y", "color", "size"};
inline constexpr std::size_t kNumDataChannels = kDataChannelNames.size();

struct AttributeColumn {
  int attribute_id = -1;
  int dataset_id = -1;
  std::string name;
  std::vector<Cell> values;
  AttributeType inferred_type = AttributeType::nominal;

  bool operator==(const AttributeColumn&) const = default;
};

struct Dataset {
  int dataset_id = -1;
  std::vector<AttributeColumn> columns;

  bool operator==(const Dataset&) const = default;
};

// Raw design choices of one visualization. Data channels hold global
// attribute ids; mark and aggregates are literal settings ("none" if unset).
struct DesignChoices {
  std::string mark = "none";
  std::array<std::optional<int>, kNumDataChannels> bound{};
  std::string x_aggregate = "none";
  std::string y_aggregate = "none";

  bool operator==(const DesignChoices&) const = default;
};

struct VisualizationSpec {
  int user_id = -1;
  int dataset_id = -1;
  std::vector<int> attribute_ids;  // canonical channel order
  DesignChoices design;
  FeedbackKind feedback = FeedbackKind::generated;
  int config_id = -1;  // resolved against the corpus registry

  bool operator==(const VisualizationSpec&) const = default;
};

// Abstract value of a data channel: an attribute type, or unbound.
using ChannelType = std::optional<AttributeType>;

struct VisualConfiguration {
  int config_id = -1;
  std::string mark = "none";
  std::array<ChannelType, kNumDataChannels> channel_types{};
  std::string x_aggregate = "none";
  std::string y_aggregate = "none";

  // Canonical serialized form. Contains no attribute, dataset or value data.
  std::string canonical() const {
    std::string s = "mark=" + mark;
    for (std::size_t c = 0; c < kNumDataChannels; ++c) {
      s += ";";
      s += kDataChannelNames[c];
      s += "=";
      s += channel_types[c] ? std::string(to_string(*channel_types[c])) : "none";
    }
    s += ";x-aggregate=" + x_aggregate + ";y-aggregate=" + y_aggregate;
    return s;
  }

  // Types expected by the bound channels, in channel order.
  std::vector<AttributeType> bound_types() const {
    std::vector<AttributeType> out;
    for (const auto& t : channel_types)
      if (t) out.push_back(*t);
    return out;
  }

  bool operator==(const VisualConfiguration&) const = default;
};

// Deduplicated configuration registry; ids are dense in registration order.
class ConfigRegistry {
 public:
  int intern(VisualConfiguration config) {
    const std::string key = config.canonical();
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const int id = static_cast<int>(configs_.size());
    config.config_id = id;
    configs_.push_back(std::move(config));
    index_.emplace(key, id);
    return id;
  }

  std::optional<int> find(const VisualConfiguration& config) const {
    if (auto it = index_.find(config.canonical()); it != index_.end()) return it->second;
    return std::nullopt;
  }

  const VisualConfiguration& at(int id) const { return configs_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return configs_.size(); }
  const std::vector<VisualConfiguration>& configs() const { return configs_; }

  bool operator==(const ConfigRegistry& other) const { return configs_ == other.configs_; }

 private:
  std::vector<VisualConfiguration> configs_;
  std::map<std::string, int> index_;
};

struct Corpus {
  int num_users = 0;
  std::vector<Dataset> datasets;
  std::vector<VisualizationSpec> visualizations;
  ConfigRegistry registry;

  std::size_t num_attributes() const { return attribute_index_.size(); }
  std::size_t num_configs() const { return registry.size(); }

  const AttributeColumn& attribute(int id) const {
    const auto [d, c] = attribute_index_.at(static_cast<std::size_t>(id));
    return datasets[d].columns[c];
  }

  const Dataset& dataset(int dataset_id) const {
    auto it = dataset_index_.find(dataset_id);
    if (it == dataset_index_.end())
      throw ValidationError("unknown dataset id " + std::to_string(dataset_id));
    return datasets[it->second];
  }

  bool has_dataset(int dataset_id) const { return dataset_index_.count(dataset_id) != 0; }

  // Rebuilds the id lookups after datasets change.
  void reindex() {
    attribute_index_.clear();
    dataset_index_.clear();
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      dataset_index_[datasets[d].dataset_id] = d;
      for (std::size_t c = 0; c < datasets[d].columns.size(); ++c) {
        const auto id = static_cast<std::size_t>(datasets[d].columns[c].attribute_id);
        if (attribute_index_.size() <= id) attribute_index_.resize(id + 1);
        attribute_index_[id] = {d, c};
      }
    }
  }

  bool operator==(const Corpus& o) const {
    return num_users == o.num_users && datasets == o.datasets &&
           visualizations == o.visualizations && registry == o.registry;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> attribute_index_;
  std::unordered_map<int, std::size_t> dataset_index_;
};

// ---------------------------------------------------------------------------
// Cell parsing and attribute type inference.

namespace detail {

inline std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

// ISO-8601 date or date-time: YYYY-MM-DD[(T| )HH:MM[:SS[.fff]]][Z]. Returns
// seconds since the Unix epoch.
inline std::optional<double> parse_iso8601(std::string_view s) {
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > s.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (s[i] < '0' || s[i] > '9') return std::nullopt;
      v = v * 10 + (s[i] - '0');
    }
    return v;
  };
  if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
  if (!y || !mo || !d || *mo < 1 || *mo > 12 || *d < 1 || *d > 31) return std::nullopt;
  double secs = 86400.0 * static_cast<double>(days_from_civil(*y, static_cast<unsigned>(*mo),
                                                              static_cast<unsigned>(*d)));
  std::size_t pos = 10;
  if (pos == s.size()) return secs;
  if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
  auto hh = digits(pos + 1, 2);
  if (!hh || pos + 3 >= s.size() || s[pos + 3] != ':') return std::nullopt;
  auto mm = digits(pos + 4, 2);
  if (!mm || *hh > 23 || *mm > 59) return std::nullopt;
  secs += 3600.0 * *hh + 60.0 * *mm;
  pos += 6;
  if (pos < s.size() && s[pos] == ':') {
    auto ss = digits(pos + 1, 2);
    if (!ss || *ss > 60) return std::nullopt;
    secs += *ss;
    pos += 3;
    if (pos < s.size() && s[pos] == '.') {
      std::size_t q = pos + 1;
      double frac = 0.0, scale = 0.1;
      while (q < s.size() && s[q] >= '0' && s[q] <= '9') {
        frac += scale * (s[q] - '0');
        scale *= 0.1;
        ++q;
      }
      if (q == pos + 1) return std::nullopt;
      secs += frac;
      pos = q;
    }
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size()) return std::nullopt;
  return secs;
}

// Integer-valued seconds between 2000-01-01 and 2100-01-01 read as epoch time.
inline constexpr double kEpochLow = 946684800.0;
inline constexpr double kEpochHigh = 4102444800.0;

inline std::optional<double> numeric_value(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const std::string* s = std::get_if<std::string>(&c)) return parse_number(*s);
  return std::nullopt;
}

inline bool is_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

}  // namespace detail

// Rule table: ISO-8601 strings or epoch-like integers -> temporal;
// all-numeric -> quantitative, except integer-valued with at most 10 distinct
// values and min >= 0 -> ordinal; anything else -> nominal. Missing cells are
// ignored.
inline AttributeType infer_attribute_type(std::span<const Cell> values) {
  std::size_t present = 0;
  bool all_numeric = true, all_iso = true, all_integer = true;
  double lo = INFINITY, hi = -INFINITY;
  std::set<double> distinct;
  for (const Cell& c : values) {
    if (detail::is_missing(c)) continue;
    ++present;
    const auto num = detail::numeric_value(c);
    if (num) {
      if (std::floor(*num) != *num) all_integer = false;
      lo = std::min(lo, *num);
      hi = std::max(hi, *num);
      if (distinct.size() <= 10) distinct.insert(*num);
    } else {
      all_numeric = false;
    }
    const std::string* s = std::get_if<std::string>(&c);
    if (!s || !detail::parse_iso8601(*s)) all_iso = false;
  }
  if (present == 0) throw ValidationError("cannot infer attribute type: all cells are missing");
  if (all_iso) return AttributeType::temporal;
  if (all_numeric) {
    if (all_integer && lo >= detail::kEpochLow && hi <= detail::kEpochHigh && distinct.size() > 10)
      return AttributeType::temporal;
    if (all_integer && distinct.size() <= 10 && lo >= 0) return AttributeType::ordinal;
    return AttributeType::quantitative;
  }
  return AttributeType::nominal;
}

inline AttributeType infer_attribute_type(const AttributeColumn& column) {
  if (column.values.empty()) throw ValidationError("attribute '" + column.name + "' has no values");
  return infer_attribute_type(std::span<const Cell>(column.values));
}

// ---------------------------------------------------------------------------
// Visualization abstraction.

inline VisualConfiguration abstract_configuration(const VisualizationSpec& vis,
                                                  const Corpus& corpus) {
  VisualConfiguration config;
  config.mark = vis.design.mark;
  config.x_aggregate = vis.design.x_aggregate;
  config.y_aggregate = vis.design.y_aggregate;
  for (std::size_t c = 0; c < kNumDataChannels; ++c) {
    if (const auto& id = vis.design.bound[c]) {
      config.channel_types[c] = corpus.attribute(*id).inferred_type;
    }
  }
  return config;
}

// Abstracts `vis` and registers the result in the corpus registry.
inline VisualConfiguration extract_visual_configuration(const VisualizationSpec& vis,
                                                        Corpus& corpus) {
  const int id = corpus.registry.intern(abstract_configuration(vis, corpus));
  return corpus.registry.at(id);
}

// Checks a visualization against the corpus and normalizes its attribute
// list into canonical channel order.
inline void validate_visualization(VisualizationSpec& vis, const Corpus& corpus,
                                   const std::string& where) {
  auto fail = [&](const std::string& msg) { throw ValidationError(where + ": " + msg); };
  if (vis.user_id < 0 || vis.user_id >= corpus.num_users) fail("user id out of range");
  if (!corpus.has_dataset(vis.dataset_id))
    fail("dangling dataset reference " + std::to_string(vis.dataset_id));
  const Dataset& ds = corpus.dataset(vis.dataset_id);
  std::set<int> own;
  for (const auto& col : ds.columns) own.insert(col.attribute_id);
  if (vis.attribute_ids.empty()) fail("visualization uses no attributes");
  std::set<int> listed;
  for (int id : vis.attribute_ids) {
    if (!own.count(id))
      fail("attribute " + std::to_string(id) + " does not belong to dataset " +
           std::to_string(vis.dataset_id));
    if (!listed.insert(id).second) fail("attribute " + std::to_string(id) + " listed twice");
  }
  std::vector<int> canonical;
  for (const auto& b : vis.design.bound) {
    if (!b) continue;
    if (!listed.count(*b))
      fail("channel bound to attribute " + std::to_string(*b) + " not listed in attrs");
    canonical.push_back(*b);
  }
  if (canonical.size() != listed.size())
    fail("every listed attribute must be bound to exactly one data channel");
  vis.attribute_ids = std::move(canonical);
}

// ---------------------------------------------------------------------------
// JSON (de)serialization.

namespace detail {

inline std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

inline Cell cell_from_json(const nlohmann::json& j, const std::string& where) {
  if (j.is_null()) return std::monostate{};
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ParseError(where + ": cell must be a number, string or null");
}

inline nlohmann::json cell_to_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return *d;
  if (const std::string* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

}  // namespace detail

// Resolves configurations of every visualization and fills the registry.
inline void resolve_configurations(Corpus& corpus) {
  for (auto& vis : corpus.visualizations) {
    vis.config_id = corpus.registry.intern(abstract_configuration(vis, corpus));
  }
}

inline Corpus corpus_from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("corpus parse error at line " + std::to_string(detail::line_of(text, e.byte)) +
                     ": " + e.what());
  }
  auto require = [](const nlohmann::json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
      throw ParseError(where + ": missing field '" + key + "'");
    return obj.at(key);
  };

  Corpus corpus;
  try {
    if (!doc.is_object()) throw ParseError("corpus: top level must be an object");
    const auto datasets = require(doc, "datasets", "corpus");
    const auto visualizations = require(doc, "visualizations", "corpus");
    if (!datasets.is_array() || !visualizations.is_array())
      throw ParseError("corpus: 'datasets' and 'visualizations' must be arrays");

    int next_attribute = 0;
    std::set<int> seen_ids;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      const std::string where = "datasets[" + std::to_string(d) + "]";
      const auto& jd = datasets[d];
      Dataset ds;
      ds.dataset_id = require(jd, "id", where).get<int>();
      if (!seen_ids.insert(ds.dataset_id).second)
        throw ValidationError(where + ": duplicate dataset id " + std::to_string(ds.dataset_id));
      const auto cols = require(jd, "columns", where);
      if (!cols.is_array() || cols.empty())
        throw ValidationError(where + ": dataset needs at least one column");
      std::set<std::string> names;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const std::string cw = where + ".columns[" + std::to_string(c) + "]";
        AttributeColumn col;
        col.attribute_id = next_attribute++;
        col.dataset_id = ds.dataset_id;
        col.name = require(cols[c], "name", cw).get<std::string>();
        if (!names.insert(col.name).second)
          throw ValidationError(cw + ": duplicate column name '" + col.name + "'");
        const auto vals = require(cols[c], "values", cw);
        if (!vals.is_array() || vals.empty())
          throw ValidationError(cw + ": column needs at least one value");
        col.values.reserve(vals.size());
        for (std::size_t r = 0; r < vals.size(); ++r)
          col.values.push_back(detail::cell_from_json(vals[r], cw + ".values[" + std::to_string(r) + "]"));
        try {
          col.inferred_type = infer_attribute_type(col);
        } catch (const ValidationError& e) {
          throw ValidationError(cw + ": " + e.what());
        }
        ds.columns.push_back(std::move(col));
      }
      corpus.datasets.push_back(std::move(ds));
    }
    corpus.reindex();

    int max_user = -1;
    for (const auto& jv : visualizations) {
      if (jv.is_object() && jv.contains("user") && jv["user"].is_number_integer())
        max_user = std::max(max_user, jv["user"].get<int>());
    }
    corpus.num_users = doc.contains("users") ? doc["users"].get<int>() : max_user + 1;
    if (corpus.num_users <= max_user)
      throw ValidationError("corpus: 'users' is smaller than the largest user id");

    for (std::size_t v = 0; v < visualizations.size(); ++v) {
      const std::string where = "visualizations[" + std::to_string(v) + "]";
      const auto& jv = visualizations[v];
      VisualizationSpec vis;
      vis.user_id = require(jv, "user", where).get<int>();
      vis.dataset_id = require(jv, "dataset", where).get<int>();
      vis.attribute_ids = require(jv, "attrs", where).get<std::vector<int>>();
      const auto channels = require(jv, "channels", where);
      if (!channels.is_object()) throw ParseError(where + ": 'channels' must be an object");
      for (const auto& [key, value] : channels.items()) {
        if (key == "mark") {
          vis.design.mark = value.get<std::string>();
        } else if (key == "x-aggregate") {
          vis.design.x_aggregate = value.get<std::string>();
        } else if (key == "y-aggregate") {
          vis.design.y_aggregate = value.get<std::string>();
        } else {
          auto it = std::find(kDataChannelNames.begin(), kDataChannelNames.end(), key);
          if (it == kDataChannelNames.end())
            throw ValidationError(where + ": unknown channel '" + key + "'");
          if (!value.is_null()) {
            if (!value.is_number_integer())
              throw ValidationError(where + ": data channel '" + key + "' must hold an attribute id");
            vis.design.bound[static_cast<std::size_t>(it - kDataChannelNames.begin())] = value.get<int>();
          }
        }
      }
      if (jv.contains("feedback")) vis.feedback = parse_feedback(jv["feedback"].get<std::string>());
      validate_visualization(vis, corpus, where);
      corpus.visualizations.push_back(std::move(vis));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("corpus: ") + e.what());
  }
  resolve_configurations(corpus);
  return corpus;
}

inline Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open corpus file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return corpus_from_json_text(buf.str());
}

inline nlohmann::json corpus_to_json(const Corpus& corpus) {
  nlohmann::json doc;
  doc["users"] = corpus.num_users;
  auto& datasets = doc["datasets"] = nlohmann::json::array();
  for (const auto& ds : corpus.datasets) {
    nlohmann::json jd;
    jd["id"] = ds.dataset_id;
    auto& cols = jd["columns"] = nlohmann::json::array();
    for (const auto& col : ds.columns) {
      nlohmann::json values = nlohmann::json::array();
      for (const auto& c : col.values) values.push_back(detail::cell_to_json(c));
      cols.push_back({{"name", col.name}, {"values", std::move(values)}});
    }
    datasets.push_back(std::move(jd));
  }
  auto& vis_array = doc["visualizations"] = nlohmann::json::array();
  for (const auto& vis : corpus.visualizations) {
    nlohmann::json channels;
    channels["mark"] = vis.design.mark;
    for (std::size_t c = 0; c < kNumDataChannels; ++c)
      if (vis.design.bound[c]) channels[std::string(kDataChannelNames[c])] = *vis.design.bound[c];
    channels["x-aggregate"] = vis.design.x_aggregate;
    channels["y-aggregate"] = vis.design.y_aggregate;
    vis_array.push_back({{"user", vis.user_id},
                         {"dataset", vis.dataset_id},
                         {"attrs", vis.attribute_ids},
                         {"channels", std::move(channels)},
                         {"feedback", std::string(to_string(vis.feedback))}});
  }
  return doc;
}

inline void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << corpus_to_json(corpus).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Candidate visualization space of a dataset.

struct Candidate {
  std::vector<int> attribute_ids;  // ordered, bound to the config's channels
  int config_id = -1;

  auto operator<=>(const Candidate&) const = default;
};

// Lazily enumerates every (ordered attribute tuple, compatible config) pair of
// `dataset`. A config is compatible with a tuple when the tuple's inferred
// types equal the config's bound channel types in channel order. Configs bind
// between 1 and max_attrs attributes. Enumeration order: config id, then tuple
// in lexicographic column-position order. `visit` returns false to stop.
inline void enumerate_candidate_visualizations(
    const Dataset& dataset, std::span<const VisualConfiguration> registry, int max_attrs,
    const std::function<bool(const Candidate&)>& visit) {
  if (max_attrs < 1) throw ArgumentError("max_attrs must be >= 1");
  const std::size_t ncols = dataset.columns.size();
  std::vector<int> tuple;
  std::vector<char> used(ncols, 0);
  bool stop = false;
  for (const auto& config : registry) {
    const auto types = config.bound_types();
    if (types.empty() || static_cast<int>(types.size()) > max_attrs) continue;
    Candidate cand;
    cand.config_id = config.config_id;
    std::function<void(std::size_t)> extend = [&](std::size_t depth) {
      if (stop) return;
      if (depth == types.size()) {
        cand.attribute_ids = tuple;
        if (!visit(cand)) stop = true;
        return;
      }
      for (std::size_t c = 0; c < ncols && !stop; ++c) {
        if (used[c] || dataset.columns[c].inferred_type != types[depth]) continue;
        used[c] = 1;
        tuple.push_back(dataset.columns[c].attribute_id);
        extend(depth + 1);
        tuple.pop_back();
        used[c] = 0;
      }
    };
    extend(0);
    if (stop) return;
  }
}

inline std::size_t count_candidate_visualizations(const Dataset& dataset,
                                                  std::span<const VisualConfiguration> registry,
                                                  int max_attrs) {
  std::size_t n = 0;
  enumerate_candidate_visualizations(dataset, registry, max_attrs, [&](const Candidate&) {
    ++n;
    return true;
  });
  return n;
}

inline Candidate candidate_of(const VisualizationSpec& vis) {
  return Candidate{vis.attribute_ids, vis.config_id};
}

// ---------------------------------------------------------------------------
// Corpus statistics (n, m, v, h and the per-user means).

struct CorpusStats {
  std::size_t users = 0;
  std::size_t datasets = 0;
  std::size_t attributes = 0;
  std::size_t visualizations = 0;
  std::size_t configs = 0;
  double mean_attrs_per_dataset = 0.0;
  double mean_attrs_per_user = 0.0;  // distinct attributes over the user's datasets
  double mean_vis_per_user = 0.0;
  double mean_datasets_per_user = 0.0;  // datasets with >= 1 of the user's visualizations
};

inline CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats s;
  s.users = static_cast<std::size_t>(corpus.num_users);
  s.datasets = corpus.datasets.size();
  s.attributes = corpus.num_attributes();
  s.visualizations = corpus.visualizations.size();
  s.configs = corpus.num_configs();
  if (s.datasets) s.mean_attrs_per_dataset = static_cast<double>(s.attributes) / s.datasets;
  if (s.users) {
    std::vector<std::set<int>> user_datasets(s.users);
    for (const auto& vis : corpus.visualizations) user_datasets[vis.user_id].insert(vis.dataset_id);
    double attrs = 0.0, ds = 0.0;
    for (const auto& set : user_datasets) {
      ds += static_cast<double>(set.size());
      for (int d : set) attrs += static_cast<double>(corpus.dataset(d).columns.size());
    }
    s.mean_attrs_per_user = attrs / s.users;
    s.mean_datasets_per_user = ds / s.users;
    s.mean_vis_per_user = static_cast<double>(s.visualizations) / s.users;
  }
  return s;
}

}  // namespace pvis
