#include "tbo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include <json.hpp>

namespace tbo {

namespace {

using nlohmann::ordered_json;

ordered_json to_json(const ConfigValue& v) {
  switch (v.kind) {
    case ConfigValue::Kind::Bool: return v.b;
    case ConfigValue::Kind::Int: return v.i;
    case ConfigValue::Kind::Float:
      if (!std::isfinite(v.f)) return format_float(v.f);
      return v.f;
    case ConfigValue::Kind::String: return v.s;
    case ConfigValue::Kind::Array: {
      ordered_json arr = ordered_json::array();
      for (const auto& item : v.items) arr.push_back(to_json(item));
      return arr;
    }
  }
  return nullptr;
}

ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json vec(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (const double x : v) arr.push_back(num(x));
  return arr;
}

}  // namespace

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trace_columns(int dim) {
  std::vector<std::string> cols{"t", "phase"};
  for (int k = 0; k < dim; ++k) cols.push_back("x" + std::to_string(k));
  for (const char* c : {"y", "f_true", "n_train", "alpha", "incumbent", "acq_value",
                        "mean_untempered", "var_untempered", "mean_tempered", "var_tempered",
                        "var_at_incumbent"}) {
    cols.emplace_back(c);
  }
  for (int k = 0; k < dim; ++k) cols.push_back("lengthscale" + std::to_string(k));
  for (const char* c : {"signal_variance", "noise_variance", "mean_offset", "best_observed",
                        "best_observed_f"}) {
    cols.emplace_back(c);
  }
  return cols;
}

void write_trace_csv(std::ostream& os, const RunRecord& record) {
  const auto cols = trace_columns(record.dim);
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : record.rows) {
    os << r.t << ',' << (r.initial ? "init" : "bo");
    for (int k = 0; k < record.dim; ++k) os << ',' << format_float(r.x[k]);
    os << ',' << format_float(r.y) << ',' << format_float(r.f_true) << ',' << r.n_train;
    for (const double v : {r.alpha, r.incumbent, r.acq_value, r.mean_untempered, r.var_untempered,
                           r.mean_tempered, r.var_tempered, r.var_at_incumbent}) {
      os << ',' << format_float(v);
    }
    for (int k = 0; k < record.dim; ++k) {
      os << ',' << format_float(r.lengthscales.size() > k ? r.lengthscales[k] : std::nan(""));
    }
    for (const double v : {r.signal_variance, r.noise_variance, r.mean_offset, r.best_observed,
                           r.best_observed_f}) {
      os << ',' << format_float(v);
    }
    os << '\n';
  }
}

std::string summary_json(const RunRecord& record, const Objective& objective,
                         const ConfigDoc& effective_config) {
  ordered_json j;
  j["objective"] = record.objective;
  j["dim"] = record.dim;
  j["seed"] = record.seed;
  j["config_hash"] = record.config_hash;
  j["init_size"] = record.init_size;
  j["iterations_requested"] = record.iterations_requested;
  j["iterations_completed"] = record.iterations_completed;
  j["evaluations"] = record.evaluations;
  j["failed"] = record.failed;
  j["failure"] = record.failure;
  j["wall_ms"] = record.wall_ms;
  j["recommended"] = {
      {"posterior_mean_argmax", {{"x", vec(record.recommended_mean_x)},
                                 {"mean", num(record.recommended_mean_value)}}},
      {"best_observed", {{"x", vec(record.recommended_observed_x)},
                         {"y", num(record.recommended_observed_y)}}}};
  if (objective.true_best) {
    const RegretTrace tr = regret_trace(record, objective.true_best->value,
                                        objective.true_best->estimated);
    ordered_json reg;
    reg["f_star"] = objective.true_best->value;
    reg["f_star_estimated"] = objective.true_best->estimated;
    reg["R_T"] = tr.cumulative.empty() ? ordered_json(nullptr) : num(tr.cumulative.back());
    reg["D_T"] = tr.normalized_defined ? num(tr.normalized.back()) : ordered_json(nullptr);
    reg["clipped"] = tr.clipped;
    j["regret"] = reg;
  }
  ordered_json cfg = ordered_json::object();
  for (const auto& sec : effective_config.sections) {
    ordered_json& target = sec.name.empty() ? cfg : cfg[sec.name];
    if (!sec.name.empty() && target.is_null()) target = ordered_json::object();
    for (const auto& [k, v] : sec.entries) target[k] = to_json(v);
  }
  j["effective_config"] = cfg;
  return j.dump(2) + "\n";
}

double best_observed_after(const RunRecord& record, int iterations) {
  const int idx = record.init_size + iterations - 1;
  if (iterations < 0 || idx < 0 || idx >= static_cast<int>(record.rows.size())) return std::nan("");
  return record.rows[idx].best_observed;
}

std::vector<AggregateRow> aggregate(const std::vector<SweepResult>& results,
                                    const std::vector<Objective>& objectives) {
  std::vector<AggregateRow> rows;
  for (const auto& res : results) {
    AggregateRow row;
    row.function = res.objective;
    row.dim = res.dim;
    row.g = res.g;
    row.alpha_mode = res.mode;
    row.seed = res.seed_index;
    const RunRecord& rec = res.record;
    row.failed = rec.failed;
    row.best_observed_final = rec.rows.empty() ? std::nan("") : rec.rows.back().best_observed;
    for (const int k : kCheckpoints) row.best_observed_at.push_back(best_observed_after(rec, k));
    row.regret_total = std::nan("");
    row.normalized_regret = std::nan("");
    for (const auto& obj : objectives) {
      if (obj.name != res.objective || obj.dim() != res.dim || !obj.true_best) continue;
      if (rec.rows.empty()) break;
      const RegretTrace tr = regret_trace(rec, obj.true_best->value, obj.true_best->estimated);
      row.regret_total = tr.cumulative.back();
      if (tr.normalized_defined) row.normalized_regret = tr.normalized.back();
      break;
    }
    row.wall_ms = rec.wall_ms;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::string> aggregate_columns() {
  std::vector<std::string> cols{"function", "dim", "g", "alpha_mode", "seed", "best_observed_final"};
  for (const int k : kCheckpoints) cols.push_back("best_observed@" + std::to_string(k));
  for (const char* c : {"R_T", "D_T", "wall_ms"}) cols.emplace_back(c);
  return cols;
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  const auto cols = aggregate_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : rows) {
    os << r.function << ',' << r.dim << ',' << format_float(r.g) << ',' << r.alpha_mode << ','
       << r.seed << ',' << format_float(r.best_observed_final);
    for (const double v : r.best_observed_at) os << ',' << format_float(v);
    os << ',' << format_float(r.regret_total) << ',' << format_float(r.normalized_regret) << ','
       << format_float(r.wall_ms) << '\n';
  }
}

double sign_test_pvalue(int wins, int decided) {
  if (decided <= 0) return 1.0;
  // P(X >= wins) for X ~ Bin(decided, 1/2), summed in log space.
  double p = 0.0;
  for (int k = wins; k <= decided; ++k) {
    const double logc = std::lgamma(decided + 1.0) - std::lgamma(k + 1.0) - std::lgamma(decided - k + 1.0);
    p += std::exp(logc - decided * std::log(2.0));
  }
  return std::min(1.0, p);
}

std::vector<WinCount> paired_wins(const std::vector<AggregateRow>& rows, const std::string& mode_a,
                                  const std::string& mode_b) {
  using Key = std::tuple<double, std::string, int, int>;  // g, function, dim, seed
  std::map<Key, const AggregateRow*> a, b;
  for (const auto& r : rows) {
    if (r.failed) continue;
    const Key key{r.g, r.function, r.dim, r.seed};
    if (r.alpha_mode == mode_a) a[key] = &r;
    if (r.alpha_mode == mode_b) b[key] = &r;
  }
  std::vector<WinCount> out;
  std::map<std::pair<double, std::string>, WinCount> per;
  std::map<double, WinCount> total;
  std::vector<std::pair<double, std::string>> order;
  for (const auto& r : rows) {
    const auto pk = std::make_pair(r.g, r.function);
    if (!per.count(pk)) {
      per[pk] = WinCount{r.g, r.function, 0, 0, 0, 1.0};
      order.push_back(pk);
    }
    if (!total.count(r.g)) total[r.g] = WinCount{r.g, "ALL", 0, 0, 0, 1.0};
  }
  for (const auto& [key, ra] : a) {
    const auto it = b.find(key);
    if (it == b.end()) continue;
    WinCount& w = per[{std::get<0>(key), std::get<1>(key)}];
    WinCount& t = total[std::get<0>(key)];
    const double va = ra->best_observed_final;
    const double vb = it->second->best_observed_final;
    if (va > vb) {
      ++w.a_wins;
      ++t.a_wins;
    } else if (vb > va) {
      ++w.b_wins;
      ++t.b_wins;
    } else {
      ++w.ties;
      ++t.ties;
    }
  }
  std::vector<double> gs;
  for (const auto& pk : order) {
    if (std::find(gs.begin(), gs.end(), pk.first) == gs.end()) gs.push_back(pk.first);
  }
  for (const double g : gs) {
    for (const auto& pk : order) {
      if (pk.first != g) continue;
      WinCount w = per[pk];
      w.p_value = sign_test_pvalue(w.a_wins, w.a_wins + w.b_wins);
      out.push_back(w);
    }
    WinCount t = total[g];
    t.p_value = sign_test_pvalue(t.a_wins, t.a_wins + t.b_wins);
    out.push_back(t);
  }
  return out;
}

void write_wins_csv(std::ostream& os, const std::vector<WinCount>& wins, const std::string& mode_a,
                    const std::string& mode_b) {
  os << "g,function," << mode_a << "_wins," << mode_b << "_wins,ties,p_value\n";
  for (const auto& w : wins) {
    os << format_float(w.g) << ',' << w.function << ',' << w.a_wins << ',' << w.b_wins << ','
       << w.ties << ',' << format_float(w.p_value) << '\n';
  }
}

std::vector<FunctionWins> function_wins(const std::vector<AggregateRow>& rows,
                                        const std::string& mode_a, const std::string& mode_b) {
  using Cell = std::tuple<double, std::string, int>;  // g, function, dim
  std::map<std::tuple<double, std::string, int, int>, const AggregateRow*> a, b;
  std::vector<double> gs;
  for (const auto& r : rows) {
    if (std::find(gs.begin(), gs.end(), r.g) == gs.end()) gs.push_back(r.g);
    if (r.failed) continue;
    if (r.alpha_mode == mode_a) a[{r.g, r.function, r.dim, r.seed}] = &r;
    if (r.alpha_mode == mode_b) b[{r.g, r.function, r.dim, r.seed}] = &r;
  }
  std::map<Cell, std::pair<double, double>> sums;
  std::map<Cell, int> counts;
  for (const auto& [key, ra] : a) {
    const auto it = b.find(key);
    if (it == b.end()) continue;
    const Cell cell{std::get<0>(key), std::get<1>(key), std::get<2>(key)};
    sums[cell].first += ra->best_observed_final;
    sums[cell].second += it->second->best_observed_final;
    ++counts[cell];
  }
  std::vector<FunctionWins> out;
  for (const double g : gs) {
    FunctionWins w;
    w.g = g;
    for (const auto& [cell, sum] : sums) {
      if (std::get<0>(cell) != g) continue;
      const double n = counts[cell];
      const double ma = sum.first / n;
      const double mb = sum.second / n;
      if (ma > mb) {
        ++w.a_wins;
      } else if (mb > ma) {
        ++w.b_wins;
      } else {
        ++w.ties;
      }
    }
    w.p_value = sign_test_pvalue(w.a_wins, w.a_wins + w.b_wins);
    out.push_back(w);
  }
  return out;
}

void write_function_wins_csv(std::ostream& os, const std::vector<FunctionWins>& wins,
                             const std::string& mode_a, const std::string& mode_b) {
  os << "g," << mode_a << "_wins," << mode_b << "_wins,ties," << mode_a << "_strict_win_rate,p_value\n";
  for (const auto& w : wins) {
    const int decided = w.a_wins + w.b_wins;
    os << format_float(w.g) << ',' << w.a_wins << ',' << w.b_wins << ',' << w.ties << ','
       << format_float(decided ? static_cast<double>(w.a_wins) / decided : std::nan("")) << ','
       << format_float(w.p_value) << '\n';
  }
}

}  // namespace tbo
