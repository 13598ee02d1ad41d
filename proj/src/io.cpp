#include "mata/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mata::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string position_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

// Collects schema errors while walking the document.
class Reader {
 public:
  std::vector<std::string> errors;

  bool expect(const json& value, json::value_t type, const std::string& field, const char* what) {
    const bool ok = value.type() == type ||
                    (type == json::value_t::number_float && value.is_number());
    if (!ok) errors.push_back(field + ": expected " + what);
    return ok;
  }

  const json* member(const json& object, const char* key, const std::string& field, bool required = true) {
    auto it = object.find(key);
    if (it == object.end()) {
      if (required) errors.push_back(field + "." + key + ": missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<std::string> string_at(const json& object, const char* key, const std::string& field) {
    const json* v = member(object, key, field);
    if (!v || !expect(*v, json::value_t::string, field + "." + key, "a string")) return std::nullopt;
    return v->get<std::string>();
  }

  std::map<std::string, double> number_map(const json& object, const std::string& field) {
    std::map<std::string, double> out;
    if (!expect(object, json::value_t::object, field, "an object")) return out;
    for (auto it = object.begin(); it != object.end(); ++it) {
      if (!it->is_number()) {
        errors.push_back(field + "." + it.key() + ": expected a number");
        continue;
      }
      out[it.key()] = it->get<double>();
    }
    return out;
  }

  std::optional<PlanNode> plan(const json& node, const std::string& field) {
    if (!expect(node, json::value_t::object, field, "an object")) return std::nullopt;
    auto kind = string_at(node, "kind", field);
    if (!kind) return std::nullopt;
    if (*kind == "allocate") {
      const json* acts = member(node, "actions", field);
      if (!acts || !expect(*acts, json::value_t::array, field + ".actions", "an array")) return std::nullopt;
      std::vector<ActionId> ids;
      for (std::size_t i = 0; i < acts->size(); ++i) {
        const auto& a = (*acts)[i];
        if (expect(a, json::value_t::string, field + ".actions[" + std::to_string(i) + "]", "a string")) {
          ids.push_back(a.get<std::string>());
        }
      }
      return PlanNode::allocate(std::move(ids));
    }
    if (*kind != "sequence" && *kind != "parallel") {
      errors.push_back(field + ".kind: unknown plan kind \"" + *kind + "\"");
      return std::nullopt;
    }
    const json* kids = member(node, "children", field);
    if (!kids || !expect(*kids, json::value_t::array, field + ".children", "an array")) return std::nullopt;
    std::vector<PlanNode> children;
    for (std::size_t i = 0; i < kids->size(); ++i) {
      if (auto child = plan((*kids)[i], field + ".children[" + std::to_string(i) + "]")) {
        children.push_back(std::move(*child));
      }
    }
    if (*kind == "sequence") return PlanNode::sequence(std::move(children));
    std::optional<std::size_t> threshold;
    if (const json* t = member(node, "threshold", field, false)) {
      if (t->is_number_unsigned()) {
        threshold = t->get<std::size_t>();
      } else {
        errors.push_back(field + ".threshold: expected a non-negative integer");
      }
    }
    return PlanNode::parallel(std::move(children), threshold);
  }
};

ordered_json plan_to_json(const PlanNode& node) {
  ordered_json out;
  out["kind"] = std::string(to_string(node.kind));
  if (node.kind == PlanKind::Allocate) {
    out["actions"] = node.actions;
    return out;
  }
  ordered_json children = ordered_json::array();
  for (const auto& c : node.children) children.push_back(plan_to_json(c));
  out["children"] = std::move(children);
  if (node.kind == PlanKind::Parallel && node.parallel_threshold) out["threshold"] = *node.parallel_threshold;
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && std::isdigit(static_cast<unsigned char>(a[ie]))) ++ie;
      while (je < b.size() && std::isdigit(static_cast<unsigned char>(b[je]))) ++je;
      auto na = a.substr(i, ie - i), nb = b.substr(j, je - j);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

ParseResult parse_jobspec(std::string_view text) {
  ParseResult result;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    result.errors.push_back(position_of(text, e.byte) + ": " + e.what());
    return result;
  }

  Reader r;
  if (!r.expect(doc, json::value_t::object, "document", "an object")) {
    result.errors = std::move(r.errors);
    return result;
  }

  JobSpec job;
  if (const json* workers = r.member(doc, "workers", "document");
      workers && r.expect(*workers, json::value_t::array, "workers", "an array")) {
    for (std::size_t i = 0; i < workers->size(); ++i) {
      const std::string field = "workers[" + std::to_string(i) + "]";
      const json& w = (*workers)[i];
      if (!r.expect(w, json::value_t::object, field, "an object")) continue;
      Worker worker;
      if (auto id = r.string_at(w, "id", field)) worker.id = *id;
      if (auto type = r.string_at(w, "type", field)) {
        if (*type == "human") {
          worker.kind = WorkerKind::Human;
        } else if (*type == "robot") {
          worker.kind = WorkerKind::Robot;
        } else {
          r.errors.push_back(field + ".type: unknown worker type \"" + *type + "\" (expected human or robot)");
        }
      }
      if (const json* d = r.member(w, "durations", field)) {
        worker.durations = r.number_map(*d, field + ".durations");
        for (const auto& [action, _] : worker.durations) worker.capabilities.insert(action);
      }
      job.workers.push_back(std::move(worker));
    }
  }

  if (const json* actions = r.member(doc, "actions", "document");
      actions && r.expect(*actions, json::value_t::array, "actions", "an array")) {
    for (std::size_t i = 0; i < actions->size(); ++i) {
      const std::string field = "actions[" + std::to_string(i) + "]";
      const json& a = (*actions)[i];
      if (!r.expect(a, json::value_t::object, field, "an object")) continue;
      ActionSpec action;
      if (auto id = r.string_at(a, "id", field)) action.id = *id;
      if (auto primitive = r.string_at(a, "primitive", field)) action.primitive = *primitive;
      if (const json* params = r.member(a, "params", field, false);
          params && r.expect(*params, json::value_t::object, field + ".params", "an object")) {
        for (auto it = params->begin(); it != params->end(); ++it) action.params[it.key()] = it->dump();
      }
      job.actions.push_back(std::move(action));
    }
  }

  if (const json* costs = r.member(doc, "costs", "document", false);
      costs && r.expect(*costs, json::value_t::object, "costs", "an object")) {
    for (auto it = costs->begin(); it != costs->end(); ++it) {
      for (const auto& [action, value] : r.number_map(*it, "costs." + it.key())) {
        job.costs[{it.key(), action}] = value;
      }
    }
  }
  // Capable pairs without an explicit cost cost their duration.
  for (const auto& w : job.workers) {
    for (const auto& [action, duration] : w.durations) job.costs.try_emplace({w.id, action}, duration);
  }

  if (const json* budgets = r.member(doc, "budgets", "document", false)) {
    job.budgets = r.number_map(*budgets, "budgets");
  }

  if (const json* plan = r.member(doc, "plan", "document")) {
    if (auto root = r.plan(*plan, "plan")) job.plan = std::move(*root);
  }

  if (!r.errors.empty()) {
    result.errors = std::move(r.errors);
    return result;
  }
  auto violations = validate_job(job);
  if (!violations.empty()) {
    result.errors = std::move(violations);
    return result;
  }
  result.job = std::move(job);
  return result;
}

ParseResult load_jobspec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ParseResult result;
    result.errors.push_back("cannot read " + path);
    return result;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_jobspec(buffer.str());
}

std::string serialize_jobspec(const JobSpec& job) {
  ordered_json doc;
  ordered_json workers = ordered_json::array();
  for (const auto& w : job.workers) {
    ordered_json durations = ordered_json::object();
    for (const auto& [action, d] : w.durations) durations[action] = d;
    workers.push_back({{"id", w.id}, {"type", std::string(to_string(w.kind))}, {"durations", durations}});
  }
  doc["workers"] = std::move(workers);

  ordered_json actions = ordered_json::array();
  for (const auto& a : job.actions) {
    ordered_json params = ordered_json::object();
    for (const auto& [key, raw] : a.params) params[key] = ordered_json::parse(raw);
    actions.push_back({{"id", a.id}, {"primitive", a.primitive}, {"params", params}});
  }
  doc["actions"] = std::move(actions);

  ordered_json costs = ordered_json::object();
  for (const auto& [key, value] : job.costs) costs[key.first][key.second] = value;
  doc["costs"] = std::move(costs);

  doc["plan"] = plan_to_json(job.plan);
  if (!job.budgets.empty()) {
    ordered_json budgets = ordered_json::object();
    for (const auto& [worker, limit] : job.budgets) budgets[worker] = limit;
    doc["budgets"] = std::move(budgets);
  }
  return doc.dump(2) + "\n";
}

std::string emit_gantt_csv(const SimTrace& trace) {
  std::vector<const ExecutionRecord*> rows;
  for (const auto& e : trace.executions) rows.push_back(&e);
  std::stable_sort(rows.begin(), rows.end(), [](const ExecutionRecord* a, const ExecutionRecord* b) {
    if (a->start != b->start) return a->start < b->start;
    return natural_less(a->action, b->action);
  });
  std::string out = "action,worker,start,end\n";
  for (const auto* e : rows) {
    out += csv_field(e->action) + "," + csv_field(e->worker) + "," + format_number(e->start) + "," +
           format_number(e->end) + "\n";
  }
  return out;
}

std::string emit_alloc_table(const JobSpec& job, const SimTrace& trace) {
  std::string out = "action";
  for (const auto& w : job.workers) out += "," + csv_field(w.id);
  out += ",worker_allocated\n";
  for (const auto& a : job.actions) {
    out += csv_field(a.id);
    for (const auto& w : job.workers) {
      out += ",";
      if (auto c = job.cost(w.id, a.id)) out += format_number(*c);
    }
    out += ",";
    if (auto worker = trace.allocated_worker(a.id)) out += csv_field(*worker);
    out += "\n";
  }
  return out;
}

std::string emit_trace_log(const SimTrace& trace) {
  struct Line {
    double time;
    int order;
    std::size_t seq;
    std::string text;
  };
  std::vector<Line> lines;
  std::size_t seq = 0;
  for (const auto& record : trace.allocations) {
    std::string text = "ALLOC " + format_number(record.sim_time) + " " + record.allocator;
    for (const auto& [worker, action] : record.pairs) text += " " + worker + "->" + action;
    text += " objective=" + format_number(record.assignment.objective);
    lines.push_back({record.sim_time, 0, seq++, std::move(text)});
  }
  for (const auto& comm : trace.comms) lines.push_back({comm.sim_time, 1, seq++, comm.log_line()});
  for (const auto& e : trace.executions) {
    lines.push_back({e.start, 2, seq++, "START " + format_number(e.start) + " " + e.worker + " " + e.action});
    lines.push_back({e.end, -1, seq++,
                     std::string(e.succeeded ? "END " : "FAIL ") + format_number(e.end) + " " + e.worker + " " +
                         e.action});
  }
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.order != b.order) return a.order < b.order;
    return a.seq < b.seq;
  });
  std::string out;
  for (const auto& line : lines) out += line.text + "\n";
  for (const auto& d : trace.diagnostics) out += "DIAG " + d + "\n";
  out += "RESULT " + std::string(to_string(trace.result)) + " makespan=" + format_number(trace.makespan) + "\n";
  return out;
}

std::string serialize_problem(const alloc::AllocationProblem& problem) {
  ordered_json doc;
  doc["workers"] = problem.workers;
  doc["actions"] = problem.actions;
  doc["base_cost"] = problem.base_cost;
  doc["availability"] = problem.availability;
  std::vector<int> capable(problem.capable.begin(), problem.capable.end());
  doc["capable"] = capable;
  doc["target"] = problem.target;
  if (problem.has_budgets()) {
    doc["budget_usage"] = problem.budget_usage;
    ordered_json limits = ordered_json::array();
    for (double limit : problem.budget_limit) {
      if (std::isfinite(limit)) {
        limits.push_back(limit);
      } else {
        limits.push_back(nullptr);  // unconstrained
      }
    }
    doc["budget_limit"] = std::move(limits);
  }
  return doc.dump(2) + "\n";
}

alloc::AllocationProblem parse_problem(std::string_view text) {
  const json doc = json::parse(text.begin(), text.end());
  alloc::AllocationProblem p;
  p.workers = doc.at("workers").get<std::vector<std::string>>();
  p.actions = doc.at("actions").get<std::vector<std::string>>();
  p.base_cost = doc.at("base_cost").get<std::vector<double>>();
  p.availability = doc.at("availability").get<std::vector<double>>();
  for (int c : doc.at("capable").get<std::vector<int>>()) p.capable.push_back(static_cast<char>(c != 0));
  p.target = doc.at("target").get<std::size_t>();
  if (doc.contains("budget_limit")) {
    p.budget_usage = doc.at("budget_usage").get<std::vector<double>>();
    for (const auto& limit : doc.at("budget_limit")) {
      p.budget_limit.push_back(limit.is_null() ? std::numeric_limits<double>::infinity() : limit.get<double>());
    }
  }
  return p;
}

}  // namespace mata::io
