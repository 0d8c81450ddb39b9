#include <algorithm>
#include <sstream>

#include "ampsched/task_graph.hpp"
#include "json.hpp"

namespace ampsched {

using nlohmann::json;

std::string export_dot(const TaskGraph& g) {
  std::ostringstream out;
  out << "digraph cholesky {\n";
  for (const Task& t : g.tasks()) {
    out << "  t" << t.id << " [label=\"" << kind_letter(t.kind) << '(' << t.i << ',' << t.j
        << ") k=" << t.k << "\"];\n";
  }
  for (const Edge& e : g.edges()) out << "  t" << e.pred << " -> t" << e.succ << ";\n";
  out << "}\n";
  return out.str();
}

std::string graph_to_json(const TaskGraph& g, std::optional<TileGeometry> geom) {
  json doc;
  doc["s"] = g.block_count();
  if (geom) {
    doc["n"] = geom->n;
    doc["b"] = geom->b;
  }
  json tasks = json::array();
  for (const Task& t : g.tasks()) {
    json reads = json::array();
    for (const BlockCoord& r : t.reads) reads.push_back({r.row, r.col});
    tasks.push_back({{"id", t.id},
                     {"kind", std::string(1, kind_letter(t.kind))},
                     {"k", t.k},
                     {"i", t.i},
                     {"j", t.j},
                     {"reads", reads},
                     {"writes", json::array({json::array({t.write.row, t.write.col})})}});
  }
  doc["tasks"] = std::move(tasks);
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.pred, e.succ});
  doc["edges"] = std::move(edges);
  return doc.dump(1);
}

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

BlockCoord parse_coord(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("block coordinate must be [row, col]");
  return {j[0].get<std::uint32_t>(), j[1].get<std::uint32_t>()};
}

}  // namespace

LoadedGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("DAG JSON: line " + std::to_string(line_of(text, e.byte)) + ": " +
                                e.what());
  }
  std::vector<Task> tasks;
  std::vector<Edge> edges;
  std::size_t s = 0;
  std::optional<TileGeometry> geom;
  std::size_t index = 0;
  try {
    s = doc.value("s", std::size_t{0});
    if (doc.contains("n") && doc.contains("b"))
      geom = TileGeometry{doc.at("n").get<std::size_t>(), doc.at("b").get<std::size_t>()};
    for (const json& jt : doc.at("tasks")) {
      Task t;
      t.id = jt.at("id").get<TaskId>();
      const auto kind = jt.at("kind").get<std::string>();
      if (kind.size() != 1) throw std::invalid_argument("kind must be one letter");
      t.kind = kind_from_letter(kind[0]);
      t.k = jt.at("k").get<std::uint32_t>();
      t.i = jt.at("i").get<std::uint32_t>();
      t.j = jt.at("j").get<std::uint32_t>();
      for (const json& r : jt.at("reads")) t.reads.push_back(parse_coord(r));
      const json& w = jt.at("writes");
      if (!w.is_array() || w.size() != 1) throw std::invalid_argument("writes must hold exactly one block");
      t.write = parse_coord(w[0]);
      tasks.push_back(std::move(t));
      ++index;
    }
    for (const json& je : doc.at("edges")) {
      if (!je.is_array() || je.size() != 2) throw std::invalid_argument("edge must be [pred, succ]");
      edges.push_back({je[0].get<TaskId>(), je[1].get<TaskId>()});
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument("DAG JSON: task #" + std::to_string(index) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("DAG JSON: task #" + std::to_string(index) + ": " + e.what());
  }
  return {TaskGraph::from_parts(std::move(tasks), std::move(edges), s), geom};
}

}  // namespace ampsched
