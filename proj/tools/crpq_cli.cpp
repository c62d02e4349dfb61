// crpq: command-line front end.
//
// Exit codes: 0 positive/complete, 1 negative, 2 bounded or unknown,
// 64 usage, 65 input, 70 resource.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "crpq/approximation.hpp"
#include "crpq/containment.hpp"
#include "crpq/error.hpp"
#include "crpq/evaluation.hpp"
#include "crpq/morphisms.hpp"
#include "crpq/refinement.hpp"
#include "crpq/structure.hpp"
#include "crpq/treepattern.hpp"

using namespace crpq;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kYes = 0, kNo = 1, kBounded = 2, kUsage = 64, kInput = 65, kResource = 70 };

struct Globals {
  bool json = false;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
}

Ucrpq load_query(const std::string& path, const std::vector<std::string>& extra = {}) {
  return parse_query(read_file(path), extra);
}

std::pair<Ucrpq, Ucrpq> load_pair(const std::string& a, const std::string& b) {
  Ucrpq l = load_query(a), r = load_query(b);
  AlphabetRef alpha = merge_alphabets(l.alphabet, r.alphabet);
  return {rebase(l, alpha), rebase(r, alpha)};
}

const Crpq& single(const Ucrpq& u, const std::string& what) {
  if (u.disjuncts.size() != 1) throw InputError(what + " must contain exactly one query");
  return u.disjuncts[0];
}

json words_json(const std::vector<Word>& ws, const Alphabet& a) {
  json j = json::array();
  for (const auto& w : ws) j.push_back(a.format_word(w));
  return j;
}

std::string words_text(const std::vector<Word>& ws, const Alphabet& a) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) s += (i ? ", " : "") + a.format_word(ws[i]);
  return s;
}

json db_json(const GraphDb& db) { return json::parse(save_graphdb(db)); }

json tuple_json(const Tuple& t, const GraphDb& db) {
  json j = json::array();
  for (NodeId n : t) j.push_back(db.nodes[n]);
  return j;
}

std::string tuple_text(const Tuple& t, const GraphDb& db) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ", " : "") + db.nodes[t[i]];
  return s + ")";
}

json verdict_json(const ContainmentVerdict& v, const Alphabet& a) {
  json j;
  j["status"] = to_string(v.status);
  j["mode"] = to_string(v.mode);
  j["bound"] = v.bound;
  j["checked"] = v.checked;
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    j["counterexample"] = {{"disjunct", c.disjunct},
                           {"words", words_json(c.expansion.words, a)},
                           {"db", db_json(c.db)},
                           {"outputs", tuple_json(c.outputs, c.db)}};
  }
  return j;
}

std::string verdict_text(const ContainmentVerdict& v, const Alphabet& a) {
  std::string s = to_string(v.status) + " (mode " + to_string(v.mode) + ", bound " + std::to_string(v.bound) + ", " +
                  std::to_string(v.checked) + " expansions)\n";
  if (v.counterexample) {
    const auto& c = *v.counterexample;
    s += "counterexample: disjunct " + std::to_string(c.disjunct) + ", words " + words_text(c.expansion.words, a) + "\n";
    s += "database: " + save_graphdb(c.db) + "\n";
    s += "outputs: " + tuple_text(c.outputs, c.db) + "\n";
  }
  return s;
}

int verdict_exit(const ContainmentVerdict& v) {
  switch (v.status) {
    case ContainmentStatus::Contained: return kYes;
    case ContainmentStatus::NotContained: return kNo;
    case ContainmentStatus::ContainedUpToBound: return kBounded;
  }
  return kBounded;
}

void emit(const Globals& g, const json& j, const std::string& text) {
  if (g.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

ContainmentMode mode_of(const std::string& m) { return parse_mode(m); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string dot_of(const Multigraph& g) {
  std::string s = "digraph segments {\n";
  for (std::size_t v = 0; v < g.num_vertices(); ++v) s += "  v" + std::to_string(v) + " [label=\"" + g.names[v] + "\"];\n";
  for (const auto& e : g.edges)
    s += "  v" + std::to_string(e.source) + " -> v" + std::to_string(e.target) + " [label=\"s" + std::to_string(e.id) +
         "\"];\n";
  return s + "}\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analysis and minimization of conjunctive regular path queries"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_option("--jobs", g.jobs, "Worker count (results do not depend on it)")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Random seed");

  std::string query, db, left, right, from, to, in, out, mode = "auto", pin, words;
  std::size_t max_len = 8, limit = 0, trials = 200, db_size = 4, hom_bound = 6, k = 1, disjunct = 0;
  std::optional<std::size_t> m;
  bool strong = false, dot = false, crpq_flag = false;

  auto* eval = app.add_subcommand("eval", "Evaluate a query on a graph database");
  eval->add_option("--query", query, "Query file")->required();
  eval->add_option("--db", db, "Database JSON")->required();
  eval->add_option("--pin", pin, "Pinned variables x=u0,y=u1");

  auto* hom = app.add_subcommand("hom", "Search a homomorphism between two queries");
  hom->add_option("--from", from, "Source query")->required();
  hom->add_option("--to", to, "Target query")->required();
  hom->add_flag("--strong-onto", strong, "Require every target atom to be hit");

  auto* contain = app.add_subcommand("contain", "Containment left ⊑ right");
  auto* equiv = app.add_subcommand("equiv", "Equivalence of two queries");
  for (auto* c : {contain, equiv}) {
    c->add_option("--left", left, "Left query")->required();
    c->add_option("--right", right, "Right query")->required();
    c->add_option("--mode", mode, "auto, sre, single-path or bounded")
        ->check(CLI::IsMember({"auto", "sre", "single-path", "bounded"}));
    c->add_option("--max-len", max_len, "Word length bound for bounded checks")->check(CLI::PositiveNumber);
  }

  auto* falsify = app.add_subcommand("falsify", "Look for a database separating two queries");
  falsify->add_option("--left", left, "Left query")->required();
  falsify->add_option("--right", right, "Right query")->required();
  falsify->add_option("--trials", trials, "Random databases")->check(CLI::PositiveNumber);
  falsify->add_option("--db-size", db_size, "Maximum nodes")->check(CLI::PositiveNumber);

  auto* expand_cmd = app.add_subcommand("expand", "List expansions");
  expand_cmd->add_option("--query", query, "Query file")->required();
  expand_cmd->add_option("--max-len", max_len, "Word length bound")->required();
  expand_cmd->add_option("--limit", limit, "Stop after this many (0: no limit)");

  auto* contract_cmd = app.add_subcommand("contract", "Contract internal variables");
  contract_cmd->add_option("--query", query, "Query file")->required();

  auto* segs = app.add_subcommand("segments", "Segments and segment graph");
  segs->add_option("--query", query, "Query file")->required();
  segs->add_flag("--dot", dot, "Print the segment graph in DOT");

  auto* redundant = app.add_subcommand("redundant", "Remove redundant atoms");
  redundant->add_option("--query", query, "Query file")->required();
  redundant->add_option("--mode", mode, "auto, sre, single-path or bounded")
      ->check(CLI::IsMember({"auto", "sre", "single-path", "bounded"}));
  redundant->add_option("--max-len", max_len, "Word length bound")->check(CLI::PositiveNumber);

  auto* certify = app.add_subcommand("certify", "Strong-minimality certificate for an expansion");
  certify->add_option("--query", query, "Query file")->required();
  certify->add_option("--disjunct", disjunct, "Disjunct index");
  certify->add_option("--expansion-words", words, "Comma-separated words, one per atom")->required();
  certify->add_option("--hom-bound", hom_bound, "Total size bound of compared expansions");

  auto* approx = app.add_subcommand("approx", "Under-approximation by queries with at most k atoms");
  approx->add_option("--query", query, "Query file")->required();
  approx->add_option("--k", k, "Atom bound")->required();
  approx->add_option("--m", m, "Refinement length")->check(CLI::PositiveNumber);
  approx->add_option("--out", out, "Output file");

  auto* minimize = app.add_subcommand("minimize", "Decide whether a query has an equivalent with at most k atoms");
  minimize->add_option("--query", query, "Query file")->required();
  minimize->add_option("--k", k, "Atom bound")->required();
  minimize->add_option("--m", m, "Refinement length")->check(CLI::PositiveNumber);
  minimize->add_option("--mode", mode, "auto, sre, single-path or bounded")
      ->check(CLI::IsMember({"auto", "sre", "single-path", "bounded"}));
  minimize->add_option("--max-len", max_len, "Word length bound")->check(CLI::PositiveNumber);
  minimize->add_flag("--crpq", crpq_flag, "Search a single query over the label pool");

  auto* enc = app.add_subcommand("encode-tp", "Tree pattern to query");
  enc->add_option("--in", in, "Tree pattern file")->required();
  enc->add_option("--out", out, "Output file");
  auto* dec = app.add_subcommand("decode-tp", "Query to tree pattern");
  dec->add_option("--in", in, "Query file")->required();
  dec->add_option("--out", out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (g.json) {
      std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    } else {
      app.exit(e);
    }
    return kUsage;
  }

  try {
    if (*eval) {
      std::string dbtext = read_file(db);
      Ucrpq u = load_query(query, graphdb_letters(dbtext));
      GraphDb graph = load_graphdb(dbtext, u.alphabet);
      std::set<Tuple> ans;
      if (!pin.empty()) {
        const Crpq& q = single(u, "a pinned query file");
        Pin p;
        for (const auto& kv : split(pin, ',')) {
          auto eq = kv.find('=');
          if (eq == std::string::npos) throw InputError("pin entries look like x=node");
          auto v = q.find_var(kv.substr(0, eq));
          auto n = graph.find_node(kv.substr(eq + 1));
          if (!v) throw InputError("unknown variable '" + kv.substr(0, eq) + "'");
          if (!n) throw InputError("unknown node '" + kv.substr(eq + 1) + "'");
          p[*v] = *n;
        }
        ans = evaluate(q, graph, p);
      } else {
        ans = evaluate_union(u, graph);
      }
      std::vector<Tuple> sorted(ans.begin(), ans.end());
      std::sort(sorted.begin(), sorted.end(), [&](const Tuple& a, const Tuple& b) {
        return tuple_json(a, graph) < tuple_json(b, graph);
      });
      json j{{"command", "eval"}, {"arity", u.arity()}, {"tuples", json::array()}};
      std::string text;
      for (const auto& t : sorted) {
        j["tuples"].push_back(tuple_json(t, graph));
        text += tuple_text(t, graph) + "\n";
      }
      emit(g, j, text);
      return sorted.empty() ? kNo : kYes;
    }

    if (*hom) {
      auto [a, b] = load_pair(from, to);
      const Crpq& s = single(a, "--from");
      const Crpq& t = single(b, "--to");
      auto h = strong ? find_strong_onto_hom(s, t) : find_hom(s, t);
      json j{{"command", "hom"}, {"found", h.has_value()}, {"strong_onto", strong}};
      std::string text = h ? "found\n" : "none\n";
      if (h) {
        json map = json::object();
        for (VarId v = 0; v < s.num_vars(); ++v) {
          map[s.vars[v]] = t.vars[h->map[v]];
          text += s.vars[v] + " -> " + t.vars[h->map[v]] + "\n";
        }
        j["map"] = map;
      }
      emit(g, j, text);
      return h ? kYes : kNo;
    }

    if (*contain) {
      auto [a, b] = load_pair(left, right);
      auto v = contained(a, b, mode_of(mode), max_len);
      json j{{"command", "contain"}};
      j["verdict"] = verdict_json(v, *a.alphabet);
      emit(g, j, verdict_text(v, *a.alphabet));
      return verdict_exit(v);
    }

    if (*equiv) {
      auto [a, b] = load_pair(left, right);
      auto v = equivalent(a, b, mode_of(mode), max_len);
      json j{{"command", "equiv"},
             {"equivalent", v.equivalent()},
             {"complete", v.complete()},
             {"forward", verdict_json(v.forward, *a.alphabet)},
             {"backward", verdict_json(v.backward, *a.alphabet)}};
      std::string text = std::string(v.equivalent() ? "equivalent" : "not equivalent") +
                         (v.complete() ? "" : " (up to bound)") + "\n";
      text += "left ⊑ right: " + verdict_text(v.forward, *a.alphabet);
      text += "right ⊑ left: " + verdict_text(v.backward, *a.alphabet);
      emit(g, j, text);
      if (!v.equivalent()) return kNo;
      return v.complete() ? kYes : kBounded;
    }

    if (*falsify) {
      auto [a, b] = load_pair(left, right);
      auto d = falsify_equivalence(a, b, trials, db_size, g.seed);
      json j{{"command", "falsify"}, {"found", d.has_value()}, {"trials", trials}, {"seed", g.seed}};
      std::string text = "no disagreement in " + std::to_string(trials) + " trials\n";
      if (d) {
        j["trial"] = d->trial;
        j["db"] = db_json(d->db);
        j["tuple"] = tuple_json(d->tuple, d->db);
        j["answer_of"] = d->in_left ? "left" : "right";
        text = "disagreement in trial " + std::to_string(d->trial) + ": " + tuple_text(d->tuple, d->db) +
               " is an answer of the " + (d->in_left ? "left" : "right") + " query only\ndatabase: " +
               save_graphdb(d->db) + "\n";
      }
      emit(g, j, text);
      return d ? kNo : kBounded;
    }

    if (*expand_cmd) {
      Ucrpq u = load_query(query);
      json list = json::array();
      std::string text;
      std::size_t n = 0;
      for (std::size_t d = 0; d < u.disjuncts.size(); ++d) {
        bool more = true;
        for_each_expansion(u.disjuncts[d], max_len, [&](const Expansion& e) {
          ++n;
          list.push_back({{"disjunct", d}, {"words", words_json(e.words, *u.alphabet)}, {"atoms", e.cq.num_atoms()}});
          text += std::to_string(d) + ": " + words_text(e.words, *u.alphabet) + "\n";
          more = limit == 0 || n < limit;
          return more;
        });
        if (!more) break;
      }
      emit(g, json{{"command", "expand"}, {"count", n}, {"expansions", list}}, text);
      return kYes;
    }

    if (*contract_cmd) {
      Ucrpq u = load_query(query);
      Ucrpq c = u;
      json atoms = json::array();
      for (auto& d : c.disjuncts) {
        d = contract(d);
        atoms.push_back(d.num_atoms());
      }
      emit(g, json{{"command", "contract"}, {"atoms", atoms}, {"query", to_text(c)}}, to_text(c));
      return kYes;
    }

    if (*segs) {
      Ucrpq u = load_query(query);
      json list = json::array();
      std::string text;
      for (std::size_t d = 0; d < u.disjuncts.size(); ++d) {
        const Crpq& q = u.disjuncts[d];
        auto s = segments(q);
        Multigraph sg = segment_graph(q);
        json segj = json::array();
        if (!dot) text += "disjunct " + std::to_string(d) + ": " + std::to_string(s.size()) + " segments\n";
        for (const auto& seg : s) {
          json atoms = json::array();
          std::string path;
          for (std::size_t a : seg.atoms) {
            atoms.push_back(a);
            path += (path.empty() ? "" : " . ") + q.atoms[a].label->key;
          }
          segj.push_back({{"start", q.vars[seg.start]}, {"end", q.vars[seg.end]}, {"cyclic", seg.cyclic}, {"atoms", atoms}});
          if (!dot)
            text += "  " + q.vars[seg.start] + " -[" + path + "]-> " + q.vars[seg.end] + (seg.cyclic ? " (cycle)" : "") + "\n";
        }
        if (dot) text += dot_of(sg);
        json edges = json::array();
        for (const auto& e : sg.edges) edges.push_back({e.source, e.target});
        list.push_back({{"segments", segj}, {"graph", {{"vertices", sg.names}, {"edges", edges}}}});
      }
      emit(g, json{{"command", "segments"}, {"disjuncts", list}}, text);
      return kYes;
    }

    if (*redundant) {
      Ucrpq u = load_query(query);
      const Crpq& q = single(u, "--query");
      auto r = remove_redundant_atoms(q, mode_of(mode), max_len);
      json steps = json::array();
      std::string text = to_text(as_union(r.query));
      for (const auto& s : r.steps) {
        steps.push_back({{"atom", s.atom}, {"label", s.label}, {"removed", s.removed}, {"verdict", verdict_json(s.verdict, *u.alphabet)}});
        text += "# atom " + std::to_string(s.atom) + " [" + s.label + "]: " + (s.removed ? "removed" : "kept") + " (" +
                to_string(s.verdict.status) + ")\n";
      }
      emit(g, json{{"command", "redundant"}, {"complete", r.complete}, {"atoms", r.query.num_atoms()},
                   {"query", to_text(as_union(r.query))}, {"steps", steps}},
           text);
      return r.complete ? kYes : kBounded;
    }

    if (*certify) {
      Ucrpq u = load_query(query);
      std::vector<Word> ws;
      for (const auto& w : split(words, ',')) ws.push_back(u.alphabet->parse_word(w));
      auto c = check_strong_minimality(u, disjunct, ws, hom_bound);
      bool refuted = c.status == Certificate::Status::Refuted;
      json j{{"command", "certify"},
             {"status", refuted ? "refuted" : "verified-up-to"},
             {"bound", c.bound},
             {"checked", c.checked},
             {"segment_count", c.segment_count},
             {"core_atoms", c.core.num_atoms()}};
      std::string text = std::string(refuted ? "refuted" : "verified up to bound " + std::to_string(c.bound)) + " (" +
                         std::to_string(c.checked) + " expansions checked)\n";
      text += "segment count of the core: " + std::to_string(c.segment_count) + "\n";
      if (c.witness) {
        j["witness"] = {{"disjunct", c.witness_disjunct}, {"words", words_json(c.witness->words, *u.alphabet)}};
        text += "witness: disjunct " + std::to_string(c.witness_disjunct) + ", words " +
                words_text(c.witness->words, *u.alphabet) + "\n";
      }
      emit(g, j, text);
      return refuted ? kNo : kBounded;
    }

    if (*approx) {
      Ucrpq u = load_query(query);
      std::size_t mm = m ? *m : default_refinement_length(u, k);
      ApproximationStats st;
      Ucrpq d = under_approximation(u, k, mm, true, kDefaultApproxBudget, &st);
      std::string text = to_text(d);
      if (!out.empty()) write_output(out, text);
      json j{{"command", "approx"}, {"k", k}, {"m", mm}, {"disjuncts", d.disjuncts.size()},
             {"emitted", st.emitted}, {"distinct", st.distinct}, {"query", text}};
      if (out.empty() || g.json)
        emit(g, j, text);
      else
        std::cout << d.disjuncts.size() << " disjuncts written to " << out << "\n";
      return kYes;
    }

    if (*minimize) {
      Ucrpq u = load_query(query);
      if (crpq_flag) {
        const Crpq& q = single(u, "--query");
        PoolConfig pc;
        pc.max_len = max_len;
        pc.seed = g.seed;
        auto r = minimize_crpq_bruteforce(q, k, pc);
        json j{{"command", "minimize"}, {"method", "pool"}, {"k", k}, {"found", r.query.has_value()},
               {"complete", r.complete}, {"pool_size", r.pool_size}, {"candidates", r.candidates}};
        std::string text;
        if (r.query) {
          j["query"] = to_text(as_union(*r.query));
          text = to_text(as_union(*r.query));
          if (!r.complete) text += "# equivalent up to the word bound\n";
        } else {
          text = "none (pool-relative)\n";
        }
        emit(g, j, text);
        return r.query && r.complete ? kYes : kBounded;
      }
      auto r = minimize_ucrpq(u, k, mode_of(mode), m, max_len);
      json j{{"command", "minimize"}, {"method", "approximation"}, {"k", k}, {"m", r.m},
             {"verdict", to_string(r.verdict)}, {"check", verdict_json(r.check, *u.alphabet)}};
      std::string text = to_string(r.verdict) + " (m = " + std::to_string(r.m) + ")\n";
      if (r.verdict == MinimizeResult::Verdict::Minimizable) {
        j["query"] = to_text(r.delta);
        text += to_text(r.delta);
      } else if (r.verdict == MinimizeResult::Verdict::NotMinimizable) {
        text += verdict_text(r.check, *u.alphabet);
      }
      emit(g, j, text);
      switch (r.verdict) {
        case MinimizeResult::Verdict::Minimizable: return kYes;
        case MinimizeResult::Verdict::NotMinimizable: return kNo;
        case MinimizeResult::Verdict::NotWithinBounds: return kBounded;
      }
    }

    if (*enc) {
      TreePattern t = parse_tree_pattern(read_file(in));
      std::string text = to_text(as_union(encode(t)));
      if (!out.empty()) write_output(out, text);
      if (out.empty() || g.json) emit(g, json{{"command", "encode-tp"}, {"query", text}}, text);
      return kYes;
    }

    if (*dec) {
      Ucrpq u = parse_query(read_file(in), {std::string(kMarkerLetter)});
      auto t = u.disjuncts.size() == 1 ? decode(u.disjuncts[0]) : std::nullopt;
      json j{{"command", "decode-tp"}, {"in_image", t.has_value()}};
      std::string text = t ? to_text(*t) : "not in the image of the encoding\n";
      if (t) j["tree"] = to_text(*t);
      if (t && !out.empty()) write_output(out, text);
      if (out.empty() || g.json || !t) emit(g, j, text);
      return t ? kYes : kNo;
    }
  } catch (const ResourceError& e) {
    if (g.json)
      std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    else
      std::cerr << "resource limit: " << e.what() << "\n";
    return kResource;
  } catch (const Error& e) {
    if (g.json)
      std::cerr << json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
    else
      std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
  return kUsage;
}
