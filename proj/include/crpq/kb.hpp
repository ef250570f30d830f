#ifndef CRPQ_KB_HPP
#define CRPQ_KB_HPP

#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "crpq/matrix.hpp"
#include "crpq/nfa.hpp"

namespace crpq {

// Edge-labeled directed graph with named nodes.
struct KnowledgeBase {
    struct Edge {
        int src;
        Label label;
        int dst;
    };

    std::vector<std::string> node_names;
    std::vector<Edge> edges;

    std::map<std::string, int> name_index;  // kept in sync by add_node

    int add_node(const std::string& name) {
        auto it = name_index.find(name);
        if (it != name_index.end()) return it->second;
        int id = static_cast<int>(node_names.size());
        node_names.push_back(name);
        name_index.emplace(name, id);
        return id;
    }

    int node(const std::string& name) const {
        auto it = name_index.find(name);
        if (it == name_index.end()) throw std::out_of_range("unknown node: " + name);
        return it->second;
    }

    void add_edge(int src, const Label& label, int dst) { edges.push_back(Edge{src, label, dst}); }
    void add_edge(const std::string& src, const Label& label, const std::string& dst) {
        add_edge(add_node(src), label, add_node(dst));
    }

    std::size_t num_nodes() const { return node_names.size(); }

    // Outgoing adjacency grouped by label, built on demand by callers that
    // need repeated traversal.
    std::vector<std::map<Label, std::vector<int>>> out_adjacency() const {
        std::vector<std::map<Label, std::vector<int>>> adj(num_nodes());
        for (const Edge& e : edges) adj[e.src][e.label].push_back(e.dst);
        return adj;
    }
};

// A concrete directed path: nodes[i] --labels[i]--> nodes[i+1].
struct Path {
    std::vector<int> nodes;
    std::vector<Label> labels;
};

// Nodes reachable from `from` along a path spelling a word of the NFA's
// language.  Product BFS over (automaton state, graph node).
inline std::set<int> regular_reachable(const KnowledgeBase& kb, const Nfa& nfa, int from) {
    auto adj = kb.out_adjacency();
    std::set<std::pair<int, int>> seen;
    std::deque<std::pair<int, int>> queue;
    std::set<int> out;
    queue.emplace_back(0, from);
    seen.emplace(0, from);
    while (!queue.empty()) {
        auto [q, v] = queue.front();
        queue.pop_front();
        if (nfa.accepting[q]) out.insert(v);
        for (const auto& [lab, states] : nfa.delta[q]) {
            auto it = adj[v].find(lab);
            if (it == adj[v].end()) continue;
            for (int q2 : states)
                for (int v2 : it->second)
                    if (seen.emplace(q2, v2).second) queue.emplace_back(q2, v2);
        }
    }
    return out;
}

// Graph with power edges: an edge (src, word, count, dst) stands for `count`
// back-to-back copies of the simple path spelling `word`, i.e. a path of
// length |word| * count from src to dst with fresh interior nodes.
struct CompressedKb {
    struct PowerEdge {
        int src;
        std::vector<Label> word;
        BigUint count;
        int dst;
    };

    std::vector<std::string> node_names;
    std::vector<KnowledgeBase::Edge> edges;  // plain labeled edges
    std::vector<PowerEdge> power_edges;

    std::map<std::string, int> name_index;

    int add_node(const std::string& name) {
        auto it = name_index.find(name);
        if (it != name_index.end()) return it->second;
        int id = static_cast<int>(node_names.size());
        node_names.push_back(name);
        name_index.emplace(name, id);
        return id;
    }

    void add_edge(const std::string& src, const Label& label, const std::string& dst) {
        edges.push_back({add_node(src), label, add_node(dst)});
    }

    void add_power_edge(const std::string& src, std::vector<Label> word, BigUint count,
                        const std::string& dst) {
        if (word.empty()) throw std::invalid_argument("power edge needs a nonempty word");
        if (count == 0 && src != dst)
            throw std::invalid_argument("power edge with count 0 must have equal endpoints");
        power_edges.push_back({add_node(src), std::move(word), std::move(count), add_node(dst)});
    }
};

// Fully expands every power edge.  Throws when the expansion would exceed
// `max_total_edges` plain edges, since counts may be astronomically large.
inline KnowledgeBase expand(const CompressedKb& ckb, const BigUint& max_total_edges) {
    BigUint total = ckb.edges.size();
    for (const auto& pe : ckb.power_edges) total += pe.count * pe.word.size();
    if (total > max_total_edges) {
        std::ostringstream os;
        os << "expand: " << total << " edges exceed the cap of " << max_total_edges;
        throw std::length_error(os.str());
    }
    KnowledgeBase kb;
    for (const auto& name : ckb.node_names) kb.add_node(name);
    for (const auto& e : ckb.edges) kb.add_edge(e.src, e.label, e.dst);
    for (std::size_t i = 0; i < ckb.power_edges.size(); ++i) {
        const auto& pe = ckb.power_edges[i];
        if (pe.count == 0) continue;  // endpoints coincide; nothing to add
        int cur = pe.src;
        long steps_total = pe.count.convert_to<long>() * static_cast<long>(pe.word.size());
        long step = 0;
        for (BigUint c = 0; c < pe.count; ++c) {
            for (std::size_t k = 0; k < pe.word.size(); ++k) {
                ++step;
                int next;
                if (step == steps_total) {
                    next = pe.dst;
                } else {
                    next = kb.add_node("_p" + std::to_string(i) + "_" + std::to_string(step));
                }
                kb.add_edge(cur, pe.word[k], next);
                cur = next;
            }
        }
    }
    return kb;
}

// --- serialization ------------------------------------------------------

inline nlohmann::json kb_to_json(const KnowledgeBase& kb) {
    nlohmann::json j;
    j["nodes"] = kb.node_names;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& e : kb.edges)
        edges.push_back({kb.node_names[e.src], e.label, kb.node_names[e.dst]});
    return j;
}

inline KnowledgeBase kb_from_json(const nlohmann::json& j) {
    KnowledgeBase kb;
    if (j.contains("nodes"))
        for (const auto& n : j.at("nodes")) kb.add_node(n.get<std::string>());
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3)
            throw std::invalid_argument("KB edge must be a [src, label, dst] triple");
        kb.add_edge(e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<std::string>());
    }
    return kb;
}

// Tab-separated triples: src <TAB> label <TAB> dst, one edge per line.
inline KnowledgeBase kb_from_tsv(std::istream& in) {
    KnowledgeBase kb;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string src, label, dst, extra;
        if (!std::getline(fields, src, '\t') || !std::getline(fields, label, '\t') ||
            !std::getline(fields, dst, '\t') || src.empty() || label.empty() || dst.empty())
            throw std::invalid_argument("TSV line " + std::to_string(lineno) +
                                        " is not a src/label/dst triple");
        if (std::getline(fields, extra, '\t'))
            throw std::invalid_argument("TSV line " + std::to_string(lineno) + " has extra fields");
        kb.add_edge(src, label, dst);
    }
    return kb;
}

inline void kb_to_tsv(const KnowledgeBase& kb, std::ostream& out) {
    for (const auto& e : kb.edges)
        out << kb.node_names[e.src] << '\t' << e.label << '\t' << kb.node_names[e.dst] << '\n';
}

}  // namespace crpq

#endif  // CRPQ_KB_HPP
