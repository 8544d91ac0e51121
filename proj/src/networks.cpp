#include "textnet/networks.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "textnet/error.hpp"
#include "textnet/io.hpp"

namespace textnet {

WeightedNetwork::WeightedNetwork(std::vector<NodeInfo> nodes)
    : nodes_(std::move(nodes)), adjacency_(nodes_.size() * nodes_.size(), 0.0) {
  std::set<std::string> seen;
  for (const auto& n : nodes_) {
    if (!seen.insert(n.id).second) throw DataError("duplicate node id '" + n.id + "'");
  }
}

std::optional<std::size_t> WeightedNetwork::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  return std::nullopt;
}

void WeightedNetwork::set_weight(std::size_t i, std::size_t j, double w) {
  if (i == j) throw DataError("self-loop on node '" + nodes_[i].id + "'");
  if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("edge weights must be finite and nonnegative");
  adjacency_[i * nodes_.size() + j] = w;
  adjacency_[j * nodes_.size() + i] = w;
}

std::size_t WeightedNetwork::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) count += weight(i, j) > 0.0 ? 1 : 0;
  }
  return count;
}

double WeightedNetwork::total_weight() const {
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) total += weight(i, j);
  }
  return total;
}

WeightedNetwork WeightedNetwork::subgraph(std::span<const std::size_t> keep) const {
  std::vector<NodeInfo> nodes;
  nodes.reserve(keep.size());
  for (auto k : keep) nodes.push_back(nodes_.at(k));
  WeightedNetwork sub(std::move(nodes));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = a + 1; b < keep.size(); ++b) {
      const double w = weight(keep[a], keep[b]);
      if (w > 0.0) sub.set_weight(a, b, w);
    }
  }
  return sub;
}

WeightedNetwork WeightedNetwork::normalized_for_display() const {
  WeightedNetwork out = *this;
  const double peak = adjacency_.empty() ? 0.0 : *std::max_element(adjacency_.begin(), adjacency_.end());
  if (peak > 0.0) {
    for (double& w : out.adjacency_) w /= peak;
  }
  return out;
}

std::vector<std::string> WeightedNetwork::attribute_keys() const {
  std::set<std::string> keys;
  for (const auto& n : nodes_) {
    for (const auto& [k, _] : n.attributes) keys.insert(k);
  }
  return {keys.begin(), keys.end()};
}

bool operator==(const WeightedNetwork& a, const WeightedNetwork& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.nodes_[i].id != b.nodes_[i].id || a.nodes_[i].attributes != b.nodes_[i].attributes) return false;
  }
  return a.adjacency_ == b.adjacency_;
}

WeightedNetwork build_article_network(const SimilarityMatrix& m, std::span<const Article> articles,
                                      double min_weight) {
  if (min_weight < 0.0) throw ConfigError("min_weight must be >= 0");
  std::vector<NodeInfo> nodes;
  nodes.reserve(m.size());
  for (const auto& id : m.node_ids()) {
    auto it = std::find_if(articles.begin(), articles.end(), [&](const Article& a) { return a.id == id; });
    if (it == articles.end()) throw DataError("similarity matrix id '" + id + "' is not a known article");
    NodeInfo node{id, {{"domain", it->domain}}};
    if (it->bias_label) node.attributes["bias_label"] = *it->bias_label;
    nodes.push_back(std::move(node));
  }
  WeightedNetwork net(std::move(nodes));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = i + 1; j < m.size(); ++j) {
      const double w = m.at(i, j);
      if (w > min_weight) net.set_weight(i, j, w);
    }
  }
  return net;
}

MembershipMatrix::MembershipMatrix(std::span<const std::pair<std::string, std::string>> domain_article) {
  std::set<std::string> domain_set;
  for (const auto& [d, a] : domain_article) {
    if (std::find(articles_.begin(), articles_.end(), a) != articles_.end()) {
      throw DataError("article '" + a + "' belongs to more than one domain");
    }
    articles_.push_back(a);
    domain_set.insert(d);
  }
  domains_.assign(domain_set.begin(), domain_set.end());
  sizes_.assign(domains_.size(), 0);
  domain_of_.reserve(articles_.size());
  for (const auto& [d, _] : domain_article) {
    const auto k = static_cast<std::size_t>(std::lower_bound(domains_.begin(), domains_.end(), d) - domains_.begin());
    domain_of_.push_back(k);
    ++sizes_[k];
  }
  values_.assign(domains_.size() * articles_.size(), 0.0);
  for (std::size_t a = 0; a < articles_.size(); ++a) {
    const std::size_t d = domain_of_[a];
    values_[d * articles_.size() + a] = 1.0 / static_cast<double>(sizes_[d]);
  }
}

MembershipMatrix MembershipMatrix::from_network(const WeightedNetwork& articles) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& n : articles.nodes()) {
    const std::string* d = n.attribute("domain");
    if (d == nullptr || d->empty()) throw DataError("article node '" + n.id + "' has no domain attribute");
    pairs.emplace_back(*d, n.id);
  }
  return MembershipMatrix(pairs);
}

namespace {

struct Dense {
  std::size_t rows = 0, cols = 0;
  std::vector<double> v;

  Dense(std::size_t r, std::size_t c) : rows(r), cols(c), v(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return v[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return v[i * cols + j]; }
};

Dense multiply(const Dense& a, const Dense& b) {
  Dense c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Dense transpose(const Dense& a) {
  Dense t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  }
  return t;
}

}  // namespace

DomainNetwork induce_domain_network(const WeightedNetwork& s, const MembershipMatrix& membership,
                                    const std::map<std::string, std::string>& domain_labels) {
  const std::size_t n = s.size();
  const std::size_t d = membership.domains().size();
  // Column order of the membership may differ from the node order of s.
  std::vector<std::size_t> column_of_node(n, SIZE_MAX);
  for (std::size_t c = 0; c < membership.articles().size(); ++c) {
    auto idx = s.index_of(membership.articles()[c]);
    if (!idx) throw DataError("membership article '" + membership.articles()[c] + "' is not in the network");
    column_of_node[*idx] = c;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (column_of_node[i] == SIZE_MAX) throw DataError("article '" + s.node(i).id + "' is not covered by a domain");
  }

  Dense root(d, n);
  for (std::size_t k = 0; k < d; ++k) {
    for (std::size_t i = 0; i < n; ++i) root(k, i) = std::sqrt(membership.value(k, column_of_node[i]));
  }
  Dense adj(n, n);
  adj.v = s.adjacency();
  const Dense product = multiply(multiply(root, adj), transpose(root));

  std::vector<NodeInfo> nodes;
  nodes.reserve(d);
  for (const auto& dom : membership.domains()) {
    NodeInfo node{dom, {}};
    if (auto it = domain_labels.find(dom); it != domain_labels.end()) node.attributes["bias_label"] = it->second;
    nodes.push_back(std::move(node));
  }
  DomainNetwork out{WeightedNetwork(std::move(nodes)), std::vector<double>(d, 0.0)};
  for (std::size_t a = 0; a < d; ++a) {
    out.self_similarity[a] = product(a, a);
    for (std::size_t b = a + 1; b < d; ++b) {
      // Symmetrise against rounding in the two triangles.
      const double w = 0.5 * (product(a, b) + product(b, a));
      if (w > 0.0) out.network.set_weight(a, b, w);
    }
  }
  return out;
}

std::map<std::string, std::string> domain_labels(std::span<const Article> articles) {
  std::map<std::string, std::string> labels;
  for (const auto& a : articles) {
    if (!a.bias_label) continue;
    auto [it, inserted] = labels.emplace(a.domain, *a.bias_label);
    if (!inserted && it->second != *a.bias_label) {
      throw DataError("domain '" + a.domain + "' has conflicting bias labels '" + it->second + "' and '" +
                      *a.bias_label + "'");
    }
  }
  return labels;
}

namespace {

std::vector<std::size_t> order_by_id(const WeightedNetwork& n) {
  std::vector<std::size_t> order(n.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return n.node(a).id < n.node(b).id; });
  return order;
}

struct EdgeRef {
  std::size_t lo, hi;
};

std::vector<EdgeRef> sorted_edges(const WeightedNetwork& n) {
  std::vector<EdgeRef> edges;
  for (std::size_t i = 0; i < n.size(); ++i) {
    for (std::size_t j = i + 1; j < n.size(); ++j) {
      if (n.weight(i, j) <= 0.0) continue;
      if (n.node(i).id < n.node(j).id) {
        edges.push_back({i, j});
      } else {
        edges.push_back({j, i});
      }
    }
  }
  std::sort(edges.begin(), edges.end(), [&](const EdgeRef& a, const EdgeRef& b) {
    const auto& ai = n.node(a.lo).id;
    const auto& bi = n.node(b.lo).id;
    if (ai != bi) return ai < bi;
    return n.node(a.hi).id < n.node(b.hi).id;
  });
  return edges;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string to_graphml(const WeightedNetwork& n) {
  const auto keys = n.attribute_keys();
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  for (const auto& k : keys) {
    out += "  <key id=\"n_" + xml_escape(k) + "\" for=\"node\" attr.name=\"" + xml_escape(k) +
           "\" attr.type=\"string\"/>\n";
  }
  out += "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
  out += "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  for (auto i : order_by_id(n)) {
    const auto& node = n.node(i);
    out += "    <node id=\"" + xml_escape(node.id) + "\">";
    for (const auto& k : keys) {
      const std::string* v = node.attribute(k);
      out += "<data key=\"n_" + xml_escape(k) + "\">" + xml_escape(v ? *v : "") + "</data>";
    }
    out += "</node>\n";
  }
  for (const auto& e : sorted_edges(n)) {
    out += "    <edge source=\"" + xml_escape(n.node(e.lo).id) + "\" target=\"" + xml_escape(n.node(e.hi).id) +
           "\"><data key=\"weight\">" + fmt::format("{:.17g}", n.weight(e.lo, e.hi)) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

std::string to_edge_csv(const WeightedNetwork& n) {
  std::string out = "source,target,weight\n";
  for (const auto& e : sorted_edges(n)) {
    out += io::csv_field(n.node(e.lo).id) + "," + io::csv_field(n.node(e.hi).id) + "," +
           io::fixed6(n.weight(e.lo, e.hi)) + "\n";
  }
  return out;
}

std::string to_node_csv(const WeightedNetwork& n) {
  const auto keys = n.attribute_keys();
  std::string out = "id";
  for (const auto& k : keys) out += "," + io::csv_field(k);
  out += "\n";
  for (auto i : order_by_id(n)) {
    out += io::csv_field(n.node(i).id);
    for (const auto& k : keys) {
      const std::string* v = n.node(i).attribute(k);
      out += "," + io::csv_field(v ? *v : "");
    }
    out += "\n";
  }
  return out;
}

std::vector<std::filesystem::path> export_network(const WeightedNetwork& n, NetworkFormat format,
                                                  const std::filesystem::path& path) {
  if (format == NetworkFormat::kGraphml) {
    io::write_file(path, to_graphml(n));
    return {path};
  }
  auto nodes_path = path.parent_path() / (path.stem().string() + "_nodes.csv");
  io::write_file(path, to_edge_csv(n));
  io::write_file(nodes_path, to_node_csv(n));
  return {path, nodes_path};
}

namespace {

// Just enough XML for GraphML: elements, attributes, character data, entities.
struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::string text;
  std::vector<XmlElement> children;
};

class XmlReader {
 public:
  explicit XmlReader(std::string_view s) : s_(s) {}

  XmlElement parse_document() {
    skip_prolog();
    XmlElement root = parse_element();
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("graphml: " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool starts_with(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

  void skip_until(std::string_view end) {
    auto e = s_.find(end, pos_);
    if (e == std::string_view::npos) fail("unterminated construct");
    pos_ = e + end.size();
  }

  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts_with("<?")) {
        skip_until("?>");
      } else if (starts_with("<!--")) {
        skip_until("-->");
      } else if (starts_with("<!")) {
        skip_until(">");
      } else {
        return;
      }
    }
  }

  void skip_prolog() { skip_misc(); }

  static std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '&') {
        out += s[i];
        continue;
      }
      auto semi = s.find(';', i);
      if (semi == std::string_view::npos) {
        out += s[i];
        continue;
      }
      std::string_view ent = s.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (!ent.empty() && ent[0] == '#') {
        const bool hex = ent.size() > 1 && (ent[1] == 'x' || ent[1] == 'X');
        const auto cp = std::stoul(std::string(ent.substr(hex ? 2 : 1)), nullptr, hex ? 16 : 10);
        out += io::utf8_encode(static_cast<char32_t>(cp));
      } else {
        out += s.substr(i, semi - i + 1);
      }
      i = semi;
    }
    return out;
  }

  std::string parse_name() {
    std::size_t b = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '>' &&
           s_[pos_] != '/' && s_[pos_] != '=') {
      ++pos_;
    }
    if (b == pos_) fail("expected a name");
    return std::string(s_.substr(b, pos_ - b));
  }

  XmlElement parse_element() {
    if (!starts_with("<")) fail("expected '<'");
    ++pos_;
    XmlElement el;
    el.name = parse_name();
    for (;;) {
      skip_ws();
      if (starts_with("/>")) {
        pos_ += 2;
        return el;
      }
      if (starts_with(">")) {
        ++pos_;
        break;
      }
      std::string attr = parse_name();
      skip_ws();
      if (!starts_with("=")) fail("expected '=' after attribute " + attr);
      ++pos_;
      skip_ws();
      if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail("expected quoted attribute value");
      const char q = s_[pos_++];
      auto e = s_.find(q, pos_);
      if (e == std::string_view::npos) fail("unterminated attribute value");
      el.attrs[attr] = unescape(s_.substr(pos_, e - pos_));
      pos_ = e + 1;
    }
    for (;;) {
      auto lt = s_.find('<', pos_);
      if (lt == std::string_view::npos) fail("unterminated element " + el.name);
      el.text += unescape(s_.substr(pos_, lt - pos_));
      pos_ = lt;
      if (starts_with("</")) {
        pos_ += 2;
        std::string closing = parse_name();
        if (closing != el.name) fail("mismatched </" + closing + "> for <" + el.name + ">");
        skip_ws();
        if (!starts_with(">")) fail("expected '>'");
        ++pos_;
        return el;
      }
      if (starts_with("<!--")) {
        skip_until("-->");
        continue;
      }
      if (starts_with("<![CDATA[")) {
        pos_ += 9;
        auto e = s_.find("]]>", pos_);
        if (e == std::string_view::npos) fail("unterminated CDATA");
        el.text += s_.substr(pos_, e - pos_);
        pos_ = e + 3;
        continue;
      }
      if (starts_with("<?")) {
        skip_until("?>");
        continue;
      }
      el.children.push_back(parse_element());
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

const XmlElement* first_child(const XmlElement& el, std::string_view name) {
  for (const auto& c : el.children) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

WeightedNetwork parse_graphml(std::string_view xml) {
  const XmlElement root = XmlReader(xml).parse_document();
  if (root.name != "graphml") throw DataError("graphml: root element is <" + root.name + ">");
  std::map<std::string, std::string> node_keys;  // key id → attr name
  std::string weight_key;
  for (const auto& c : root.children) {
    if (c.name != "key") continue;
    const auto id = c.attrs.count("id") ? c.attrs.at("id") : "";
    const auto name = c.attrs.count("attr.name") ? c.attrs.at("attr.name") : id;
    const auto domain = c.attrs.count("for") ? c.attrs.at("for") : "all";
    if (domain == "edge" && name == "weight") weight_key = id;
    if (domain == "node" || domain == "all") node_keys[id] = name;
  }
  const XmlElement* graph = first_child(root, "graph");
  if (graph == nullptr) throw DataError("graphml: no <graph> element");
  if (auto it = graph->attrs.find("edgedefault"); it != graph->attrs.end() && it->second == "directed") {
    throw DataError("graphml: directed graphs are not supported");
  }

  std::vector<NodeInfo> nodes;
  for (const auto& c : graph->children) {
    if (c.name != "node") continue;
    if (!c.attrs.count("id")) throw DataError("graphml: node without id");
    NodeInfo node{c.attrs.at("id"), {}};
    for (const auto& d : c.children) {
      if (d.name != "data") continue;
      auto key = d.attrs.count("key") ? d.attrs.at("key") : "";
      auto it = node_keys.find(key);
      const std::string name = it == node_keys.end() ? key : it->second;
      std::string value = io::trim(d.text);
      if (!value.empty()) node.attributes[name] = std::move(value);
    }
    nodes.push_back(std::move(node));
  }
  WeightedNetwork net(std::move(nodes));
  for (const auto& c : graph->children) {
    if (c.name != "edge") continue;
    if (!c.attrs.count("source") || !c.attrs.count("target")) throw DataError("graphml: edge without endpoints");
    auto s = net.index_of(c.attrs.at("source"));
    auto t = net.index_of(c.attrs.at("target"));
    if (!s || !t) throw DataError("graphml: edge refers to an unknown node");
    double w = 1.0;
    for (const auto& d : c.children) {
      if (d.name == "data" && d.attrs.count("key") && d.attrs.at("key") == weight_key) {
        try {
          w = std::stod(io::trim(d.text));
        } catch (const std::logic_error&) {
          throw DataError("graphml: bad edge weight '" + d.text + "'");
        }
      }
    }
    if (*s == *t) throw DataError("graphml: self-loop on '" + c.attrs.at("source") + "'");
    net.set_weight(*s, *t, w);
  }
  return net;
}

WeightedNetwork load_graphml(const std::filesystem::path& path) { return parse_graphml(io::read_file(path)); }

}  // namespace textnet
