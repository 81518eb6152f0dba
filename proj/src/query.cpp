#include "tkhist/query.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <charconv>
#include <map>
#include <set>

#include "tkhist/error.hpp"

namespace tkhist {

namespace {

enum class TokenType { kIdentifier, kNumber, kString, kSymbol, kEnd };

struct Token {
  TokenType type = TokenType::kEnd;
  std::string text;
  std::size_t offset = 0;
};

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto c = static_cast<unsigned char>(text[pos]);
    if (std::isspace(c)) {
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    if (std::isalpha(c) || c == '_') {
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        ++pos;
      }
      tokens.push_back({TokenType::kIdentifier, std::string(text.substr(start, pos - start)), start});
    } else if (std::isdigit(c) ||
               ((c == '-' || c == '.') && pos + 1 < text.size() &&
                (std::isdigit(static_cast<unsigned char>(text[pos + 1])) || text[pos + 1] == '.'))) {
      ++pos;
      while (pos < text.size()) {
        const auto d = static_cast<unsigned char>(text[pos]);
        if (std::isdigit(d) || d == '.') {
          ++pos;
        } else if ((d == 'e' || d == 'E') && pos + 1 < text.size()) {
          ++pos;
          if (text[pos] == '+' || text[pos] == '-') {
            ++pos;
          }
        } else {
          break;
        }
      }
      tokens.push_back({TokenType::kNumber, std::string(text.substr(start, pos - start)), start});
    } else if (c == '\'') {
      std::string value;
      ++pos;
      bool closed = false;
      while (pos < text.size()) {
        if (text[pos] == '\'') {
          if (pos + 1 < text.size() && text[pos + 1] == '\'') {
            value.push_back('\'');
            pos += 2;
            continue;
          }
          ++pos;
          closed = true;
          break;
        }
        value.push_back(text[pos++]);
      }
      if (!closed) {
        throw SyntaxError("unterminated string literal", start);
      }
      tokens.push_back({TokenType::kString, value, start});
    } else {
      static constexpr std::string_view kTwoChar[] = {"<=", ">=", "<>", "!="};
      const auto two = text.substr(pos, 2);
      if (std::find(std::begin(kTwoChar), std::end(kTwoChar), two) != std::end(kTwoChar)) {
        tokens.push_back({TokenType::kSymbol, std::string(two), start});
        pos += 2;
      } else if (std::string_view("(),.*;=<>").find(static_cast<char>(c)) != std::string_view::npos) {
        tokens.push_back({TokenType::kSymbol, std::string(1, static_cast<char>(c)), start});
        ++pos;
      } else {
        throw SyntaxError(std::string("unexpected character '") + static_cast<char>(c) + "'", start);
      }
    }
  }
  tokens.push_back({TokenType::kEnd, "", text.size()});
  return tokens;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> kKeywords = {"SELECT", "COUNT", "FROM",  "AS",  "WHERE", "AND",
                                                  "OR",     "NOT",   "BETWEEN", "IN", "JOIN",  "ON"};
  return kKeywords;
}

// One side of a comparison.
struct Operand {
  bool is_column = false;
  ColumnRef column;
  Literal literal;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Query parse() {
    Query query;
    expect_keyword("SELECT");
    expect_keyword("COUNT");
    expect_symbol("(");
    expect_symbol("*");
    expect_symbol(")");
    expect_keyword("FROM");
    parse_table(query);
    while (accept_symbol(",")) {
      parse_table(query);
    }
    if (peek_keyword("JOIN")) {
      throw SyntaxError("explicit JOIN syntax is not supported; use comma joins", peek().offset);
    }
    if (accept_keyword("WHERE")) {
      parse_condition(query);
      while (accept_keyword("AND")) {
        parse_condition(query);
      }
    }
    if (peek_keyword("OR")) {
      throw SyntaxError("unsupported feature: OR", peek().offset);
    }
    accept_symbol(";");
    if (peek().type != TokenType::kEnd) {
      throw SyntaxError("unexpected token '" + peek().text + "'", peek().offset);
    }
    return query;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool peek_keyword(std::string_view keyword) const {
    return peek().type == TokenType::kIdentifier && upper(peek().text) == keyword;
  }
  bool accept_keyword(std::string_view keyword) {
    if (peek_keyword(keyword)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_keyword(std::string_view keyword) {
    if (!accept_keyword(keyword)) {
      throw SyntaxError("expected " + std::string(keyword) + ", found '" + peek().text + "'", peek().offset);
    }
  }
  bool accept_symbol(std::string_view symbol) {
    if (peek().type == TokenType::kSymbol && peek().text == symbol) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect_symbol(std::string_view symbol) {
    if (!accept_symbol(symbol)) {
      throw SyntaxError("expected '" + std::string(symbol) + "', found '" + peek().text + "'", peek().offset);
    }
  }
  std::string expect_identifier(std::string_view what) {
    const auto& token = peek();
    if (token.type != TokenType::kIdentifier || keywords().contains(upper(token.text))) {
      throw SyntaxError("expected " + std::string(what) + ", found '" + token.text + "'", token.offset);
    }
    ++pos_;
    return token.text;
  }

  void parse_table(Query& query) {
    TableRef ref;
    ref.table = expect_identifier("table name");
    ref.alias = ref.table;
    if (accept_keyword("AS")) {
      ref.alias = expect_identifier("alias");
    } else if (peek().type == TokenType::kIdentifier && !keywords().contains(upper(peek().text))) {
      ref.alias = next().text;
    }
    if (query.find_alias(ref.alias) != nullptr) {
      throw SyntaxError("duplicate alias '" + ref.alias + "'", tokens_[pos_ - 1].offset);
    }
    query.tables.push_back(std::move(ref));
  }

  Literal parse_literal() {
    const auto& token = peek();
    if (token.type == TokenType::kNumber) {
      double value = 0.0;
      const auto result = std::from_chars(token.text.data(), token.text.data() + token.text.size(), value);
      if (result.ec != std::errc() || result.ptr != token.text.data() + token.text.size()) {
        throw SyntaxError("malformed number '" + token.text + "'", token.offset);
      }
      ++pos_;
      return Literal::number(value);
    }
    if (token.type == TokenType::kString) {
      ++pos_;
      return Literal::text(token.text);
    }
    throw SyntaxError("expected literal, found '" + token.text + "'", token.offset);
  }

  Operand parse_operand() {
    if (peek().type == TokenType::kIdentifier) {
      Operand operand;
      operand.is_column = true;
      const auto first = expect_identifier("column");
      if (accept_symbol(".")) {
        operand.column = ColumnRef{first, expect_identifier("column")};
      } else {
        operand.column = ColumnRef{"", first};
      }
      return operand;
    }
    Operand operand;
    operand.literal = parse_literal();
    return operand;
  }

  void parse_condition(Query& query) {
    if (peek_keyword("NOT") || (peek().type == TokenType::kSymbol && peek().text == "(")) {
      throw SyntaxError("unsupported feature: '" + peek().text + "' in condition", peek().offset);
    }
    const auto start = peek().offset;
    auto left = parse_operand();
    if (accept_keyword("BETWEEN")) {
      if (!left.is_column) {
        throw SyntaxError("BETWEEN needs a column on the left", start);
      }
      Predicate predicate{left.column, CompareOp::kBetween, {}};
      predicate.operands.push_back(parse_literal());
      expect_keyword("AND");
      predicate.operands.push_back(parse_literal());
      query.predicates.push_back(std::move(predicate));
      return;
    }
    if (accept_keyword("IN")) {
      if (!left.is_column) {
        throw SyntaxError("IN needs a column on the left", start);
      }
      Predicate predicate{left.column, CompareOp::kIn, {}};
      expect_symbol("(");
      predicate.operands.push_back(parse_literal());
      while (accept_symbol(",")) {
        predicate.operands.push_back(parse_literal());
      }
      expect_symbol(")");
      query.predicates.push_back(std::move(predicate));
      return;
    }
    const auto& op_token = peek();
    static const std::map<std::string, CompareOp> kOps = {{"=", CompareOp::kEq},  {"<", CompareOp::kLt},
                                                          {"<=", CompareOp::kLe}, {">", CompareOp::kGt},
                                                          {">=", CompareOp::kGe}};
    const auto op_it = kOps.find(op_token.text);
    if (op_token.type != TokenType::kSymbol || op_it == kOps.end()) {
      throw SyntaxError("expected comparison operator, found '" + op_token.text + "'", op_token.offset);
    }
    ++pos_;
    auto right = parse_operand();
    auto op = op_it->second;
    if (left.is_column && right.is_column) {
      if (op != CompareOp::kEq) {
        throw SyntaxError("unsupported feature: non-equality join condition", op_token.offset);
      }
      query.joins.push_back(JoinEdge{left.column, right.column});
      return;
    }
    if (!left.is_column && !right.is_column) {
      throw SyntaxError("comparison between two literals", start);
    }
    if (!left.is_column) {
      // literal op column: mirror the operator.
      std::swap(left, right);
      switch (op) {
        case CompareOp::kLt:
          op = CompareOp::kGt;
          break;
        case CompareOp::kLe:
          op = CompareOp::kGe;
          break;
        case CompareOp::kGt:
          op = CompareOp::kLt;
          break;
        case CompareOp::kGe:
          op = CompareOp::kLe;
          break;
        default:
          break;
      }
    }
    query.predicates.push_back(Predicate{left.column, op, {right.literal}});
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

const TableRef* Query::find_alias(std::string_view alias) const {
  const auto it = std::find_if(tables.begin(), tables.end(), [&](const TableRef& t) { return t.alias == alias; });
  return it == tables.end() ? nullptr : &*it;
}

const std::string& Query::table_of(std::string_view alias) const {
  const auto* ref = find_alias(alias);
  if (ref == nullptr) {
    throw Error("unknown alias '" + std::string(alias) + "'");
  }
  return ref->table;
}

ColumnRef Query::base_column(const ColumnRef& aliased) const {
  return ColumnRef{table_of(aliased.table), aliased.column};
}

Query parse_sql(std::string_view text) {
  Query query = Parser(text).parse();
  query.text = std::string(text);
  return query;
}

std::string to_sql(const Query& query) {
  std::string sql = "SELECT COUNT(*) FROM ";
  for (std::size_t i = 0; i < query.tables.size(); ++i) {
    if (i > 0) {
      sql += ", ";
    }
    sql += query.tables[i].table;
    if (query.tables[i].alias != query.tables[i].table) {
      sql += " AS " + query.tables[i].alias;
    }
  }
  std::vector<std::string> conditions;
  for (const auto& edge : query.joins) {
    conditions.push_back(edge.left.qualified() + " = " + edge.right.qualified());
  }
  for (const auto& predicate : query.predicates) {
    std::string condition = predicate.column.qualified() + " " + std::string(to_string(predicate.op)) + " ";
    if (predicate.op == CompareOp::kBetween) {
      condition += predicate.operands[0].to_sql() + " AND " + predicate.operands[1].to_sql();
    } else if (predicate.op == CompareOp::kIn) {
      condition += "(";
      for (std::size_t i = 0; i < predicate.operands.size(); ++i) {
        condition += (i > 0 ? ", " : "") + predicate.operands[i].to_sql();
      }
      condition += ")";
    } else {
      condition += predicate.operands[0].to_sql();
    }
    conditions.push_back(std::move(condition));
  }
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    sql += (i == 0 ? " WHERE " : " AND ") + conditions[i];
  }
  return sql;
}

void resolve_query(Query& query, const Schema& schema) {
  for (const auto& ref : query.tables) {
    if (schema.find_table(ref.table) == nullptr) {
      throw Error("unknown table '" + ref.table + "'");
    }
  }
  auto resolve = [&](ColumnRef& column) {
    if (column.table.empty()) {
      std::vector<std::string> candidates;
      for (const auto& ref : query.tables) {
        if (schema.table(ref.table).find_column(column.column) != nullptr) {
          candidates.push_back(ref.alias);
        }
      }
      if (candidates.empty()) {
        throw Error("unknown column '" + column.column + "'");
      }
      if (candidates.size() > 1) {
        throw Error("ambiguous column '" + column.column + "'");
      }
      column.table = candidates.front();
      return;
    }
    const auto* ref = query.find_alias(column.table);
    if (ref == nullptr) {
      throw Error("unknown table or alias '" + column.table + "'");
    }
    if (schema.table(ref->table).find_column(column.column) == nullptr) {
      throw Error("unknown column '" + column.qualified() + "'");
    }
  };
  for (auto& edge : query.joins) {
    resolve(edge.left);
    resolve(edge.right);
    edge = make_edge(edge.left, edge.right);
  }
  for (auto& predicate : query.predicates) {
    resolve(predicate.column);
    validate_predicate(predicate);
    const auto& def = *schema.table(query.table_of(predicate.column.table)).find_column(predicate.column.column);
    for (auto& literal : predicate.operands) {
      if (def.kind == ValueKind::kCategorical) {
        if (literal.is_number()) {
          literal = Literal::text(literal.to_sql());
        }
        if (predicate.op != CompareOp::kEq && predicate.op != CompareOp::kIn) {
          throw Error("range predicate on categorical column " + predicate.column.qualified());
        }
      } else if (!literal.is_number()) {
        throw Error("text literal compared with numeric column " + predicate.column.qualified());
      }
    }
  }
}

void validate_acyclic(const Query& query) {
  std::map<std::string, std::string> parent;
  for (const auto& ref : query.tables) {
    parent[ref.alias] = ref.alias;
  }
  auto find = [&](std::string alias) {
    while (parent.at(alias) != alias) {
      alias = parent.at(alias);
    }
    return alias;
  };
  for (const auto& edge : query.joins) {
    if (!parent.contains(edge.left.table) || !parent.contains(edge.right.table)) {
      throw Error("join edge references an undeclared alias");
    }
    const auto a = find(edge.left.table);
    const auto b = find(edge.right.table);
    if (a == b) {
      throw Error("cyclic join detected at " + edge.left.qualified() + " = " + edge.right.qualified());
    }
    parent[a] = b;
  }
}

std::vector<std::size_t> SubQueryPlan::groups_of(std::string_view alias) const {
  std::vector<std::size_t> result;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (member(g, alias) != nullptr) {
      result.push_back(g);
    }
  }
  return result;
}

const GroupMember* SubQueryPlan::member(std::size_t group, std::string_view alias) const {
  const auto& members = groups.at(group).members;
  const auto it = std::find_if(members.begin(), members.end(), [&](const GroupMember& m) { return m.alias == alias; });
  return it == members.end() ? nullptr : &*it;
}

SubQueryPlan decompose(const Query& query, const std::vector<KeyDomain>& domains) {
  auto domain_of = [&](const ColumnRef& aliased) -> const KeyDomain& {
    const auto base = query.base_column(aliased);
    for (const auto& domain : domains) {
      if (domain.has_member(base)) {
        return domain;
      }
    }
    throw Error("column " + base.qualified() + " is not a join key of any key domain");
  };

  // Union (alias, column) nodes along join edges; each component is one star group.
  std::map<GroupMember, GroupMember> parent;
  std::function<GroupMember(const GroupMember&)> find = [&](const GroupMember& node) {
    auto it = parent.try_emplace(node, node).first;
    if (it->second == node) {
      return node;
    }
    auto root = find(it->second);
    parent[node] = root;
    return root;
  };
  for (const auto& edge : query.joins) {
    const auto& left_domain = domain_of(edge.left);
    const auto& right_domain = domain_of(edge.right);
    if (left_domain.id != right_domain.id) {
      throw Error("join edge " + edge.left.qualified() + " = " + edge.right.qualified() +
                  " connects different key domains");
    }
    const GroupMember a{edge.left.table, edge.left.column};
    const GroupMember b{edge.right.table, edge.right.column};
    const auto root_a = find(a);
    const auto root_b = find(b);
    if (!(root_a == root_b)) {
      parent[std::max(root_a, root_b)] = std::min(root_a, root_b);
    }
  }
  std::map<GroupMember, StarGroup> by_root;
  for (std::size_t e = 0; e < query.joins.size(); ++e) {
    const auto& edge = query.joins[e];
    auto& group = by_root[find(GroupMember{edge.left.table, edge.left.column})];
    group.domain_id = domain_of(edge.left).id;
    group.edges.push_back(e);
    for (const auto& side : {edge.left, edge.right}) {
      GroupMember member{side.table, side.column};
      if (std::find(group.members.begin(), group.members.end(), member) == group.members.end()) {
        group.members.push_back(std::move(member));
      }
    }
  }
  SubQueryPlan plan;
  for (auto& [root, group] : by_root) {
    std::sort(group.members.begin(), group.members.end());
    for (std::size_t m = 1; m < group.members.size(); ++m) {
      if (group.members[m].alias == group.members[m - 1].alias) {
        throw Error("table '" + group.members[m].alias + "' joins key domain " + group.domain_id +
                    " through two columns; unsupported");
      }
    }
    plan.groups.push_back(std::move(group));
  }
  std::sort(plan.groups.begin(), plan.groups.end(), [](const StarGroup& a, const StarGroup& b) {
    std::vector<std::string> names_a;
    std::vector<std::string> names_b;
    for (const auto& m : a.members) {
      names_a.push_back(m.alias);
    }
    for (const auto& m : b.members) {
      names_b.push_back(m.alias);
    }
    return names_a != names_b ? names_a < names_b : a.domain_id < b.domain_id;
  });

  for (const auto& ref : query.tables) {
    plan.aliases.push_back(ref.alias);
  }
  std::sort(plan.aliases.begin(), plan.aliases.end());
  for (const auto& alias : plan.aliases) {
    const auto groups = plan.groups_of(alias);
    for (std::size_t g = 1; g < groups.size(); ++g) {
      plan.links.push_back(ChainLink{groups.front(), alias, groups[g]});
    }
  }

  // Groups plus bridge aliases must form one connected tree covering every alias.
  std::map<std::string, std::string> alias_parent;
  for (const auto& alias : plan.aliases) {
    alias_parent[alias] = alias;
  }
  std::function<std::string(const std::string&)> find_alias = [&](const std::string& alias) {
    const auto& p = alias_parent.at(alias);
    return p == alias ? alias : find_alias(p);
  };
  for (const auto& edge : query.joins) {
    alias_parent[find_alias(edge.left.table)] = find_alias(edge.right.table);
  }
  std::set<std::string> roots;
  for (const auto& alias : plan.aliases) {
    roots.insert(find_alias(alias));
  }
  if (roots.size() > 1) {
    throw Error("disconnected join graph: query tables form " + std::to_string(roots.size()) + " components");
  }
  return plan;
}

}  // namespace tkhist
