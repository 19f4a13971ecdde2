#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nullrepair/ast.hpp"
#include "nullrepair/core.hpp"
#include "nullrepair/lexer.hpp"

namespace nullrepair {

/// Recursive-descent parser for the supported source subset: classes, fields,
/// methods, constructors, if/else, return, throw, assignment, calls, field
/// access chains, ternary, `new`, literals. Lambdas and anonymous class
/// bodies are retained as opaque UNSUPPORTED nodes; loop-like statements are
/// consumed as opaque statements.
class Parser {
 public:
  Parser(std::string text, std::string path)
      : text_(std::move(text)), path_(std::move(path)) {
    Lexer lexer(text_);
    tokens_ = lexer.tokenize();
  }

  CompilationUnit parseUnit() {
    CompilationUnit unit;
    unit.path = path_;
    unit.text = text_;
    std::string currentPackage;
    while (!atEnd()) {
      if (peek().is("package")) {
        advance();
        currentPackage = parseDottedName();
        expect(";");
      } else if (peek().is("import")) {
        advance();
        std::string name = parseDottedName();
        if (peek().is("*")) {  // wildcard import
          advance();
          name += ".*";
        }
        expect(";");
        unit.imports.push_back(name);
      } else if (peek().is("class") || isClassStart()) {
        ClassDecl cls = parseClass();
        cls.packageName = currentPackage;
        unit.classes.push_back(std::move(cls));
      } else {
        fail("expected class or package declaration, found '" + peek().text + "'");
      }
    }
    return unit;
  }

 private:
  // --- token plumbing ---

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    if (i >= tokens_.size()) i = tokens_.size() - 1;
    return tokens_[i];
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  bool atEnd() const { return peek().kind == Token::Kind::End; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().col);
  }

  const Token& expect(std::string_view text) {
    if (!peek().is(text)) fail("expected '" + std::string(text) + "', found '" + peek().text + "'");
    return advance();
  }

  const Token& expectIdentifier() {
    if (peek().kind != Token::Kind::Identifier) fail("expected identifier, found '" + peek().text + "'");
    return advance();
  }

  bool isModifier(const Token& t) const {
    return t.is("public") || t.is("private") || t.is("protected") || t.is("static") ||
           t.is("final") || t.is("abstract") || t.is("transient") || t.is("volatile") ||
           t.is("native") || t.is("strictfp") || t.is("synchronized");
  }

  bool isClassStart() const {
    // annotations/modifiers followed by `class`
    std::size_t i = pos_;
    while (i < tokens_.size()) {
      const Token& t = tokens_[i];
      if (t.is("@")) {
        i += 2;  // '@' Name — dotted names advance further below
        while (i < tokens_.size() && tokens_[i].is(".")) i += 2;
        if (i < tokens_.size() && tokens_[i].is("(")) i = skipBalancedFrom(i);
      } else if (isModifier(t)) {
        ++i;
      } else {
        return t.is("class");
      }
    }
    return false;
  }

  // Returns index just past the balanced group opening at `i`.
  std::size_t skipBalancedFrom(std::size_t i) const {
    const std::string open = tokens_[i].text;
    const std::string close = open == "(" ? ")" : open == "{" ? "}" : "]";
    int depth = 0;
    while (i < tokens_.size() && tokens_[i].kind != Token::Kind::End) {
      if (tokens_[i].text == open) ++depth;
      if (tokens_[i].text == close && --depth == 0) return i + 1;
      ++i;
    }
    throw SyntaxError("unbalanced '" + open + "'", tokens_[i >= tokens_.size() ? tokens_.size() - 1 : i].line,
                      tokens_[i >= tokens_.size() ? tokens_.size() - 1 : i].col);
  }

  std::string parseDottedName() {
    std::string name = expectIdentifier().text;
    while (peek().is(".") && peek(1).kind == Token::Kind::Identifier) {
      advance();
      name += "." + expectIdentifier().text;
    }
    return name;
  }

  // --- declarations ---

  std::vector<AnnotationUse> parseAnnotations() {
    std::vector<AnnotationUse> out;
    while (peek().is("@")) {
      std::size_t start = peek().span.begin;
      advance();
      AnnotationUse a;
      a.name = parseDottedName();
      if (peek().is("(")) {
        std::size_t end = skipBalancedFrom(pos_);
        pos_ = end;
      }
      a.span = {start, tokens_[pos_ - 1].span.end};
      a.rendered = text_.substr(a.span.begin, a.span.end - a.span.begin);
      out.push_back(std::move(a));
    }
    return out;
  }

  std::vector<std::string> parseModifiers() {
    std::vector<std::string> mods;
    while (isModifier(peek())) mods.push_back(advance().text);
    return mods;
  }

  TypeRef parseType() {
    TypeRef type;
    std::size_t start = peek().span.begin;
    if (peek().kind == Token::Kind::Keyword && isPrimitiveOrVoidName(peek().text)) {
      type.name = advance().text;
      type.primitiveOrVoid = true;
    } else {
      type.name = parseDottedName();
      if (peek().is("<")) skipTypeArguments();
    }
    type.span = {start, tokens_[pos_ - 1].span.end};
    type.rendered = text_.substr(type.span.begin, type.span.length());
    return type;
  }

  void skipTypeArguments() {
    // tokens are single '<' '>' so nesting is a simple depth count
    int depth = 0;
    while (!atEnd()) {
      if (peek().is("<")) ++depth;
      if (peek().is(">") && --depth == 0) {
        advance();
        return;
      }
      advance();
    }
    fail("unbalanced type arguments");
  }

  ClassDecl parseClass() {
    ClassDecl cls;
    std::size_t start = peek().span.begin;
    parseAnnotations();  // class-level annotations carry no nullness meaning here
    cls.modifiers = parseModifiers();
    expect("class");
    cls.name = expectIdentifier().text;
    if (peek().is("<")) skipTypeArguments();
    if (peek().is("extends")) {
      advance();
      parseType();
    }
    if (peek().is("implements")) {
      advance();
      parseType();
      while (peek().is(",")) {
        advance();
        parseType();
      }
    }
    expect("{");
    while (!peek().is("}")) {
      if (atEnd()) fail("unterminated class body");
      parseMember(cls);
    }
    const Token& close = expect("}");
    cls.span = {start, close.span.end};
    return cls;
  }

  void parseMember(ClassDecl& cls) {
    std::size_t start = peek().span.begin;
    std::vector<AnnotationUse> annotations = parseAnnotations();
    std::vector<std::string> modifiers = parseModifiers();

    // Constructor: identifier matching the class name, then '('.
    if (peek().kind == Token::Kind::Identifier && peek().text == cls.name && peek(1).is("(")) {
      MethodDecl m;
      m.annotations = std::move(annotations);
      m.modifiers = std::move(modifiers);
      m.isConstructor = true;
      m.name = expectIdentifier().text;
      parseMethodRest(m, start);
      cls.methods.push_back(std::move(m));
      return;
    }

    TypeRef type = parseType();
    std::string name = expectIdentifier().text;
    if (peek().is("(")) {
      MethodDecl m;
      m.annotations = std::move(annotations);
      m.modifiers = std::move(modifiers);
      m.returnType = std::move(type);
      m.name = std::move(name);
      parseMethodRest(m, start);
      cls.methods.push_back(std::move(m));
    } else {
      FieldDecl f;
      f.annotations = std::move(annotations);
      f.modifiers = std::move(modifiers);
      f.type = std::move(type);
      f.name = std::move(name);
      if (peek().is("=")) {
        advance();
        f.init = parseExpr();
      }
      const Token& semi = expect(";");
      f.span = {start, semi.span.end};
      cls.fields.push_back(std::move(f));
    }
  }

  void parseMethodRest(MethodDecl& m, std::size_t start) {
    expect("(");
    if (!peek().is(")")) {
      while (true) {
        ParamDecl p;
        std::size_t pstart = peek().span.begin;
        p.annotations = parseAnnotations();
        if (peek().is("final")) advance();
        p.type = parseType();
        p.name = expectIdentifier().text;
        p.span = {pstart, tokens_[pos_ - 1].span.end};
        m.params.push_back(std::move(p));
        if (peek().is(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect(")");
    if (peek().is("throws")) {
      advance();
      parseType();
      while (peek().is(",")) {
        advance();
        parseType();
      }
    }
    m.body = parseBlock();
    m.bodySpan = m.body->span;
    m.span = {start, m.bodySpan.end};
  }

  // --- statements ---

  std::unique_ptr<Stmt> parseBlock() {
    auto block = std::make_unique<Stmt>();
    block->kind = Stmt::Kind::Block;
    std::size_t start = expect("{").span.begin;
    while (!peek().is("}")) {
      if (atEnd()) fail("unterminated block");
      block->stmts.push_back(parseStmt());
    }
    std::size_t end = expect("}").span.end;
    block->span = {start, end};
    return block;
  }

  bool isOpaqueStatementKeyword(const Token& t) const {
    return t.is("while") || t.is("for") || t.is("do") || t.is("switch") || t.is("try") ||
           t.is("synchronized") || t.is("break") || t.is("continue") || t.is("assert");
  }

  std::unique_ptr<Stmt> parseStmt() {
    const Token& t = peek();
    if (t.is("{")) return parseBlock();
    if (t.is("if")) return parseIf();
    if (t.is("return")) {
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Return;
      std::size_t start = advance().span.begin;
      if (!peek().is(";")) s->expr = parseExpr();
      std::size_t end = expect(";").span.end;
      s->span = {start, end};
      return s;
    }
    if (t.is("throw")) {
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Throw;
      std::size_t start = advance().span.begin;
      s->expr = parseExpr();
      std::size_t end = expect(";").span.end;
      s->span = {start, end};
      return s;
    }
    if (isOpaqueStatementKeyword(t)) return parseOpaqueStmt();

    if (looksLikeLocalDecl()) return parseLocalDecl();

    // Expression statement or assignment.
    auto s = std::make_unique<Stmt>();
    std::size_t start = peek().span.begin;
    auto e = parseExpr();
    if (peek().is("=")) {
      advance();
      s->kind = Stmt::Kind::Assign;
      s->lhs = std::move(e);
      s->expr = parseExpr();
    } else {
      s->kind = Stmt::Kind::ExprStmt;
      s->expr = std::move(e);
    }
    std::size_t end = expect(";").span.end;
    s->span = {start, end};
    return s;
  }

  std::unique_ptr<Stmt> parseIf() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::If;
    std::size_t start = expect("if").span.begin;
    expect("(");
    s->expr = parseExpr();
    expect(")");
    s->stmts.push_back(parseStmt());
    std::size_t end = s->stmts.back()->span.end;
    if (peek().is("else")) {
      advance();
      s->stmts.push_back(parseStmt());
      end = s->stmts.back()->span.end;
    }
    s->span = {start, end};
    return s;
  }

  /// Loop-like constructs are consumed token-balanced and kept opaque; the
  /// checker does not look inside them.
  std::unique_ptr<Stmt> parseOpaqueStmt() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Opaque;
    std::size_t start = peek().span.begin;
    const std::string head = advance().text;
    if (head == "break" || head == "continue") {
      if (peek().kind == Token::Kind::Identifier) advance();  // label
      std::size_t end = expect(";").span.end;
      s->span = {start, end};
      return s;
    }
    // Consume groups until the statement is complete: a terminating ';' at
    // depth zero, or one balanced brace group plus any chained
    // else/catch/finally/while continuations.
    bool sawBlock = false;
    while (!atEnd()) {
      if (peek().is("(") || peek().is("{")) {
        bool isBrace = peek().is("{");
        pos_ = skipBalancedFrom(pos_);
        if (isBrace) {
          sawBlock = true;
          if (!(peek().is("catch") || peek().is("finally") || peek().is("else") ||
                peek().is("while"))) {
            break;
          }
        }
        continue;
      }
      if (peek().is(";")) {
        advance();
        if (!sawBlock || !(peek().is("catch") || peek().is("finally") || peek().is("while"))) break;
        continue;
      }
      advance();
    }
    s->span = {start, tokens_[pos_ - 1].span.end};
    return s;
  }

  bool looksLikeLocalDecl() const {
    std::size_t i = pos_;
    // optional 'final'
    if (tokens_[i].is("final")) ++i;
    if (tokens_[i].kind == Token::Kind::Keyword && isPrimitiveOrVoidName(tokens_[i].text) &&
        tokens_[i].text != "void") {
      return tokens_[i + 1].kind == Token::Kind::Identifier &&
             (tokens_[i + 2].is("=") || tokens_[i + 2].is(";"));
    }
    if (tokens_[i].kind != Token::Kind::Identifier) return false;
    ++i;
    while (tokens_[i].is(".") && tokens_[i + 1].kind == Token::Kind::Identifier) i += 2;
    if (tokens_[i].is("<")) {
      int depth = 0;
      while (i < tokens_.size() && tokens_[i].kind != Token::Kind::End) {
        if (tokens_[i].is("<")) ++depth;
        if (tokens_[i].is(">") && --depth == 0) {
          ++i;
          break;
        }
        // A type argument list contains only identifiers, dots, commas,
        // nested angles and '?'.
        if (!(tokens_[i].kind == Token::Kind::Identifier || tokens_[i].is(".") ||
              tokens_[i].is(",") || tokens_[i].is("<") || tokens_[i].is(">") || tokens_[i].is("?") ||
              tokens_[i].is("extends"))) {
          return false;
        }
        ++i;
      }
    }
    return tokens_[i].kind == Token::Kind::Identifier &&
           (tokens_[i + 1].is("=") || tokens_[i + 1].is(";"));
  }

  std::unique_ptr<Stmt> parseLocalDecl() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::LocalDecl;
    std::size_t start = peek().span.begin;
    if (peek().is("final")) advance();
    s->declType = parseType();
    s->name = expectIdentifier().text;
    if (peek().is("=")) {
      advance();
      s->expr = parseExpr();
    }
    std::size_t end = expect(";").span.end;
    s->span = {start, end};
    return s;
  }

  // --- expressions (precedence climbing) ---

  std::unique_ptr<Expr> parseExpr() { return parseTernary(); }

  std::unique_ptr<Expr> parseTernary() {
    auto cond = parseOr();
    if (peek().is("?")) {
      advance();
      auto thenE = parseExpr();
      expect(":");
      auto elseE = parseExpr();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Ternary;
      e->span = {cond->span.begin, elseE->span.end};
      e->children.push_back(std::move(cond));
      e->children.push_back(std::move(thenE));
      e->children.push_back(std::move(elseE));
      return e;
    }
    return cond;
  }

  std::unique_ptr<Expr> makeBinary(std::unique_ptr<Expr> l, std::string op,
                                   std::unique_ptr<Expr> r) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Binary;
    e->text = std::move(op);
    e->span = {l->span.begin, r->span.end};
    e->children.push_back(std::move(l));
    e->children.push_back(std::move(r));
    return e;
  }

  std::unique_ptr<Expr> parseOr() {
    auto l = parseAnd();
    while (peek().is("||")) {
      advance();
      l = makeBinary(std::move(l), "||", parseAnd());
    }
    return l;
  }

  std::unique_ptr<Expr> parseAnd() {
    auto l = parseEquality();
    while (peek().is("&&")) {
      advance();
      l = makeBinary(std::move(l), "&&", parseEquality());
    }
    return l;
  }

  std::unique_ptr<Expr> parseEquality() {
    auto l = parseRelational();
    while (peek().is("==") || peek().is("!=")) {
      std::string op = advance().text;
      l = makeBinary(std::move(l), std::move(op), parseRelational());
    }
    return l;
  }

  std::unique_ptr<Expr> parseRelational() {
    auto l = parseAdditive();
    while (peek().is("<") || peek().is(">") || peek().is("<=") || peek().is(">=")) {
      std::string op = advance().text;
      l = makeBinary(std::move(l), std::move(op), parseAdditive());
    }
    return l;
  }

  std::unique_ptr<Expr> parseAdditive() {
    auto l = parseMultiplicative();
    while (peek().is("+") || peek().is("-")) {
      std::string op = advance().text;
      l = makeBinary(std::move(l), std::move(op), parseMultiplicative());
    }
    return l;
  }

  std::unique_ptr<Expr> parseMultiplicative() {
    auto l = parseUnary();
    while (peek().is("*") || peek().is("/") || peek().is("%")) {
      std::string op = advance().text;
      l = makeBinary(std::move(l), std::move(op), parseUnary());
    }
    return l;
  }

  std::unique_ptr<Expr> parseUnary() {
    if (peek().is("!") || peek().is("-") || peek().is("+")) {
      const Token& op = advance();
      auto inner = parseUnary();
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->text = op.text;
      e->span = {op.span.begin, inner->span.end};
      e->children.push_back(std::move(inner));
      return e;
    }
    return parsePostfix();
  }

  std::unique_ptr<Expr> parsePostfix() {
    auto e = parsePrimary();
    while (true) {
      if (peek().is(".") && peek(1).kind == Token::Kind::Identifier) {
        advance();
        const Token& name = advance();
        if (peek().is("(")) {
          auto call = std::make_unique<Expr>();
          call->kind = Expr::Kind::Call;
          call->text = name.text;
          call->hasReceiver = true;
          std::size_t begin = e->span.begin;
          call->children.push_back(std::move(e));
          parseArgs(*call);
          call->span = {begin, tokens_[pos_ - 1].span.end};
          e = std::move(call);
        } else {
          auto access = std::make_unique<Expr>();
          access->kind = Expr::Kind::FieldAccess;
          access->text = name.text;
          std::size_t begin = e->span.begin;
          access->children.push_back(std::move(e));
          access->span = {begin, name.span.end};
          e = std::move(access);
        }
      } else {
        break;
      }
    }
    return e;
  }

  void parseArgs(Expr& call) {
    expect("(");
    if (!peek().is(")")) {
      call.children.push_back(parseExpr());
      while (peek().is(",")) {
        advance();
        call.children.push_back(parseExpr());
      }
    }
    expect(")");
  }

  std::unique_ptr<Expr> makeLeaf(Expr::Kind kind, const Token& t) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->text = t.text;
    e->span = t.span;
    return e;
  }

  std::unique_ptr<Expr> parsePrimary() {
    const Token& t = peek();
    if (t.is("null")) return makeLeaf(Expr::Kind::NullLit, advance());
    if (t.is("true") || t.is("false")) return makeLeaf(Expr::Kind::BoolLit, advance());
    if (t.is("this")) {
      const Token& tok = advance();
      // `this.x` is handled by the postfix loop; bare `this(...)` calls are
      // not in the subset.
      return makeLeaf(Expr::Kind::This, tok);
    }
    if (t.kind == Token::Kind::Number) return makeLeaf(Expr::Kind::NumLit, advance());
    if (t.kind == Token::Kind::String) return makeLeaf(Expr::Kind::StringLit, advance());
    if (t.kind == Token::Kind::Char) return makeLeaf(Expr::Kind::CharLit, advance());
    if (t.is("new")) return parseNew();
    if (t.is("(")) {
      if (isParenLambda()) return parseOpaqueLambda();
      std::size_t start = advance().span.begin;
      auto inner = parseExpr();
      std::size_t end = expect(")").span.end;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Paren;
      e->span = {start, end};
      e->children.push_back(std::move(inner));
      return e;
    }
    if (t.kind == Token::Kind::Identifier) {
      if (peek(1).is("->")) return parseOpaqueLambda();
      const Token& name = advance();
      if (peek().is("(")) {
        auto call = std::make_unique<Expr>();
        call->kind = Expr::Kind::Call;
        call->text = name.text;
        call->hasReceiver = false;
        parseArgs(*call);
        call->span = {name.span.begin, tokens_[pos_ - 1].span.end};
        return call;
      }
      return makeLeaf(Expr::Kind::Name, name);
    }
    fail("unexpected token '" + t.text + "' in expression");
  }

  std::unique_ptr<Expr> parseNew() {
    std::size_t start = expect("new").span.begin;
    TypeRef type = parseType();
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::New;
    e->text = type.name;
    parseArgs(*e);
    std::size_t end = tokens_[pos_ - 1].span.end;
    if (peek().is("{")) {
      // anonymous class body: opaque
      pos_ = skipBalancedFrom(pos_);
      end = tokens_[pos_ - 1].span.end;
      auto opaque = std::make_unique<Expr>();
      opaque->kind = Expr::Kind::Opaque;
      opaque->span = {start, end};
      opaque->text = text_.substr(start, end - start);
      return opaque;
    }
    e->span = {start, end};
    return e;
  }

  bool isParenLambda() const {
    std::size_t after = skipBalancedFrom(pos_);
    return after < tokens_.size() && tokens_[after].is("->");
  }

  std::unique_ptr<Expr> parseOpaqueLambda() {
    std::size_t start = peek().span.begin;
    if (peek().is("(")) {
      pos_ = skipBalancedFrom(pos_);
    } else {
      advance();  // single parameter
    }
    expect("->");
    if (peek().is("{")) {
      pos_ = skipBalancedFrom(pos_);
    } else {
      parseExpr();  // body parses but is discarded
    }
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Opaque;
    e->span = {start, tokens_[pos_ - 1].span.end};
    e->text = text_.substr(start, e->span.end - start);
    return e;
  }

  std::string text_;
  std::string path_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

inline CompilationUnit parse_source(std::string text, std::string path) {
  Parser parser(std::move(text), std::move(path));
  return parser.parseUnit();
}

/// Validates that `text` parses as one or more class members. Used for model
/// patch responses, which must be splicable into an existing class body.
inline void validate_member_source(const std::string& text) {
  std::string wrapped = "class __PatchWrapper {\n" + text + "\n}";
  CompilationUnit unit = parse_source(wrapped, "<patch>");
  if (unit.classes.size() != 1 ||
      (unit.classes[0].fields.empty() && unit.classes[0].methods.empty())) {
    throw SyntaxError("patch code contains no member declaration", 1, 1);
  }
}

}  // namespace nullrepair
