#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nullrepair/core.hpp"
#include "nullrepair/lexer.hpp"

namespace nullrepair {

/// Stable identity of a declaration. Derived from the declaration's qualified
/// name so that a symbol keeps its id across parses of the same corpus.
struct SymbolId {
  std::uint64_t value = 0;
  bool valid() const { return value != 0; }
  friend bool operator==(const SymbolId& a, const SymbolId& b) { return a.value == b.value; }
  friend bool operator!=(const SymbolId& a, const SymbolId& b) { return a.value != b.value; }
  friend bool operator<(const SymbolId& a, const SymbolId& b) { return a.value < b.value; }
};

/// How a reference expression resolved: to a project declaration, to an
/// external (third-party) name, or not a reference at all.
struct Resolution {
  enum class Kind { None, Project, External };
  Kind kind = Kind::None;
  SymbolId symbol;              // valid iff kind == Project
  std::string externalName;     // callee/field name, kind == External
  std::string receiverTypeName; // static type of receiver if known (external matching)

  bool isProject() const { return kind == Kind::Project; }
  bool isExternal() const { return kind == Kind::External; }
};

struct TypeRef {
  std::string name;      // dotted base name, no type arguments ("Map", "Point2D.Double")
  std::string rendered;  // verbatim source text including type arguments
  Span span;
  bool primitiveOrVoid = false;
};

struct Expr {
  enum class Kind {
    NullLit,
    BoolLit,
    NumLit,
    StringLit,
    CharLit,
    Name,
    This,
    FieldAccess,  // children[0] = receiver, text = member name
    Call,         // children[0] = receiver if hasReceiver, rest = args; text = method name
    New,          // text = type name, children = args
    Ternary,      // children = cond, then, else
    Binary,       // text = operator
    Unary,        // text = operator
    Paren,
    Opaque,       // UNSUPPORTED construct (lambda, anonymous class)
  };

  Kind kind;
  Span span;
  std::string text;
  std::vector<std::unique_ptr<Expr>> children;
  bool hasReceiver = false;

  // Filled during model construction.
  Resolution resolved;
  std::string staticTypeName;

  Expr* receiver() const {
    if ((kind == Kind::FieldAccess || (kind == Kind::Call && hasReceiver)) && !children.empty()) {
      return children[0].get();
    }
    return nullptr;
  }
  std::size_t argBegin() const { return kind == Kind::Call && hasReceiver ? 1 : 0; }
};

struct Stmt {
  enum class Kind {
    Block,      // stmts = children
    If,         // expr = condition, stmts[0] = then, stmts[1] = else (optional)
    Return,     // expr = value (optional)
    Throw,      // expr
    LocalDecl,  // declType/name, expr = initializer (optional)
    ExprStmt,   // expr
    Assign,     // lhs, expr = rhs
    Opaque,     // UNSUPPORTED statement (loops etc.), contents not analyzed
  };

  Kind kind;
  Span span;
  std::unique_ptr<Expr> expr;
  std::unique_ptr<Expr> lhs;
  TypeRef declType;
  std::string name;
  std::vector<std::unique_ptr<Stmt>> stmts;
  SymbolId localSymbol;
};

struct AnnotationUse {
  std::string name;  // dotted name as written, without '@'
  Span span;
  std::string rendered;
};

struct ParamDecl {
  std::vector<AnnotationUse> annotations;
  TypeRef type;
  std::string name;
  Span span;  // starts at first annotation or the type
  SymbolId symbol;
};

struct MethodDecl {
  std::vector<AnnotationUse> annotations;
  std::vector<std::string> modifiers;
  std::optional<TypeRef> returnType;  // absent for constructors
  std::string name;
  std::vector<ParamDecl> params;
  std::unique_ptr<Stmt> body;  // Block
  Span span;      // full declaration, annotations through closing brace
  Span bodySpan;  // the braces
  bool isConstructor = false;
  SymbolId symbol;
};

struct FieldDecl {
  std::vector<AnnotationUse> annotations;
  std::vector<std::string> modifiers;
  TypeRef type;
  std::string name;
  std::unique_ptr<Expr> init;
  Span span;  // full declaration through ';'
  SymbolId symbol;
};

struct ClassDecl {
  std::string packageName;
  std::vector<std::string> modifiers;
  std::string name;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  Span span;
  SymbolId symbol;

  std::string qualifiedName() const {
    return packageName.empty() ? name : packageName + "." + name;
  }
};

struct CompilationUnit {
  std::string path;
  std::string text;
  std::vector<std::string> imports;
  std::vector<ClassDecl> classes;

  std::string spanText(const Span& s) const { return text.substr(s.begin, s.length()); }
};

// --- UNSUPPORTED-node census, used by retrieval ranking -----------------

inline void countUnsupported(const Expr& e, int& n) {
  if (e.kind == Expr::Kind::Opaque) ++n;
  for (const auto& c : e.children) countUnsupported(*c, n);
}

inline void countUnsupported(const Stmt& s, int& n) {
  if (s.kind == Stmt::Kind::Opaque) ++n;
  if (s.expr) countUnsupported(*s.expr, n);
  if (s.lhs) countUnsupported(*s.lhs, n);
  for (const auto& c : s.stmts) countUnsupported(*c, n);
}

inline int unsupportedNodeCount(const MethodDecl& m) {
  int n = 0;
  if (m.body) countUnsupported(*m.body, n);
  return n;
}

inline int unsupportedNodeCount(const FieldDecl& f) {
  int n = 0;
  if (f.init) countUnsupported(*f.init, n);
  return n;
}

}  // namespace nullrepair
