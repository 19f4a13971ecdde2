#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nullrepair/ast.hpp"
#include "nullrepair/config.hpp"
#include "nullrepair/core.hpp"
#include "nullrepair/model.hpp"

namespace nullrepair {

enum class Qualifier { NonNull, Nullable };

/// @Nonnull is the subtype: it may flow anywhere, while Nullable may not flow
/// into a NonNull location.
inline Qualifier joinQualifiers(Qualifier a, Qualifier b) {
  return (a == Qualifier::Nullable || b == Qualifier::Nullable) ? Qualifier::Nullable
                                                                : Qualifier::NonNull;
}

enum class ErrorKind { Dereference, ReturnMismatch, ParamMisuse, FieldAssign, FieldInit };

inline const char* errorKindName(ErrorKind k) {
  switch (k) {
    case ErrorKind::Dereference: return "DEREFERENCE";
    case ErrorKind::ReturnMismatch: return "RETURN_MISMATCH";
    case ErrorKind::ParamMisuse: return "PARAM_MISUSE";
    case ErrorKind::FieldAssign: return "FIELD_ASSIGN";
    case ErrorKind::FieldInit: return "FIELD_INIT";
  }
  return "?";
}

inline std::optional<ErrorKind> errorKindFromName(const std::string& name) {
  if (name == "DEREFERENCE") return ErrorKind::Dereference;
  if (name == "RETURN_MISMATCH") return ErrorKind::ReturnMismatch;
  if (name == "PARAM_MISUSE") return ErrorKind::ParamMisuse;
  if (name == "FIELD_ASSIGN") return ErrorKind::FieldAssign;
  if (name == "FIELD_INIT") return ErrorKind::FieldInit;
  return std::nullopt;
}

struct SuggestedAnnotation {
  SymbolId target;  // always annotated NULLABLE
};

struct NullabilityError {
  std::string id;  // stable hash, survives unrelated edits
  ErrorKind kind = ErrorKind::Dereference;
  std::string unitPath;
  Span point;
  int line = 1;
  int col = 1;
  Span triggerSpan;
  std::string triggerText;  // whitespace-collapsed source text
  std::string message;
  std::optional<SuggestedAnnotation> suggested;
  SymbolId regionOwner;  // enclosing region at report time
};

/// Chain of a base variable (or `this`) plus fields and zero-argument calls,
/// the unit of flow-sensitive non-null refinement.
struct AccessPath {
  std::string base;  // local/param name or "this"
  std::vector<std::string> elems;

  std::string key() const {
    std::string k = base;
    for (const auto& e : elems) {
      k += ".";
      k += e;
    }
    return k;
  }
  bool isBareName() const { return elems.empty() && base != "this"; }
};

/// Extracts the access path of an expression, if it has one.
inline std::optional<AccessPath> accessPathOf(const Expr& e, const ProgramModel& model) {
  switch (e.kind) {
    case Expr::Kind::This:
      return AccessPath{"this", {}};
    case Expr::Kind::Name: {
      if (e.resolved.isProject()) {
        const SymbolInfo* info = model.find(e.resolved.symbol);
        if (info && info->kind == SymbolKind::Field) {
          return AccessPath{"this", {e.text}};  // implicit this.field
        }
        if (info && (info->kind == SymbolKind::Local || info->kind == SymbolKind::Param)) {
          return AccessPath{e.text, {}};
        }
        return std::nullopt;  // class reference
      }
      return AccessPath{e.text, {}};  // external name, still trackable textually
    }
    case Expr::Kind::FieldAccess: {
      auto recv = accessPathOf(*e.children[0], model);
      if (!recv) return std::nullopt;
      recv->elems.push_back(e.text);
      return recv;
    }
    case Expr::Kind::Call: {
      if (!e.hasReceiver || e.children.size() != 1) return std::nullopt;  // args break the path
      auto recv = accessPathOf(*e.children[0], model);
      if (!recv) return std::nullopt;
      recv->elems.push_back(e.text + "()");
      return recv;
    }
    case Expr::Kind::Paren:
      return accessPathOf(*e.children[0], model);
    default:
      return std::nullopt;
  }
}

namespace detail {

struct FlowEnv {
  std::map<std::string, Qualifier> locals;
  std::set<std::string> nonnullPaths;
  std::set<std::string> nullPaths;

  void invalidatePrefix(const std::string& baseKey) {
    auto drop = [&](std::set<std::string>& s) {
      for (auto it = s.begin(); it != s.end();) {
        if (*it == baseKey || it->rfind(baseKey + ".", 0) == 0) {
          it = s.erase(it);
        } else {
          ++it;
        }
      }
    };
    drop(nonnullPaths);
    drop(nullPaths);
  }

  static FlowEnv join(const FlowEnv& a, const FlowEnv& b) {
    FlowEnv out;
    for (const auto& [name, qa] : a.locals) {
      auto it = b.locals.find(name);
      if (it != b.locals.end()) {
        out.locals[name] = joinQualifiers(qa, it->second);
      } else {
        out.locals[name] = qa;
      }
    }
    for (const auto& [name, qb] : b.locals) {
      if (!out.locals.count(name)) out.locals[name] = qb;
    }
    std::set_intersection(a.nonnullPaths.begin(), a.nonnullPaths.end(), b.nonnullPaths.begin(),
                          b.nonnullPaths.end(),
                          std::inserter(out.nonnullPaths, out.nonnullPaths.begin()));
    std::set_intersection(a.nullPaths.begin(), a.nullPaths.end(), b.nullPaths.begin(),
                          b.nullPaths.end(), std::inserter(out.nullPaths, out.nullPaths.begin()));
    return out;
  }
};

class Checker {
 public:
  Checker(const ProgramModel& model, const ProjectConfig& config,
          const std::set<SymbolId>& overlay)
      : model_(model), config_(config), overlay_(overlay) {}

  using ExprObserver = std::function<void(const Expr&, Qualifier)>;
  void setObserver(ExprObserver obs) { observer_ = std::move(obs); }

  std::vector<NullabilityError> run() {
    for (const auto& unit : model_.units) {
      unit_ = unit.get();
      for (const auto& cls : unit->classes) {
        cls_ = &cls;
        checkFieldInitialization(cls);
        for (const auto& f : cls.fields) {
          if (f.init) {
            method_ = nullptr;
            regionOwner_ = f.symbol;
            FlowEnv env;
            Qualifier q = visitExpr(*f.init, env);
            if (q == Qualifier::Nullable && !effectiveNullable(f.symbol) &&
                !isPrimitive(f.symbol)) {
              reportFieldAssign(*f.init, f.symbol);
            }
          }
        }
        for (const auto& m : cls.methods) {
          method_ = &m;
          regionOwner_ = m.symbol;
          FlowEnv env;
          if (m.body) walkStmt(*m.body, env);
        }
      }
    }
    finalize();
    return std::move(errors_);
  }

 private:
  bool effectiveNullable(SymbolId symbol) const {
    if (overlay_.count(symbol)) return true;
    const SymbolInfo* info = model_.find(symbol);
    return info && info->nullableAnnotated;
  }

  bool isPrimitive(SymbolId symbol) const {
    const SymbolInfo* info = model_.find(symbol);
    return info && info->typePrimitiveOrVoid;
  }

  bool isCastHelperCall(const Expr& call) const {
    if (call.kind != Expr::Kind::Call) return false;
    const std::string simple = config_.castHelperSimpleName();
    if (call.text != simple) return false;
    if (!call.hasReceiver) return true;
    // qualified helper call: receiver chain must render to the helper prefix
    std::string prefix = renderChain(*call.children[0]);
    return !prefix.empty() && prefix + "." + call.text == config_.castHelper;
  }

  static std::string renderChain(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Name:
        return e.text;
      case Expr::Kind::This:
        return "this";
      case Expr::Kind::FieldAccess: {
        std::string r = renderChain(*e.children[0]);
        return r.empty() ? std::string() : r + "." + e.text;
      }
      default:
        return std::string();
    }
  }

  // --- field initialization (definite assignment over constructors) ---

  void checkFieldInitialization(const ClassDecl& cls) {
    std::vector<const FieldDecl*> needInit;
    for (const auto& f : cls.fields) {
      if (f.type.primitiveOrVoid) continue;
      if (effectiveNullable(f.symbol)) continue;
      if (f.init) continue;
      needInit.push_back(&f);
    }
    if (needInit.empty()) return;

    std::vector<const MethodDecl*> ctors;
    for (const auto& m : cls.methods) {
      if (m.isConstructor) ctors.push_back(&m);
    }

    for (const FieldDecl* f : needInit) {
      bool assignedEverywhere = !ctors.empty();
      for (const MethodDecl* ctor : ctors) {
        std::set<std::string> assigned;
        returnGapField_ = f->name;
        returnGapHit_ = false;
        bool completes = definitelyAssigned(*ctor->body, assigned);
        bool gap = returnGapHit_ || (completes && assigned.count(f->name) == 0);
        returnGapField_.clear();
        if (gap) {
          assignedEverywhere = false;
          break;
        }
      }
      if (!assignedEverywhere) {
        NullabilityError e;
        e.kind = ErrorKind::FieldInit;
        e.unitPath = model_.find(f->symbol)->unitPath;
        e.point = f->span;
        e.triggerSpan = f->span;
        e.triggerText = f->name;
        e.message = std::string(errorKindName(e.kind)) + ": expression '" + f->name +
                    "' is @Nullable and is not initialized in all constructors";
        e.regionOwner = f->symbol;
        errors_.push_back(std::move(e));
      }
    }
  }

  /// Walks a constructor body accumulating the set of this-class fields that
  /// are definitely assigned; returns whether the statement list can complete
  /// normally. A `return` with the tracked field unassigned sets
  /// returnGapHit_.
  bool definitelyAssigned(const Stmt& stmt, std::set<std::string>& assigned) {
    switch (stmt.kind) {
      case Stmt::Kind::Block: {
        for (const auto& s : stmt.stmts) {
          if (!definitelyAssigned(*s, assigned)) return false;
        }
        return true;
      }
      case Stmt::Kind::If: {
        std::set<std::string> thenSet = assigned;
        std::set<std::string> elseSet = assigned;
        bool tc = definitelyAssigned(*stmt.stmts[0], thenSet);
        bool ec = stmt.stmts.size() > 1 ? definitelyAssigned(*stmt.stmts[1], elseSet) : true;
        if (tc && ec) {
          std::set<std::string> merged;
          std::set_intersection(thenSet.begin(), thenSet.end(), elseSet.begin(), elseSet.end(),
                                std::inserter(merged, merged.begin()));
          assigned = std::move(merged);
          return true;
        }
        if (tc) {
          assigned = std::move(thenSet);
          return true;
        }
        if (ec) {
          assigned = std::move(elseSet);
          return true;
        }
        return false;
      }
      case Stmt::Kind::Return: {
        if (!returnGapField_.empty() && !assigned.count(returnGapField_)) returnGapHit_ = true;
        return false;
      }
      case Stmt::Kind::Throw:
        return false;
      case Stmt::Kind::Assign: {
        const Expr& lhs = *stmt.lhs;
        if (lhs.kind == Expr::Kind::Name && lhs.resolved.isProject()) {
          const SymbolInfo* info = model_.find(lhs.resolved.symbol);
          if (info && info->kind == SymbolKind::Field && info->owner == cls_->symbol) {
            assigned.insert(info->name);
          }
        } else if (lhs.kind == Expr::Kind::FieldAccess &&
                   lhs.children[0]->kind == Expr::Kind::This) {
          assigned.insert(lhs.text);
        }
        return true;
      }
      default:
        return true;
    }
  }

  // --- flow-sensitive walk ---

  bool walkStmt(const Stmt& stmt, FlowEnv& env) {
    switch (stmt.kind) {
      case Stmt::Kind::Block: {
        for (const auto& s : stmt.stmts) {
          if (!walkStmt(*s, env)) return false;
        }
        return true;
      }
      case Stmt::Kind::If:
        return walkIf(stmt, env);
      case Stmt::Kind::Return: {
        if (stmt.expr) {
          Qualifier q = visitExpr(*stmt.expr, env);
          checkReturn(stmt, q);
        }
        return false;
      }
      case Stmt::Kind::Throw: {
        if (stmt.expr) visitExpr(*stmt.expr, env);
        return false;
      }
      case Stmt::Kind::LocalDecl: {
        Qualifier q = Qualifier::NonNull;
        if (stmt.expr) q = visitExpr(*stmt.expr, env);
        env.locals[stmt.name] = stmt.declType.primitiveOrVoid ? Qualifier::NonNull : q;
        env.invalidatePrefix(stmt.name);
        if (q == Qualifier::NonNull && !stmt.declType.primitiveOrVoid) {
          env.nonnullPaths.insert(stmt.name);
        }
        return true;
      }
      case Stmt::Kind::Assign:
        return walkAssign(stmt, env);
      case Stmt::Kind::ExprStmt: {
        visitExpr(*stmt.expr, env);
        return true;
      }
      case Stmt::Kind::Opaque: {
        // Unknown code: drop all refinements, keep local qualifiers.
        env.nonnullPaths.clear();
        env.nullPaths.clear();
        return true;
      }
    }
    return true;
  }

  bool walkIf(const Stmt& stmt, FlowEnv& env) {
    visitExpr(*stmt.expr, env);
    FlowEnv thenEnv = env;
    FlowEnv elseEnv = env;
    refineCondition(*stmt.expr, thenEnv, elseEnv, /*negated=*/false);

    bool tc = walkStmt(*stmt.stmts[0], thenEnv);
    bool ec = true;
    if (stmt.stmts.size() > 1) {
      ec = walkStmt(*stmt.stmts[1], elseEnv);
    }
    if (tc && ec) {
      env = FlowEnv::join(thenEnv, elseEnv);
      return true;
    }
    if (tc) {
      env = std::move(thenEnv);
      return true;
    }
    if (ec) {
      env = std::move(elseEnv);
      return true;
    }
    return false;
  }

  bool walkAssign(const Stmt& stmt, FlowEnv& env) {
    Qualifier rhs = visitExpr(*stmt.expr, env);
    const Expr& lhs = *stmt.lhs;

    // An lvalue field access still dereferences its receiver.
    if (lhs.kind == Expr::Kind::FieldAccess) {
      Qualifier recvQ = visitExpr(*lhs.children[0], env);
      checkDereference(lhs, *lhs.children[0], recvQ);
    }

    if (lhs.kind == Expr::Kind::Name && lhs.resolved.isProject()) {
      const SymbolInfo* info = model_.find(lhs.resolved.symbol);
      if (info && (info->kind == SymbolKind::Local || info->kind == SymbolKind::Param)) {
        env.locals[lhs.text] = rhs;
        env.invalidatePrefix(lhs.text);
        if (rhs == Qualifier::NonNull && !info->typePrimitiveOrVoid) {
          env.nonnullPaths.insert(lhs.text);
        }
        return true;
      }
    }

    // Field target (bare name resolving to a field, or obj.field).
    SymbolId fieldSym = fieldTargetOf(lhs);
    if (fieldSym.valid()) {
      const SymbolInfo* info = model_.find(fieldSym);
      if (rhs == Qualifier::Nullable && info && !info->typePrimitiveOrVoid &&
          !effectiveNullable(fieldSym)) {
        reportFieldAssignStmt(stmt, fieldSym);
      }
    }
    if (auto path = accessPathOf(lhs, model_)) {
      env.invalidatePrefix(path->key());
      if (rhs == Qualifier::NonNull) {
        env.nonnullPaths.insert(path->key());
      }
    } else {
      // Unknown target: refinements on paths cannot be trusted.
      env.nonnullPaths.clear();
      env.nullPaths.clear();
    }
    return true;
  }

  SymbolId fieldTargetOf(const Expr& lhs) const {
    if (lhs.resolved.isProject()) {
      const SymbolInfo* info = model_.find(lhs.resolved.symbol);
      if (info && info->kind == SymbolKind::Field) return lhs.resolved.symbol;
    }
    return SymbolId{};
  }

  /// Derives branch refinements from null comparisons: `p == null`,
  /// `p != null`, negation, and &&/|| combinations thereof.
  void refineCondition(const Expr& cond, FlowEnv& thenEnv, FlowEnv& elseEnv, bool negated) {
    const Expr* e = &cond;
    while (e->kind == Expr::Kind::Paren) e = e->children[0].get();

    if (e->kind == Expr::Kind::Unary && e->text == "!") {
      refineCondition(*e->children[0], elseEnv, thenEnv, !negated);
      return;
    }
    if (e->kind == Expr::Kind::Binary && (e->text == "&&" || e->text == "||")) {
      if (e->text == "&&") {
        // Both conjuncts hold on the then branch; the else branch learns nothing.
        refineCondition(*e->children[0], thenEnv, elseEnv_discard_, negated);
        refineCondition(*e->children[1], thenEnv, elseEnv_discard_, negated);
      } else {
        // Both disjuncts are false on the else branch.
        refineCondition(*e->children[0], thenEnv_discard_, elseEnv, negated);
        refineCondition(*e->children[1], thenEnv_discard_, elseEnv, negated);
      }
      return;
    }
    if (e->kind == Expr::Kind::Binary && (e->text == "==" || e->text == "!=")) {
      const Expr* lhs = e->children[0].get();
      const Expr* rhs = e->children[1].get();
      const Expr* pathSide = nullptr;
      if (rhs->kind == Expr::Kind::NullLit) {
        pathSide = lhs;
      } else if (lhs->kind == Expr::Kind::NullLit) {
        pathSide = rhs;
      }
      if (!pathSide) return;
      auto path = accessPathOf(*pathSide, model_);
      if (!path) return;
      bool eqNull = (e->text == "==");
      FlowEnv& nullBranch = eqNull ? thenEnv : elseEnv;
      FlowEnv& nonnullBranch = eqNull ? elseEnv : thenEnv;
      markNull(nullBranch, *path);
      markNonNull(nonnullBranch, *path);
    }
  }

  void markNonNull(FlowEnv& env, const AccessPath& path) {
    env.nonnullPaths.insert(path.key());
    env.nullPaths.erase(path.key());
    if (path.isBareName()) env.locals[path.base] = Qualifier::NonNull;
  }

  void markNull(FlowEnv& env, const AccessPath& path) {
    env.nullPaths.insert(path.key());
    env.nonnullPaths.erase(path.key());
    if (path.isBareName()) env.locals[path.base] = Qualifier::Nullable;
  }

  // --- expression visit: computes nullness, reports errors, updates env ---

  Qualifier visitExpr(const Expr& e, FlowEnv& env) {
    Qualifier q = visitExprImpl(e, env);
    if (observer_) observer_(e, q);
    return q;
  }

  Qualifier visitExprImpl(const Expr& e, FlowEnv& env) {
    switch (e.kind) {
      case Expr::Kind::NullLit:
        return Qualifier::Nullable;
      case Expr::Kind::BoolLit:
      case Expr::Kind::NumLit:
      case Expr::Kind::StringLit:
      case Expr::Kind::CharLit:
      case Expr::Kind::This:
      case Expr::Kind::Opaque:
        return Qualifier::NonNull;
      case Expr::Kind::Name:
        return nameQualifier(e, env);
      case Expr::Kind::FieldAccess: {
        Qualifier recvQ = visitExpr(*e.children[0], env);
        checkDereference(e, *e.children[0], recvQ);
        return memberQualifier(e, env);
      }
      case Expr::Kind::Call:
        return visitCall(e, env);
      case Expr::Kind::New: {
        std::vector<Qualifier> argQs;
        for (const auto& c : e.children) argQs.push_back(visitExpr(*c, env));
        checkCallArguments(e, argQs, constructorOf(e));
        return Qualifier::NonNull;
      }
      case Expr::Kind::Ternary: {
        visitExpr(*e.children[0], env);
        FlowEnv thenEnv = env;
        FlowEnv elseEnv = env;
        refineCondition(*e.children[0], thenEnv, elseEnv, false);
        Qualifier a = visitExpr(*e.children[1], thenEnv);
        Qualifier b = visitExpr(*e.children[2], elseEnv);
        env = FlowEnv::join(thenEnv, elseEnv);
        return joinQualifiers(a, b);
      }
      case Expr::Kind::Binary: {
        visitExpr(*e.children[0], env);
        visitExpr(*e.children[1], env);
        return Qualifier::NonNull;  // comparisons/arithmetic yield primitives or strings
      }
      case Expr::Kind::Unary:
        visitExpr(*e.children[0], env);
        return Qualifier::NonNull;
      case Expr::Kind::Paren:
        return visitExpr(*e.children[0], env);
    }
    return Qualifier::NonNull;
  }

  Qualifier nameQualifier(const Expr& e, FlowEnv& env) {
    auto path = accessPathOf(e, model_);
    if (path) {
      if (env.nonnullPaths.count(path->key())) return Qualifier::NonNull;
      if (env.nullPaths.count(path->key())) return Qualifier::Nullable;
    }
    if (e.resolved.isProject()) {
      const SymbolInfo* info = model_.find(e.resolved.symbol);
      if (!info) return Qualifier::NonNull;
      switch (info->kind) {
        case SymbolKind::Local: {
          auto it = env.locals.find(e.text);
          if (it != env.locals.end()) return it->second;
          return Qualifier::NonNull;
        }
        case SymbolKind::Param: {
          auto it = env.locals.find(e.text);
          if (it != env.locals.end()) return it->second;
          return effectiveNullable(e.resolved.symbol) ? Qualifier::Nullable : Qualifier::NonNull;
        }
        case SymbolKind::Field:
          return effectiveNullable(e.resolved.symbol) && !info->typePrimitiveOrVoid
                     ? Qualifier::Nullable
                     : Qualifier::NonNull;
        default:
          return Qualifier::NonNull;  // class reference
      }
    }
    return Qualifier::NonNull;  // external names are optimistically non-null
  }

  Qualifier memberQualifier(const Expr& e, FlowEnv& env) {
    auto path = accessPathOf(e, model_);
    if (path) {
      if (env.nonnullPaths.count(path->key())) return Qualifier::NonNull;
      if (env.nullPaths.count(path->key())) return Qualifier::Nullable;
    }
    if (e.resolved.isProject()) {
      const SymbolInfo* info = model_.find(e.resolved.symbol);
      if (info && !info->typePrimitiveOrVoid && effectiveNullable(e.resolved.symbol)) {
        return Qualifier::Nullable;
      }
    }
    return Qualifier::NonNull;
  }

  Qualifier visitCall(const Expr& e, FlowEnv& env) {
    Qualifier recvQ = Qualifier::NonNull;
    if (e.hasReceiver) recvQ = visitExpr(*e.children[0], env);

    std::vector<Qualifier> argQs;
    for (std::size_t i = e.argBegin(); i < e.children.size(); ++i) {
      argQs.push_back(visitExpr(*e.children[i], env));
    }

    if (isCastHelperCall(e)) {
      // The helper asserts non-nullness; its call is not itself checked.
      return Qualifier::NonNull;
    }

    if (e.hasReceiver) checkDereference(e, *e.children[0], recvQ);

    const SymbolInfo* callee =
        e.resolved.isProject() ? model_.find(e.resolved.symbol) : nullptr;
    if (callee) checkCallArguments(e, argQs, callee);

    invalidateAfterCall(e, env);

    // Result nullness: refinement first, then declaration.
    Qualifier result;
    if (callee) {
      result = !callee->typePrimitiveOrVoid && effectiveNullable(callee->id)
                   ? Qualifier::Nullable
                   : Qualifier::NonNull;
    } else {
      std::string recvType = e.hasReceiver ? e.children[0]->staticTypeName : std::string();
      result = config_.externalMethodIsNullable(e.text, recvType) ? Qualifier::Nullable
                                                                  : Qualifier::NonNull;
    }
    if (auto path = accessPathOf(e, model_)) {
      if (env.nonnullPaths.count(path->key())) return Qualifier::NonNull;
      if (env.nullPaths.count(path->key())) return Qualifier::Nullable;
    }
    return result;
  }

  const SymbolInfo* constructorOf(const Expr& newExpr) const {
    if (!newExpr.resolved.isProject()) return nullptr;
    const SymbolInfo* cls = model_.find(newExpr.resolved.symbol);
    if (!cls) return nullptr;
    for (const auto& [id, info] : model_.symbols) {
      if (info.kind == SymbolKind::Method && info.isConstructor && info.owner == cls->id &&
          info.params.size() == newExpr.children.size()) {
        return &info;
      }
    }
    return nullptr;
  }

  /// A call on a receiver invalidates refinements below that receiver, except
  /// the path of the call itself (the tracked getter).
  void invalidateAfterCall(const Expr& call, FlowEnv& env) {
    if (!call.hasReceiver) {
      // Implicit this receiver: this.* refinements are no longer trusted.
      dropBelow(env, "this", callPathKey(call));
      return;
    }
    auto recvPath = accessPathOf(*call.children[0], model_);
    if (!recvPath) return;
    dropBelow(env, recvPath->key(), callPathKey(call));
  }

  std::string callPathKey(const Expr& call) const {
    auto p = accessPathOf(call, model_);
    return p ? p->key() : std::string();
  }

  void dropBelow(FlowEnv& env, const std::string& recvKey, const std::string& keep) {
    auto drop = [&](std::set<std::string>& s) {
      for (auto it = s.begin(); it != s.end();) {
        bool below = it->rfind(recvKey + ".", 0) == 0;
        if (below && *it != keep) {
          it = s.erase(it);
        } else {
          ++it;
        }
      }
    };
    drop(env.nonnullPaths);
    drop(env.nullPaths);
  }

  // --- error reporting ---

  void checkDereference(const Expr& site, const Expr& receiver, Qualifier recvQ) {
    if (recvQ != Qualifier::Nullable) return;
    NullabilityError e;
    e.kind = ErrorKind::Dereference;
    e.unitPath = unit_->path;
    e.point = site.span;
    e.triggerSpan = receiver.span;
    e.triggerText = collapseWhitespace(unit_->spanText(receiver.span));
    e.message = std::string(errorKindName(e.kind)) + ": expression '" + e.triggerText +
                "' is @Nullable and is dereferenced without a null check";
    e.regionOwner = regionOwner_;
    errors_.push_back(std::move(e));
  }

  void checkCallArguments(const Expr& call, const std::vector<Qualifier>& argQs,
                          const SymbolInfo* callee) {
    if (!callee) return;
    for (std::size_t i = 0; i < argQs.size() && i < callee->params.size(); ++i) {
      if (argQs[i] != Qualifier::Nullable) continue;
      SymbolId paramSym = callee->params[i];
      const SymbolInfo* pinfo = model_.find(paramSym);
      if (!pinfo || pinfo->typePrimitiveOrVoid) continue;
      if (effectiveNullable(paramSym)) continue;
      const Expr& arg = *call.children[call.argBegin() + i];
      NullabilityError e;
      e.kind = ErrorKind::ParamMisuse;
      e.unitPath = unit_->path;
      e.point = call.span;
      e.triggerSpan = arg.span;
      e.triggerText = collapseWhitespace(unit_->spanText(arg.span));
      e.message = std::string(errorKindName(e.kind)) + ": expression '" + e.triggerText +
                  "' is @Nullable and is passed to a @Nonnull parameter";
      e.suggested = SuggestedAnnotation{paramSym};
      e.regionOwner = regionOwner_;
      errors_.push_back(std::move(e));
    }
  }

  void checkReturn(const Stmt& stmt, Qualifier q) {
    if (q != Qualifier::Nullable || !method_ || !method_->returnType) return;
    if (method_->returnType->primitiveOrVoid) return;
    if (effectiveNullable(method_->symbol)) return;
    NullabilityError e;
    e.kind = ErrorKind::ReturnMismatch;
    e.unitPath = unit_->path;
    e.point = stmt.span;
    e.triggerSpan = stmt.expr->span;
    e.triggerText = collapseWhitespace(unit_->spanText(stmt.expr->span));
    e.message = std::string(errorKindName(e.kind)) + ": expression '" + e.triggerText +
                "' is @Nullable and is returned from a @Nonnull method";
    e.suggested = SuggestedAnnotation{method_->symbol};
    e.regionOwner = regionOwner_;
    errors_.push_back(std::move(e));
  }

  void reportFieldAssignStmt(const Stmt& stmt, SymbolId fieldSym) {
    NullabilityError e;
    e.kind = ErrorKind::FieldAssign;
    e.unitPath = unit_->path;
    e.point = stmt.span;
    e.triggerSpan = stmt.expr->span;
    e.triggerText = collapseWhitespace(unit_->spanText(stmt.expr->span));
    e.message = std::string(errorKindName(e.kind)) + ": expression '" + e.triggerText +
                "' is @Nullable and is assigned to a @Nonnull field";
    e.suggested = SuggestedAnnotation{fieldSym};
    e.regionOwner = regionOwner_;
    errors_.push_back(std::move(e));
  }

  void reportFieldAssign(const Expr& init, SymbolId fieldSym) {
    NullabilityError e;
    e.kind = ErrorKind::FieldAssign;
    e.unitPath = unit_->path;
    e.point = init.span;
    e.triggerSpan = init.span;
    e.triggerText = collapseWhitespace(unit_->spanText(init.span));
    e.message = std::string(errorKindName(e.kind)) + ": expression '" + e.triggerText +
                "' is @Nullable and is assigned to a @Nonnull field";
    e.suggested = SuggestedAnnotation{fieldSym};
    e.regionOwner = regionOwner_;
    errors_.push_back(std::move(e));
  }

  void finalize() {
    std::stable_sort(errors_.begin(), errors_.end(),
                     [](const NullabilityError& a, const NullabilityError& b) {
                       if (a.unitPath != b.unitPath) return a.unitPath < b.unitPath;
                       return a.point < b.point;
                     });
    // Ordinals distinguish repeated identical findings within one region.
    std::map<std::string, int> ordinals;
    for (NullabilityError& e : errors_) {
      const SymbolInfo* owner = model_.find(e.regionOwner);
      std::string ownerName = owner ? owner->qualified : "?";
      std::string key = std::string(errorKindName(e.kind)) + "|" + e.unitPath + "|" + ownerName +
                        "|" + e.triggerText + "|" + e.message;
      int ordinal = ordinals[key]++;
      e.id = toHex(fnv1a(key + "|" + std::to_string(ordinal)));
      auto lc = lineColAt(model_.unit(e.unitPath)->text, e.point.begin);
      e.line = lc.line;
      e.col = lc.col;
    }
  }

  const ProgramModel& model_;
  const ProjectConfig& config_;
  const std::set<SymbolId>& overlay_;
  std::vector<NullabilityError> errors_;
  const CompilationUnit* unit_ = nullptr;
  const ClassDecl* cls_ = nullptr;
  const MethodDecl* method_ = nullptr;
  SymbolId regionOwner_;
  std::string returnGapField_;
  bool returnGapHit_ = false;
  FlowEnv thenEnv_discard_;
  FlowEnv elseEnv_discard_;
};

}  // namespace detail

inline std::vector<NullabilityError> check_with_hypothesis(const ProgramModel& model,
                                                           const ProjectConfig& config,
                                                           const std::set<SymbolId>& extra) {
  for (SymbolId id : extra) {
    const SymbolInfo* info = model.find(id);
    if (!info || info->kind == SymbolKind::Local || info->kind == SymbolKind::Class ||
        (info->kind == SymbolKind::Method && info->isConstructor)) {
      throw InvalidTarget("hypothesis target must be a field, method return, or parameter");
    }
  }
  detail::Checker checker(model, config, extra);
  return checker.run();
}

inline std::vector<NullabilityError> check_program(const ProgramModel& model,
                                                   const ProjectConfig& config) {
  static const std::set<SymbolId> empty;
  detail::Checker checker(model, config, empty);
  return checker.run();
}

/// Computes the flow-sensitive qualifier of the expression whose span equals
/// `target` within its enclosing method. Exposed for tests and tooling.
inline std::optional<Qualifier> nullness_at(const ProgramModel& model, const ProjectConfig& config,
                                            const std::string& unitPath, Span target);

namespace detail {

class NullnessProbe : public Checker {
 public:
  using Checker::Checker;
};

}  // namespace detail

}  // namespace nullrepair
