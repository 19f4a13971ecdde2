#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "nullrepair/ast.hpp"
#include "nullrepair/config.hpp"
#include "nullrepair/core.hpp"
#include "nullrepair/parser.hpp"

namespace nullrepair {

enum class SymbolKind { Class, Field, Method, Param, Local };

inline const char* symbolKindName(SymbolKind k) {
  switch (k) {
    case SymbolKind::Class: return "class";
    case SymbolKind::Field: return "field";
    case SymbolKind::Method: return "method";
    case SymbolKind::Param: return "param";
    case SymbolKind::Local: return "local";
  }
  return "?";
}

struct SymbolInfo {
  SymbolId id;
  SymbolKind kind = SymbolKind::Class;
  std::string name;
  std::string qualified;  // display name, also the id hash source
  std::string unitPath;
  Span declSpan;
  /// Offset where an inserted annotation goes (start of the declaration for
  /// members, start of the type for parameters).
  std::size_t annotationAnchor = 0;
  std::string typeName;  // declared/return type base name; empty for ctors and classes
  bool typePrimitiveOrVoid = false;
  bool nullableAnnotated = false;
  SymbolId owner;  // class for members, method for params/locals
  std::vector<SymbolId> params;
  bool isConstructor = false;
  int paramIndex = -1;
};

struct Region {
  enum class Kind { MethodBody, FieldDecl };
  Kind kind = Kind::MethodBody;
  SymbolId owner;  // the method or field symbol
  Span span;
  std::string unitPath;

  friend bool operator==(const Region& a, const Region& b) {
    return a.owner == b.owner && a.unitPath == b.unitPath && a.span == b.span;
  }
};

inline const char* regionKindName(Region::Kind k) {
  return k == Region::Kind::MethodBody ? "METHOD_BODY" : "FIELD_DECL";
}

/// One use of a project-declared symbol, attributed to its enclosing region.
struct SymbolReference {
  SymbolId symbol;
  SymbolId regionOwner;
  Span span;
  std::string unitPath;
};

struct ProgramModel {
  std::vector<std::unique_ptr<CompilationUnit>> units;
  std::map<SymbolId, SymbolInfo> symbols;
  std::vector<Region> regions;  // sorted by (unitPath, span)
  std::map<SymbolId, std::set<SymbolId>> callers;  // method → region owners
  std::vector<SymbolReference> references;

  const SymbolInfo* find(SymbolId id) const {
    auto it = symbols.find(id);
    return it == symbols.end() ? nullptr : &it->second;
  }

  bool declaredInProject(SymbolId id) const { return symbols.count(id) > 0; }

  const Region* regionOf(SymbolId owner) const {
    for (const Region& r : regions) {
      if (r.owner == owner) return &r;
    }
    return nullptr;
  }

  const CompilationUnit* unit(const std::string& path) const {
    for (const auto& u : units) {
      if (u->path == path) return u.get();
    }
    return nullptr;
  }

  /// Regions whose bodies contain a resolved call to `method`.
  std::vector<Region> callerRegions(SymbolId method) const {
    std::vector<Region> out;
    auto it = callers.find(method);
    if (it == callers.end()) return out;
    for (SymbolId owner : it->second) {
      if (const Region* r = regionOf(owner)) out.push_back(*r);
    }
    return out;
  }

  const ClassDecl* classDecl(SymbolId id) const {
    for (const auto& u : units) {
      for (const auto& c : u->classes) {
        if (c.symbol == id) return &c;
      }
    }
    return nullptr;
  }

  const MethodDecl* methodDecl(SymbolId id) const {
    for (const auto& u : units) {
      for (const auto& c : u->classes) {
        for (const auto& m : c.methods) {
          if (m.symbol == id) return &m;
        }
      }
    }
    return nullptr;
  }

  const FieldDecl* fieldDecl(SymbolId id) const {
    for (const auto& u : units) {
      for (const auto& c : u->classes) {
        for (const auto& f : c.fields) {
          if (f.symbol == id) return &f;
        }
      }
    }
    return nullptr;
  }

  std::string regionText(const Region& r) const {
    const CompilationUnit* u = unit(r.unitPath);
    return u ? u->spanText(r.span) : std::string();
  }
};

inline Region enclosing_region(const ProgramModel& model, const std::string& unitPath, Span point) {
  for (const Region& r : model.regions) {
    if (r.unitPath == unitPath && r.span.begin <= point.begin && point.end <= r.span.end) {
      return r;
    }
  }
  throw NotInRegion("no region encloses the given point in " + unitPath);
}

// ---------------------------------------------------------------------------
// Model construction

namespace detail {

inline SymbolId makeSymbolId(SymbolKind kind, const std::string& qualified) {
  std::string key = std::string(symbolKindName(kind)) + ":" + qualified;
  SymbolId id{fnv1a(key)};
  if (!id.valid()) id.value = 1;
  return id;
}

class ModelBuilder {
 public:
  ModelBuilder(ProgramModel& model, const ProjectConfig& config)
      : model_(model), config_(config) {}

  void run() {
    for (auto& unit : model_.units) registerUnit(*unit);
    std::sort(model_.regions.begin(), model_.regions.end(), [](const Region& a, const Region& b) {
      if (a.unitPath != b.unitPath) return a.unitPath < b.unitPath;
      return a.span < b.span;
    });
    for (auto& unit : model_.units) resolveUnit(*unit);
  }

 private:
  bool hasNullableAnnotation(const std::vector<AnnotationUse>& annotations) const {
    for (const auto& a : annotations) {
      if (config_.isNullableAnnotation(a.name)) return true;
    }
    return false;
  }

  void registerUnit(CompilationUnit& unit) {
    for (ClassDecl& cls : unit.classes) {
      std::string qualified = cls.qualifiedName();
      SymbolInfo info;
      info.kind = SymbolKind::Class;
      info.name = cls.name;
      info.qualified = qualified;
      info.unitPath = unit.path;
      info.declSpan = cls.span;
      info.id = makeSymbolId(SymbolKind::Class, qualified);
      cls.symbol = info.id;
      addSymbol(info);
      if (!classBySimpleName_.count(cls.name)) classBySimpleName_[cls.name] = info.id;
      classByQualified_[qualified] = info.id;

      for (FieldDecl& f : cls.fields) registerField(unit, cls, f);

      std::set<std::string> methodSignatures;
      for (MethodDecl& m : cls.methods) registerMethod(unit, cls, m, methodSignatures);
    }
  }

  void registerField(CompilationUnit& unit, ClassDecl& cls, FieldDecl& f) {
    std::string qualified = cls.qualifiedName() + "." + f.name;
    if (fieldNames_.count(qualified)) {
      throw DuplicateDeclaration("duplicate field '" + qualified + "'");
    }
    fieldNames_.insert(qualified);
    SymbolInfo info;
    info.kind = SymbolKind::Field;
    info.name = f.name;
    info.qualified = qualified;
    info.unitPath = unit.path;
    info.declSpan = f.span;
    info.annotationAnchor = f.span.begin;
    info.typeName = f.type.name;
    info.typePrimitiveOrVoid = f.type.primitiveOrVoid;
    info.nullableAnnotated = hasNullableAnnotation(f.annotations);
    info.owner = cls.symbol;
    info.id = makeSymbolId(SymbolKind::Field, qualified);
    f.symbol = info.id;
    addSymbol(info);

    Region region;
    region.kind = Region::Kind::FieldDecl;
    region.owner = info.id;
    region.span = f.span;
    region.unitPath = unit.path;
    model_.regions.push_back(region);
    // The declaration itself counts as a usage of the field.
    model_.references.push_back({info.id, info.id, f.span, unit.path});
  }

  void registerMethod(CompilationUnit& unit, ClassDecl& cls, MethodDecl& m,
                      std::set<std::string>& signatures) {
    std::string signature = m.name + "(";
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      if (i) signature += ",";
      signature += m.params[i].type.name;
    }
    signature += ")";
    std::string qualified = cls.qualifiedName() + "." + signature;
    if (!signatures.insert(signature).second) {
      throw DuplicateDeclaration("duplicate method '" + qualified + "'");
    }
    SymbolInfo info;
    info.kind = SymbolKind::Method;
    info.name = m.name;
    info.qualified = cls.qualifiedName() + "." + m.name;
    info.unitPath = unit.path;
    info.declSpan = m.span;
    info.annotationAnchor = m.span.begin;
    if (m.returnType) {
      info.typeName = m.returnType->name;
      info.typePrimitiveOrVoid = m.returnType->primitiveOrVoid;
    }
    info.nullableAnnotated = hasNullableAnnotation(m.annotations);
    info.owner = cls.symbol;
    info.isConstructor = m.isConstructor;
    info.id = makeSymbolId(SymbolKind::Method, qualified);
    m.symbol = info.id;

    for (std::size_t i = 0; i < m.params.size(); ++i) {
      ParamDecl& p = m.params[i];
      SymbolInfo pinfo;
      pinfo.kind = SymbolKind::Param;
      pinfo.name = p.name;
      pinfo.qualified = qualified + "#p" + std::to_string(i) + ":" + p.name;
      pinfo.unitPath = unit.path;
      pinfo.declSpan = p.span;
      pinfo.annotationAnchor = p.span.begin;
      pinfo.typeName = p.type.name;
      pinfo.typePrimitiveOrVoid = p.type.primitiveOrVoid;
      pinfo.nullableAnnotated = hasNullableAnnotation(p.annotations);
      pinfo.owner = info.id;
      pinfo.paramIndex = static_cast<int>(i);
      pinfo.id = makeSymbolId(SymbolKind::Param, pinfo.qualified);
      p.symbol = pinfo.id;
      info.params.push_back(pinfo.id);
      addSymbol(pinfo);
      model_.references.push_back({pinfo.id, info.id, p.span, unit.path});
    }
    addSymbol(info);

    Region region;
    region.kind = Region::Kind::MethodBody;
    region.owner = info.id;
    region.span = m.span;
    region.unitPath = unit.path;
    model_.regions.push_back(region);
    model_.references.push_back({info.id, info.id, m.span, unit.path});
  }

  void addSymbol(const SymbolInfo& info) {
    auto [it, inserted] = model_.symbols.emplace(info.id, info);
    if (!inserted) {
      throw DuplicateDeclaration("duplicate declaration '" + info.qualified + "'");
    }
  }

  // --- resolution ---

  struct Scope {
    std::map<std::string, SymbolId> locals;
  };

  struct MethodContext {
    CompilationUnit* unit = nullptr;
    ClassDecl* cls = nullptr;
    MethodDecl* method = nullptr;
    std::vector<Scope> scopes;

    SymbolId lookupLocal(const std::string& name) const {
      for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto found = it->locals.find(name);
        if (found != it->locals.end()) return found->second;
      }
      return SymbolId{};
    }
  };

  void resolveUnit(CompilationUnit& unit) {
    for (ClassDecl& cls : unit.classes) {
      for (FieldDecl& f : cls.fields) {
        if (f.init) {
          MethodContext ctx;
          ctx.unit = &unit;
          ctx.cls = &cls;
          resolveExpr(*f.init, ctx, f.symbol);
        }
        noteTypeReference(f.type, f.symbol, unit);
      }
      for (MethodDecl& m : cls.methods) {
        MethodContext ctx;
        ctx.unit = &unit;
        ctx.cls = &cls;
        ctx.method = &m;
        ctx.scopes.emplace_back();
        for (ParamDecl& p : m.params) {
          ctx.scopes.back().locals[p.name] = p.symbol;
          noteTypeReference(p.type, m.symbol, unit);
        }
        if (m.returnType) noteTypeReference(*m.returnType, m.symbol, unit);
        if (m.body) resolveStmt(*m.body, ctx);
      }
    }
  }

  void noteTypeReference(const TypeRef& type, SymbolId regionOwner, const CompilationUnit& unit) {
    if (type.primitiveOrVoid) return;
    SymbolId cls = lookupClass(type.name);
    if (cls.valid()) model_.references.push_back({cls, regionOwner, type.span, unit.path});
  }

  SymbolId lookupClass(const std::string& name) const {
    auto q = classByQualified_.find(name);
    if (q != classByQualified_.end()) return q->second;
    // simple-name lookup, also for dotted names whose last segment matches
    auto dot = name.rfind('.');
    std::string simple = dot == std::string::npos ? name : name.substr(dot + 1);
    auto s = classBySimpleName_.find(simple);
    if (s != classBySimpleName_.end() && dot == std::string::npos) return s->second;
    return SymbolId{};
  }

  void resolveStmt(Stmt& stmt, MethodContext& ctx) {
    switch (stmt.kind) {
      case Stmt::Kind::Block: {
        ctx.scopes.emplace_back();
        for (auto& s : stmt.stmts) resolveStmt(*s, ctx);
        ctx.scopes.pop_back();
        break;
      }
      case Stmt::Kind::If: {
        resolveExpr(*stmt.expr, ctx, ctx.method->symbol);
        for (auto& s : stmt.stmts) resolveStmt(*s, ctx);
        break;
      }
      case Stmt::Kind::Return:
      case Stmt::Kind::Throw:
      case Stmt::Kind::ExprStmt: {
        if (stmt.expr) resolveExpr(*stmt.expr, ctx, ctx.method->symbol);
        break;
      }
      case Stmt::Kind::LocalDecl: {
        if (stmt.expr) resolveExpr(*stmt.expr, ctx, ctx.method->symbol);
        SymbolInfo info;
        info.kind = SymbolKind::Local;
        info.name = stmt.name;
        info.qualified = model_.symbols.at(ctx.method->symbol).qualified + "#local:" + stmt.name +
                         "@" + std::to_string(stmt.span.begin);
        info.unitPath = ctx.unit->path;
        info.declSpan = stmt.span;
        info.typeName = stmt.declType.name;
        info.typePrimitiveOrVoid = stmt.declType.primitiveOrVoid;
        info.owner = ctx.method->symbol;
        info.id = makeSymbolId(SymbolKind::Local, info.qualified);
        stmt.localSymbol = info.id;
        addSymbol(info);
        ctx.scopes.back().locals[stmt.name] = info.id;
        noteTypeReference(stmt.declType, ctx.method->symbol, *ctx.unit);
        model_.references.push_back({info.id, ctx.method->symbol, stmt.span, ctx.unit->path});
        break;
      }
      case Stmt::Kind::Assign: {
        resolveExpr(*stmt.lhs, ctx, ctx.method->symbol);
        resolveExpr(*stmt.expr, ctx, ctx.method->symbol);
        break;
      }
      case Stmt::Kind::Opaque:
        break;
    }
  }

  SymbolId regionOwnerFor(const MethodContext& ctx, SymbolId fallback) const {
    return ctx.method ? ctx.method->symbol : fallback;
  }

  void resolveExpr(Expr& e, MethodContext& ctx, SymbolId regionOwner) {
    switch (e.kind) {
      case Expr::Kind::Name: {
        SymbolId local = ctx.lookupLocal(e.text);
        if (local.valid()) {
          e.resolved = {Resolution::Kind::Project, local, "", ""};
          e.staticTypeName = model_.symbols.at(local).typeName;
          model_.references.push_back({local, regionOwner, e.span, ctx.unit->path});
          return;
        }
        if (ctx.cls) {
          if (SymbolId field = lookupFieldIn(ctx.cls->symbol, e.text); field.valid()) {
            e.resolved = {Resolution::Kind::Project, field, "", ""};
            e.staticTypeName = model_.symbols.at(field).typeName;
            model_.references.push_back({field, regionOwner, e.span, ctx.unit->path});
            return;
          }
        }
        if (SymbolId cls = lookupClass(e.text); cls.valid()) {
          e.resolved = {Resolution::Kind::Project, cls, "", ""};
          e.staticTypeName = model_.symbols.at(cls).name;
          model_.references.push_back({cls, regionOwner, e.span, ctx.unit->path});
          return;
        }
        e.resolved = {Resolution::Kind::External, SymbolId{}, e.text, ""};
        break;
      }
      case Expr::Kind::This: {
        if (ctx.cls) e.staticTypeName = ctx.cls->name;
        break;
      }
      case Expr::Kind::FieldAccess: {
        Expr& recv = *e.children[0];
        resolveExpr(recv, ctx, regionOwner);
        resolveMember(e, recv, /*isCall=*/false, 0, ctx, regionOwner);
        break;
      }
      case Expr::Kind::Call: {
        std::size_t firstArg = e.argBegin();
        if (e.hasReceiver) {
          Expr& recv = *e.children[0];
          resolveExpr(recv, ctx, regionOwner);
          for (std::size_t i = firstArg; i < e.children.size(); ++i) {
            resolveExpr(*e.children[i], ctx, regionOwner);
          }
          resolveMember(e, recv, /*isCall=*/true, e.children.size() - firstArg, ctx, regionOwner);
        } else {
          for (std::size_t i = 0; i < e.children.size(); ++i) {
            resolveExpr(*e.children[i], ctx, regionOwner);
          }
          // unqualified call: method of the enclosing class
          SymbolId m = ctx.cls ? lookupMethodIn(ctx.cls->symbol, e.text, e.children.size())
                               : SymbolId{};
          if (m.valid()) {
            e.resolved = {Resolution::Kind::Project, m, "", ""};
            e.staticTypeName = model_.symbols.at(m).typeName;
            model_.references.push_back({m, regionOwner, e.span, ctx.unit->path});
            model_.callers[m].insert(regionOwner);
          } else {
            e.resolved = {Resolution::Kind::External, SymbolId{}, e.text,
                          ctx.cls ? ctx.cls->name : ""};
          }
        }
        break;
      }
      case Expr::Kind::New: {
        for (auto& c : e.children) resolveExpr(*c, ctx, regionOwner);
        SymbolId cls = lookupClass(e.text);
        if (cls.valid()) {
          e.resolved = {Resolution::Kind::Project, cls, "", ""};
          e.staticTypeName = model_.symbols.at(cls).name;
          model_.references.push_back({cls, regionOwner, e.span, ctx.unit->path});
          if (SymbolId ctor = lookupMethodIn(cls, model_.symbols.at(cls).name, e.children.size());
              ctor.valid()) {
            model_.callers[ctor].insert(regionOwner);
          }
        } else {
          e.resolved = {Resolution::Kind::External, SymbolId{}, e.text, ""};
          e.staticTypeName = e.text;
        }
        break;
      }
      case Expr::Kind::Ternary:
      case Expr::Kind::Binary:
      case Expr::Kind::Unary:
      case Expr::Kind::Paren: {
        for (auto& c : e.children) resolveExpr(*c, ctx, regionOwner);
        if (e.kind == Expr::Kind::Paren) e.staticTypeName = e.children[0]->staticTypeName;
        if (e.kind == Expr::Kind::Ternary) {
          const std::string& a = e.children[1]->staticTypeName;
          const std::string& b = e.children[2]->staticTypeName;
          if (a == b) {
            e.staticTypeName = a;
          } else if (e.children[1]->kind == Expr::Kind::NullLit) {
            e.staticTypeName = b;
          } else if (e.children[2]->kind == Expr::Kind::NullLit) {
            e.staticTypeName = a;
          }
        }
        break;
      }
      default:
        break;
    }
  }

  void resolveMember(Expr& e, Expr& recv, bool isCall, std::size_t arity, MethodContext& ctx,
                     SymbolId regionOwner) {
    SymbolId recvClass;
    if (!recv.staticTypeName.empty()) recvClass = lookupClass(recv.staticTypeName);
    if (recvClass.valid()) {
      SymbolId member = isCall ? lookupMethodIn(recvClass, e.text, arity)
                               : lookupFieldIn(recvClass, e.text);
      if (member.valid()) {
        e.resolved = {Resolution::Kind::Project, member, "", ""};
        e.staticTypeName = model_.symbols.at(member).typeName;
        model_.references.push_back({member, regionOwner, e.span, ctx.unit->path});
        if (isCall) model_.callers[member].insert(regionOwner);
        return;
      }
    }
    e.resolved = {Resolution::Kind::External, SymbolId{}, e.text, recv.staticTypeName};
  }

  SymbolId lookupFieldIn(SymbolId classId, const std::string& name) const {
    const SymbolInfo& cls = model_.symbols.at(classId);
    std::string qualified = qualifiedOfClass(cls) + "." + name;
    SymbolId id = makeSymbolId(SymbolKind::Field, qualified);
    return model_.symbols.count(id) ? id : SymbolId{};
  }

  SymbolId lookupMethodIn(SymbolId classId, const std::string& name, std::size_t arity) const {
    // Stable-first match by (name, arity); exact signature ids are opaque,
    // so scan the table.
    const SymbolInfo& cls = model_.symbols.at(classId);
    std::string prefix = qualifiedOfClass(cls) + "." + name;
    const SymbolInfo* best = nullptr;
    for (const auto& [id, info] : model_.symbols) {
      if (info.kind != SymbolKind::Method || info.owner != classId) continue;
      if (info.name != name || info.params.size() != arity) continue;
      if (!best || info.declSpan.begin < best->declSpan.begin) best = &info;
    }
    (void)prefix;
    return best ? best->id : SymbolId{};
  }

  std::string qualifiedOfClass(const SymbolInfo& cls) const { return cls.qualified; }

  ProgramModel& model_;
  const ProjectConfig& config_;
  std::map<std::string, SymbolId> classBySimpleName_;
  std::map<std::string, SymbolId> classByQualified_;
  std::set<std::string> fieldNames_;
};

}  // namespace detail

inline ProgramModel build_model(std::vector<std::unique_ptr<CompilationUnit>> units,
                                const ProjectConfig& config = ProjectConfig{}) {
  ProgramModel model;
  model.units = std::move(units);
  detail::ModelBuilder builder(model, config);
  builder.run();
  return model;
}

inline ProgramModel build_model_from_sources(
    const std::vector<std::pair<std::string, std::string>>& pathAndText,
    const ProjectConfig& config = ProjectConfig{}) {
  std::vector<std::unique_ptr<CompilationUnit>> units;
  for (const auto& [path, text] : pathAndText) {
    units.push_back(std::make_unique<CompilationUnit>(parse_source(text, path)));
  }
  return build_model(std::move(units), config);
}

}  // namespace nullrepair
