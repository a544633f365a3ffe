#include "casp/frontend.hh"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace Casp {

namespace {

using Ast::Term;
using TermKind = Ast::Term::Kind;

constexpr val_t MAX_RANGE = 10'000'000;

//! Ground term: integers < symbols < functions.
struct Val {
    enum class Kind : std::uint8_t { Int, Sym, Fun };

    Kind kind{Kind::Int};
    val_t num{0};
    std::string name;
    std::vector<Val> args;

    [[nodiscard]] auto sig() const -> std::string { return name + "/" + std::to_string(args.size()); }

    [[nodiscard]] auto to_string() const -> std::string {
        switch (kind) {
            case Kind::Int: return std::to_string(num);
            case Kind::Sym: return name;
            case Kind::Fun: {
                std::string out = name + "(";
                for (std::size_t i = 0; i < args.size(); ++i) {
                    out += (i > 0 ? "," : "") + args[i].to_string();
                }
                return out + ")";
            }
        }
        return "";
    }

    friend auto operator==(Val const &a, Val const &b) -> bool {
        return a.kind == b.kind && a.num == b.num && a.name == b.name && a.args == b.args;
    }

    friend auto operator<=>(Val const &a, Val const &b) -> std::strong_ordering {
        if (a.kind != b.kind) {
            return a.kind <=> b.kind;
        }
        switch (a.kind) {
            case Kind::Int: return a.num <=> b.num;
            case Kind::Sym: return a.name <=> b.name;
            case Kind::Fun: {
                if (auto c = a.args.size() <=> b.args.size(); c != 0) {
                    return c;
                }
                if (auto c = a.name <=> b.name; c != 0) {
                    return c;
                }
                for (std::size_t i = 0; i < a.args.size(); ++i) {
                    if (auto c = a.args[i] <=> b.args[i]; c != 0) {
                        return c;
                    }
                }
                return std::strong_ordering::equal;
            }
        }
        return std::strong_ordering::equal;
    }
};

auto make_int(val_t v) -> Val {
    Val r;
    r.num = v;
    return r;
}

using Subst = std::vector<std::pair<std::string, Val>>;

auto lookup(Subst const &s, std::string const &var) -> Val const * {
    for (auto const &[name, val] : s) {
        if (name == var) {
            return &val;
        }
    }
    return nullptr;
}

//! Values of a term under a substitution; several for ranges, none if
//! undefined (arithmetic on non-integers, division by zero).
auto eval(Term const &t, Subst const &s) -> std::vector<Val> {
    switch (t.kind) {
        case TermKind::Integer: return {make_int(t.value)};
        case TermKind::Symbol: {
            Val v;
            v.kind = Val::Kind::Sym;
            v.name = t.name;
            return {v};
        }
        case TermKind::Variable: {
            auto const *v = lookup(s, t.name);
            if (v == nullptr) {
                throw GroundError("unsafe variable " + t.name);
            }
            return {*v};
        }
        case TermKind::Function: {
            std::vector<Val> out(1);
            out[0].kind = Val::Kind::Fun;
            out[0].name = t.name;
            for (auto const &arg : t.args) {
                auto vals = eval(arg, s);
                std::vector<Val> next;
                for (auto const &prefix : out) {
                    for (auto const &v : vals) {
                        next.push_back(prefix);
                        next.back().args.push_back(v);
                    }
                }
                out = std::move(next);
            }
            return out;
        }
        case TermKind::Pool: {
            std::vector<Val> out;
            for (auto const &alt : t.args) {
                auto vals = eval(alt, s);
                out.insert(out.end(), vals.begin(), vals.end());
            }
            return out;
        }
        case TermKind::Range: {
            auto lo = eval(t.args[0], s);
            auto hi = eval(t.args[1], s);
            std::vector<Val> out;
            for (auto const &l : lo) {
                for (auto const &h : hi) {
                    if (l.kind != Val::Kind::Int || h.kind != Val::Kind::Int) {
                        continue;
                    }
                    if (h.num >= l.num && h.num - l.num >= MAX_RANGE) {
                        throw GroundError("range too large: " + t.to_string());
                    }
                    for (val_t i = l.num; i <= h.num; ++i) {
                        out.push_back(make_int(i));
                    }
                }
            }
            return out;
        }
        case TermKind::Negate: {
            std::vector<Val> out;
            for (auto const &v : eval(t.args[0], s)) {
                if (v.kind == Val::Kind::Int) {
                    out.push_back(make_int(checked_neg(v.num)));
                }
            }
            return out;
        }
        case TermKind::Binary: {
            std::vector<Val> out;
            auto lhs = eval(t.args[0], s);
            auto rhs = eval(t.args[1], s);
            for (auto const &a : lhs) {
                for (auto const &b : rhs) {
                    if (a.kind != Val::Kind::Int || b.kind != Val::Kind::Int) {
                        continue;
                    }
                    switch (t.op) {
                        case '+': out.push_back(make_int(checked_add(a.num, b.num))); break;
                        case '-': out.push_back(make_int(checked_sub(a.num, b.num))); break;
                        case '*': out.push_back(make_int(checked_mul(a.num, b.num))); break;
                        case '/':
                            if (b.num != 0) {
                                out.push_back(make_int(a.num / b.num));
                            }
                            break;
                        default:
                            if (b.num != 0) {
                                out.push_back(make_int(a.num % b.num));
                            }
                            break;
                    }
                }
            }
            return out;
        }
    }
    return {};
}

auto bound_in(Term const &t, Subst const &s) -> bool {
    std::vector<std::string> vars;
    t.collect_vars(vars);
    return std::all_of(vars.begin(), vars.end(), [&](auto const &v) { return lookup(s, v) != nullptr; });
}

//! Match a pattern against a ground value, extending the substitution.
auto unify(Term const &t, Val const &v, Subst &s) -> bool {
    switch (t.kind) {
        case TermKind::Variable: {
            if (auto const *b = lookup(s, t.name)) {
                return *b == v;
            }
            s.emplace_back(t.name, v);
            return true;
        }
        case TermKind::Integer: return v.kind == Val::Kind::Int && v.num == t.value;
        case TermKind::Symbol: return v.kind == Val::Kind::Sym && v.name == t.name;
        case TermKind::Function: {
            if (v.kind != Val::Kind::Fun || v.name != t.name || v.args.size() != t.args.size()) {
                return false;
            }
            for (std::size_t i = 0; i < t.args.size(); ++i) {
                if (!unify(t.args[i], v.args[i], s)) {
                    return false;
                }
            }
            return true;
        }
        default: {
            if (!bound_in(t, s)) {
                throw GroundError("unsafe variable in term " + t.to_string());
            }
            auto vals = eval(t, s);
            return std::find(vals.begin(), vals.end(), v) != vals.end();
        }
    }
}

//! Variables bound by matching a term.
void bindable_vars(Term const &t, std::set<std::string> &out) {
    if (t.kind == TermKind::Variable) {
        out.insert(t.name);
    }
    else if (t.kind == TermKind::Function) {
        for (auto const &arg : t.args) {
            bindable_vars(arg, out);
        }
    }
}

auto term_sig(Term const &t) -> std::string {
    return t.name + "/" + std::to_string(t.kind == TermKind::Function ? t.args.size() : 0);
}

class AtomSet {
  public:
    auto add(Val const &v) -> bool {
        if (!keys_.insert(v.to_string()).second) {
            return false;
        }
        sigs_[v.sig()].push_back(v);
        return true;
    }
    [[nodiscard]] auto contains(Val const &v) const -> bool { return keys_.contains(v.to_string()); }
    [[nodiscard]] auto size() const -> std::size_t { return keys_.size(); }
    [[nodiscard]] auto by_sig(std::string const &sig) const -> std::vector<Val> const & {
        static std::vector<Val> const empty;
        auto it = sigs_.find(sig);
        return it == sigs_.end() ? empty : it->second;
    }

  private:
    std::unordered_map<std::string, std::vector<Val>> sigs_;
    std::unordered_set<std::string> keys_;
};

//! Body literal prepared for instantiation.
struct Lit {
    enum class Kind : std::uint8_t { Pos, Neg, Cmp, Theory };
    Kind kind{Kind::Pos};
    Ast::Literal const *lit{nullptr};

    [[nodiscard]] auto atom() const -> Term const & { return std::get<Ast::Atom>(lit->item).term; }
    [[nodiscard]] auto cmp() const -> Ast::Comparison const & { return std::get<Ast::Comparison>(lit->item); }
    [[nodiscard]] auto theory() const -> Ast::TheoryAtom const & { return std::get<Ast::TheoryAtom>(lit->item); }
};

auto prepare(std::vector<Ast::Literal> const &lits) -> std::vector<Lit> {
    std::vector<Lit> out;
    for (auto const &l : lits) {
        Lit p;
        p.lit = &l;
        if (std::holds_alternative<Ast::Atom>(l.item)) {
            p.kind = l.negated ? Lit::Kind::Neg : Lit::Kind::Pos;
        }
        else if (std::holds_alternative<Ast::Comparison>(l.item)) {
            p.kind = Lit::Kind::Cmp;
        }
        else {
            p.kind = Lit::Kind::Theory;
        }
        out.push_back(p);
    }
    return out;
}

void literal_vars(Lit const &l, std::vector<std::string> &out) {
    switch (l.kind) {
        case Lit::Kind::Pos:
        case Lit::Kind::Neg: l.atom().collect_vars(out); break;
        case Lit::Kind::Cmp:
            l.cmp().lhs.collect_vars(out);
            l.cmp().rhs.collect_vars(out);
            break;
        case Lit::Kind::Theory:
            l.theory().lhs.collect_vars(out);
            l.theory().rhs.collect_vars(out);
            break;
    }
}

//! Variables bound by a list of literals given already bound ones.
auto safe_vars(std::vector<Lit> const &lits, std::set<std::string> bound) -> std::set<std::string> {
    for (auto const &l : lits) {
        if (l.kind == Lit::Kind::Pos) {
            bindable_vars(l.atom(), bound);
        }
    }
    auto covered = [&](Term const &t) {
        std::vector<std::string> vars;
        t.collect_vars(vars);
        return std::all_of(vars.begin(), vars.end(), [&](auto const &v) { return bound.contains(v); });
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (auto const &l : lits) {
            if (l.kind != Lit::Kind::Cmp || l.cmp().rel != Relation::EQ) {
                continue;
            }
            auto const &c = l.cmp();
            if (c.lhs.kind == TermKind::Variable && !bound.contains(c.lhs.name) && covered(c.rhs)) {
                bound.insert(c.lhs.name);
                changed = true;
            }
            if (c.rhs.kind == TermKind::Variable && !bound.contains(c.rhs.name) && covered(c.lhs)) {
                bound.insert(c.rhs.name);
                changed = true;
            }
        }
    }
    return bound;
}

void require_safe(std::vector<std::string> const &vars, std::set<std::string> const &bound, Ast::Location loc) {
    for (auto const &v : vars) {
        if (!bound.contains(v)) {
            throw GroundError(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": unsafe variable " + v);
        }
    }
}

auto compare(std::vector<Val> const &lhs, Relation rel, std::vector<Val> const &rhs) -> bool {
    for (auto const &a : lhs) {
        for (auto const &b : rhs) {
            auto c = a <=> b;
            bool ok = false;
            switch (rel) {
                case Relation::EQ: ok = c == 0; break;
                case Relation::NE: ok = c != 0; break;
                case Relation::LT: ok = c < 0; break;
                case Relation::LE: ok = c <= 0; break;
                case Relation::GT: ok = c > 0; break;
                case Relation::GE: ok = c >= 0; break;
            }
            if (ok) {
                return true;
            }
        }
    }
    return false;
}

//! Enumerates substitutions satisfying the positive atoms and comparisons of
//! a literal list; negative and theory literals are left to the callback.
class Join {
  public:
    Join(std::vector<Lit> const &lits, AtomSet const &atoms, std::function<void(Subst const &)> on_solution)
        : lits_{lits}, atoms_{atoms}, done_(lits.size(), false), on_solution_{std::move(on_solution)} {}

    void run(Subst &s) { step(s); }

  private:
    void step(Subst &s) {
        for (std::size_t i = 0; i < lits_.size(); ++i) {
            if (done_[i] || lits_[i].kind != Lit::Kind::Cmp) {
                continue;
            }
            auto const &c = lits_[i].cmp();
            bool lhs_bound = bound_in(c.lhs, s);
            bool rhs_bound = bound_in(c.rhs, s);
            if (lhs_bound && rhs_bound) {
                done_[i] = true;
                if (compare(eval(c.lhs, s), c.rel, eval(c.rhs, s))) {
                    step(s);
                }
                done_[i] = false;
                return;
            }
            if (c.rel == Relation::EQ && (lhs_bound || rhs_bound)) {
                auto const &var = lhs_bound ? c.rhs : c.lhs;
                auto const &val = lhs_bound ? c.lhs : c.rhs;
                if (var.kind != TermKind::Variable) {
                    continue;
                }
                done_[i] = true;
                for (auto const &v : eval(val, s)) {
                    s.emplace_back(var.name, v);
                    step(s);
                    s.pop_back();
                }
                done_[i] = false;
                return;
            }
        }
        for (std::size_t i = 0; i < lits_.size(); ++i) {
            if (done_[i] || lits_[i].kind != Lit::Kind::Pos) {
                continue;
            }
            auto const &pattern = lits_[i].atom();
            auto const &candidates = atoms_.by_sig(term_sig(pattern));
            done_[i] = true;
            auto n = candidates.size();
            for (std::size_t j = 0; j < n; ++j) {
                Val cand = candidates[j];
                auto mark = s.size();
                if (unify(pattern, cand, s)) {
                    step(s);
                }
                s.resize(mark);
            }
            done_[i] = false;
            return;
        }
        for (std::size_t i = 0; i < lits_.size(); ++i) {
            if (!done_[i] && lits_[i].kind == Lit::Kind::Cmp) {
                throw GroundError("unsafe comparison");
            }
        }
        on_solution_(s);
    }

    std::vector<Lit> const &lits_;
    AtomSet const &atoms_;
    std::vector<bool> done_;
    std::function<void(Subst const &)> on_solution_;
};

//! Ast rule with its literals prepared and pools expanded.
struct Stmt {
    Ast::Rule rule;
    std::vector<Lit> body;
    std::size_t source{0}; //!< index of the statement in the input
};

//! Expand pools in a term into alternatives.
auto unpool(Term const &t) -> std::vector<Term> {
    if (t.kind == TermKind::Pool) {
        std::vector<Term> out;
        for (auto const &alt : t.args) {
            auto sub = unpool(alt);
            out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
    }
    std::vector<Term> out{t};
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        std::vector<Term> next;
        for (auto const &alt : unpool(t.args[i])) {
            for (auto const &prefix : out) {
                next.push_back(prefix);
                next.back().args[i] = alt;
            }
        }
        out = std::move(next);
    }
    return out;
}

auto unpool(Ast::TheoryExpr const &e) -> std::vector<Ast::TheoryExpr> {
    if (e.kind == Ast::TheoryExpr::Kind::Leaf) {
        std::vector<Ast::TheoryExpr> out;
        for (auto &t : unpool(e.leaf)) {
            Ast::TheoryExpr leaf;
            leaf.leaf = std::move(t);
            out.push_back(std::move(leaf));
        }
        return out;
    }
    std::vector<Ast::TheoryExpr> out{e};
    for (std::size_t i = 0; i < e.args.size(); ++i) {
        std::vector<Ast::TheoryExpr> next;
        for (auto const &alt : unpool(e.args[i])) {
            for (auto const &prefix : out) {
                next.push_back(prefix);
                next.back().args[i] = alt;
            }
        }
        out = std::move(next);
    }
    return out;
}

auto unpool(Ast::TheoryAtom const &a) -> std::vector<Ast::TheoryAtom> {
    std::vector<Ast::TheoryAtom> out;
    for (auto const &l : unpool(a.lhs)) {
        for (auto const &r : unpool(a.rhs)) {
            out.push_back({l, a.rel, r});
        }
    }
    return out;
}

auto unpool(Ast::Literal const &lit) -> std::vector<Ast::Literal> {
    std::vector<Ast::Literal> out;
    std::visit(
        [&](auto const &item) {
            using T = std::decay_t<decltype(item)>;
            if constexpr (std::is_same_v<T, Ast::Atom>) {
                for (auto &t : unpool(item.term)) {
                    out.push_back({lit.negated, Ast::Atom{std::move(t)}, lit.loc});
                }
            }
            else if constexpr (std::is_same_v<T, Ast::Comparison>) {
                for (auto const &l : unpool(item.lhs)) {
                    for (auto const &r : unpool(item.rhs)) {
                        out.push_back({lit.negated, Ast::Comparison{l, item.rel, r}, lit.loc});
                    }
                }
            }
            else {
                for (auto &a : unpool(item)) {
                    out.push_back({lit.negated, std::move(a), lit.loc});
                }
            }
        },
        lit.item);
    return out;
}

auto unpool(std::vector<Ast::Literal> const &lits) -> std::vector<std::vector<Ast::Literal>> {
    std::vector<std::vector<Ast::Literal>> out(1);
    for (auto const &lit : lits) {
        std::vector<std::vector<Ast::Literal>> next;
        for (auto const &alt : unpool(lit)) {
            for (auto const &prefix : out) {
                next.push_back(prefix);
                next.back().push_back(alt);
            }
        }
        out = std::move(next);
    }
    return out;
}

template <class T> auto unpool_item(T const &item) -> std::vector<T> {
    if constexpr (std::is_same_v<T, Ast::Atom>) {
        std::vector<Ast::Atom> out;
        for (auto &t : unpool(item.term)) {
            out.push_back({std::move(t)});
        }
        return out;
    }
    else {
        return unpool(item);
    }
}

template <class T> auto unpool(std::vector<Ast::Conditional<T>> const &elems) -> std::vector<Ast::Conditional<T>> {
    std::vector<Ast::Conditional<T>> out;
    for (auto const &elem : elems) {
        for (auto const &item : unpool_item(elem.item)) {
            for (auto const &cond : unpool(elem.condition)) {
                out.push_back({item, cond});
            }
        }
    }
    return out;
}

auto unpool(Ast::Head const &head) -> std::vector<Ast::Head> {
    return std::visit(
        [](auto const &h) -> std::vector<Ast::Head> {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return {h};
            }
            else if constexpr (std::is_same_v<T, Ast::Atom>) {
                std::vector<Ast::Head> out;
                for (auto &t : unpool(h.term)) {
                    out.emplace_back(Ast::Atom{std::move(t)});
                }
                return out;
            }
            else if constexpr (std::is_same_v<T, Ast::TheoryAtom>) {
                std::vector<Ast::Head> out;
                for (auto &a : unpool(h)) {
                    out.emplace_back(std::move(a));
                }
                return out;
            }
            else if constexpr (std::is_same_v<T, Ast::CountHead>) {
                Ast::CountHead c = h;
                c.elements = unpool(h.elements);
                auto bounds = unpool(h.bound);
                std::vector<Ast::Head> out;
                for (auto &b : bounds) {
                    c.bound = std::move(b);
                    out.emplace_back(c);
                }
                return out;
            }
            else {
                T c = h;
                c.elements = unpool(h.elements);
                return {c};
            }
        },
        head);
}

class Grounder {
  public:
    Grounder(Ast::Program const &program, std::vector<std::string> *warnings)
        : program_{program}, warnings_{warnings} {}

    auto run() -> GroundProgram {
        domain();
        prepare_statements();
        check_safety();
        for (std::size_t possible = SIZE_MAX, certain = SIZE_MAX;
             possible != possible_.size() || certain != certain_.size();) {
            possible = possible_.size();
            certain = certain_.size();
            possible_fixpoint();
            certain_fixpoint();
        }
        for (auto const &stmt : stmts_) {
            emit(stmt);
        }
        finish_objectives();
        if (!prg_.domain.declared && prg_.vars.size() > 0 && warnings_ != nullptr) {
            warnings_->push_back("no $domain declaration, constraint variables default to [" +
                                 std::to_string(prg_.domain.lower) + "," + std::to_string(prg_.domain.upper) + "]");
        }
        return std::move(prg_);
    }

  private:
    void domain() {
        for (auto const &d : program_.domains) {
            if (prg_.domain.declared && (prg_.domain.lower != d.lower || prg_.domain.upper != d.upper)) {
                throw GroundError(std::to_string(d.loc.line) + ":" + std::to_string(d.loc.column) +
                                  ": conflicting $domain declarations");
            }
            prg_.domain = {d.lower, d.upper, true};
        }
    }

    void prepare_statements() {
        for (std::size_t i = 0; i < program_.rules.size(); ++i) {
            auto const &rule = program_.rules[i];
            for (auto &head : unpool(rule.head)) {
                for (auto &body : unpool(rule.body)) {
                    Stmt stmt;
                    stmt.rule.head = head;
                    stmt.rule.body = std::move(body);
                    stmt.rule.loc = rule.loc;
                    stmt.source = i;
                    stmts_.push_back(std::move(stmt));
                }
            }
        }
        for (auto &stmt : stmts_) {
            stmt.body = prepare(stmt.rule.body);
        }
    }

    template <class T> static void check_elements(std::vector<Ast::Conditional<T>> const &elems,
                                                  std::set<std::string> const &bound, Ast::Location loc) {
        for (auto const &elem : elems) {
            auto lits = prepare(elem.condition);
            auto local = safe_vars(lits, bound);
            std::vector<std::string> vars;
            if constexpr (std::is_same_v<T, Ast::Atom>) {
                elem.item.term.collect_vars(vars);
            }
            else if constexpr (std::is_same_v<T, Ast::TheoryAtom>) {
                elem.item.lhs.collect_vars(vars);
                elem.item.rhs.collect_vars(vars);
            }
            else {
                elem.item.collect_vars(vars);
            }
            for (auto const &l : lits) {
                literal_vars(l, vars);
            }
            require_safe(vars, local, loc);
        }
    }

    void check_safety() {
        for (auto const &stmt : stmts_) {
            auto bound = safe_vars(stmt.body, {});
            std::vector<std::string> vars;
            for (auto const &l : stmt.body) {
                literal_vars(l, vars);
            }
            auto loc = stmt.rule.loc;
            std::visit(
                [&](auto const &h) {
                    using T = std::decay_t<decltype(h)>;
                    if constexpr (std::is_same_v<T, Ast::Atom>) {
                        h.term.collect_vars(vars);
                    }
                    else if constexpr (std::is_same_v<T, Ast::TheoryAtom>) {
                        h.lhs.collect_vars(vars);
                        h.rhs.collect_vars(vars);
                    }
                    else if constexpr (std::is_same_v<T, Ast::ChoiceHead>) {
                        if (h.lower) {
                            h.lower->collect_vars(vars);
                        }
                        if (h.upper) {
                            h.upper->collect_vars(vars);
                        }
                        check_elements(h.elements, bound, loc);
                    }
                    else if constexpr (std::is_same_v<T, Ast::CountHead>) {
                        h.bound.collect_vars(vars);
                        check_elements(h.elements, bound, loc);
                    }
                    else if constexpr (!std::is_same_v<T, std::monostate>) {
                        check_elements(h.elements, bound, loc);
                    }
                },
                stmt.rule.head);
            require_safe(vars, bound, loc);
        }
    }

    //! Instances of element conditions over the given atoms; negative
    //! literals are checked by `accept`.
    template <class F>
    void expand_condition(std::vector<Ast::Literal> const &condition, Subst const &base, AtomSet const &atoms, F &&f) {
        auto lits = prepare(condition);
        Subst s = base;
        Join join{lits, atoms, [&](Subst const &sol) { f(lits, sol); }};
        join.run(s);
    }

    void add_head_atoms(Term const &t, Subst const &s, AtomSet &set) {
        for (auto const &v : eval(t, s)) {
            if (v.kind == Val::Kind::Int) {
                throw GroundError("integer used as atom: " + v.to_string());
            }
            set.add(v);
        }
    }

    //! Instance may hold given the certain atoms.
    auto blocked(std::vector<Lit> const &lits, Subst const &s) const -> bool {
        for (auto const &l : lits) {
            if (l.kind == Lit::Kind::Neg) {
                for (auto const &v : eval(l.atom(), s)) {
                    if (certain_.contains(v)) {
                        return true;
                    }
                }
            }
            else if (l.kind == Lit::Kind::Theory) {
                auto value = theory_constant(l.theory(), s);
                if (value && *value == l.lit->negated) {
                    return true;
                }
            }
        }
        return false;
    }

    //! Atoms that may be true; negative literals over certain atoms block.
    void possible_fixpoint() {
        possible_ = AtomSet{};
        for (std::size_t last = SIZE_MAX; last != possible_.size();) {
            last = possible_.size();
            for (auto const &stmt : stmts_) {
                auto const *atom = std::get_if<Ast::Atom>(&stmt.rule.head);
                auto const *choice = std::get_if<Ast::ChoiceHead>(&stmt.rule.head);
                if (atom == nullptr && choice == nullptr) {
                    continue;
                }
                Subst s;
                Join join{stmt.body, possible_, [&](Subst const &sol) {
                              if (blocked(stmt.body, sol)) {
                                  return;
                              }
                              if (atom != nullptr) {
                                  add_head_atoms(atom->term, sol, possible_);
                                  return;
                              }
                              for (auto const &elem : choice->elements) {
                                  expand_condition(elem.condition, sol, possible_,
                                                   [&](std::vector<Lit> const &lits, Subst const &inner) {
                                                       if (blocked(lits, inner)) {
                                                           return;
                                                       }
                                                       add_head_atoms(elem.item.term, inner, possible_);
                                                   });
                              }
                          }};
                join.run(s);
            }
        }
    }

    //! Truth value of a constraint literal without constraint variables.
    static auto theory_constant(Ast::TheoryAtom const &a, Subst const &s) -> std::optional<bool> {
        bool has_var = false;
        std::function<std::optional<Expr>(Ast::TheoryExpr const &)> build =
            [&](Ast::TheoryExpr const &e) -> std::optional<Expr> {
            if (e.kind == Ast::TheoryExpr::Kind::Leaf) {
                auto vals = eval(e.leaf, s);
                if (vals.size() != 1 || vals[0].kind != Val::Kind::Int) {
                    has_var = true;
                    return std::nullopt;
                }
                return Expr::constant(vals[0].num);
            }
            std::vector<Expr> args;
            for (auto const &arg : e.args) {
                auto x = build(arg);
                if (!x) {
                    return std::nullopt;
                }
                args.push_back(std::move(*x));
            }
            return combine(e.kind, std::move(args));
        };
        auto lhs = build(a.lhs);
        auto rhs = build(a.rhs);
        if (has_var || !lhs || !rhs) {
            return std::nullopt;
        }
        return ArithConstraint{*lhs, a.rel, *rhs}.evaluate({});
    }

    static auto combine(Ast::TheoryExpr::Kind kind, std::vector<Expr> args) -> Expr {
        switch (kind) {
            case Ast::TheoryExpr::Kind::Add: return Expr::add(std::move(args));
            case Ast::TheoryExpr::Kind::Sub: return Expr::sub(std::move(args[0]), std::move(args[1]));
            case Ast::TheoryExpr::Kind::Mul: return Expr::mul(std::move(args));
            case Ast::TheoryExpr::Kind::Neg: return Expr::neg(std::move(args[0]));
            case Ast::TheoryExpr::Kind::Abs: return Expr::abs(std::move(args[0]));
            case Ast::TheoryExpr::Kind::Leaf: break;
        }
        throw InternalError("unexpected theory expression");
    }

    void certain_fixpoint() {
        certain_ = AtomSet{};
        for (std::size_t last = SIZE_MAX; last != certain_.size();) {
            last = certain_.size();
            for (auto const &stmt : stmts_) {
                auto const *atom = std::get_if<Ast::Atom>(&stmt.rule.head);
                if (atom == nullptr) {
                    continue;
                }
                Subst s;
                Join join{stmt.body, certain_, [&](Subst const &sol) {
                              for (auto const &l : stmt.body) {
                                  if (l.kind == Lit::Kind::Neg) {
                                      for (auto const &v : eval(l.atom(), sol)) {
                                          if (possible_.contains(v)) {
                                              return;
                                          }
                                      }
                                  }
                                  else if (l.kind == Lit::Kind::Theory) {
                                      auto value = theory_constant(l.theory(), sol);
                                      if (!value || *value == l.lit->negated) {
                                          return;
                                      }
                                  }
                              }
                              add_head_atoms(atom->term, sol, certain_);
                          }};
                join.run(s);
            }
        }
    }

    auto expr(Ast::TheoryExpr const &e, Subst const &s) -> Expr {
        if (e.kind == Ast::TheoryExpr::Kind::Leaf) {
            auto vals = eval(e.leaf, s);
            if (vals.size() != 1) {
                throw GroundError("theory term must denote one value: " + e.leaf.to_string());
            }
            if (vals[0].kind == Val::Kind::Int) {
                return Expr::constant(vals[0].num);
            }
            return Expr::variable(prg_.vars.intern(vals[0].to_string()));
        }
        std::vector<Expr> args;
        for (auto const &arg : e.args) {
            args.push_back(expr(arg, s));
        }
        return combine(e.kind, std::move(args));
    }

    auto constraint(Ast::TheoryAtom const &a, Subst const &s) -> ArithConstraint {
        return ArithConstraint{expr(a.lhs, s), a.rel, expr(a.rhs, s)}.canonical(prg_.names());
    }

    //! Result of simplifying a body instance.
    struct Body {
        bool discard{false};
        std::vector<Val> pos;
        std::vector<Val> neg;
        std::vector<std::pair<ArithConstraint, bool>> theory; //!< constraint and negation
    };

    auto simplify(std::vector<Lit> const &lits, Subst const &s) -> Body {
        Body body;
        for (auto const &l : lits) {
            switch (l.kind) {
                case Lit::Kind::Pos:
                    for (auto const &v : eval(l.atom(), s)) {
                        if (!certain_.contains(v)) {
                            body.pos.push_back(v);
                        }
                    }
                    break;
                case Lit::Kind::Neg:
                    for (auto const &v : eval(l.atom(), s)) {
                        if (certain_.contains(v)) {
                            body.discard = true;
                            return body;
                        }
                        if (possible_.contains(v)) {
                            body.neg.push_back(v);
                        }
                    }
                    break;
                case Lit::Kind::Cmp: break;
                case Lit::Kind::Theory: {
                    if (auto value = theory_constant(l.theory(), s)) {
                        if (*value == l.lit->negated) {
                            body.discard = true;
                            return body;
                        }
                        break;
                    }
                    body.theory.emplace_back(constraint(l.theory(), s), l.lit->negated);
                    break;
                }
            }
        }
        return body;
    }

    //! Registers body atoms and returns the literals; nullopt if the body
    //! contains complementary literals.
    auto body_literals(Body const &body) -> std::optional<std::vector<Literal>> {
        std::vector<Literal> out;
        auto push = [&](Literal lit) {
            if (std::find(out.begin(), out.end(), lit) == out.end()) {
                out.push_back(lit);
            }
        };
        for (auto const &v : body.pos) {
            push(Literal::pos(prg_.add_atom(v.to_string())));
        }
        for (auto const &v : body.neg) {
            push(Literal::neg(prg_.add_atom(v.to_string())));
        }
        for (auto const &[c, negated] : body.theory) {
            auto lit = prg_.add_constraint(c);
            push(negated ? ~lit : lit);
        }
        for (auto lit : out) {
            if (std::find(out.begin(), out.end(), ~lit) != out.end()) {
                return std::nullopt;
            }
        }
        return out;
    }

    void add_rule(GroundRule rule) {
        std::string key = rule.head ? std::to_string(*rule.head) : "-";
        for (auto lit : rule.body) {
            key += "," + std::to_string(lit.index());
        }
        if (rule_keys_.insert(key).second) {
            prg_.rules.push_back(std::move(rule));
        }
    }

    static auto fact_error(Ast::Location loc, char const *what) -> GroundError {
        return GroundError(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + what +
                           " must become a fact during grounding");
    }

    //! Expand a conditional element whose condition must be decided by
    //! certain atoms.
    template <class F>
    void expand_fact_condition(std::vector<Ast::Literal> const &condition, Subst const &base, Ast::Location loc,
                               F &&f) {
        expand_condition(condition, base, possible_, [&](std::vector<Lit> const &lits, Subst const &sol) {
            for (auto const &l : lits) {
                if (l.kind == Lit::Kind::Theory) {
                    throw GroundError(std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                                      ": constraint atoms are not allowed in conditions");
                }
                if (l.kind != Lit::Kind::Pos && l.kind != Lit::Kind::Neg) {
                    continue;
                }
                for (auto const &v : eval(l.atom(), sol)) {
                    if (possible_.contains(v) && !certain_.contains(v)) {
                        throw GroundError(std::to_string(loc.line) + ":" + std::to_string(loc.column) +
                                          ": condition atom " + v.to_string() + " is not defined by facts");
                    }
                    if (l.kind == Lit::Kind::Neg && certain_.contains(v)) {
                        return;
                    }
                }
            }
            f(sol);
        });
    }

    auto bound_value(std::optional<Term> const &t, Subst const &s) -> std::optional<val_t> {
        if (!t) {
            return std::nullopt;
        }
        auto vals = eval(*t, s);
        if (vals.size() != 1 || vals[0].kind != Val::Kind::Int) {
            throw GroundError("cardinality bound must be an integer: " + t->to_string());
        }
        return vals[0].num;
    }

    void emit(Stmt const &stmt) {
        Subst s;
        auto loc = stmt.rule.loc;
        Join join{stmt.body, possible_, [&](Subst const &sol) {
                      auto body = simplify(stmt.body, sol);
                      if (body.discard) {
                          return;
                      }
                      std::visit([&](auto const &h) { emit_head(h, stmt, body, sol, loc); }, stmt.rule.head);
                  }};
        join.run(s);
    }

    void emit_head(std::monostate, Stmt const &, Body const &body, Subst const &, Ast::Location) {
        if (auto lits = body_literals(body)) {
            add_rule({std::nullopt, std::move(*lits)});
        }
    }

    void emit_head(Ast::Atom const &h, Stmt const &, Body const &body, Subst const &s, Ast::Location) {
        for (auto const &v : eval(h.term, s)) {
            auto head = prg_.add_atom(v.to_string());
            if (auto lits = body_literals(body)) {
                add_rule({head, std::move(*lits)});
            }
        }
    }

    void emit_head(Ast::TheoryAtom const &h, Stmt const &, Body const &body, Subst const &s, Ast::Location) {
        std::optional<Literal> head;
        if (auto value = theory_constant(h, s)) {
            if (*value) {
                return;
            }
        }
        else {
            head = prg_.add_constraint(constraint(h, s));
        }
        if (auto lits = body_literals(body)) {
            if (head) {
                if (std::find(lits->begin(), lits->end(), *head) != lits->end()) {
                    return;
                }
                if (std::find(lits->begin(), lits->end(), ~*head) == lits->end()) {
                    lits->push_back(~*head);
                }
            }
            add_rule({std::nullopt, std::move(*lits)});
        }
    }

    void emit_head(Ast::ChoiceHead const &h, Stmt const &, Body const &body, Subst const &s, Ast::Location loc) {
        ChoiceRule choice;
        choice.lower = bound_value(h.lower, s);
        choice.upper = bound_value(h.upper, s);
        for (auto const &elem : h.elements) {
            expand_fact_condition(elem.condition, s, loc, [&](Subst const &inner) {
                for (auto const &v : eval(elem.item.term, inner)) {
                    auto atom = prg_.add_atom(v.to_string());
                    if (std::find(choice.heads.begin(), choice.heads.end(), atom) == choice.heads.end()) {
                        choice.heads.push_back(atom);
                    }
                }
            });
        }
        auto lits = body_literals(body);
        if (!lits) {
            return;
        }
        choice.body = std::move(*lits);
        std::string key;
        for (auto a : choice.heads) {
            key += std::to_string(a) + ",";
        }
        key += "|" + (choice.lower ? std::to_string(*choice.lower) : "") + "|" +
               (choice.upper ? std::to_string(*choice.upper) : "") + "|";
        for (auto lit : choice.body) {
            key += std::to_string(lit.index()) + ",";
        }
        if (choice_keys_.insert(key).second) {
            prg_.choices.push_back(std::move(choice));
        }
    }

    void emit_head(Ast::CountHead const &h, Stmt const &, Body const &body, Subst const &s, Ast::Location loc) {
        if (!body.pos.empty() || !body.neg.empty() || !body.theory.empty()) {
            throw fact_error(loc, "$count");
        }
        CountConstraint count;
        count.rel = h.rel;
        count.bound = expr(h.bound, s).canonical(prg_.names());
        std::set<std::string> seen;
        for (auto const &elem : h.elements) {
            expand_fact_condition(elem.condition, s, loc, [&](Subst const &inner) {
                auto c = constraint(elem.item, inner);
                if (seen.insert(c.key()).second) {
                    count.elements.push_back(std::move(c));
                }
            });
        }
        if (count.elements.empty()) {
            // no elements: the count is zero
            auto c = ArithConstraint{Expr::constant(0), count.rel, count.bound}.canonical(prg_.names());
            if (c.vars().empty()) {
                if (!c.evaluate({})) {
                    add_rule({std::nullopt, {}});
                }
                return;
            }
            add_rule({std::nullopt, {~prg_.add_constraint(c)}});
            return;
        }
        prg_.counts.push_back(std::move(count));
    }

    void emit_head(Ast::DistinctHead const &h, Stmt const &, Body const &body, Subst const &s, Ast::Location loc) {
        if (!body.pos.empty() || !body.neg.empty() || !body.theory.empty()) {
            throw fact_error(loc, "$distinct");
        }
        DistinctConstraint distinct;
        std::set<std::string> seen;
        for (auto const &elem : h.elements) {
            expand_fact_condition(elem.condition, s, loc, [&](Subst const &inner) {
                auto e = expr(elem.item, inner).canonical(prg_.names());
                if (seen.insert(e.key()).second) {
                    distinct.exprs.push_back(std::move(e));
                }
            });
        }
        if (distinct.exprs.size() >= 2) {
            prg_.distincts.push_back(std::move(distinct));
        }
    }

    void emit_head(Ast::OptimizeHead const &h, Stmt const &stmt, Body const &body, Subst const &s, Ast::Location loc) {
        if (!body.pos.empty() || !body.neg.empty() || !body.theory.empty()) {
            throw fact_error(loc, "optimize statement");
        }
        auto &entry = objectives_[stmt.source];
        entry.first.sense = h.sense;
        for (auto const &elem : h.elements) {
            expand_fact_condition(elem.condition, s, loc, [&](Subst const &inner) {
                auto e = expr(elem.item, inner).canonical(prg_.names());
                if (entry.second.insert(e.key()).second) {
                    entry.first.terms.push_back(std::move(e));
                }
            });
        }
    }

    void finish_objectives() {
        for (auto &[source, entry] : objectives_) {
            if (!entry.first.terms.empty()) {
                prg_.objectives.push_back(std::move(entry.first));
            }
        }
    }

    Ast::Program const &program_;
    std::vector<std::string> *warnings_;
    std::vector<Stmt> stmts_;
    AtomSet possible_;
    AtomSet certain_;
    GroundProgram prg_;
    std::unordered_set<std::string> rule_keys_;
    std::unordered_set<std::string> choice_keys_;
    std::map<std::size_t, std::pair<Objective, std::set<std::string>>> objectives_;
};

} // namespace

auto ground(Ast::Program const &program, std::vector<std::string> *warnings) -> GroundProgram {
    return Grounder{program, warnings}.run();
}

auto ground_text(std::string_view text, std::vector<std::string> *warnings) -> GroundProgram {
    return ground(parse(text), warnings);
}

void tightness_check(GroundProgram const &prg) {
    std::vector<std::vector<atom_t>> edges(prg.num_atoms());
    auto depend = [&](atom_t head, std::vector<Literal> const &body) {
        for (auto lit : body) {
            if (lit.sign() && prg.atom_kind(lit.atom()) == AtomKind::Regular) {
                edges[head].push_back(lit.atom());
            }
        }
    };
    for (auto const &rule : prg.rules) {
        if (rule.head) {
            depend(*rule.head, rule.body);
        }
    }
    for (auto const &choice : prg.choices) {
        for (auto head : choice.heads) {
            depend(head, choice.body);
        }
    }
    enum : std::uint8_t { WHITE, GREY, BLACK };
    std::vector<std::uint8_t> color(prg.num_atoms(), WHITE);
    std::vector<std::pair<atom_t, std::size_t>> stack;
    for (atom_t root = 0; root < prg.num_atoms(); ++root) {
        if (color[root] != WHITE) {
            continue;
        }
        stack.emplace_back(root, 0);
        color[root] = GREY;
        while (!stack.empty()) {
            auto &[atom, next] = stack.back();
            if (next == edges[atom].size()) {
                color[atom] = BLACK;
                stack.pop_back();
                continue;
            }
            auto succ = edges[atom][next++];
            if (color[succ] == GREY) {
                std::string cycle;
                auto it = std::find_if(stack.begin(), stack.end(), [&](auto const &e) { return e.first == succ; });
                for (; it != stack.end(); ++it) {
                    cycle += (cycle.empty() ? "" : ", ") + prg.atom_name(it->first);
                }
                throw GroundError("program is not tight, positive cycle through {" + cycle + "}");
            }
            if (color[succ] == WHITE) {
                color[succ] = GREY;
                stack.emplace_back(succ, 0);
            }
        }
    }
}

} // namespace Casp
