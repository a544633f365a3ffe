#include "casp/frontend.hh"

#include <cctype>
#include <charconv>

namespace Casp {

namespace Ast {

auto Term::integer(val_t v) -> Term {
    Term t;
    t.kind = Kind::Integer;
    t.value = v;
    return t;
}

auto Term::symbol(std::string name) -> Term {
    Term t;
    t.kind = Kind::Symbol;
    t.name = std::move(name);
    return t;
}

auto Term::variable(std::string name) -> Term {
    Term t;
    t.kind = Kind::Variable;
    t.name = std::move(name);
    return t;
}

auto Term::function(std::string name, std::vector<Term> args) -> Term {
    Term t;
    t.kind = Kind::Function;
    t.name = std::move(name);
    t.args = std::move(args);
    return t;
}

void Term::collect_vars(std::vector<std::string> &out) const {
    if (kind == Kind::Variable) {
        out.push_back(name);
    }
    for (auto const &arg : args) {
        arg.collect_vars(out);
    }
}

auto Term::to_string() const -> std::string {
    switch (kind) {
        case Kind::Integer: return std::to_string(value);
        case Kind::Symbol:
        case Kind::Variable: return name;
        case Kind::Function: {
            std::string out = name + "(";
            for (std::size_t i = 0; i < args.size(); ++i) {
                out += (i > 0 ? "," : "") + args[i].to_string();
            }
            return out + ")";
        }
        case Kind::Range: return args[0].to_string() + ".." + args[1].to_string();
        case Kind::Pool: {
            std::string out;
            for (std::size_t i = 0; i < args.size(); ++i) {
                out += (i > 0 ? ";" : "") + args[i].to_string();
            }
            return out;
        }
        case Kind::Binary: return "(" + args[0].to_string() + op + args[1].to_string() + ")";
        case Kind::Negate: return "-" + args[0].to_string();
    }
    return "?";
}

void TheoryExpr::collect_vars(std::vector<std::string> &out) const {
    if (kind == Kind::Leaf) {
        leaf.collect_vars(out);
    }
    for (auto const &arg : args) {
        arg.collect_vars(out);
    }
}

} // namespace Ast

namespace {

enum class Tok : std::uint8_t {
    End,
    Ident,
    Variable,
    Number,
    Not,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    If,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Cmp,     // regular comparison, relation in `rel`
    TPlus,   // $+
    TMinus,  // $-
    TStar,   // $*
    TRel,    // theory relation, relation in `rel`
    TAbs,
    TDomain,
    TCount,
    TDistinct,
    TMinimize,
    TMaximize,
};

struct Token {
    Tok kind{Tok::End};
    std::string text;
    val_t number{0};
    Relation rel{Relation::EQ};
    Ast::Location loc;
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_{text} {}

    auto next() -> Token {
        skip_space();
        Token tok;
        tok.loc = {line_, col_};
        if (pos_ >= text_.size()) {
            return tok;
        }
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            auto start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])) != 0) {
                advance();
            }
            tok.kind = Tok::Number;
            tok.text = std::string{text_.substr(start, pos_ - start)};
            auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.number);
            if (ec != std::errc{}) {
                throw ParseError("integer literal out of range: " + tok.text, tok.loc.line, tok.loc.column);
            }
            return tok;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            tok.text = ident();
            if (tok.text == "not") {
                tok.kind = Tok::Not;
            }
            else if (std::isupper(static_cast<unsigned char>(tok.text[0])) != 0 || tok.text[0] == '_') {
                tok.kind = Tok::Variable;
            }
            else {
                tok.kind = Tok::Ident;
            }
            return tok;
        }
        if (c == '$') {
            advance();
            if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])) != 0) {
                auto word = ident();
                tok.text = "$" + word;
                if (word == "abs") {
                    tok.kind = Tok::TAbs;
                }
                else if (word == "domain") {
                    tok.kind = Tok::TDomain;
                }
                else if (word == "count") {
                    tok.kind = Tok::TCount;
                }
                else if (word == "distinct") {
                    tok.kind = Tok::TDistinct;
                }
                else if (word == "minimize") {
                    tok.kind = Tok::TMinimize;
                }
                else if (word == "maximize") {
                    tok.kind = Tok::TMaximize;
                }
                else {
                    throw ParseError("unknown theory operator: $" + word, tok.loc.line, tok.loc.column);
                }
                return tok;
            }
            auto op = operator_token();
            switch (op.kind) {
                case Tok::Plus: op.kind = Tok::TPlus; break;
                case Tok::Minus: op.kind = Tok::TMinus; break;
                case Tok::Star: op.kind = Tok::TStar; break;
                case Tok::Cmp: op.kind = Tok::TRel; break;
                default: throw ParseError("unknown theory operator: $" + op.text, tok.loc.line, tok.loc.column);
            }
            op.text = "$" + op.text;
            op.loc = tok.loc;
            return op;
        }
        auto op = operator_token();
        op.loc = tok.loc;
        return op;
    }

  private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        }
        else {
            ++col_;
        }
        ++pos_;
    }

    auto ident() -> std::string {
        auto start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) != 0 || text_[pos_] == '_' ||
                text_[pos_] == '\'')) {
            advance();
        }
        return std::string{text_.substr(start, pos_ - start)};
    }

    void skip_space() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c)) != 0) {
                advance();
            }
            else if (c == '%') {
                if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
                    int line = line_;
                    int col = col_;
                    advance();
                    advance();
                    while (pos_ + 1 < text_.size() && !(text_[pos_] == '*' && text_[pos_ + 1] == '%')) {
                        advance();
                    }
                    if (pos_ + 1 >= text_.size()) {
                        throw ParseError("unterminated block comment", line, col);
                    }
                    advance();
                    advance();
                }
                else {
                    while (pos_ < text_.size() && text_[pos_] != '\n') {
                        advance();
                    }
                }
            }
            else {
                break;
            }
        }
    }

    auto operator_token() -> Token {
        Token tok;
        tok.loc = {line_, col_};
        if (pos_ >= text_.size()) {
            throw ParseError("unexpected end of input", line_, col_);
        }
        auto rest = text_.substr(pos_);
        auto take = [&](Tok kind, std::size_t n) {
            tok.kind = kind;
            tok.text = std::string{rest.substr(0, n)};
            for (std::size_t i = 0; i < n; ++i) {
                advance();
            }
            return tok;
        };
        auto cmp = [&](Relation rel, std::size_t n) {
            tok.rel = rel;
            return take(Tok::Cmp, n);
        };
        if (rest.starts_with(":-")) {
            return take(Tok::If, 2);
        }
        if (rest.starts_with("..")) {
            return take(Tok::DotDot, 2);
        }
        if (rest.starts_with("==")) {
            return cmp(Relation::EQ, 2);
        }
        if (rest.starts_with("!=")) {
            return cmp(Relation::NE, 2);
        }
        if (rest.starts_with("<=")) {
            return cmp(Relation::LE, 2);
        }
        if (rest.starts_with(">=")) {
            return cmp(Relation::GE, 2);
        }
        switch (rest[0]) {
            case '(': return take(Tok::LParen, 1);
            case ')': return take(Tok::RParen, 1);
            case '{': return take(Tok::LBrace, 1);
            case '}': return take(Tok::RBrace, 1);
            case '[': return take(Tok::LBrack, 1);
            case ']': return take(Tok::RBrack, 1);
            case ',': return take(Tok::Comma, 1);
            case ';': return take(Tok::Semi, 1);
            case ':': return take(Tok::Colon, 1);
            case '.': return take(Tok::Dot, 1);
            case '+': return take(Tok::Plus, 1);
            case '-': return take(Tok::Minus, 1);
            case '*': return take(Tok::Star, 1);
            case '/': return take(Tok::Slash, 1);
            case '\\': return take(Tok::Backslash, 1);
            case '=': return cmp(Relation::EQ, 1);
            case '<': return cmp(Relation::LT, 1);
            case '>': return cmp(Relation::GT, 1);
            default: break;
        }
        throw ParseError(std::string{"unexpected character '"} + rest[0] + "'", line_, col_);
    }

    std::string_view text_;
    std::size_t pos_{0};
    int line_{1};
    int col_{1};
};

class Parser {
  public:
    explicit Parser(std::string_view text) : lexer_{text} {
        cur_ = lexer_.next();
        peek_ = lexer_.next();
    }

    auto program() -> Ast::Program {
        Ast::Program prg;
        while (cur_.kind != Tok::End) {
            statement(prg);
        }
        return prg;
    }

  private:
    void shift() {
        cur_ = std::move(peek_);
        peek_ = lexer_.next();
    }

    [[noreturn]] void fail(std::string const &msg) const {
        throw ParseError(msg + (cur_.kind == Tok::End ? " at end of input" : " near '" + cur_.text + "'"),
                         cur_.loc.line, cur_.loc.column);
    }

    auto accept(Tok kind) -> bool {
        if (cur_.kind == kind) {
            shift();
            return true;
        }
        return false;
    }

    void expect(Tok kind, char const *what) {
        if (!accept(kind)) {
            fail(std::string{"expected "} + what);
        }
    }

    void statement(Ast::Program &prg) {
        auto loc = cur_.loc;
        if (accept(Tok::TDomain)) {
            expect(Tok::LParen, "'('");
            auto lo = signed_number();
            expect(Tok::DotDot, "'..'");
            auto hi = signed_number();
            expect(Tok::RParen, "')'");
            expect(Tok::Dot, "'.'");
            if (lo > hi) {
                throw ParseError("empty domain", loc.line, loc.column);
            }
            prg.domains.push_back({lo, hi, loc});
            return;
        }
        Ast::Rule rule;
        rule.loc = loc;
        if (cur_.kind != Tok::If) {
            rule.head = head();
        }
        if (accept(Tok::If)) {
            if (cur_.kind != Tok::Dot) {
                rule.body = body();
            }
        }
        expect(Tok::Dot, "'.'");
        prg.rules.push_back(std::move(rule));
    }

    auto signed_number() -> val_t {
        bool negative = accept(Tok::Minus);
        if (cur_.kind != Tok::Number) {
            fail("expected integer");
        }
        auto v = cur_.number;
        shift();
        return negative ? -v : v;
    }

    auto head() -> Ast::Head {
        switch (cur_.kind) {
            case Tok::TCount: return count_head();
            case Tok::TDistinct: {
                shift();
                return Ast::DistinctHead{expr_elements(Tok::LBrace, Tok::RBrace)};
            }
            case Tok::TMinimize:
            case Tok::TMaximize: {
                Ast::OptimizeHead opt;
                opt.sense = cur_.kind == Tok::TMinimize ? Sense::Minimize : Sense::Maximize;
                shift();
                opt.elements = expr_elements(Tok::LBrace, Tok::RBrace);
                return opt;
            }
            case Tok::LBrace: return choice_head(std::nullopt);
            case Tok::Number:
            case Tok::Variable:
                if (peek_.kind == Tok::LBrace) {
                    auto lower = primary_term();
                    return choice_head(std::move(lower));
                }
                break;
            default: break;
        }
        auto lit = literal_item();
        if (auto *atom = std::get_if<Ast::Atom>(&lit)) {
            return std::move(*atom);
        }
        if (auto *theory = std::get_if<Ast::TheoryAtom>(&lit)) {
            return std::move(*theory);
        }
        fail("comparison not allowed in rule head");
    }

    auto choice_head(std::optional<Ast::Term> lower) -> Ast::Head {
        Ast::ChoiceHead choice;
        choice.lower = std::move(lower);
        expect(Tok::LBrace, "'{'");
        if (cur_.kind != Tok::RBrace) {
            do {
                Ast::Conditional<Ast::Atom> elem;
                auto lit = literal_item();
                auto *atom = std::get_if<Ast::Atom>(&lit);
                if (atom == nullptr) {
                    fail("choice elements must be atoms");
                }
                elem.item = std::move(*atom);
                elem.condition = condition();
                choice.elements.push_back(std::move(elem));
            } while (accept(Tok::Comma) || accept(Tok::Semi));
        }
        expect(Tok::RBrace, "'}'");
        if (cur_.kind == Tok::Number || cur_.kind == Tok::Variable) {
            choice.upper = primary_term();
        }
        return choice;
    }

    auto count_head() -> Ast::Head {
        shift();
        Ast::CountHead count;
        expect(Tok::LBrack, "'['");
        do {
            Ast::Conditional<Ast::TheoryAtom> elem;
            auto lit = literal_item();
            auto *theory = std::get_if<Ast::TheoryAtom>(&lit);
            if (theory == nullptr) {
                fail("$count elements must be constraint atoms");
            }
            elem.item = std::move(*theory);
            elem.condition = condition();
            count.elements.push_back(std::move(elem));
        } while (accept(Tok::Comma) || accept(Tok::Semi));
        expect(Tok::RBrack, "']'");
        if (cur_.kind != Tok::TRel) {
            fail("expected theory relation after $count");
        }
        count.rel = cur_.rel;
        shift();
        count.bound = theory_expr(std::nullopt);
        return count;
    }

    auto expr_elements(Tok open, Tok close) -> std::vector<Ast::Conditional<Ast::TheoryExpr>> {
        std::vector<Ast::Conditional<Ast::TheoryExpr>> elems;
        expect(open, "'{'");
        if (cur_.kind != close) {
            do {
                Ast::Conditional<Ast::TheoryExpr> elem;
                elem.item = theory_expr(std::nullopt);
                elem.condition = condition();
                elems.push_back(std::move(elem));
            } while (accept(Tok::Comma) || accept(Tok::Semi));
        }
        expect(close, "'}'");
        return elems;
    }

    auto condition() -> std::vector<Ast::Literal> {
        std::vector<Ast::Literal> cond;
        while (accept(Tok::Colon)) {
            cond.push_back(literal());
        }
        return cond;
    }

    auto body() -> std::vector<Ast::Literal> {
        std::vector<Ast::Literal> lits;
        do {
            lits.push_back(literal());
        } while (accept(Tok::Comma));
        return lits;
    }

    auto literal() -> Ast::Literal {
        Ast::Literal lit;
        lit.loc = cur_.loc;
        lit.negated = accept(Tok::Not);
        lit.item = literal_item();
        if (lit.negated && std::holds_alternative<Ast::Comparison>(lit.item)) {
            throw ParseError("negated comparison", lit.loc.line, lit.loc.column);
        }
        return lit;
    }

    static auto starts_theory(Tok kind) -> bool {
        return kind == Tok::TMinus || kind == Tok::TAbs || kind == Tok::LParen;
    }

    static auto continues_theory(Tok kind) -> bool {
        return kind == Tok::TPlus || kind == Tok::TMinus || kind == Tok::TStar || kind == Tok::TRel;
    }

    auto literal_item() -> std::variant<Ast::Atom, Ast::TheoryAtom, Ast::Comparison> {
        if (starts_theory(cur_.kind)) {
            return theory_atom(std::nullopt);
        }
        auto loc = cur_.loc;
        auto t = term();
        if (continues_theory(cur_.kind)) {
            return theory_atom(std::move(t));
        }
        if (cur_.kind == Tok::Cmp) {
            Ast::Comparison cmp;
            cmp.lhs = std::move(t);
            cmp.rel = cur_.rel;
            shift();
            cmp.rhs = term();
            return cmp;
        }
        if (!is_atom_term(t)) {
            throw ParseError("expected atom, got '" + t.to_string() + "'", loc.line, loc.column);
        }
        return Ast::Atom{std::move(t)};
    }


    static auto is_atom_term(Ast::Term const &t) -> bool {
        using K = Ast::Term::Kind;
        if (t.kind == K::Pool) {
            for (auto const &alt : t.args) {
                if (!is_atom_term(alt)) {
                    return false;
                }
            }
            return true;
        }
        return t.kind == K::Symbol || t.kind == K::Function;
    }

    auto theory_atom(std::optional<Ast::Term> leaf) -> Ast::TheoryAtom {
        Ast::TheoryAtom atom;
        atom.lhs = theory_expr(std::move(leaf));
        if (cur_.kind != Tok::TRel) {
            fail("expected theory relation");
        }
        atom.rel = cur_.rel;
        shift();
        atom.rhs = theory_expr(std::nullopt);
        return atom;
    }

    static auto node(Ast::TheoryExpr::Kind kind, std::vector<Ast::TheoryExpr> args) -> Ast::TheoryExpr {
        Ast::TheoryExpr e;
        e.kind = kind;
        e.args = std::move(args);
        return e;
    }

    auto theory_expr(std::optional<Ast::Term> leaf) -> Ast::TheoryExpr {
        auto lhs = theory_product(std::move(leaf));
        while (cur_.kind == Tok::TPlus || cur_.kind == Tok::TMinus) {
            bool plus = cur_.kind == Tok::TPlus;
            shift();
            auto rhs = theory_product(std::nullopt);
            lhs = node(plus ? Ast::TheoryExpr::Kind::Add : Ast::TheoryExpr::Kind::Sub, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    auto theory_product(std::optional<Ast::Term> leaf) -> Ast::TheoryExpr {
        auto lhs = theory_factor(std::move(leaf));
        while (accept(Tok::TStar)) {
            auto rhs = theory_factor(std::nullopt);
            lhs = node(Ast::TheoryExpr::Kind::Mul, {std::move(lhs), std::move(rhs)});
        }
        return lhs;
    }

    auto theory_factor(std::optional<Ast::Term> leaf) -> Ast::TheoryExpr {
        if (leaf) {
            Ast::TheoryExpr e;
            e.leaf = std::move(*leaf);
            return e;
        }
        if (accept(Tok::TMinus)) {
            return node(Ast::TheoryExpr::Kind::Neg, {theory_factor(std::nullopt)});
        }
        if (accept(Tok::TAbs)) {
            expect(Tok::LParen, "'('");
            auto arg = theory_expr(std::nullopt);
            expect(Tok::RParen, "')'");
            return node(Ast::TheoryExpr::Kind::Abs, {std::move(arg)});
        }
        if (accept(Tok::LParen)) {
            auto inner = theory_expr(std::nullopt);
            expect(Tok::RParen, "')'");
            return inner;
        }
        Ast::TheoryExpr e;
        e.leaf = additive();
        return e;
    }

    // regular terms

    auto term() -> Ast::Term {
        auto lhs = additive();
        if (accept(Tok::DotDot)) {
            Ast::Term range;
            range.kind = Ast::Term::Kind::Range;
            range.args.push_back(std::move(lhs));
            range.args.push_back(additive());
            return range;
        }
        return lhs;
    }

    static auto binary(char op, Ast::Term lhs, Ast::Term rhs) -> Ast::Term {
        Ast::Term t;
        t.kind = Ast::Term::Kind::Binary;
        t.op = op;
        t.args.push_back(std::move(lhs));
        t.args.push_back(std::move(rhs));
        return t;
    }

    auto additive() -> Ast::Term {
        auto lhs = multiplicative();
        while (cur_.kind == Tok::Plus || cur_.kind == Tok::Minus) {
            char op = cur_.kind == Tok::Plus ? '+' : '-';
            shift();
            lhs = binary(op, std::move(lhs), multiplicative());
        }
        return lhs;
    }

    auto multiplicative() -> Ast::Term {
        auto lhs = unary();
        while (cur_.kind == Tok::Star || cur_.kind == Tok::Slash || cur_.kind == Tok::Backslash) {
            char op = cur_.kind == Tok::Star ? '*' : (cur_.kind == Tok::Slash ? '/' : '\\');
            shift();
            lhs = binary(op, std::move(lhs), unary());
        }
        return lhs;
    }

    auto unary() -> Ast::Term {
        if (accept(Tok::Minus)) {
            auto arg = unary();
            if (arg.kind == Ast::Term::Kind::Integer) {
                arg.value = -arg.value;
                return arg;
            }
            Ast::Term t;
            t.kind = Ast::Term::Kind::Negate;
            t.args.push_back(std::move(arg));
            return t;
        }
        return primary_term();
    }

    auto primary_term() -> Ast::Term {
        switch (cur_.kind) {
            case Tok::Number: {
                auto t = Ast::Term::integer(cur_.number);
                shift();
                return t;
            }
            case Tok::Variable: {
                auto t = Ast::Term::variable(cur_.text == "_" ? "_" + std::to_string(anonymous_++) : cur_.text);
                shift();
                return t;
            }
            case Tok::Ident: {
                auto name = cur_.text;
                shift();
                if (!accept(Tok::LParen)) {
                    return Ast::Term::symbol(std::move(name));
                }
                std::vector<Ast::Term> alternatives;
                do {
                    std::vector<Ast::Term> args;
                    do {
                        args.push_back(term());
                    } while (accept(Tok::Comma));
                    alternatives.push_back(Ast::Term::function(name, std::move(args)));
                } while (accept(Tok::Semi));
                expect(Tok::RParen, "')'");
                if (alternatives.size() == 1) {
                    return std::move(alternatives.front());
                }
                Ast::Term pool;
                pool.kind = Ast::Term::Kind::Pool;
                pool.args = std::move(alternatives);
                return pool;
            }
            default: fail("expected term");
        }
    }

    Lexer lexer_;
    std::size_t anonymous_{0};
    Token cur_;
    Token peek_;
};

} // namespace

auto parse(std::string_view text) -> Ast::Program { return Parser{text}.program(); }

} // namespace Casp
