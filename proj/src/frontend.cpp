#include "mfp/frontend.hpp"

#include "mfp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <utility>

namespace mfp {

namespace {

struct token {
    enum class kind : std::uint8_t {
        ident, number, kw_while, kw_if, kw_else,
        plus, minus, star, assign,
        eq, ne, lt, le, gt, ge,
        lparen, rparen, lbrace, rbrace, semi,
        eof
    };

    kind which;
    std::string text;
    bigint num;
    int line = 1;
    int col = 1;
};

class lexer {
public:
    explicit lexer(std::string_view src) : src_(src) { advance(); }

    const token& peek() const { return cur_; }

    token take() {
        token t = std::move(cur_);
        advance();
        return t;
    }

private:
    void advance() {
        skip_blanks();
        cur_ = token{};
        cur_.line = line_;
        cur_.col = col_;
        if (pos_ >= src_.size()) {
            cur_.which = token::kind::eof;
            return;
        }
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            cur_.text = std::string(src_.substr(start, pos_ - start));
            if (cur_.text == "while")
                cur_.which = token::kind::kw_while;
            else if (cur_.text == "if")
                cur_.which = token::kind::kw_if;
            else if (cur_.text == "else")
                cur_.which = token::kind::kw_else;
            else
                cur_.which = token::kind::ident;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                bump();
            cur_.which = token::kind::number;
            cur_.text = std::string(src_.substr(start, pos_ - start));
            cur_.num = bigint(cur_.text);
            return;
        }
        bump();
        switch (c) {
            case '+': cur_.which = token::kind::plus; return;
            case '-': cur_.which = token::kind::minus; return;
            case '*': cur_.which = token::kind::star; return;
            case '(': cur_.which = token::kind::lparen; return;
            case ')': cur_.which = token::kind::rparen; return;
            case '{': cur_.which = token::kind::lbrace; return;
            case '}': cur_.which = token::kind::rbrace; return;
            case ';': cur_.which = token::kind::semi; return;
            case '=':
                if (eat('=')) cur_.which = token::kind::eq;
                else cur_.which = token::kind::assign;
                return;
            case '!':
                if (eat('=')) { cur_.which = token::kind::ne; return; }
                break;
            case '<':
                if (eat('=')) cur_.which = token::kind::le;
                else cur_.which = token::kind::lt;
                return;
            case '>':
                if (eat('=')) cur_.which = token::kind::ge;
                else cur_.which = token::kind::gt;
                return;
            default: break;
        }
        throw parse_error(std::string("unexpected character '") + c + "'", cur_.line, cur_.col);
    }

    void skip_blanks() {
        for (;;) {
            while (pos_ < src_.size() &&
                   std::isspace(static_cast<unsigned char>(src_[pos_])))
                bump();
            if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
                continue;
            }
            return;
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    bool eat(char c) {
        if (pos_ < src_.size() && src_[pos_] == c) {
            bump();
            return true;
        }
        return false;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    token cur_;
};

class parser {
public:
    explicit parser(std::string_view src) : lx_(src) {}

    program parse() {
        program p;
        while (lx_.peek().which != token::kind::eof) p.body.push_back(parse_stmt());
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& msg, const token& t) {
        throw parse_error(msg, t.line, t.col);
    }

    token expect(token::kind k, const char* what) {
        if (lx_.peek().which != k) fail(std::string("expected ") + what, lx_.peek());
        return lx_.take();
    }

    stmt parse_stmt() {
        const token& t = lx_.peek();
        switch (t.which) {
            case token::kind::kw_while: return parse_while();
            case token::kind::kw_if: return parse_if();
            case token::kind::ident: return parse_assign();
            default: fail("expected statement", t);
        }
    }

    stmt parse_assign() {
        stmt s;
        s.which = stmt::kind::assign;
        s.target = lx_.take().text;
        expect(token::kind::assign, "'='");
        s.value = parse_expr();
        expect(token::kind::semi, "';'");
        return s;
    }

    stmt parse_while() {
        lx_.take();
        stmt s;
        s.which = stmt::kind::loop;
        expect(token::kind::lparen, "'('");
        s.cond = parse_cond();
        expect(token::kind::rparen, "')'");
        s.then_body = parse_block_or_stmt();
        return s;
    }

    stmt parse_if() {
        lx_.take();
        stmt s;
        s.which = stmt::kind::branch;
        expect(token::kind::lparen, "'('");
        s.cond = parse_cond();
        expect(token::kind::rparen, "')'");
        s.then_body = parse_block_or_stmt();
        if (lx_.peek().which == token::kind::kw_else) {
            lx_.take();
            s.else_body = parse_block_or_stmt();
        }
        return s;
    }

    std::vector<stmt> parse_block_or_stmt() {
        std::vector<stmt> body;
        if (lx_.peek().which == token::kind::lbrace) {
            lx_.take();
            while (lx_.peek().which != token::kind::rbrace) {
                if (lx_.peek().which == token::kind::eof) fail("unterminated block", lx_.peek());
                body.push_back(parse_stmt());
            }
            lx_.take();
        } else {
            body.push_back(parse_stmt());
        }
        return body;
    }

    condition parse_cond() {
        condition c;
        token v = expect(token::kind::ident, "variable in condition");
        c.var = v.text;
        const token op = lx_.take();
        switch (op.which) {
            case token::kind::lt: c.op = cmp_op::lt; break;
            case token::kind::le: c.op = cmp_op::le; break;
            case token::kind::eq: c.op = cmp_op::eq; break;
            case token::kind::ge: c.op = cmp_op::ge; break;
            case token::kind::gt: c.op = cmp_op::gt; break;
            case token::kind::ne: c.op = cmp_op::ne; break;
            default: fail("expected comparison operator", op);
        }
        bool negate = false;
        if (lx_.peek().which == token::kind::minus) {
            lx_.take();
            negate = true;
        }
        token k = expect(token::kind::number, "integer constant");
        c.threshold = k.num;
        if (negate) c.threshold = -c.threshold;
        return c;
    }

    expr_ptr parse_expr() {
        expr_ptr e = parse_term();
        for (;;) {
            const token::kind k = lx_.peek().which;
            if (k != token::kind::plus && k != token::kind::minus) return e;
            lx_.take();
            expr_ptr r = parse_term();
            if (k == token::kind::minus) {
                // a - b is sugar for a + (-b)
                auto neg = std::make_unique<expr>();
                neg->which = expr::kind::neg;
                neg->lhs = std::move(r);
                r = std::move(neg);
            }
            auto sum = std::make_unique<expr>();
            sum->which = expr::kind::add;
            sum->lhs = std::move(e);
            sum->rhs = std::move(r);
            e = std::move(sum);
        }
    }

    expr_ptr parse_term() {
        expr_ptr e = parse_factor();
        while (lx_.peek().which == token::kind::star) {
            lx_.take();
            auto prod = std::make_unique<expr>();
            prod->which = expr::kind::mul;
            prod->lhs = std::move(e);
            prod->rhs = parse_factor();
            e = std::move(prod);
        }
        return e;
    }

    expr_ptr parse_factor() {
        const token& t = lx_.peek();
        switch (t.which) {
            case token::kind::number: {
                auto e = std::make_unique<expr>();
                e->which = expr::kind::constant;
                e->value = lx_.take().num;
                return e;
            }
            case token::kind::ident: {
                auto e = std::make_unique<expr>();
                e->which = expr::kind::variable;
                e->name = lx_.take().text;
                return e;
            }
            case token::kind::minus: {
                lx_.take();
                auto e = std::make_unique<expr>();
                e->which = expr::kind::neg;
                e->lhs = parse_factor();
                return e;
            }
            case token::kind::lparen: {
                lx_.take();
                expr_ptr e = parse_expr();
                expect(token::kind::rparen, "')'");
                return e;
            }
            default: fail("expected expression", t);
        }
    }

    lexer lx_;
};

void collect_vars(const expr& e, std::vector<std::string>& out) {
    switch (e.which) {
        case expr::kind::variable:
            if (std::find(out.begin(), out.end(), e.name) == out.end()) out.push_back(e.name);
            break;
        case expr::kind::add:
        case expr::kind::mul:
            collect_vars(*e.lhs, out);
            collect_vars(*e.rhs, out);
            break;
        case expr::kind::neg: collect_vars(*e.lhs, out); break;
        case expr::kind::constant: break;
    }
}

void collect_vars(const std::vector<stmt>& body, std::vector<std::string>& out) {
    for (const stmt& s : body) {
        switch (s.which) {
            case stmt::kind::assign:
                if (std::find(out.begin(), out.end(), s.target) == out.end())
                    out.push_back(s.target);
                collect_vars(*s.value, out);
                break;
            case stmt::kind::branch:
            case stmt::kind::loop:
                if (std::find(out.begin(), out.end(), s.cond.var) == out.end())
                    out.push_back(s.cond.var);
                collect_vars(s.then_body, out);
                collect_vars(s.else_body, out);
                break;
        }
    }
}

bool mentions_var(const expr& e) {
    switch (e.which) {
        case expr::kind::variable: return true;
        case expr::kind::constant: return false;
        case expr::kind::neg: return mentions_var(*e.lhs);
        default: return mentions_var(*e.lhs) || mentions_var(*e.rhs);
    }
}

interval half_line(cmp_op op, const bigint& k, bool positive) {
    const ext_int lo = ext_int::minus_inf();
    const ext_int hi = ext_int::plus_inf();
    if (!positive) {
        switch (op) {
            case cmp_op::lt: return half_line(cmp_op::ge, k, true);
            case cmp_op::le: return half_line(cmp_op::gt, k, true);
            case cmp_op::ge: return half_line(cmp_op::lt, k, true);
            case cmp_op::gt: return half_line(cmp_op::le, k, true);
            case cmp_op::eq: return interval::top();  // sound: != is not interval-shaped
            case cmp_op::ne: return half_line(cmp_op::eq, k, true);
        }
    }
    switch (op) {
        case cmp_op::lt: return interval::make(lo, ext_int(bigint(k - 1)));
        case cmp_op::le: return interval::make(lo, ext_int(bigint(k)));
        case cmp_op::eq: return interval::make(ext_int(bigint(k)), ext_int(bigint(k)));
        case cmp_op::ge: return interval::make(ext_int(bigint(k)), hi);
        case cmp_op::gt: return interval::make(ext_int(bigint(k + 1)), hi);
        case cmp_op::ne: return interval::top();
    }
    throw validation_error("corrupt comparison operator");
}

struct generator {
    interval_system_builder b;
    std::vector<std::string> prog_vars;
    flow_info flow;
    std::size_t fresh_n = 0;

    var_id fresh() { return b.add_var("$e" + std::to_string(fresh_n++)); }

    std::size_t new_point() {
        const std::string pname = "p" + std::to_string(flow.points.size() + 1);
        flow.points.push_back(pname);
        std::vector<std::pair<std::string, var_id>> pv;
        pv.reserve(prog_vars.size());
        for (const std::string& v : prog_vars) pv.emplace_back(v, b.add_var(pname + "_" + v));
        flow.point_vars.push_back(std::move(pv));
        return flow.points.size() - 1;
    }

    var_id at(std::size_t point, const std::string& v) const {
        for (const auto& [name, id] : flow.point_vars[point])
            if (name == v) return id;
        throw validation_error("unknown program variable: " + v);
    }

    // Edge from -> to meeting variable `var` with iv and copying the rest.
    void edge(std::size_t from, std::size_t to, const std::string* var, const interval& iv) {
        for (const std::string& v : prog_vars) {
            const interval& k = (var != nullptr && v == *var) ? iv : interval::top();
            b.add_meet(at(to, v), at(from, v), k);
        }
    }

    void copy_edge(std::size_t from, std::size_t to) { edge(from, to, nullptr, interval::top()); }

    std::size_t guard_edge(std::size_t from, const condition& c, bool positive) {
        const std::size_t to = new_point();
        const interval iv = half_line(c.op, c.threshold, positive);
        edge(from, to, &c.var, iv);
        return to;
    }

    var_id eval(const expr& e, std::size_t point) {
        switch (e.which) {
            case expr::kind::variable: return at(point, e.name);
            case expr::kind::constant: {
                const var_id c = fresh();
                b.add_const(c, interval::make(ext_int(e.value), ext_int(e.value)));
                return c;
            }
            case expr::kind::add: {
                const var_id l = eval(*e.lhs, point), r = eval(*e.rhs, point);
                const var_id t = fresh();
                b.add_add(t, l, r);
                return t;
            }
            case expr::kind::mul: {
                const var_id l = eval(*e.lhs, point), r = eval(*e.rhs, point);
                const var_id t = fresh();
                b.add_mul(t, l, r);
                return t;
            }
            case expr::kind::neg: {
                const var_id l = eval(*e.lhs, point);
                const var_id t = fresh();
                b.add_neg(t, l);
                return t;
            }
        }
        throw validation_error("corrupt expression");
    }

    std::size_t gen_assign(std::size_t from, const stmt& s) {
        const std::size_t to = new_point();
        for (const std::string& v : prog_vars)
            if (v != s.target) b.add_meet(at(to, v), at(from, v), interval::top());

        const var_id out = at(to, s.target);
        const expr& e = *s.value;
        if (!mentions_var(e)) {
            // Anchor a variable-free right-hand side to the source point via
            // a zero multiplication, so values only flow once the point is
            // reachable at all.
            const var_id r = eval(e, from);
            const var_id zero = fresh();
            b.add_const(zero, interval::make(ext_int(0), ext_int(0)));
            const var_id anchor = fresh();
            b.add_mul(anchor, zero, at(from, s.target));
            b.add_add(out, anchor, r);
            return to;
        }
        switch (e.which) {
            case expr::kind::variable: b.add_meet(out, at(from, e.name), interval::top()); break;
            case expr::kind::add:
                b.add_add(out, eval(*e.lhs, from), eval(*e.rhs, from));
                break;
            case expr::kind::mul:
                b.add_mul(out, eval(*e.lhs, from), eval(*e.rhs, from));
                break;
            case expr::kind::neg: b.add_neg(out, eval(*e.lhs, from)); break;
            case expr::kind::constant: break;  // unreachable: handled above
        }
        return to;
    }

    std::size_t gen_block(std::size_t cur, const std::vector<stmt>& body) {
        for (const stmt& s : body) cur = gen_stmt(cur, s);
        return cur;
    }

    std::size_t gen_stmt(std::size_t cur, const stmt& s) {
        switch (s.which) {
            case stmt::kind::assign: return gen_assign(cur, s);
            case stmt::kind::loop: {
                const std::size_t head = new_point();
                copy_edge(cur, head);
                const std::size_t body_in = guard_edge(head, s.cond, true);
                const std::size_t body_out = gen_block(body_in, s.then_body);
                copy_edge(body_out, head);
                return guard_edge(head, s.cond, false);
            }
            case stmt::kind::branch: {
                const std::size_t then_in = guard_edge(cur, s.cond, true);
                const std::size_t then_out = gen_block(then_in, s.then_body);
                const std::size_t else_in = guard_edge(cur, s.cond, false);
                const std::size_t else_out = gen_block(else_in, s.else_body);
                const std::size_t join = new_point();
                copy_edge(then_out, join);
                copy_edge(else_out, join);
                return join;
            }
        }
        throw validation_error("corrupt statement");
    }
};

}  // namespace

program parse_program(std::string_view source) {
    return parser(source).parse();
}

gen_result gen_constraints(const program& prog) {
    generator g;
    collect_vars(prog.body, g.prog_vars);

    const std::size_t entry = g.new_point();
    for (const std::string& v : g.prog_vars) g.b.add_const(g.at(entry, v), interval::top());

    g.gen_block(entry, prog.body);
    return gen_result{g.b.build(), std::move(g.flow)};
}

}  // namespace mfp
