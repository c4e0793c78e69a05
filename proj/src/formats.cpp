#include "mfp/formats.hpp"

#include "mfp/errors.hpp"

#include <cctype>
#include <istream>
#include <map>
#include <sstream>
#include <string>

namespace mfp {

namespace {

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

// Scanner over one logical line (comments already stripped).
struct line_scanner {
    std::string_view s;
    std::size_t pos = 0;
    int line;

    explicit line_scanner(std::string_view text, int lineno) : s(text), line(lineno) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(msg, line, static_cast<int>(pos) + 1);
    }

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
    }

    bool at_end() {
        skip_ws();
        return pos == s.size();
    }

    bool try_char(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!try_char(c)) fail(std::string("expected '") + c + "'");
    }

    void expect_geq() {
        skip_ws();
        if (pos + 1 < s.size() && s[pos] == '>' && s[pos + 1] == '=') {
            pos += 2;
            return;
        }
        fail("expected '>='");
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && ident_char(s[pos])) ++pos;
        if (pos == start) fail("expected a name");
        return std::string(s.substr(start, pos - start));
    }

    ext_int ext() {
        skip_ws();
        std::size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        while (pos < s.size() && ident_char(s[pos])) ++pos;
        auto v = ext_int::parse(s.substr(start, pos - start));
        if (!v) fail("expected an integer, '-inf' or '+inf'");
        return *v;
    }

    interval bracket_interval() {
        expect('[');
        ext_int lo = ext();
        expect(',');
        ext_int hi = ext();
        expect(']');
        return interval::make(lo, std::move(hi));
    }
};

// Strips the '#' comment and reports whether anything is left.
std::string_view logical_line(const std::string& raw) {
    std::string_view v = raw;
    if (std::size_t h = v.find('#'); h != std::string_view::npos) v = v.substr(0, h);
    return v;
}

bool blank(std::string_view v) {
    for (char c : v)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

bool is_var_line(std::string_view v) {
    std::size_t i = 0;
    while (i < v.size() && (v[i] == ' ' || v[i] == '\t')) ++i;
    if (v.substr(i, 3) != "var") return false;
    return i + 3 == v.size() || !ident_char(v[i + 3]);
}

template <typename Builder>
class var_table {
public:
    explicit var_table(Builder& b) : b_(b) {}

    void declare(line_scanner& sc) {
        sc.ident();  // the "var" keyword itself
        bool any = false;
        while (!sc.at_end()) {
            std::string name = sc.ident();
            if (ids_.count(name)) sc.fail("duplicate variable: " + name);
            ids_[name] = b_.add_var(name);
            any = true;
        }
        if (!any) sc.fail("empty variable declaration");
    }

    var_id lookup(const std::string& name, line_scanner& sc) const {
        auto it = ids_.find(name);
        if (it == ids_.end()) sc.fail("unknown variable: " + name);
        return it->second;
    }

private:
    Builder& b_;
    std::map<std::string, var_id> ids_;
};

}  // namespace

constraint_system load_ics(std::istream& in) {
    system_builder b;
    var_table<system_builder> vars(b);
    bool seen_constraint = false;

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view v = logical_line(raw);
        if (blank(v)) continue;
        line_scanner sc(v, lineno);

        if (is_var_line(v)) {
            if (seen_constraint) sc.fail("variable declarations must precede constraints");
            vars.declare(sc);
            continue;
        }
        seen_constraint = true;

        const var_id out = vars.lookup(sc.ident(), sc);
        sc.expect_geq();
        const std::string fn = sc.ident();
        sc.expect('(');
        if (fn == "const") {
            ext_int k = sc.ext();
            b.add_bi(out, bi_fun::constant(std::move(k)), {});
        } else if (fn == "id") {
            var_id y = vars.lookup(sc.ident(), sc);
            b.add_bi(out, bi_fun::identity(), {y});
        } else if (fn == "min") {
            var_id y = vars.lookup(sc.ident(), sc);
            sc.expect(',');
            ext_int k = sc.ext();
            b.add_bi(out, bi_fun::guarded_min(std::move(k)), {y});
        } else if (fn == "add" || fn == "mulp" || fn == "mulm") {
            var_id y = vars.lookup(sc.ident(), sc);
            sc.expect(',');
            var_id z = vars.lookup(sc.ident(), sc);
            bi_fun f = fn == "add" ? bi_fun::add()
                       : fn == "mulp" ? bi_fun::mul_plus()
                                      : bi_fun::mul_minus();
            b.add_bi(out, std::move(f), {y, z});
        } else if (fn == "pow2" || fn == "fact") {
            var_id y = vars.lookup(sc.ident(), sc);
            b.add_bi(out, fn == "pow2" ? bi_fun::pow2() : bi_fun::factorial(), {y});
        } else if (fn == "test_geq" || fn == "test_gt") {
            ext_int k = sc.ext();
            sc.expect(';');
            var_id g = vars.lookup(sc.ident(), sc);
            sc.expect(',');
            var_id val = vars.lookup(sc.ident(), sc);
            test_fun t = fn == "test_geq" ? test_fun::geq(std::move(k)) : test_fun::gt(std::move(k));
            b.add_test(out, std::move(t), g, val);
        } else {
            sc.fail("unknown constraint function: " + fn);
        }
        sc.expect(')');
        if (!sc.at_end()) sc.fail("trailing input after constraint");
    }
    return b.build();
}

constraint_system load_ics_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_ics(in);
}

interval_system load_ivs(std::istream& in) {
    interval_system_builder b;
    var_table<interval_system_builder> vars(b);
    bool seen_constraint = false;

    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string_view v = logical_line(raw);
        if (blank(v)) continue;
        line_scanner sc(v, lineno);

        if (is_var_line(v)) {
            if (seen_constraint) sc.fail("variable declarations must precede constraints");
            vars.declare(sc);
            continue;
        }
        seen_constraint = true;

        const var_id out = vars.lookup(sc.ident(), sc);
        sc.expect_geq();
        sc.skip_ws();
        if (sc.try_char('[')) {
            ext_int lo = sc.ext();
            sc.expect(',');
            ext_int hi = sc.ext();
            sc.expect(']');
            b.add_const(out, interval::make(lo, std::move(hi)));
            if (!sc.at_end()) sc.fail("trailing input after constraint");
            continue;
        }
        const std::string fn = sc.ident();
        sc.expect('(');
        if (fn == "neg") {
            b.add_neg(out, vars.lookup(sc.ident(), sc));
        } else if (fn == "add" || fn == "mul") {
            var_id y = vars.lookup(sc.ident(), sc);
            sc.expect(',');
            var_id z = vars.lookup(sc.ident(), sc);
            if (fn == "add")
                b.add_add(out, y, z);
            else
                b.add_mul(out, y, z);
        } else if (fn == "meet") {
            var_id y = vars.lookup(sc.ident(), sc);
            sc.expect(',');
            interval k = sc.bracket_interval();
            b.add_meet(out, y, std::move(k));
        } else {
            sc.fail("unknown constraint function: " + fn);
        }
        sc.expect(')');
        if (!sc.at_end()) sc.fail("trailing input after constraint");
    }
    return b.build();
}

interval_system load_ivs_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return load_ivs(in);
}

}  // namespace mfp
