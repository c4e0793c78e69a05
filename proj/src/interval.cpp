#include "mfp/interval.hpp"

#include "mfp/errors.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace mfp {

std::string interval::to_string() const {
    if (is_empty()) return "empty";
    if (is_top()) return "top";
    return "[" + lo().to_string() + "," + hi_.to_string() + "]";
}

interval iv_neg(const interval& a) {
    return interval::from_encoding(a.hi(), a.neg_lo());
}

interval iv_add(const interval& a, const interval& b) {
    return interval::from_encoding(ext_add(a.neg_lo(), b.neg_lo()), ext_add(a.hi(), b.hi()));
}

interval iv_mul(const interval& a, const interval& b) {
    if (a.is_empty() || b.is_empty()) return interval::bottom();
    const ext_int lo1 = a.lo(), hi1 = a.hi(), lo2 = b.lo(), hi2 = b.hi();
    const ext_int prods[4] = {ext_mul(lo1, lo2), ext_mul(lo1, hi2), ext_mul(hi1, lo2),
                              ext_mul(hi1, hi2)};
    ext_int mn = prods[0], mx = prods[0];
    for (int i = 1; i < 4; ++i) {
        mn = ext_min(mn, prods[i]);
        mx = ext_max(mx, prods[i]);
    }
    return interval::make(mn, mx);
}

interval iv_meet_const(const interval& a, const interval& k) {
    return interval::from_encoding(ext_min(a.neg_lo(), k.neg_lo()), ext_min(a.hi(), k.hi()));
}

interval iv_join(const interval& a, const interval& b) {
    return interval::from_encoding(ext_max(a.neg_lo(), b.neg_lo()), ext_max(a.hi(), b.hi()));
}

var_id interval_system_builder::add_var(const std::string& name) {
    if (name.empty()) throw validation_error("interval variable name must be nonempty");
    for (const std::string& n : var_names_)
        if (n == name) throw validation_error("duplicate interval variable: " + name);
    var_names_.push_back(name);
    return static_cast<var_id>(var_names_.size() - 1);
}

var_id interval_system_builder::ensure_var(const std::string& name) {
    for (std::size_t i = 0; i < var_names_.size(); ++i)
        if (var_names_[i] == name) return static_cast<var_id>(i);
    return add_var(name);
}

void interval_system_builder::add_neg(var_id out, var_id in) {
    iv_constraint c;
    c.output = out;
    c.which = iv_constraint::op::neg;
    c.in1 = in;
    constraints_.push_back(std::move(c));
}

void interval_system_builder::add_const(var_id out, interval k) {
    iv_constraint c;
    c.output = out;
    c.which = iv_constraint::op::constant;
    c.k = std::move(k);
    constraints_.push_back(std::move(c));
}

void interval_system_builder::add_add(var_id out, var_id a, var_id b) {
    iv_constraint c;
    c.output = out;
    c.which = iv_constraint::op::add;
    c.in1 = a;
    c.in2 = b;
    constraints_.push_back(std::move(c));
}

void interval_system_builder::add_meet(var_id out, var_id in, interval k) {
    iv_constraint c;
    c.output = out;
    c.which = iv_constraint::op::meet_const;
    c.in1 = in;
    c.k = std::move(k);
    constraints_.push_back(std::move(c));
}

void interval_system_builder::add_mul(var_id out, var_id a, var_id b, bool pos_certified) {
    iv_constraint c;
    c.output = out;
    c.which = iv_constraint::op::mul;
    c.in1 = a;
    c.in2 = b;
    c.pos_certified = pos_certified;
    constraints_.push_back(std::move(c));
}

interval_system interval_system_builder::build() {
    const var_id n = static_cast<var_id>(var_names_.size());
    for (const iv_constraint& c : constraints_) {
        if (c.output >= n) throw validation_error("interval constraint output out of range");
        if (c.n_inputs() >= 1 && c.in1 >= n)
            throw validation_error("interval constraint input out of range");
        if (c.n_inputs() >= 2 && c.in2 >= n)
            throw validation_error("interval constraint input out of range");
    }
    return interval_system(std::move(var_names_), std::move(constraints_));
}

interval eval_iv_constraint(const iv_constraint& c, const iv_valuation& rho) {
    switch (c.which) {
        case iv_constraint::op::neg: return iv_neg(rho.at(c.in1));
        case iv_constraint::op::constant: return c.k;
        case iv_constraint::op::add: return iv_add(rho.at(c.in1), rho.at(c.in2));
        case iv_constraint::op::meet_const: return iv_meet_const(rho.at(c.in1), c.k);
        case iv_constraint::op::mul: return iv_mul(rho.at(c.in1), rho.at(c.in2));
    }
    throw validation_error("corrupt interval constraint");
}

bool is_iv_solution(const interval_system& P, const iv_valuation& rho) {
    for (std::size_t i = 0; i < P.size(); ++i)
        if (!eval_iv_constraint(P.at(i), rho).leq(rho.at(P.at(i).output))) return false;
    return true;
}

iv_kleene_result kleene_interval(const interval_system& P, std::uint64_t max_rounds,
                                 std::size_t max_value_bits) {
    iv_kleene_result r;
    r.val = iv_valuation::bottom(P.n_vars());

    // Skip constraints whose inputs have not changed since their last
    // evaluation; their image is unchanged and cannot raise the output.
    // Raises wake the raised variable's readers: later constraints within
    // the current pass, earlier ones on the next pass.
    std::vector<std::vector<std::uint32_t>> readers(P.n_vars());
    for (std::uint32_t ci = 0; ci < P.size(); ++ci) {
        const iv_constraint& c = P.at(ci);
        if (c.n_inputs() >= 1) readers[c.in1].push_back(ci);
        if (c.n_inputs() >= 2) readers[c.in2].push_back(ci);
    }
    std::vector<char> dirty(P.size(), 1);
    std::vector<char> next_dirty(P.size(), 0);

    while (r.rounds_run < max_rounds) {
        ++r.rounds_run;
        bool changed = false;
        for (std::uint32_t ci = 0; ci < P.size(); ++ci) {
            if (!dirty[ci]) continue;
            dirty[ci] = 0;
            const iv_constraint& c = P.at(ci);
            interval img = eval_iv_constraint(c, r.val);
            interval joined = iv_join(r.val.at(c.output), img);
            if (joined != r.val.at(c.output)) {
                if (max_value_bits != 0 && (bit_length(joined.neg_lo()) > max_value_bits ||
                                            bit_length(joined.hi()) > max_value_bits)) {
                    r.bits_exceeded = true;
                    return r;
                }
                r.val.set(c.output, std::move(joined));
                changed = true;
                for (std::uint32_t rd : readers[c.output]) {
                    if (rd > ci)
                        dirty[rd] = 1;
                    else
                        next_dirty[rd] = 1;
                }
            }
        }
        if (!changed) {
            r.converged = true;
            return r;
        }
        dirty.swap(next_dirty);
        std::fill(next_dirty.begin(), next_dirty.end(), 0);
    }
    return r;
}

interval_system positive_mult_transform(const interval_system& P) {
    interval_system_builder b;
    for (const std::string& n : P.var_names()) b.add_var(n);

    const interval nonneg = interval::from_encoding(ext_int(0), ext_int::plus_inf());
    std::size_t mul_k = 0;

    for (const iv_constraint& c : P.constraints()) {
        if (c.which != iv_constraint::op::mul) {
            switch (c.which) {
                case iv_constraint::op::neg: b.add_neg(c.output, c.in1); break;
                case iv_constraint::op::constant: b.add_const(c.output, c.k); break;
                case iv_constraint::op::add: b.add_add(c.output, c.in1, c.in2); break;
                case iv_constraint::op::meet_const: b.add_meet(c.output, c.in1, c.k); break;
                case iv_constraint::op::mul: break;
            }
            continue;
        }

        // Split both operands into their nonnegative upper parts and negated
        // lower parts; the four part-products (two of them re-negated) join to
        // the original product hull, and every remaining multiplication has
        // nonnegative operands.
        const std::string s = "$m" + std::to_string(mul_k++);
        const var_id x1u = b.add_var(s + "u1");
        const var_id x2u = b.add_var(s + "u2");
        const var_id x1l = b.add_var(s + "l1");
        const var_id x2l = b.add_var(s + "l2");
        const var_id n1 = b.add_var(s + "n1");
        const var_id n2 = b.add_var(s + "n2");
        const var_id p1 = b.add_var(s + "p1");
        const var_id p2 = b.add_var(s + "p2");

        b.add_meet(x1u, c.in1, nonneg);
        b.add_meet(x2u, c.in2, nonneg);
        b.add_neg(n1, c.in1);
        b.add_meet(x1l, n1, nonneg);
        b.add_neg(n2, c.in2);
        b.add_meet(x2l, n2, nonneg);

        b.add_mul(c.output, x1u, x2u, true);
        b.add_mul(c.output, x1l, x2l, true);
        b.add_mul(p1, x1u, x2l, true);
        b.add_neg(c.output, p1);
        b.add_mul(p2, x1l, x2u, true);
        b.add_neg(c.output, p2);
    }
    return b.build();
}

integer_encoding translate_to_integer(const interval_system& P) {
    system_builder b;
    std::vector<std::pair<var_id, var_id>> bounds;
    bounds.reserve(P.n_vars());
    for (const std::string& n : P.var_names()) {
        var_id vm = b.add_var(n + "-");
        var_id vp = b.add_var(n + "+");
        bounds.emplace_back(vm, vp);
    }

    std::size_t tmp = 0;
    auto fresh = [&]() { return b.add_var("$t" + std::to_string(tmp++)); };
    const ext_int minf = ext_int::minus_inf();

    for (const iv_constraint& c : P.constraints()) {
        const auto [xm, xp] = bounds[c.output];
        switch (c.which) {
            case iv_constraint::op::neg: {
                const auto [am, ap] = bounds[c.in1];
                b.add_bi(xp, bi_fun::identity(), {am});
                b.add_bi(xm, bi_fun::identity(), {ap});
                break;
            }
            case iv_constraint::op::constant: {
                b.add_bi(xm, bi_fun::constant(c.k.neg_lo()), {});
                b.add_bi(xp, bi_fun::constant(c.k.hi()), {});
                break;
            }
            case iv_constraint::op::add: {
                const auto [am, ap] = bounds[c.in1];
                const auto [bm, bp] = bounds[c.in2];
                b.add_bi(xm, bi_fun::add(), {am, bm});
                b.add_bi(xp, bi_fun::add(), {ap, bp});
                break;
            }
            case iv_constraint::op::meet_const: {
                // Bound meets guarded by both emptiness tests: the raw pair
                // minimum would report a too-large value whenever the meet is
                // actually empty, so each bound only fires once the operand's
                // encoded pair clears the constant's thresholds.
                const auto [am, ap] = bounds[c.in1];
                const ext_int& km = c.k.neg_lo();
                const ext_int& kp = c.k.hi();
                const var_id t0 = fresh();
                b.add_bi(t0, bi_fun::guarded_min(km), {am});
                const var_id t1 = fresh();
                b.add_test(t1, test_fun::geq(ext_neg(km)), ap, t0);
                b.add_test(xm, test_fun::geq(ext_neg(kp)), am, t1);

                const var_id s0 = fresh();
                b.add_bi(s0, bi_fun::guarded_min(kp), {ap});
                const var_id s1 = fresh();
                b.add_test(s1, test_fun::geq(ext_neg(kp)), am, s0);
                b.add_test(xp, test_fun::geq(ext_neg(km)), ap, s1);
                break;
            }
            case iv_constraint::op::mul: {
                if (!c.pos_certified)
                    throw validation_error(
                        "multiplication must go through positive_mult_transform first");
                const auto [am, ap] = bounds[c.in1];
                const auto [bm, bp] = bounds[c.in2];
                // All four operand bounds must have left -inf (both operands
                // nonempty) before the product bounds apply.
                const var_id u0 = fresh();
                b.add_bi(u0, bi_fun::mul_minus(), {am, bm});
                const var_id u1 = fresh();
                b.add_test(u1, test_fun::gt(minf), bp, u0);
                const var_id u2 = fresh();
                b.add_test(u2, test_fun::gt(minf), bm, u1);
                const var_id u3 = fresh();
                b.add_test(u3, test_fun::gt(minf), ap, u2);
                b.add_test(xm, test_fun::gt(minf), am, u3);

                const var_id v0 = fresh();
                b.add_bi(v0, bi_fun::mul_plus(), {ap, bp});
                const var_id v1 = fresh();
                b.add_test(v1, test_fun::gt(minf), bm, v0);
                const var_id v2 = fresh();
                b.add_test(v2, test_fun::gt(minf), bp, v1);
                const var_id v3 = fresh();
                b.add_test(v3, test_fun::gt(minf), am, v2);
                b.add_test(xp, test_fun::gt(minf), ap, v3);
                break;
            }
        }
    }
    return integer_encoding{b.build(), std::move(bounds)};
}

iv_valuation decode_valuation(const valuation& rho, const integer_encoding& enc,
                              std::size_t n_intervals) {
    if (n_intervals > enc.bounds.size())
        throw validation_error("decode_valuation: more intervals requested than encoded");
    iv_valuation out = iv_valuation::bottom(n_intervals);
    for (std::size_t i = 0; i < n_intervals; ++i)
        out.set(static_cast<var_id>(i),
                interval::from_encoding(rho.at(enc.bounds[i].first), rho.at(enc.bounds[i].second)));
    return out;
}

iv_valuation solve_interval(const interval_system& P, const solve_options& opt) {
    interval_system transformed = positive_mult_transform(P);
    integer_encoding enc = translate_to_integer(transformed);
    valuation rho = solve_integer(enc.system, opt);
    return decode_valuation(rho, enc, P.n_vars());
}

}  // namespace mfp
