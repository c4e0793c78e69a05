#pragma once

// Shared helpers for the randomized differential suites: seeded generators
// for integer and interval constraint systems, plus the probe filter that
// screens out instances whose plain iteration blows up numerically (doubling
// products, power towers) before they reach the real oracle runs.

#include "mfp/csys.hpp"
#include "mfp/errors.hpp"
#include "mfp/interval.hpp"

#include <random>
#include <string>

namespace testutil {

struct int_sys_params {
    int max_vars = 8;
    int max_cons = 12;
    long long const_lo = -8;
    long long const_hi = 8;
    bool with_tests = true;
};

inline mfp::constraint_system random_int_system(std::mt19937_64& rng,
                                                const int_sys_params& p = {}) {
    const int n = std::uniform_int_distribution<int>(1, p.max_vars)(rng);
    const int m = std::uniform_int_distribution<int>(1, p.max_cons)(rng);

    mfp::system_builder b;
    for (int i = 0; i < n; ++i) b.add_var("V" + std::to_string(i));

    auto rv = [&] {
        return static_cast<mfp::var_id>(std::uniform_int_distribution<int>(0, n - 1)(rng));
    };
    auto rc = [&] {
        return mfp::ext_int(
            std::uniform_int_distribution<long long>(p.const_lo, p.const_hi)(rng));
    };

    const int n_kinds = p.with_tests ? 10 : 8;
    for (int j = 0; j < m; ++j) {
        const mfp::var_id out = rv();
        switch (std::uniform_int_distribution<int>(0, n_kinds - 1)(rng)) {
            case 0: b.add_bi(out, mfp::bi_fun::constant(rc()), {}); break;
            case 1: b.add_bi(out, mfp::bi_fun::identity(), {rv()}); break;
            case 2: b.add_bi(out, mfp::bi_fun::guarded_min(rc()), {rv()}); break;
            case 3: b.add_bi(out, mfp::bi_fun::add(), {rv(), rv()}); break;
            case 4: b.add_bi(out, mfp::bi_fun::mul_plus(), {rv(), rv()}); break;
            case 5: b.add_bi(out, mfp::bi_fun::mul_minus(), {rv(), rv()}); break;
            case 6: b.add_bi(out, mfp::bi_fun::pow2(), {rv()}); break;
            case 7: b.add_bi(out, mfp::bi_fun::factorial(), {rv()}); break;
            case 8: b.add_test(out, mfp::test_fun::geq(rc()), rv(), rv()); break;
            default: b.add_test(out, mfp::test_fun::gt(rc()), rv(), rv()); break;
        }
    }
    return b.build();
}

struct iv_sys_params {
    int max_vars = 6;
    int max_cons = 10;
    long long const_lo = -8;
    long long const_hi = 8;
};

inline mfp::interval_system random_iv_system(std::mt19937_64& rng, const iv_sys_params& p = {}) {
    const int n = std::uniform_int_distribution<int>(1, p.max_vars)(rng);
    const int m = std::uniform_int_distribution<int>(1, p.max_cons)(rng);

    mfp::interval_system_builder b;
    for (int i = 0; i < n; ++i) b.add_var("V" + std::to_string(i));

    auto rv = [&] {
        return static_cast<mfp::var_id>(std::uniform_int_distribution<int>(0, n - 1)(rng));
    };
    auto riv = [&] {
        std::uniform_int_distribution<long long> d(p.const_lo, p.const_hi);
        const long long a = d(rng), c = d(rng);
        // Inverted pairs canonicalize to the empty interval; keep them, empty
        // constants are legal and exercise emptiness propagation.
        return mfp::interval::make(mfp::ext_int(a), mfp::ext_int(c));
    };

    for (int j = 0; j < m; ++j) {
        const mfp::var_id out = rv();
        switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
            case 0: b.add_const(out, riv()); break;
            case 1: b.add_neg(out, rv()); break;
            case 2: b.add_add(out, rv(), rv()); break;
            case 3: b.add_meet(out, rv(), riv()); break;
            default: b.add_mul(out, rv(), rv()); break;
        }
    }
    return b.build();
}

// Cheap pre-run that rejects systems whose values explode in size; the kept
// instances either converge or keep climbing at a representable pace. A
// tower (pow2/factorial fed by a pump) can outgrow the representable-result
// caps inside a single application, before the bit guard sees the value;
// those systems are not tame either.
inline bool tame_int_probe(const mfp::constraint_system& P) {
    mfp::kleene_options opt;
    opt.max_rounds = 1000;
    opt.max_value_bits = 512;
    try {
        return !mfp::kleene_run(P, mfp::valuation::bottom(P.n_vars()), opt).bits_exceeded;
    } catch (const mfp::limit_error&) {
        return false;
    }
}

inline bool tame_iv_probe(const mfp::interval_system& P) {
    try {
        return !mfp::kleene_interval(P, 1000, 512).bits_exceeded;
    } catch (const mfp::limit_error&) {
        return false;
    }
}

}  // namespace testutil
