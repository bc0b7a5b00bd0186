#pragma once
//
// Benchmark records, CSV output and the three suites driven by the CLI.
// Every cell owns its operator and seed; a failing cell is recorded with
// rel_err = nan and the run continues.
//

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fixed_precision.hpp"
#include "fixed_rank.hpp"
#include "matgen.hpp"
#include "single_pass.hpp"

namespace rlra {

inline constexpr const char* kCsvHeader = "alg,matrix,m,n,k,eps,v,p,seed,rel_err,rank,passes,wall_ms";

struct BenchRecord {
    std::string alg;
    std::string matrix;
    Index m = 0;
    Index n = 0;
    std::optional<Index> k;
    std::optional<double> eps;
    std::optional<Index> v;
    std::optional<Index> p;
    std::uint64_t seed = 0;
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    Index rank = 0;
    std::size_t passes = 0;
    double wall_ms = 0.0;
};

inline void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& out, const BenchRecord& r) {
    auto opt = [&](const auto& o) {
        if (o) out << *o;
        out << ',';
    };
    out << r.alg << ',' << r.matrix << ',' << r.m << ',' << r.n << ',';
    opt(r.k);
    opt(r.eps);
    opt(r.v);
    opt(r.p);
    out << r.seed << ',' << r.rel_err << ',' << r.rank << ',' << r.passes << ',' << r.wall_ms << '\n';
}

inline void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows) {
    write_csv_header(out);
    for (const auto& r : rows) write_csv_row(out, r);
}

/// Fixed-rank algorithms reachable from the CLI and the suites.
enum class Algorithm { PowerLU, RandLU, RandLUNoReorth, RandSVD, SinglePass, SinglePass2011, TSVD };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::PowerLU: return "powerlu";
        case Algorithm::RandLU: return "randlu";
        case Algorithm::RandLUNoReorth: return "randlu-noreorth";
        case Algorithm::RandSVD: return "randsvd";
        case Algorithm::SinglePass: return "singlepass";
        case Algorithm::SinglePass2011: return "singlepass2011";
        case Algorithm::TSVD: return "tsvd";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
    for (Algorithm a : {Algorithm::PowerLU, Algorithm::RandLU, Algorithm::RandLUNoReorth, Algorithm::RandSVD,
                        Algorithm::SinglePass, Algorithm::SinglePass2011, Algorithm::TSVD})
        if (s == algorithm_name(a)) return a;
    return std::nullopt;
}

/// Output of one fixed-rank run plus its measured access counts.
struct RunOutcome {
    Matrix approx;
    Index rank = 0;
    std::size_t passes = 0;        // products against A
    std::size_t column_pulls = 0;  // streamed columns, single-pass only
    std::optional<LowRankLU> lu;
    std::optional<LowRankSVD> svd;
};

/// `power` is v for PowerLU and p for the even-pass drivers; ignored otherwise.
inline RunOutcome run_fixed_rank(Algorithm alg, const Matrix& a, Index k, Index oversample, Index power, Seed seed) {
    RunOutcome out;
    DenseOperator dense(a);
    Counted counted(dense);
    switch (alg) {
        case Algorithm::PowerLU: out.lu = powerlu(counted, k, oversample, power, seed); break;
        case Algorithm::RandLU: out.lu = randlu(counted, k, oversample, power, seed); break;
        case Algorithm::RandLUNoReorth: out.lu = randlu_noreorth(counted, k, oversample, power, seed); break;
        case Algorithm::RandSVD: out.svd = truncate(randsvd(counted, k, oversample, power, seed), k); break;
        case Algorithm::SinglePass: {
            DenseColumnStream stream(a);
            CountingStream cs(stream);
            out.lu = single_pass_lu(cs, k, seed);
            out.column_pulls = cs.column_count();
            out.passes = 1;
            break;
        }
        case Algorithm::SinglePass2011: out.svd = single_pass_baseline_2011(a, k, seed); break;
        case Algorithm::TSVD: {
            TruncatedSVD t = tsvd(a, k);
            out.svd = LowRankSVD{std::move(t.U), std::move(t.S), std::move(t.V), 0};
            break;
        }
    }
    if (alg != Algorithm::SinglePass && alg != Algorithm::SinglePass2011 && alg != Algorithm::TSVD)
        out.passes = counted.product_count();
    if (alg == Algorithm::SinglePass2011) out.passes = 1;
    if (out.lu) {
        out.approx = reconstruct(*out.lu);
        out.rank = out.lu->rank;
    } else {
        out.approx = reconstruct(*out.svd);
        out.rank = out.svd->S.size();
    }
    return out;
}

inline const char* decay_name(DecayKind k) {
    switch (k) {
        case DecayKind::Slow: return "slow";
        case DecayKind::Fast: return "fast";
        case DecayKind::SShaped: return "sshaped";
        case DecayKind::Custom: return "custom";
    }
    return "?";
}

inline std::optional<DecayKind> parse_decay(const std::string& s) {
    for (DecayKind k : {DecayKind::Slow, DecayKind::Fast, DecayKind::SShaped})
        if (s == decay_name(k)) return k;
    return std::nullopt;
}

struct SuiteConfig {
    DecayKind kind = DecayKind::Slow;
    Index n = 500;
    Index seeds = 20;
    std::uint64_t base_seed = 1;
    Index power = 1;                  // p; PowerLU runs with v = 2p + 2
    std::vector<Index> grid;          // l (accuracy) or k (rank-sweep)
    Index oversample = 0;
};

namespace detail {

inline BenchRecord timed_cell(Algorithm alg, const Matrix& a, const std::string& label, Index k, Index oversample,
                              Index p, Seed seed) {
    BenchRecord r;
    r.alg = algorithm_name(alg);
    r.matrix = label;
    r.m = a.rows();
    r.n = a.cols();
    r.k = k;
    r.seed = seed.value;
    const bool pass_based = alg == Algorithm::PowerLU;
    const Index power = pass_based ? passes_for_power(p) : p;
    if (alg == Algorithm::PowerLU) r.v = power;
    if (alg == Algorithm::RandLU || alg == Algorithm::RandLUNoReorth || alg == Algorithm::RandSVD) {
        r.p = p;
        r.v = passes_for_power(p);
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
        RunOutcome o = run_fixed_rank(alg, a, k, oversample, power, seed);
        r.rel_err = rel_fro_error(a, o.approx);
        r.rank = o.rank;
        r.passes = o.passes;
    } catch (const Error&) {
        // recorded as a nan row
    }
    r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace detail

/// Relative error against l for the fixed-rank drivers and the truncated SVD.
inline std::vector<BenchRecord> accuracy_suite(const SuiteConfig& cfg) {
    std::vector<Index> grid = cfg.grid;
    if (grid.empty())
        for (Index l = 20; l <= 200; l += 20) grid.push_back(l);
    const GeneratedMatrix g = gen_decay(DecaySpec{cfg.kind, cfg.n, cfg.n, Seed{cfg.base_seed}, {}});
    const std::string label = decay_name(cfg.kind);
    std::vector<BenchRecord> rows;
    for (Index l : grid) {
        if (l > cfg.n) continue;
        for (Index s = 0; s < cfg.seeds; ++s) {
            const Seed seed = derive(Seed{cfg.base_seed}, static_cast<std::uint64_t>(s));
            for (Algorithm alg : {Algorithm::PowerLU, Algorithm::RandLU, Algorithm::RandLUNoReorth, Algorithm::RandSVD})
                rows.push_back(detail::timed_cell(alg, g.A, label, l, 0, cfg.power, seed));
        }
        BenchRecord opt = detail::timed_cell(Algorithm::TSVD, g.A, label, l, 0, cfg.power, Seed{cfg.base_seed});
        opt.rel_err = l < g.sigma.size() ? oracle_rel_error(g.sigma, l) : 0.0;
        rows.push_back(opt);
    }
    return rows;
}

/// Wall time against k on a fixed size; fixed-precision rows use the adaptive driver.
inline std::vector<BenchRecord> rank_sweep_suite(const SuiteConfig& cfg) {
    std::vector<Index> grid = cfg.grid;
    if (grid.empty())
        for (Index k = 100; k <= 1000; k += 100) grid.push_back(k);
    const GeneratedMatrix g = gen_decay(DecaySpec{cfg.kind, cfg.n, cfg.n, Seed{cfg.base_seed}, {}});
    const std::string label = decay_name(cfg.kind);
    std::vector<BenchRecord> rows;
    for (Index k : grid) {
        if (k + cfg.oversample > cfg.n) continue;
        for (Index s = 0; s < cfg.seeds; ++s) {
            const Seed seed = derive(Seed{cfg.base_seed}, static_cast<std::uint64_t>(s));
            for (Algorithm alg : {Algorithm::PowerLU, Algorithm::RandLU, Algorithm::RandSVD})
                rows.push_back(detail::timed_cell(alg, g.A, label, k, cfg.oversample, cfg.power, seed));
        }
    }
    return rows;
}

/// Measured pass counts per algorithm and power setting.
inline std::vector<BenchRecord> passes_suite(const SuiteConfig& cfg) {
    const Index n = cfg.n;
    const Index k = std::max<Index>(1, std::min<Index>(20, n / 4));
    const GeneratedMatrix g = gen_decay(DecaySpec{cfg.kind, n, n, Seed{cfg.base_seed}, {}});
    const std::string label = decay_name(cfg.kind);
    std::vector<BenchRecord> rows;
    for (Index s = 0; s < cfg.seeds; ++s) {
        const Seed seed = derive(Seed{cfg.base_seed}, static_cast<std::uint64_t>(s));
        for (Index p : {0, 1, 2}) {
            rows.push_back(detail::timed_cell(Algorithm::RandSVD, g.A, label, k, 0, p, seed));
            rows.push_back(detail::timed_cell(Algorithm::RandLU, g.A, label, k, 0, p, seed));
        }
        for (Index v : {2, 3, 4, 5}) {
            BenchRecord r;
            r.alg = "powerlu";
            r.matrix = label;
            r.m = r.n = n;
            r.k = k;
            r.v = v;
            r.seed = seed.value;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                RunOutcome o = run_fixed_rank(Algorithm::PowerLU, g.A, k, 0, v, seed);
                r.rel_err = rel_fro_error(g.A, o.approx);
                r.rank = o.rank;
                r.passes = o.passes;
            } catch (const Error&) {
            }
            r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            rows.push_back(r);
        }
        rows.push_back(detail::timed_cell(Algorithm::SinglePass, g.A, label, k, 0, 0, seed));
    }
    return rows;
}

}  // namespace rlra
