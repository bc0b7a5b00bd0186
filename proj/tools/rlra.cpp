// rlra: generate test matrices, factor them, run the fixed-precision driver,
// benchmark suites and image compression.
//
// exit codes: 0 ok, 1 runtime failure, 2 usage, 3 not converged, 4 unsatisfiable

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include <rlra/rlra.hpp>

namespace {

using namespace rlra;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitUnsatisfiable = 4;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_mtx(const std::string& path) { return ends_with(path, ".mtx"); }

/// Dense or sparse operand, chosen by file extension.
struct Operand {
    Matrix dense;
    SparseMatrix sparse;
    bool is_sparse = false;

    Index rows() const { return is_sparse ? sparse.rows() : dense.rows(); }
    Index cols() const { return is_sparse ? sparse.cols() : dense.cols(); }
    Matrix to_dense() const { return is_sparse ? Matrix(sparse) : dense; }
};

Operand load_operand(const std::string& path) {
    Operand op;
    if (is_mtx(path)) {
        op.is_sparse = true;
        op.sparse = read_matrix_market(path);
    } else {
        op.dense = read_rlra(path);
    }
    return op;
}

template <class F>
decltype(auto) with_counted(const Operand& op, F&& f) {
    if (op.is_sparse) {
        SparseOperator inner(op.sparse);
        Counted counted(inner);
        return f(counted);
    }
    DenseOperator inner(op.dense);
    Counted counted(inner);
    return f(counted);
}

void write_permutation(const std::string& path, const Permutation& p) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (Index i : p.indices()) out << i << '\n';
}

void write_lu(const std::string& prefix, const LowRankLU& f) {
    write_rlra(prefix + ".L.rlm", f.L);
    write_rlra(prefix + ".U.rlm", f.U);
    write_permutation(prefix + ".p.txt", f.p);
    write_permutation(prefix + ".q.txt", f.q);
}

void write_svd(const std::string& prefix, const LowRankSVD& s) {
    write_rlra(prefix + ".U.rlm", s.U);
    write_sigma(prefix + ".S.sigma", s.S);
    write_rlra(prefix + ".V.rlm", s.V);
}

// ---- gen ----

struct GenArgs {
    std::string type = "fast";
    Index m = 0;
    Index n = 0;
    Index rank = 5;
    double density = 0.003;
    std::uint64_t seed = 1;
    std::string out;
};

int run_gen(const GenArgs& g) {
    if (g.m < 1 || g.n < 1) throw UsageError("gen: --m and --n must be >= 1");
    if (g.type == "sparse") {
        if (!is_mtx(g.out)) throw UsageError("gen: sparse output must end in .mtx");
        SparseMatrix a = gen_sparse(g.m, g.n, g.density, Seed{g.seed});
        write_matrix_market(g.out, a);
        std::cout << "wrote " << g.out << " m=" << g.m << " n=" << g.n << " nnz=" << a.nonZeros() << '\n';
        return kExitOk;
    }
    GeneratedMatrix gm;
    if (g.type == "lowrank") {
        gm = gen_low_rank(g.m, g.n, g.rank, Seed{g.seed});
    } else if (auto kind = parse_decay(g.type)) {
        gm = gen_decay(DecaySpec{*kind, g.m, g.n, Seed{g.seed}, {}});
    } else {
        throw UsageError("gen: unknown --type '" + g.type + "'");
    }
    write_rlra(g.out, gm.A);
    const std::string sig = sigma_path_for(g.out);
    write_sigma(sig, gm.sigma);
    std::cout << "wrote " << g.out << " and " << sig << " m=" << g.m << " n=" << g.n << '\n';
    return kExitOk;
}

// ---- factor ----

struct FactorArgs {
    std::string input;
    std::string alg = "powerlu";
    Index rank = 0;
    Index oversample = -1;  // -1: 10 for sketch drivers, 0 for single-pass
    std::optional<Index> passes;
    std::optional<Index> power;
    std::uint64_t seed = 1;
    std::string out_prefix;
    Index panel = kDefaultPanelWidth;
};

int run_factor(const FactorArgs& fa) {
    const auto alg = parse_algorithm(fa.alg);
    if (!alg || *alg == Algorithm::TSVD || *alg == Algorithm::SinglePass2011)
        throw UsageError("factor: --alg must be one of powerlu|randlu|randlu-noreorth|randsvd|singlepass");
    if (fa.passes && fa.power) throw UsageError("factor: give exactly one of --passes and --power");
    if (*alg != Algorithm::SinglePass && !fa.passes && !fa.power)
        throw UsageError("factor: one of --passes and --power is required");
    if (fa.rank < 1) throw UsageError("factor: --rank must be >= 1");
    const Seed seed{fa.seed};

    // v = 2p + 2 links the two conventions
    Index v = 0, p = 0;
    if (fa.power) {
        if (*fa.power < 0) throw UsageError("factor: --power must be >= 0");
        p = *fa.power;
        v = passes_for_power(p);
    } else if (fa.passes) {
        v = *fa.passes;
        if (*alg != Algorithm::PowerLU && *alg != Algorithm::SinglePass) {
            if (v < 2 || v % 2 != 0)
                throw UsageError("factor: " + fa.alg + " needs an even --passes >= 2 (v = 2p + 2)");
            p = power_for_passes(v);
        }
    }

    std::ostringstream line;
    line << "alg=" << fa.alg;
    if (*alg == Algorithm::SinglePass) {
        const Index os = fa.oversample < 0 ? 0 : fa.oversample;
        LowRankLU f;
        std::size_t columns = 0;
        Matrix a;
        if (is_mtx(fa.input)) {
            SparseColumnStream stream = SparseColumnStream::from_file(fa.input);
            CountingStream cs(stream);
            f = single_pass_lu(cs, fa.rank, seed, os, fa.panel);
            columns = cs.column_count();
            a = Matrix(read_matrix_market(fa.input));
        } else {
            RlraColumnStream stream(fa.input);
            CountingStream cs(stream);
            f = single_pass_lu(cs, fa.rank, seed, os, fa.panel);
            columns = cs.column_count();
            a = read_rlra(fa.input);
        }
        line << " m=" << a.rows() << " n=" << a.cols() << " k=" << f.rank << " passes=1 column_count=" << columns
             << " rel_err=" << rel_fro_error(a, reconstruct(f)) << " seed=" << fa.seed;
        if (!fa.out_prefix.empty()) write_lu(fa.out_prefix, f);
        std::cout << line.str() << '\n';
        return kExitOk;
    }

    const Index os = fa.oversample < 0 ? 10 : fa.oversample;
    const Operand op = load_operand(fa.input);
    std::size_t used = 0;
    std::optional<LowRankLU> lu;
    std::optional<LowRankSVD> svd;
    with_counted(op, [&](auto& counted) {
        switch (*alg) {
            case Algorithm::PowerLU: lu = powerlu(counted, fa.rank, os, v, seed); break;
            case Algorithm::RandLU: lu = randlu(counted, fa.rank, os, p, seed); break;
            case Algorithm::RandLUNoReorth: lu = randlu_noreorth(counted, fa.rank, os, p, seed); break;
            case Algorithm::RandSVD: svd = truncate(randsvd(counted, fa.rank, os, p, seed), fa.rank); break;
            default: break;
        }
        used = counted.product_count();
        return 0;
    });
    const Matrix a = op.to_dense();
    const double err = rel_fro_error(a, lu ? reconstruct(*lu) : reconstruct(*svd));
    line << " m=" << a.rows() << " n=" << a.cols() << " k=" << fa.rank << " q=" << os;
    if (*alg == Algorithm::PowerLU)
        line << " v=" << v;
    else
        line << " p=" << p;
    line << " passes=" << used << " rel_err=" << err << " seed=" << fa.seed;
    if (!fa.out_prefix.empty()) {
        if (lu)
            write_lu(fa.out_prefix, *lu);
        else
            write_svd(fa.out_prefix, *svd);
    }
    std::cout << line.str() << '\n';
    return kExitOk;
}

// ---- adapt ----

struct AdaptArgs {
    std::string input;
    double tol = 1e-2;
    Index block = 10;
    Index width = 0;  // 0: default
    std::optional<Index> passes;
    std::optional<Index> power;
    bool no_restart = false;
    std::uint64_t seed = 1;
    std::string out_prefix;
};

PrecisionParams precision_params(Index m, Index n, double tol, Index block, Index width, std::optional<Index> passes,
                                 std::optional<Index> power) {
    if (passes && power) throw UsageError("give at most one of --passes and --power");
    if (block < 1) throw UsageError("--block must be >= 1");
    PrecisionParams pp;
    pp.eps = tol;
    pp.block = block;
    pp.passes = passes ? *passes : power ? passes_for_power(*power) : 4;
    pp.width = width > 0 ? width : default_width(m, n, block);
    if (pp.width < block) throw UsageError("matrix is smaller than one block");
    return pp;
}

int run_adapt(const AdaptArgs& aa) {
    const Operand op = load_operand(aa.input);
    const PrecisionParams pp =
        precision_params(op.rows(), op.cols(), aa.tol, aa.block, aa.width, aa.passes, aa.power);
    const Seed seed{aa.seed};
    std::size_t restarts = 0;
    std::size_t used = 0;
    try {
        FixedPrecisionResult r = with_counted(op, [&](auto& counted) {
            auto res = aa.no_restart ? powerlu_fp(counted, pp, seed)
                                     : powerlu_fp_restarting(counted, pp, seed, &restarts);
            used = counted.product_count();
            return res;
        });
        const Matrix a = op.to_dense();
        std::cout << "rank=" << r.factors.rank << " residual_energy=" << r.outcome.residual_energy
                  << " converged=true restarts=" << restarts << " passes=" << used
                  << " rel_err=" << rel_fro_error(a, reconstruct(r.factors)) << " seed=" << aa.seed << '\n';
        if (!aa.out_prefix.empty()) write_lu(aa.out_prefix, r.factors);
        return kExitOk;
    } catch (const NotConverged& nc) {
        std::cout << "rank=" << nc.partial().rank << " residual_energy=" << nc.partial().residual_energy
                  << " converged=false seed=" << aa.seed << '\n';
        std::cerr << "not converged: widen --l or allow restarts\n";
        return kExitNotConverged;
    } catch (const Unsatisfiable& e) {
        std::cerr << "unsatisfiable: " << e.what() << '\n';
        return kExitUnsatisfiable;
    }
}

// ---- bench ----

struct BenchArgs {
    std::string suite = "accuracy";
    std::string type = "slow";
    Index n = 500;
    Index seeds = 20;
    Index power = 1;
    Index oversample = 0;
    std::vector<Index> grid;
    std::uint64_t seed = 1;
    std::string out;
};

int run_bench(const BenchArgs& ba) {
    const auto kind = parse_decay(ba.type);
    if (!kind) throw UsageError("bench: unknown --type '" + ba.type + "'");
    if (ba.seeds < 1 || ba.n < 2) throw UsageError("bench: --seeds must be >= 1 and --n >= 2");
    SuiteConfig cfg{*kind, ba.n, ba.seeds, ba.seed, ba.power, ba.grid, ba.oversample};
    std::vector<BenchRecord> rows;
    if (ba.suite == "accuracy")
        rows = accuracy_suite(cfg);
    else if (ba.suite == "rank-sweep")
        rows = rank_sweep_suite(cfg);
    else if (ba.suite == "passes")
        rows = passes_suite(cfg);
    else
        throw UsageError("bench: --suite must be accuracy|rank-sweep|passes");
    if (ba.out.empty()) {
        write_csv(std::cout, rows);
    } else {
        std::ofstream out(ba.out, std::ios::trunc);
        if (!out) throw IoError("cannot open '" + ba.out + "' for writing");
        write_csv(out, rows);
        std::cout << "wrote " << rows.size() << " rows to " << ba.out << '\n';
    }
    return kExitOk;
}

// ---- compress ----

struct CompressArgs {
    std::string input;
    std::string out;
    double tol = 0.1;
    Index block = 10;
    Index width = 0;
    std::optional<Index> passes;
    std::optional<Index> power;
    std::uint64_t seed = 1;
};

int run_compress(const CompressArgs& ca) {
    const GrayImage img = read_pgm(ca.input);
    const Index m = img.pixels.rows(), n = img.pixels.cols();
    const PrecisionParams pp = precision_params(m, n, ca.tol, ca.block, ca.width, ca.passes, ca.power);
    try {
        FixedPrecisionResult r = powerlu_fp_restarting(DenseOperator(img.pixels), pp, Seed{ca.seed});
        const Index k = r.factors.rank;
        GrayImage rec{reconstruct(r.factors), img.maxval};
        const double ratio = static_cast<double>(m * k + k * n + k) / static_cast<double>(m * n);
        std::cout << "rank=" << k << " rel_err=" << rel_fro_error(img.pixels, rec.pixels) << " size_ratio=" << ratio
                  << " seed=" << ca.seed << '\n';
        if (!ca.out.empty()) write_pgm(ca.out, rec);
        return kExitOk;
    } catch (const Unsatisfiable& e) {
        std::cerr << "unsatisfiable: " << e.what() << '\n';
        return kExitUnsatisfiable;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"randomized low-rank LU / SVD toolkit"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "write a synthetic test matrix");
    g->add_option("--type", gen.type, "slow|fast|sshaped|lowrank|sparse")->capture_default_str();
    g->add_option("--m", gen.m, "rows")->required();
    g->add_option("--n", gen.n, "columns")->required();
    g->add_option("--rank", gen.rank, "rank for --type lowrank")->capture_default_str();
    g->add_option("--density", gen.density, "nonzero fraction for --type sparse")->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--out", gen.out, "output path (.rlm, or .mtx for sparse)")->required();

    FactorArgs fac;
    auto* f = app.add_subcommand("factor", "fixed-rank factorization");
    f->add_option("--input", fac.input, ".rlm or .mtx")->required()->check(CLI::ExistingFile);
    f->add_option("--alg", fac.alg, "powerlu|randlu|randlu-noreorth|randsvd|singlepass")->capture_default_str();
    f->add_option("--rank,-k", fac.rank, "target rank")->required();
    f->add_option("--oversample,-q", fac.oversample, "oversampling (default 10; 0 for singlepass)");
    auto* fpasses = f->add_option("--passes,-v", fac.passes, "passes over A");
    auto* fpower = f->add_option("--power,-p", fac.power, "power iteration exponent");
    fpasses->excludes(fpower);
    f->add_option("--panel", fac.panel, "single-pass panel width")->capture_default_str();
    f->add_option("--seed", fac.seed)->capture_default_str();
    f->add_option("--out-prefix", fac.out_prefix, "write factors under this prefix");

    AdaptArgs ad;
    auto* a = app.add_subcommand("adapt", "fixed-precision factorization");
    a->add_option("--input", ad.input, ".rlm or .mtx")->required()->check(CLI::ExistingFile);
    a->add_option("--tol", ad.tol, "relative Frobenius tolerance")->capture_default_str();
    a->add_option("--block", ad.block)->capture_default_str();
    a->add_option("--l", ad.width, "sketch width (multiple of --block)");
    auto* apasses = a->add_option("--passes,-v", ad.passes, "passes over A (default 4)");
    auto* apower = a->add_option("--power,-p", ad.power, "power exponent, v = 2p + 2");
    apasses->excludes(apower);
    a->add_flag("--no-restart", ad.no_restart, "fail with exit 3 instead of widening the sketch");
    a->add_option("--seed", ad.seed)->capture_default_str();
    a->add_option("--out-prefix", ad.out_prefix, "write factors under this prefix");

    BenchArgs be;
    auto* b = app.add_subcommand("bench", "benchmark suites, CSV output");
    b->add_option("--suite", be.suite, "accuracy|rank-sweep|passes")->capture_default_str();
    b->add_option("--type", be.type, "slow|fast|sshaped")->capture_default_str();
    b->add_option("--n", be.n)->capture_default_str();
    b->add_option("--seeds", be.seeds, "runs per cell")->capture_default_str();
    b->add_option("--power,-p", be.power)->capture_default_str();
    b->add_option("--oversample,-q", be.oversample)->capture_default_str();
    b->add_option("--grid", be.grid, "l (accuracy) or k (rank-sweep) values")->delimiter(',');
    b->add_option("--seed", be.seed)->capture_default_str();
    b->add_option("--out", be.out, "CSV path (default stdout)");

    CompressArgs co;
    auto* c = app.add_subcommand("compress", "fixed-precision compression of a PGM image");
    c->add_option("--input", co.input, "P2/P5 PGM")->required()->check(CLI::ExistingFile);
    c->add_option("--out", co.out, "reconstructed PGM");
    c->add_option("--tol", co.tol)->capture_default_str();
    c->add_option("--block", co.block)->capture_default_str();
    c->add_option("--l", co.width);
    auto* cpasses = c->add_option("--passes,-v", co.passes);
    auto* cpower = c->add_option("--power,-p", co.power);
    cpasses->excludes(cpower);
    c->add_option("--seed", co.seed)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*g) return run_gen(gen);
        if (*f) return run_factor(fac);
        if (*a) return run_adapt(ad);
        if (*b) return run_bench(be);
        if (*c) return run_compress(co);
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ShapeError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NotConverged& e) {
        std::cerr << e.what() << '\n';
        return kExitNotConverged;
    } catch (const Unsatisfiable& e) {
        std::cerr << "unsatisfiable: " << e.what() << '\n';
        return kExitUnsatisfiable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
