// Factor a fast-decay test matrix three ways and print the errors.

#include <iostream>

#include <rlra/rlra.hpp>

int main() {
    using namespace rlra;

    const GeneratedMatrix g = gen_decay(DecaySpec{DecayKind::Fast, 400, 300, Seed{1}, {}});
    const Index k = 40;
    std::cout << "optimum      " << oracle_rel_error(g.sigma, k) << '\n';

    DenseOperator op(g.A);
    Counted counted(op);
    LowRankLU f = powerlu(counted, k, 10, 3, Seed{2});
    std::cout << "powerlu v=3  " << rel_fro_error(g.A, reconstruct(f)) << "  passes " << counted.product_count() << '\n';

    DenseColumnStream stream(g.A);
    LowRankLU s = single_pass_lu(stream, k, Seed{3});
    std::cout << "single pass  " << rel_fro_error(g.A, reconstruct(s)) << '\n';

    FixedPrecisionResult fp = powerlu_fp(g.A, PrecisionParams{1e-3, 10, 100, 4}, Seed{4});
    std::cout << "eps=1e-3     rank " << fp.factors.rank << "  error " << rel_fro_error(g.A, reconstruct(fp.factors))
              << '\n';
}
