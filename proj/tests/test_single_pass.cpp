#include <gtest/gtest.h>

#include <rlra/matgen.hpp>
#include <rlra/single_pass.hpp>

#include "support.hpp"

using namespace rlra;

namespace {

/// Serves columns of a matrix but lies about its width.
class ShortStream {
public:
    explicit ShortStream(const Matrix& a) : inner_(a), n_(a.cols() + 1) {}
    Index rows() const { return inner_.rows(); }
    Index cols() const { return n_; }
    std::optional<ColumnPanel> next(Index w) { return inner_.next(w); }

private:
    DenseColumnStream inner_;
    Index n_;
};

/// Delivers its single panel out of order.
class SkippingStream {
public:
    explicit SkippingStream(const Matrix& a) : a_(a) {}
    Index rows() const { return a_.rows(); }
    Index cols() const { return a_.cols(); }
    std::optional<ColumnPanel> next(Index) {
        if (done_) return std::nullopt;
        done_ = true;
        return ColumnPanel{1, a_.rightCols(a_.cols() - 1)};
    }

private:
    Matrix a_;
    bool done_ = false;
};

}  // namespace

TEST(StreamSketch, IdentityStream) {
    const Matrix a = Matrix::Identity(4, 4);
    DenseColumnStream s(a);
    const SketchPair sk = stream_sketch(s, 4, Seed{5});
    const Matrix omega = gaussian(Seed{5}, 4, 4);
    EXPECT_EQ(sk.G, omega);
    EXPECT_EQ(sk.H, omega);
}

TEST(StreamSketch, MatchesTwoProductOracle) {
    const Matrix a = oracle::randn(1, 60, 40);
    DenseColumnStream s(a);
    const SketchPair sk = stream_sketch(s, 10, Seed{2}, 7);
    const Matrix omega = gaussian(Seed{2}, 60, 10);
    const Matrix g = a.transpose() * omega;
    const Matrix h = a * g;
    EXPECT_LE((sk.G - g).norm(), 1e-12 * g.norm());
    EXPECT_LE((sk.H - h).norm(), 1e-10 * h.norm());
}

TEST(StreamSketch, UnitPanelsMatchOuterProductSum) {
    const Matrix a = oracle::randn(3, 30, 25);
    DenseColumnStream s(a);
    const SketchPair sk = stream_sketch(s, 6, Seed{4}, 1);
    const Matrix omega = gaussian(Seed{4}, 30, 6);
    Matrix h = Matrix::Zero(30, 6);
    for (Index i = 0; i < 25; ++i) {
        const Eigen::RowVectorXd gi = a.col(i).transpose() * omega;
        h += a.col(i) * gi;
    }
    EXPECT_LE((sk.H - h).norm(), 1e-12 * h.norm());
}

TEST(StreamSketch, ColumnCounterEqualsN) {
    const Matrix a = oracle::randn(5, 20, 33);
    DenseColumnStream s(a);
    CountingStream cs(s);
    stream_sketch(cs, 5, Seed{1}, 8);
    EXPECT_EQ(cs.column_count(), 33u);
    EXPECT_EQ(cs.pull_count(), 5u + 1u);  // four full panels, one partial, one exhausted pull
}

TEST(StreamSketch, LengthMismatch) {
    const Matrix a = oracle::randn(6, 10, 8);
    ShortStream s(a);
    EXPECT_THROW(stream_sketch(s, 3, Seed{1}), ShapeError);
    SkippingStream k(a);
    EXPECT_THROW(stream_sketch(k, 3, Seed{1}), ShapeError);
}

TEST(SinglePassLu, ExactRank) {
    const Matrix a = oracle::low_rank(7, 80, 60, 5);
    DenseColumnStream s(a);
    const LowRankLU f = single_pass_lu(s, 5, Seed{8});
    EXPECT_LE(rel_fro_error(a, reconstruct(f)), 1e-6);
    EXPECT_EQ(f.rank, 5);
    EXPECT_EQ(f.passes_used, 1u);
}

TEST(SinglePassLu, EqualsProjectionOntoSketchRowSpace) {
    const Matrix a = oracle::randn(9, 50, 40);
    DenseColumnStream s(a);
    const LowRankLU f = single_pass_lu(s, 8, Seed{10});
    const Matrix g = a.transpose() * gaussian(Seed{10}, 50, 8);
    const Matrix q = oracle::gram_schmidt(g);
    const Matrix proj = a * q * q.transpose();
    EXPECT_LE((reconstruct(f) - proj).norm(), 1e-9 * a.norm());
}

TEST(SinglePassLu, FastDecayWithinFiveTimesOptimum) {
    const GeneratedMatrix g = gen_decay(DecaySpec{DecayKind::Fast, 500, 500, Seed{11}, {}});
    DenseColumnStream s(g.A);
    const LowRankLU f = single_pass_lu(s, 65, Seed{12});
    EXPECT_LE(rel_fro_error(g.A, reconstruct(f)), 5.0 * oracle_rel_error(g.sigma, 65));
}

TEST(SinglePassLu, OneSweepOnly) {
    const Matrix a = oracle::randn(13, 40, 70);
    DenseColumnStream s(a);
    CountingStream cs(s);
    single_pass_lu(cs, 10, Seed{14}, 0, 16);
    EXPECT_EQ(cs.column_count(), 70u);
    EXPECT_EQ(cs.pull_count(), 5u + 1u);
    EXPECT_FALSE(s.next(1).has_value());
}

TEST(SinglePassLu, OversamplingTruncatesToK) {
    const Matrix a = oracle::randn(15, 40, 30);
    DenseColumnStream s(a);
    const LowRankLU f = single_pass_lu(s, 6, Seed{16}, 4);
    EXPECT_EQ(f.L.cols(), 6);
    EXPECT_EQ(f.U.rows(), 6);
    EXPECT_EQ(f.rank, 6);
}

TEST(SinglePassLu, RankDeficientSketchRejected) {
    const Matrix a = oracle::low_rank(17, 30, 20, 2);
    DenseColumnStream s(a);
    EXPECT_THROW(single_pass_lu(s, 5, Seed{18}), IllPosedPseudoinverse);
}

TEST(SinglePassLu, RowMajorAdapterFactorsA) {
    const Matrix a = oracle::low_rank(19, 35, 25, 4);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = a;
    const LowRankLU f = single_pass_lu_row_major(std::span<const double>(rm.data(), static_cast<std::size_t>(rm.size())),
                                                 35, 25, 4, Seed{20});
    EXPECT_EQ(f.p.size(), 35);
    EXPECT_EQ(f.q.size(), 25);
    EXPECT_LE(rel_fro_error(a, reconstruct(f)), 1e-6);
    EXPECT_THROW(single_pass_lu_row_major(std::span<const double>(rm.data(), 10), 35, 25, 4, Seed{20}), ShapeError);
}

TEST(SinglePassLu, PanelWidthDoesNotChangeTheFactorMuch) {
    const Matrix a = oracle::randn(21, 40, 30);
    DenseColumnStream s1(a), s2(a);
    const Matrix x = reconstruct(single_pass_lu(s1, 6, Seed{22}, 0, 1));
    const Matrix y = reconstruct(single_pass_lu(s2, 6, Seed{22}, 0, 256));
    EXPECT_LE((x - y).norm(), 1e-9 * a.norm());
}

TEST(Baseline2011, ExactRank) {
    const Matrix a = oracle::low_rank(23, 80, 60, 5);
    EXPECT_LE(rel_fro_error(a, reconstruct(single_pass_baseline_2011(a, 5, Seed{24}))), 1e-4);
}

TEST(Baseline2011, IdentityFullWidth) {
    const Matrix a = Matrix::Identity(12, 12);
    EXPECT_LE(rel_fro_error(a, reconstruct(single_pass_baseline_2011(a, 12, Seed{25}))), 1e-10);
}

TEST(Baseline2011, SlowDecayNoBetterThanSinglePassLu) {
    const GeneratedMatrix g = gen_decay(DecaySpec{DecayKind::Slow, 500, 500, Seed{26}, {}});
    double ours = 0.0, base = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        DenseColumnStream st(g.A);
        ours += rel_fro_error(g.A, reconstruct(single_pass_lu(st, 60, Seed{900 + s})));
        base += rel_fro_error(g.A, reconstruct(single_pass_baseline_2011(g.A, 60, Seed{900 + s})));
    }
    EXPECT_GE(base, ours);
}

TEST(Baseline2011, SlowDecayGridBelowBaseline) {
    const GeneratedMatrix g = gen_decay(DecaySpec{DecayKind::Slow, 500, 500, Seed{27}, {}});
    for (Index k = 20; k <= 100; k += 20) {
        double ours = 0.0, base = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            DenseColumnStream st(g.A);
            ours += rel_fro_error(g.A, reconstruct(single_pass_lu(st, k, Seed{1000 + s})));
            base += rel_fro_error(g.A, reconstruct(single_pass_baseline_2011(g.A, k, Seed{1000 + s})));
        }
        EXPECT_LT(ours, base) << "k=" << k;
    }
}

TEST(Baseline2011, RejectsBadRank) {
    EXPECT_THROW(single_pass_baseline_2011(Matrix::Ones(4, 3), 4, Seed{1}), ShapeError);
}
