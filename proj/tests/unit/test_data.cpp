#include "support.hpp"

#include <hdsparse/data.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

using namespace hdsparse;
using namespace testing;

TEST_CASE("standardize_columns: (1,2,3) becomes (-1,0,1)")
{
    MatrixXd m(3, 1);
    m << 1, 2, 3;
    const auto [s, rec] = standardize_columns(FeatureMatrix(m));
    CHECK(s.standardized());
    CHECK(rec.means[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(rec.sds[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.values()(0, 0) == doctest::Approx(-1.0));
    CHECK(std::abs(s.values()(1, 0)) < 1e-15);
    CHECK(s.values()(2, 0) == doctest::Approx(1.0));
}

TEST_CASE("standardize_columns: constant column is zeroed with a warning")
{
    MatrixXd m(3, 2);
    m << 5, 1, 5, 2, 5, 4;
    const auto [s, rec] = standardize_columns(FeatureMatrix(m));
    CHECK(s.values().col(0).isZero(0.0));
    CHECK(rec.constant[0]);
    CHECK_FALSE(rec.constant[1]);
    CHECK(rec.sds[0] == 1.0);
    CHECK(rec.warnings.size() == 1);
}

TEST_CASE("standardize_columns: invariants, idempotence and inversion on random matrices")
{
    auto rng = rng_for(1);
    for (int t = 0; t < 50; ++t) {
        const Index n = uniform_index(rng, 2, 40), p = uniform_index(rng, 1, 8);
        MatrixXd m = normal_matrix(rng, n, p) * uniform(rng, 0.01, 100.0);
        m.array() += uniform(rng, -1e3, 1e3);
        const auto [s, rec] = standardize_columns(FeatureMatrix(m));
        for (Index j = 0; j < p; ++j) {
            const VectorXd c = s.values().col(j);
            CHECK(std::abs(c.mean()) <= 1e-10);
            const double sd = std::sqrt((c.array() - c.mean()).square().sum() / static_cast<double>(n - 1));
            CHECK(std::abs(sd - 1.0) <= 1e-8);
        }
        const auto [s2, rec2] = standardize_columns(s);
        CHECK((s2.values() - s.values()).cwiseAbs().maxCoeff() <= 1e-12);
        const MatrixXd back = rec.invert(s.values());
        CHECK((back - m).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()));
        CHECK((rec.apply(m) - s.values()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("FeatureMatrix rejects non-finite entries with the column index")
{
    MatrixXd m = MatrixXd::Ones(2, 3);
    m(1, 2) = std::nan("");
    try {
        FeatureMatrix f(m);
        FAIL("expected rejection");
    } catch (const InvalidArgument& e) {
        CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
}

TEST_CASE("ResponseVector binary kind only holds 0/1")
{
    VectorXd y(3);
    y << 0, 1, 2;
    CHECK_THROWS_AS(ResponseVector(y, ResponseKind::binary), InvalidArgument);
    y[2] = 1;
    CHECK_NOTHROW(ResponseVector(y, ResponseKind::binary));
}

namespace {

void check_partition(const DataSplit& s, Index n)
{
    std::set<Index> all;
    for (const auto* v : {&s.train_idx, &s.val_idx, &s.test_idx})
        for (Index i : *v) {
            CHECK(i >= 0);
            CHECK(i < n);
            CHECK(all.insert(i).second);
        }
}

} // namespace

TEST_CASE("split_stratified: balanced binary test set")
{
    VectorXd y(100);
    for (Index i = 0; i < 100; ++i) y[i] = i % 2;
    const ResponseVector r(y, ResponseKind::binary);
    const DataSplit s = split_stratified(r, {0.8, 0.0, 0.2}, 2, 42);
    check_partition(s, 100);
    CHECK(s.val_idx.empty());
    CHECK(s.train_idx.size() == 80);
    CHECK(s.test_idx.size() == 20);
    double ones = 0;
    for (Index i : s.test_idx) ones += y[i];
    CHECK(std::abs(ones - 10.0) <= 1.0);
}

TEST_CASE("split_stratified: determinism and class proportions on random binary outcomes")
{
    auto rng = rng_for(2);
    for (int t = 0; t < 30; ++t) {
        const Index n = uniform_index(rng, 20, 300);
        const double p1 = uniform(rng, 0.2, 0.8);
        VectorXd y(n);
        for (Index i = 0; i < n; ++i) y[i] = uniform(rng, 0, 1) < p1 ? 1.0 : 0.0;
        y[0] = 0;
        y[1] = 1;
        y[2] = 0;
        y[3] = 1;
        y[4] = 0;
        y[5] = 1;
        const ResponseVector r(y, ResponseKind::binary);
        const std::array<double, 3> f{0.6, 0.2, 0.2};
        const std::uint64_t seed = rng();
        const DataSplit a = split_stratified(r, f, 2, seed);
        const DataSplit b = split_stratified(r, f, 2, seed);
        CHECK(a.train_idx == b.train_idx);
        CHECK(a.val_idx == b.val_idx);
        CHECK(a.test_idx == b.test_idx);
        check_partition(a, n);
        CHECK(static_cast<Index>(a.train_idx.size() + a.val_idx.size() + a.test_idx.size()) ==
              static_cast<Index>(std::lround(static_cast<double>(n) * 1.0)));
        const double n1 = y.sum();
        const std::array<const std::vector<Index>*, 3> parts{&a.train_idx, &a.val_idx, &a.test_idx};
        for (std::size_t k = 0; k < 3; ++k) {
            double ones = 0;
            for (Index i : *parts[k]) ones += y[i];
            CHECK(std::abs(ones - n1 * f[k]) <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("split_stratified: continuous n=30 with 30 bins fails")
{
    VectorXd y = VectorXd::LinSpaced(30, 0.0, 1.0);
    const ResponseVector r(y, ResponseKind::continuous);
    CHECK_THROWS_AS(split_stratified(r, {0.5, 0.0, 0.5}, 30, 1), InvalidArgument);
    const DataSplit s = split_stratified(r, {0.5, 0.0, 0.5}, 10, 1);
    check_partition(s, 30);
    CHECK(s.train_idx.size() + s.test_idx.size() == 30);
}

TEST_CASE("read_table and write_table")
{
    const auto dir = temp_dir("data");
    SUBCASE("header, names and outcome by name")
    {
        std::ofstream(dir / "a.csv") << "a,b,y\n1,2,0\n3,4,1\n5,6,1\n";
        const Table t = read_table((dir / "a.csv").string(), true, std::string("y"));
        CHECK(t.features.rows() == 3);
        CHECK(t.features.cols() == 2);
        CHECK(t.features.column_names() == std::vector<std::string>{"a", "b"});
        REQUIRE(t.outcome);
        CHECK(t.outcome->kind() == ResponseKind::binary);
        CHECK(t.outcome->values()[2] == 1.0);
    }
    SUBCASE("outcome by index without header")
    {
        std::ofstream(dir / "b.csv") << "1,2.5\n3,4.5\n";
        const Table t = read_table((dir / "b.csv").string(), false, Index{1});
        CHECK(t.features.cols() == 1);
        CHECK(t.outcome->kind() == ResponseKind::continuous);
        CHECK(t.features.name(0) == "x0");
    }
    SUBCASE("NaN cell reported with its location")
    {
        std::ofstream(dir / "c.csv") << "a,b\n1,2\n3,NaN\n";
        try {
            read_table((dir / "c.csv").string(), true);
            FAIL("expected an error");
        } catch (const InvalidArgument& e) {
            const std::string msg = e.what();
            CHECK(msg.find("row") != std::string::npos);
            CHECK(msg.find("column") != std::string::npos);
        }
    }
    SUBCASE("ragged and non-numeric rows are rejected")
    {
        std::ofstream(dir / "d.csv") << "a,b\n1,2\n3\n";
        CHECK_THROWS_AS(read_table((dir / "d.csv").string(), true), InvalidArgument);
        std::ofstream(dir / "e.csv") << "a,b\n1,x\n";
        CHECK_THROWS_AS(read_table((dir / "e.csv").string(), true), InvalidArgument);
    }
    SUBCASE("17 significant digits round-trip exactly")
    {
        auto rng = rng_for(3);
        MatrixXd m = normal_matrix(rng, 20, 4);
        m(0, 0) = 1e-300;
        m(1, 1) = -123456789.123456789;
        write_table((dir / "r.csv").string(), m, {"a", "b", "c", "d"});
        const Table t = read_table((dir / "r.csv").string(), true);
        CHECK((t.features.values().array() == m.array()).all());
        write_table((dir / "r2.csv").string(), t.features.values(), {"a", "b", "c", "d"});
        std::ifstream f1(dir / "r.csv"), f2(dir / "r2.csv");
        const std::string s1((std::istreambuf_iterator<char>(f1)), {}), s2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(s1 == s2);
    }
}
