#include "sscd/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

namespace sscd {
namespace {

TEST(DataCsv, ParsesHeaderAndRows) {
    std::istringstream in("a,b,c\n1,2,3\n-4.5,5e-1,+6\n\n");
    const auto data = io::read_data_csv(in);
    EXPECT_EQ(data.names(), (std::vector<std::string>{"a", "b", "c"}));
    ASSERT_EQ(data.n(), 2u);
    EXPECT_DOUBLE_EQ(data.values()(1, 0), -4.5);
    EXPECT_DOUBLE_EQ(data.values()(1, 1), 0.5);
    EXPECT_DOUBLE_EQ(data.values()(1, 2), 6.0);
}

TEST(DataCsv, RejectsNonFiniteAndRaggedRows) {
    std::istringstream nan_in("a,b\n1,nan\n2,3\n");
    EXPECT_THROW(io::read_data_csv(nan_in), Error);
    std::istringstream inf_in("a,b\n1,inf\n2,3\n");
    EXPECT_THROW(io::read_data_csv(inf_in), Error);
    std::istringstream ragged("a,b\n1,2,3\n2,3\n");
    EXPECT_THROW(io::read_data_csv(ragged), Error);
    std::istringstream text("a,b\n1,x\n2,3\n");
    try {
        io::read_data_csv(text);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Parse);
    }
}

TEST(DataCsv, WriteReadIsLossless) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1e3);
    Matrix v(17, 4);
    for (Eigen::Index r = 0; r < v.rows(); ++r)
        for (Eigen::Index c = 0; c < v.cols(); ++c) v(r, c) = g(rng) / 7.0;
    const DataMatrix data(v, {"w", "x", "y", "z"});
    std::stringstream buf;
    io::write_data_csv(buf, data);
    const auto back = io::read_data_csv(buf);
    EXPECT_EQ(back.names(), data.names());
    EXPECT_EQ(back.values(), data.values());
}

TEST(LabelCsv, NamesResolveToPairs) {
    const std::vector<std::string> names{"a", "b", "c"};
    std::istringstream in("from,to,label\na,b,1\nb,a,0\n");
    const auto labels = io::read_label_csv(in, names);
    EXPECT_EQ(labels[pair_index(0, 1, 3)], LabelState::Causal);
    EXPECT_EQ(labels[pair_index(1, 0, 3)], LabelState::NonCausal);
    EXPECT_EQ(labels.m_labelled(), 2u);

    std::stringstream out;
    io::write_label_csv(out, labels, names);
    EXPECT_EQ(io::read_label_csv(out, names), labels);
}

TEST(LabelCsv, Errors) {
    const std::vector<std::string> names{"a", "b"};
    std::istringstream unknown("a,q,1\n");
    EXPECT_THROW(io::read_label_csv(unknown, names), Error);
    std::istringstream bad_label("a,b,2\n");
    EXPECT_THROW(io::read_label_csv(bad_label, names), Error);
    std::istringstream diag("a,a,1\n");
    EXPECT_THROW(io::read_label_csv(diag, names), Error);
    std::istringstream conflict("a,b,1\na,b,0\n");
    EXPECT_THROW(io::read_label_csv(conflict, names), Error);
}

TEST(LabelCsv, MissingFileIsIoError) {
    try {
        io::read_label_csv(std::filesystem::path("/nonexistent/labels.csv"), {"a", "b"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
        EXPECT_NE(std::string(e.what()).find("/nonexistent/labels.csv"), std::string::npos);
    }
}

TEST(BinaryMatrix, RoundTripWithSidecar) {
    const auto dir = std::filesystem::temp_directory_path() / "sscd_io_test";
    std::filesystem::create_directories(dir);
    Matrix m(3, 5);
    for (Eigen::Index r = 0; r < 3; ++r)
        for (Eigen::Index c = 0; c < 5; ++c) m(r, c) = static_cast<double>(r * 10 + c) / 3.0;
    io::write_matrix_binary(dir / "mat", m, {{"kind", "raw_bins"}, {"h", 0.2}});
    const auto back = io::read_matrix_binary(dir / "mat");
    EXPECT_EQ(back.values, m);
    EXPECT_EQ(back.meta.at("kind"), "raw_bins");
    EXPECT_EQ(back.meta.at("rows"), 3);
    EXPECT_EQ(std::filesystem::file_size(dir / "mat.bin"), 15u * sizeof(double));
    std::filesystem::remove_all(dir);
}

TEST(PairMatrixCsv, RowIdsUseArrowNames) {
    std::ostringstream out;
    io::write_pair_matrix_csv(out, Matrix::Zero(2, 1), {"g1", "g2"});
    EXPECT_EQ(out.str(), "pair,f0\ng1→g2,0\ng2→g1,0\n");
}

}  // namespace
}  // namespace sscd
