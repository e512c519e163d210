#include <gtest/gtest.h>

#include <sstream>

#include "paircorr/dataset.hpp"
#include "paircorr/errors.hpp"

using namespace paircorr;

TEST(DatasetCsv, ParsesCommentsAndSortsRows) {
    std::istringstream in("# He + Au\n\ndelta_p,R\n0.5,0.1\n# mid comment\n0.25,-0.3\n 1.0 , 0.2 \n");
    const auto d = read_dataset(in, "he");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.points[0].delta_p, 0.25);
    EXPECT_EQ(d.points[0].r, -0.3);
    EXPECT_EQ(d.points[2].r, 0.2);
    EXPECT_EQ(d.label, "he");
    EXPECT_FALSE(d.points[0].sigma_r);
    EXPECT_EQ(d.weight(1), 1.0);
}

TEST(DatasetCsv, OptionalUncertaintyColumn) {
    std::istringstream in("delta_p,R,sigma_R\n0.5,0.1,0.02\n0.7,0.2,0.5\n");
    const auto d = read_dataset(in);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_NEAR(d.weight(0), 2500.0, 1e-9);
}

TEST(DatasetCsv, HeaderOnlyGivesEmptyDataset) {
    std::istringstream in("# nothing measured yet\ndelta_p,R\n# still nothing\n");
    EXPECT_TRUE(read_dataset(in).empty());
    std::istringstream blank("");
    EXPECT_TRUE(read_dataset(blank).empty());
}

TEST(DatasetCsv, MalformedRowsReportLineNumbers) {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            (void)read_dataset(in);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("delta_p,R\n0.1,0.2\n0.2,abc\n"), 3u);
    EXPECT_EQ(line_of("delta_p,R\n0.1,0.2,0.3\n"), 2u);
    EXPECT_EQ(line_of("# c\nx,y\n"), 2u);
    EXPECT_EQ(line_of("delta_p,R\n-0.1,0.2\n"), 2u);
    EXPECT_EQ(line_of("delta_p,R\n0.1,0.2\n#\n0.1,0.3\n"), 4u);
    EXPECT_EQ(line_of("delta_p,R,sigma_R\n0.1,0.2,0\n"), 2u);
    EXPECT_EQ(line_of("delta_p,R\n0,5;0,1\n"), 2u);
    EXPECT_EQ(line_of("delta_p,R\n0.1,nan\n"), 2u);
}

TEST(DatasetCsv, RoundTripsExactly) {
    Dataset d;
    d.label = "synthetic";
    d.points = {{0.1, -0.123456789012345678, 0.01}, {0.3, 1.0 / 3.0, 0.02}};
    std::stringstream s;
    write_dataset(s, d);
    const auto back = read_dataset(s);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.points[i].delta_p, d.points[i].delta_p);
        EXPECT_EQ(back.points[i].r, d.points[i].r);
        EXPECT_EQ(*back.points[i].sigma_r, *d.points[i].sigma_r);
    }
}

TEST(DatasetCsv, ValuesBelowMinusOneAreKeptWithWarning) {
    std::istringstream in("delta_p,R\n0.1,-1.2\n0.2,-0.5\n");
    const auto d = read_dataset(in);
    EXPECT_EQ(d.size(), 2u);
    EXPECT_EQ(advisory_warnings(d).size(), 1u);
}

TEST(DatasetCsv, NumberFormatting) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(-2.5e-30), "-2.5e-30");
    EXPECT_EQ(*parse_number(format_number(1.0 / 7.0)), 1.0 / 7.0);
    EXPECT_FALSE(parse_number("1.0x"));
    EXPECT_FALSE(parse_number(""));
    EXPECT_EQ(*parse_number("+3"), 3.0);
}
