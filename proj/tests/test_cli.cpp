#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "cropdt/model_io.hpp"
#include "cropdt/report.hpp"

namespace fs = std::filesystem;
using cropdt::cli::run;

namespace {

constexpr std::string_view kHeader =
    "station,region,year,jan,feb,mar,apr,may,jun,jul,aug,sep,oct,nov,dec\n";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("cropdt_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, std::string_view content) const {
    std::ofstream(path(name), std::ios::binary) << content;
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  void synth(const std::string& name, const std::vector<std::string>& extra = {}) {
    std::vector<std::string> args = {"synth", "--output", path(name)};
    args.insert(args.end(), extra.begin(), extra.end());
    ASSERT_EQ(cli(args), 0) << err_.str();
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(CliTest, OldemanAllWetStation) {
  write("in.csv", std::string(kHeader) +
                      "Halim,DKI Jakarta,2013,250,250,250,250,250,250,250,250,250,250,250,250\n");
  ASSERT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", path("out.csv"), "--summary",
                 path("counts.csv")}),
            0)
      << err_.str();
  const std::string labels = read(path("out.csv"));
  EXPECT_NE(labels.find("Halim,DKI Jakarta,2013,A1,\"3 short-period PS or 2 PS + 1 PL\"\n"),
            std::string::npos)
      << labels;
  EXPECT_NE(read(path("counts.csv")).find("A1,1,1\n"), std::string::npos);
}

TEST_F(CliTest, NegativeValueLeavesNoOutput) {
  write("in.csv", std::string(kHeader) + "A,R,2013,1,2,3,4,5,6,7,8,9,10,11,12\n" +
                      "B,R,2013,1,2,-3,4,5,6,7,8,9,10,11,12\n");
  EXPECT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", path("out.csv")}), 2);
  EXPECT_FALSE(fs::exists(path("out.csv")));
  EXPECT_FALSE(fs::exists(path("out.csv.tmp")));
  EXPECT_NE(err_.str().find("line 3"), std::string::npos) << err_.str();
  EXPECT_NE(err_.str().find("in.csv"), std::string::npos) << err_.str();
}

TEST_F(CliTest, FailedCommandKeepsPreviousOutput) {
  write("out.csv", "previous\n");
  write("in.csv", std::string(kHeader) + "B,R,2013,1,2,-3,4,5,6,7,8,9,10,11,12\n");
  EXPECT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", path("out.csv")}), 2);
  EXPECT_EQ(read(path("out.csv")), "previous\n");
}

TEST_F(CliTest, EmptyDataSectionIsDataError) {
  write("in.csv", kHeader);
  EXPECT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", path("out.csv")}), 2);
  EXPECT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("m.txt")}), 2);
  EXPECT_FALSE(fs::exists(path("m.txt")));
}

TEST_F(CliTest, UsageErrors) {
  synth("in.csv");
  EXPECT_EQ(cli({}), 1);
  EXPECT_EQ(cli({"bogus"}), 1);
  EXPECT_EQ(cli({"train", "--input", path("in.csv")}), 1);
  EXPECT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("m.txt"), "--algorithm",
                 "nbtree"}),
            1);
  EXPECT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("m.txt"), "--algorithm",
                 "randomsubset", "--k", "20"}),
            1);
  EXPECT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("m.txt"), "--k", "3"}), 1);
  EXPECT_EQ(cli({"compare", "--input", path("in.csv"), "--cv", "1"}), 1);
  EXPECT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", path("o.csv"),
                 "--missing-policy", "guess"}),
            1);
  EXPECT_FALSE(fs::exists(path("m.txt")));
  EXPECT_EQ(cli({"--help"}), 0);
}

TEST_F(CliTest, MissingInputFileIsDataError) {
  EXPECT_EQ(cli({"oldeman", "--input", path("nope.csv"), "--output", path("o.csv")}), 2);
}

TEST_F(CliTest, TrainTwiceIsByteIdentical) {
  synth("in.csv", {"--missing-rate", "0.1"});
  for (const char* alg : {"gainratio", "randomsubset", "reducederror"}) {
    ASSERT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("a.txt"), "--algorithm",
                   alg, "--seed", "1"}),
              0)
        << err_.str();
    EXPECT_NE(out_.str().find("tree size:"), std::string::npos);
    EXPECT_NE(out_.str().find("training accuracy:"), std::string::npos);
    ASSERT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("b.txt"), "--algorithm",
                   alg, "--seed", "1"}),
              0);
    EXPECT_EQ(read(path("a.txt")), read(path("b.txt"))) << alg;
  }
}

TEST_F(CliTest, OneClassInputGivesSingleLeafModel) {
  std::string text(kHeader);
  for (int i = 0; i < 5; ++i) {
    text += "S" + std::to_string(i) + ",R,2013,250,250,250,250,250,250,250,250,250,250,250,250\n";
  }
  write("in.csv", text);
  ASSERT_EQ(cli({"train", "--input", path("in.csv"), "--output", path("m.txt")}), 0);
  const std::string model = read(path("m.txt"));
  EXPECT_NE(model.find("\n\n: A1 (5/0) {A1=5}\nend\n"), std::string::npos) << model;
}

TEST_F(CliTest, CompareWritesFiveByThree) {
  synth("train.csv");
  synth("test.csv", {"--seed", "2", "--year", "2014", "--missing-rate", "0.1"});
  ASSERT_EQ(cli({"compare", "--input", path("train.csv"), "--output", path("cmp.csv")}), 0)
      << err_.str();
  std::istringstream in(read(path("cmp.csv")));
  const auto tables = cropdt::parse_comparison(in);
  ASSERT_EQ(tables.size(), 1u);
  EXPECT_EQ(tables[0].algorithms.size(), 3u);
  EXPECT_EQ(tables[0].indicators.size(), 5u);
  for (const auto& cell : tables[0].cells[0]) EXPECT_GE(std::stod(cell), 90.0);

  ASSERT_EQ(cli({"compare", "--input", path("train.csv"), "--test", path("test.csv"),
                 "--algorithms", "j48,reptree"}),
            0)
      << err_.str();
  std::istringstream in2(out_.str());
  const auto three = cropdt::parse_comparison(in2);
  ASSERT_EQ(three.size(), 3u);
  EXPECT_EQ(three[2].algorithms.size(), 2u);
}

TEST_F(CliTest, CompareNeedsEnoughInstances) {
  synth("in.csv", {"--stations", "5"});
  EXPECT_EQ(cli({"compare", "--input", path("in.csv"), "--cv", "10"}), 2);
}

TEST_F(CliTest, RecommendFlagsIncompleteStations) {
  synth("train.csv");
  synth("new.csv", {"--seed", "3", "--missing-rate", "0.05", "--empty-stations", "1"});
  ASSERT_EQ(cli({"train", "--input", path("train.csv"), "--output", path("m.txt")}), 0);
  ASSERT_EQ(cli({"recommend", "--model", path("m.txt"), "--input", path("new.csv"), "--output",
                 path("rec.csv"), "--score"}),
            0)
      << err_.str();
  EXPECT_NE(out_.str().find("holdout accuracy:"), std::string::npos);
  const std::string rec = read(path("rec.csv"));
  EXPECT_EQ(std::count(rec.begin(), rec.end(), '\n'), 76);
  const auto last = rec.substr(rec.rfind('\n', rec.size() - 2) + 1);
  EXPECT_NE(last.find(",incomplete\n"), std::string::npos) << last;

  ASSERT_EQ(cli({"recommend", "--model", path("m.txt"), "--input", path("new.csv"), "--output",
                 path("rec2.csv"), "--complete-only"}),
            0);
  const std::string rec2 = read(path("rec2.csv"));
  EXPECT_EQ(rec2.find(",incomplete"), std::string::npos);
}

TEST_F(CliTest, RecommendRejectsForeignModel) {
  synth("in.csv");
  write("m.txt",
        "format: 1\nalgorithm: gainratio\nattributes: x\nclasses: a,b\n"
        "params: min_leaf=auto confidence=0.25 unpruned=false k=auto prune_folds=3 seed=1\n"
        "nodes: 1\n\n: a (1/0) {a=1}\nend\n");
  EXPECT_EQ(cli({"recommend", "--model", path("m.txt"), "--input", path("in.csv")}), 2);
  write("bad.txt", "format: 1\nalgorithm: gainratio\n");
  EXPECT_EQ(cli({"recommend", "--model", path("bad.txt"), "--input", path("in.csv")}), 2);
}

TEST_F(CliTest, B3PatternOverride) {
  write("in.csv", std::string(kHeader) +
                      "S,R,2013,300,300,300,300,300,300,300,300,50,50,50,50\n");
  ASSERT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", "-"}), 0);
  EXPECT_NE(out_.str().find("B3,\"2 PS + 1 PL\""), std::string::npos) << out_.str();
  ASSERT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", "-", "--b3-pattern",
                 "1 PS + 2 PL"}),
            0);
  EXPECT_NE(out_.str().find("B3,\"1 PS + 2 PL\""), std::string::npos) << out_.str();
  EXPECT_EQ(cli({"oldeman", "--input", path("in.csv"), "--output", "-", "--b3-pattern", "rice"}),
            1);
}
