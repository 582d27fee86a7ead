#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "api2com/util/hash.hpp"
#include "api2com/util/jsonl.hpp"

using namespace api2com::util;
namespace fs = std::filesystem;

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto p = fs::temp_directory_path() / "api2com_util_abc.txt";
  write_text(p, "abc");
  EXPECT_EQ(sha256_file(p), sha256_hex("abc"));
  EXPECT_ANY_THROW(sha256_file(fs::temp_directory_path() / "api2com_util_missing"));
}

TEST(Jsonl, CollectsBadLinesWithLineNumbers) {
  const auto p = fs::temp_directory_path() / "api2com_util.jsonl";
  std::ofstream(p) << "{\"a\": 1}\n\nnot json\n[1, 2]\n{\"b\": 2}\n";
  const auto r = read_jsonl(p);
  ASSERT_EQ(r.objects.size(), 2u);
  EXPECT_EQ(r.objects[1].at("b"), 2);
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_EQ(r.errors[0].first, 3u);
  EXPECT_EQ(r.errors[1].first, 4u);
  EXPECT_ANY_THROW(read_jsonl(fs::temp_directory_path() / "api2com_util_missing.jsonl"));
}

TEST(Jsonl, WriteReadRoundTrip) {
  const auto p = fs::temp_directory_path() / "api2com_util_rt.jsonl";
  const std::vector<nlohmann::json> objs{{{"x", "a\nb"}}, {{"y", {1, 2, 3}}}};
  write_jsonl(p, objs);
  const auto r = read_jsonl(p);
  EXPECT_TRUE(r.errors.empty());
  EXPECT_EQ(r.objects, objs);
}

TEST(Jsonl, DumpSurvivesInvalidUtf8) {
  const nlohmann::json j = {{"s", std::string("ok \xff\xfe end")}};
  std::string out;
  EXPECT_NO_THROW(out = dump_compact(j));
  EXPECT_NE(out.find("ok"), std::string::npos);
  EXPECT_NO_THROW(static_cast<void>(nlohmann::json::parse(out)));
}
