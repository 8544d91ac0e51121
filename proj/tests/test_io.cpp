#include <doctest.h>

#include <thread>

#include "support.hpp"
#include "textnet/error.hpp"
#include "textnet/io.hpp"

using namespace textnet;

TEST_CASE("sha256 known digests") {
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("fixed6 rendering") {
  CHECK(io::fixed6(0.5) == "0.500000");
  CHECK(io::fixed6(1.0 / 3.0) == "0.333333");
  CHECK(io::fixed6(-0.0) == "0.000000");
  CHECK(io::fixed6(-1e-9) == "0.000000");
  CHECK(io::fixed6(-0.25) == "-0.250000");
}

TEST_CASE("csv quoting round-trips through the splitter") {
  CHECK(io::csv_field("plain") == "plain");
  CHECK(io::csv_field("a,b") == "\"a,b\"");
  CHECK(io::csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  const std::string line = io::csv_field("x,y") + "," + io::csv_field("q\"") + ",z";
  const auto fields = io::split_csv_line(line);
  REQUIRE(fields.size() == 3);
  CHECK(fields[0] == "x,y");
  CHECK(fields[1] == "q\"");
  CHECK(fields[2] == "z");
  CHECK(io::split_csv_line("a,,b").size() == 3);
}

TEST_CASE("utf8 decode and encode") {
  const std::string s = "a\xC3\xA9\xE4\xB8\x80\xF0\x9F\x98\x80";  // a é 一 😀
  const auto cps = io::utf8_decode(s);
  REQUIRE(cps.size() == 4);
  CHECK(cps[1] == 0xE9);
  CHECK(cps[2] == 0x4E00);
  CHECK(cps[3] == 0x1F600);
  std::string back;
  for (char32_t c : cps) back += io::utf8_encode(c);
  CHECK(back == s);
  CHECK(io::utf8_length(s) == 4);
  // Truncated and stray continuation bytes become replacement characters.
  const auto bad = io::utf8_decode("\xE4\xB8");
  REQUIRE(!bad.empty());
  CHECK(bad[0] == 0xFFFD);
  CHECK(io::utf8_decode("\x80")[0] == 0xFFFD);
}

TEST_CASE("write_if_changed leaves identical files alone") {
  const auto dir = test_support::scratch_dir("io");
  const auto p = dir / "sub" / "f.txt";
  CHECK(io::write_if_changed(p, "one"));
  const auto t0 = std::filesystem::last_write_time(p);
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  CHECK_FALSE(io::write_if_changed(p, "one"));
  CHECK(std::filesystem::last_write_time(p) == t0);
  CHECK(io::write_if_changed(p, "two"));
  CHECK(io::read_file(p) == "two");
  CHECK_THROWS_AS(io::read_file(dir / "missing"), DataError);
}

TEST_CASE("list files skip comments and blanks") {
  const auto dir = test_support::scratch_dir("io_list");
  io::write_file(dir / "l.txt", "# header\n alpha \n\nbeta\n");
  const auto items = io::read_list_file(dir / "l.txt");
  REQUIRE(items.size() == 2);
  CHECK(items[0] == "alpha");
  CHECK(items[1] == "beta");
}
