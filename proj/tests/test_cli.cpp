#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "psums/cli.hpp"
#include "psums/errors.hpp"
#include "psums/serialize.hpp"

using namespace psums;
namespace fs = std::filesystem;

namespace {

struct result {
  int code;
  std::string out, err;
};

result run(std::vector<std::string> args) {
  args.insert(args.begin(), "psums");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct scratch {
  fs::path dir;
  scratch() {
    dir = fs::temp_directory_path() /
          ("psums_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
           std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~scratch() { fs::remove_all(dir); }
  std::string operator()(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    write_file((*this)(name),
               std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }
  std::string read(const std::string& name) const {
    const bytes b = read_file((*this)(name));
    return std::string(b.begin(), b.end());
  }
};

std::uint64_t parse_offset(const std::function<void()>& f) {
  try {
    f();
  } catch (const parse_error& e) {
    return e.offset();
  }
  FAIL("no parse error");
  return 0;
}

}  // namespace

TEST_CASE("array file layout") {
  const bytes b = encode_array({3, {1, 2, 3, 7}});
  const bytes want{'P', 'S', 'A', 'R', 1, 4, 0, 0, 0, 0, 0, 0, 0, 3, 0,
                   0xd1, 0x0e, 0, 0, 0, 0, 0, 0};
  CHECK(b == want);
  const array_file a = decode_array(b);
  CHECK(a.k == 3);
  CHECK(a.values == std::vector<std::uint64_t>{1, 2, 3, 7});
  CHECK(decode_array(encode_array({8, {}})).values.empty());
}

TEST_CASE("malformed array files report byte offsets") {
  const bytes good = encode_array({3, {1, 2, 3, 7}});
  auto with = [&](std::size_t at, std::uint8_t v) {
    bytes b = good;
    b[at] = v;
    return b;
  };
  CHECK(parse_offset([&] { decode_array(with(2, 'X')); }) == 2);
  CHECK(parse_offset([&] { decode_array(with(4, 2)); }) == 4);
  CHECK(parse_offset([&] { decode_array(with(13, 0)); }) == 13);
  CHECK(parse_offset([&] { decode_array(with(13, 65)); }) == 13);
  // Bit 12 is the first padding bit; it lives in payload byte 1.
  CHECK(parse_offset([&] { decode_array(with(16, 0x1f)); }) == 16);
  CHECK(parse_offset([&] { decode_array(bytes(good.begin(), good.begin() + 9)); }) == 9);
  CHECK(parse_offset([&] { decode_array(bytes(good.begin(), good.end() - 1)); }) == 22);
  bytes longer = good;
  longer.push_back(0);
  CHECK(parse_offset([&] { decode_array(longer); }) == 23);
}

TEST_CASE("structure files round-trip") {
  const op_trace t = gen_trace({.n = 250, .k = 8, .ops = 2000, .mix = {1, 1, 1, 1}, .seed = 3,
                                .delta_bits = 8});
  for (auto kind : {structure_kind::classic, structure_kind::layered, structure_kind::sampled,
                    structure_kind::packed}) {
    build_options o;
    o.kind = kind;
    o.b = 3;
    any_structure s = build_structure(t.initial, 8, o);
    std::visit(
        [&](auto& x) {
          for (const auto& op : t.ops)
            if (op.kind == op_kind::update) x.update(op.arg, op.delta);
        },
        s);
    const bytes once = encode_structure(s);
    const any_structure back = decode_structure(once);
    CHECK(kind_of(back) == kind);
    CHECK(encode_structure(back) == once);
    std::visit(
        [&](const auto& x) {
          const auto& y = std::get<std::decay_t<decltype(x)>>(s);
          for (std::uint64_t i = 0; i <= 250; ++i) REQUIRE(x.sum(i) == y.sum(i));
        },
        back);

    bytes cut(once.begin(), once.end() - 3);
    CHECK_THROWS_AS(decode_structure(cut), parse_error);
    bytes tag = once;
    tag[15] = 9;
    CHECK(parse_offset([&] { decode_structure(tag); }) == 15);
  }
}

TEST_CASE("text traces") {
  const auto lines = parse_trace_text("# header\n\nsum 3\n  update 2 -5  # note\nsearch 7\naccess 1");
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].line == 3);
  CHECK(lines[1].op == trace_op{op_kind::update, 2, -5});
  CHECK(lines[3].op == trace_op{op_kind::access, 1, 0});
  CHECK_THROWS_WITH(parse_trace_text("sum 1\nsum x\n"), doctest::Contains("line 2"));
  CHECK_THROWS_WITH(parse_trace_text("frob 1\n"), doctest::Contains("unknown op"));
  CHECK_THROWS_AS(parse_trace_text("update 1\n"), parse_error);
  CHECK(format_trace_text({{op_kind::update, 4, -2}, {op_kind::sum, 0}}) == "update 4 -2\nsum 0\n");
}

TEST_CASE("build and query") {
  scratch tmp;
  REQUIRE(run({"gen-array", "--values", "1,2,3,4", "--k", "8", "--output", tmp("a.psar")}).code == 0);
  REQUIRE(run({"build", "--input", tmp("a.psar"), "--structure", "classic", "--output",
               tmp("c.psst")}).code == 0);
  const auto c = decode_structure(read_file(tmp("c.psst")));
  CHECK(std::get<classic_fenwick>(c).layout()[3] == 10);

  tmp.write("t.txt", "sum 0\nsum 3\nupdate 3 2\nsum 3\nsearch 9\naccess 3\n");
  const result q = run({"query", tmp("c.psst"), "--trace", tmp("t.txt")});
  CHECK(q.code == 0);
  CHECK(q.out == "0\n6\n8\n4\n5\n");
  CHECK(run({"query", tmp("c.psst"), "--trace", tmp("t.txt")}).out == q.out);

  tmp.write("bad.txt", "sum 1\n\nsum 5\n");
  const result bad = run({"query", tmp("c.psst"), "--trace", tmp("bad.txt")});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("figure instance through the command line") {
  scratch tmp;
  std::string vals;
  for (int i = 0; i < 17; ++i) vals += "5,";
  vals += "4,3,7,1,8,2,8,1,8,2";
  REQUIRE(run({"gen-array", "--values", vals, "--k", "8", "--output", tmp("f.psar")}).code == 0);
  REQUIRE(run({"build", "--input", tmp("f.psar"), "--structure", "layered", "--b", "3",
               "--output", tmp("f.psst")}).code == 0);
  tmp.write("t.txt", "sum 19\n");
  CHECK(run({"query", tmp("f.psst"), "--trace", tmp("t.txt")}).out == "92\n");
}

TEST_CASE("build parameters") {
  scratch tmp;
  REQUIRE(run({"gen-array", "--n", "19683", "--k", "8", "--output", tmp("a.psar")}).code == 0);
  REQUIRE(run({"build", "--input", tmp("a.psar"), "--structure", "sampled", "--b", "3",
               "--epsilon", "1", "--output", tmp("s.psst")}).code == 0);
  const auto s = decode_structure(read_file(tmp("s.psst")));
  CHECK(std::get<sampled_fenwick>(s).sample_rate() == 9);
  const result sp = run({"space", tmp("s.psst")});
  CHECK(sp.code == 0);
  CHECK(sp.out.find("PASS") != std::string::npos);

  const result big = run({"build", "--input", tmp("a.psar"), "--structure", "packed",
                          "--delta-bits", "70", "--output", tmp("p.psst")});
  CHECK(big.code == 2);
  CHECK(big.err.find("delta < w") != std::string::npos);

  CHECK(run({"build", "--input", tmp("a.psar"), "--structure", "sampled", "--epsilon", "1",
             "--d", "3", "--output", tmp("x")}).code == 2);
  CHECK(run({"build", "--input", tmp("missing"), "--structure", "classic", "--output",
             tmp("x")}).code == 2);

  tmp.write("junk.psar", "PSAX");
  const result junk = run({"build", "--input", tmp("junk.psar"), "--structure", "classic",
                           "--output", tmp("x")});
  CHECK(junk.code == 2);
  CHECK(junk.err.find("byte 3") != std::string::npos);
}

TEST_CASE("space of a one-element structure") {
  scratch tmp;
  REQUIRE(run({"gen-array", "--values", "9", "--k", "8", "--output", tmp("a.psar")}).code == 0);
  REQUIRE(run({"build", "--input", tmp("a.psar"), "--structure", "layered", "--output",
               tmp("l.psst")}).code == 0);
  const result r = run({"space", tmp("l.psst")});
  CHECK(r.out.find("payload                        8 bits") != std::string::npos);
}

TEST_CASE("verify exit codes") {
  for (const char* s : {"classic", "layered", "sampled", "packed"}) {
    const result r = run({"verify", "--n", "300", "--k", "8", "--b", "3", "--structure", s,
                          "--ops", "10000", "--seed", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
    CHECK(run({"verify", "--n", "300", "--k", "8", "--b", "3", "--structure", s, "--ops",
               "10000", "--seed", "5"}).out == r.out);
  }
  const result bad = run({"verify", "--n", "300", "--structure", "layered", "--fault"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("first divergence") != std::string::npos);
  CHECK(run({"verify", "--n", "0", "--structure", "layered"}).code == 2);
  CHECK(run({"verify", "--structure", "layered"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("bench csv shape") {
  const result r = run({"bench", "--n", "2000", "--k", "8", "--b", "4", "--structure", "all",
                        "--ops", "2000", "--mix", "1:1:1"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "structure,n,k,b,d,op,ops_per_sec,ns_per_op,space_bits,bound_bits");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK(rows == 4 * 3);
}
