#include "psums/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "psums/budget.hpp"
#include "psums/errors.hpp"
#include "psums/serialize.hpp"

namespace psums::cli {

namespace {

struct structure_args {
  std::string structure;
  std::uint64_t b = 2;
  std::optional<double> epsilon;
  std::optional<std::uint64_t> d;
  unsigned delta_bits = 8;
};

void add_structure_options(CLI::App* cmd, structure_args& a, bool allow_all) {
  cmd->add_option("--structure", a.structure,
                  allow_all ? "classic|layered|sampled|packed|all"
                            : "classic|layered|sampled|packed")
      ->required();
  cmd->add_option("--b", a.b, "branching factor (layered, sampled)")
      ->capture_default_str();
  auto* eps = cmd->add_option("--epsilon", a.epsilon, "sampled: d = round(log_b n / epsilon)");
  auto* d = cmd->add_option("--d", a.d, "explicit sample rate (sampled, packed)");
  eps->excludes(d);
  cmd->add_option("--delta-bits", a.delta_bits, "packed: updates satisfy |delta| < 2^bits")
      ->capture_default_str();
}

build_options to_build_options(const structure_args& a, structure_kind kind) {
  build_options o;
  o.kind = kind;
  o.b = a.b;
  o.epsilon = a.epsilon;
  o.d = a.d;
  o.delta_bits = a.delta_bits;
  return o;
}

structure_kind require_kind(const std::string& name) {
  const auto kind = parse_structure_kind(name);
  if (!kind)
    throw invalid_parameter("unknown structure '" + name +
                            "' (expected classic, layered, sampled or packed)");
  return *kind;
}

std::vector<structure_kind> kinds_for(const std::string& name) {
  if (name == "all")
    return {structure_kind::classic, structure_kind::layered, structure_kind::sampled,
            structure_kind::packed};
  return {require_kind(name)};
}

std::uint64_t b_of(const any_structure& s) {
  return std::visit(
      [](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, classic_fenwick>) return 2;
        else if constexpr (std::is_same_v<T, layered_fenwick>) return x.geometry().b();
        else if constexpr (std::is_same_v<T, sampled_fenwick>) return x.tree().geometry().b();
        else return x.params().b;
      },
      s);
}

std::uint64_t d_of(const any_structure& s) {
  return std::visit(
      [](const auto& x) -> std::uint64_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, sampled_fenwick>) return x.sample_rate();
        else if constexpr (std::is_same_v<T, packed_fenwick>) return x.params().d;
        else return 1;
      },
      s);
}

std::string describe(const any_structure& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        os << to_string(kind_of(s)) << " n=" << x.size() << " k=" << x.value_bits();
        if constexpr (std::is_same_v<T, layered_fenwick>) {
          os << " b=" << x.geometry().b() << " levels=" << x.geometry().levels();
        } else if constexpr (std::is_same_v<T, sampled_fenwick>) {
          os << " b=" << x.tree().geometry().b() << " d=" << x.sample_rate()
             << " levels=" << x.tree().geometry().levels();
        } else if constexpr (std::is_same_v<T, packed_fenwick>) {
          const packed_params& p = x.params();
          os << " delta=" << p.delta_bits << " b=" << p.b << " f=" << p.field_bits
             << " d=" << p.d << " levels=" << x.geometry().levels();
        }
      },
      s);
  return os.str();
}

std::uint64_t apply_op(any_structure& s, const trace_op& op, bool& has_output) {
  has_output = op.kind != op_kind::update;
  return std::visit(
      [&](auto& x) -> std::uint64_t {
        switch (op.kind) {
          case op_kind::sum: return x.sum(op.arg);
          case op_kind::search: return x.search(op.arg);
          case op_kind::access: return x.access(op.arg);
          case op_kind::update: x.update(op.arg, op.delta); return 0;
        }
        return 0;
      },
      s);
}

std::string text_of(const bytes& b) { return std::string(b.begin(), b.end()); }

// --- build -----------------------------------------------------------------

struct build_args {
  std::string input, output;
  structure_args s;
};

int cmd_build(const build_args& a, std::ostream& out) {
  array_file arr = decode_array(read_file(a.input));
  const any_structure s =
      build_structure(std::move(arr.values), arr.k, to_build_options(a.s, require_kind(a.s.structure)));
  write_file(a.output, encode_structure(s));
  out << "built " << describe(s) << " -> " << a.output << '\n';
  return ok;
}

// --- query -----------------------------------------------------------------

struct query_args {
  std::string structure, trace, out;
};

int cmd_query(const query_args& a, std::ostream& out) {
  any_structure s = decode_structure(read_file(a.structure));
  const auto lines = parse_trace_text(text_of(read_file(a.trace)));
  std::string result;
  for (const auto& tl : lines) {
    bool has_output = false;
    std::uint64_t v = 0;
    try {
      v = apply_op(s, tl.op, has_output);
    } catch (const std::exception& e) {
      throw invalid_parameter("trace line " + std::to_string(tl.line) + " (" +
                              format_op(tl.op) + "): " + e.what());
    }
    if (has_output) {
      result += std::to_string(v);
      result += '\n';
    }
  }
  if (a.out.empty())
    out << result;
  else
    write_file(a.out, std::span(reinterpret_cast<const std::uint8_t*>(result.data()),
                                result.size()));
  return ok;
}

// --- verify ----------------------------------------------------------------

struct verify_args {
  std::uint64_t n = 0;
  unsigned k = 8;
  std::uint64_t ops = 10000;
  std::uint64_t seed = 0;
  std::string mix = "1:1:1:1";
  bool fault = false;
  structure_args s;
};

// Corrupts one stored entry read by sum(n), so the run must diverge.
void inject_fault(any_structure& s) {
  std::visit(
      [](auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, classic_fenwick>) {
          const std::uint64_t n = x.size();
          x.poke(n, x.layout()[n - 1] + 1);
        } else if constexpr (std::is_same_v<T, layered_fenwick>) {
          const level_offset top = x.geometry().sum_offsets(x.size()).front();
          x.poke(top.level, top.offset, x.entry(top.level, top.offset) + 1);
        } else {
          throw invalid_parameter("--fault is supported for classic and layered only");
        }
      },
      s);
}

int cmd_verify(const verify_args& a, std::ostream& out) {
  const structure_kind kind = require_kind(a.s.structure);
  trace_options o;
  o.n = a.n;
  o.k = a.k;
  o.ops = a.ops;
  o.mix = op_mix::parse(a.mix);
  o.seed = a.seed;
  o.delta_bits = kind == structure_kind::packed ? a.s.delta_bits : 64;
  const op_trace trace = gen_trace(o);
  any_structure s = build_structure(trace.initial, a.k, to_build_options(a.s, kind));
  if (a.fault) inject_fault(s);

  const run_report report =
      std::visit([&](auto& x) { return differential_run(trace, x); }, s);
  out << "verify " << describe(s) << " ops=" << a.ops << " seed=" << a.seed
      << " mix=" << a.mix << '\n';
  for (const auto& line : check_budgets(s, report.max_cost))
    out << "  " << std::left << std::setw(7) << to_string(line.op) << std::setw(13)
        << line.metric << " max " << std::right << std::setw(4) << line.observed
        << "  budget " << std::setw(4) << line.budget << "  (" << line.formula << ")"
        << (line.ok() ? "" : "  OVER") << '\n';
  out << "ops run: " << report.ops_run << '\n';
  if (!report.ok) {
    const divergence& d = *report.first_divergence;
    out << "first divergence at op " << d.index << " (" << format_op(d.op)
        << "): expected " << d.expected << ", got " << d.got << '\n'
        << "FAIL\n";
    return failed;
  }
  out << "divergences: 0\nPASS\n";
  return ok;
}

// --- bench -----------------------------------------------------------------

struct bench_args {
  std::uint64_t n = 0;
  unsigned k = 8;
  std::uint64_t ops = 100000;
  std::uint64_t seed = 0;
  unsigned reps = 5;
  std::string mix = "1:1:1";
  std::string csv;
  structure_args s;
};

int cmd_bench(const bench_args& a, std::ostream& out) {
  if (a.reps < 5) throw invalid_parameter("--reps must be at least 5");
  trace_options o;
  o.n = a.n;
  o.k = a.k;
  o.ops = a.ops;
  o.mix = op_mix::parse(a.mix);
  o.seed = a.seed;
  o.delta_bits = a.s.delta_bits;
  const op_trace trace = gen_trace(o);

  std::vector<op_kind> kinds;
  for (op_kind k : {op_kind::sum, op_kind::update, op_kind::search, op_kind::access}) {
    const unsigned w = k == op_kind::sum      ? o.mix.sum
                       : k == op_kind::update ? o.mix.update
                       : k == op_kind::search ? o.mix.search
                                              : o.mix.access;
    if (w > 0) kinds.push_back(k);
  }
  // Dropping the other kinds keeps every update legal: queries never change
  // the array, so the update subsequence is still valid in order.
  std::vector<std::vector<trace_op>> by_kind(4);
  for (const auto& op : trace.ops) by_kind[static_cast<int>(op.kind)].push_back(op);

  std::ostringstream csv;
  csv << "structure,n,k,b,d,op,ops_per_sec,ns_per_op,space_bits,bound_bits\n";
  std::uint64_t sink = 0;
  for (structure_kind kind : kinds_for(a.s.structure)) {
    const build_options bo = to_build_options(a.s, kind);
    std::vector<std::vector<double>> samples(4);
    any_structure s;
    for (unsigned rep = 0; rep < a.reps; ++rep) {
      s = build_structure(trace.initial, a.k, bo);
      for (op_kind k : kinds) {
        const auto& ops = by_kind[static_cast<int>(k)];
        if (ops.empty()) continue;
        bool has_output = false;
        const auto t0 = std::chrono::steady_clock::now();
        for (const auto& op : ops) sink += apply_op(s, op, has_output);
        const auto t1 = std::chrono::steady_clock::now();
        samples[static_cast<int>(k)].push_back(
            std::chrono::duration<double, std::nano>(t1 - t0).count() /
            static_cast<double>(ops.size()));
      }
    }
    const space_report sp = std::visit([](const auto& x) { return x.space(); }, s);
    for (op_kind k : kinds) {
      auto& v = samples[static_cast<int>(k)];
      double ns = 0;
      if (!v.empty()) {
        std::sort(v.begin(), v.end());
        ns = v[v.size() / 2];
      }
      csv << to_string(kind) << ',' << a.n << ',' << a.k << ',' << b_of(s) << ','
          << d_of(s) << ',' << to_string(k) << ',' << std::fixed << std::setprecision(1)
          << (ns > 0 ? 1e9 / ns : 0.0) << ',' << std::setprecision(2) << ns << ','
          << sp.payload_bits << ',' << sp.bound_bits << '\n';
      csv.unsetf(std::ios::floatfield);
    }
  }
  if (a.csv.empty() || a.csv == "-") {
    out << csv.str();
  } else {
    const std::string text = csv.str();
    write_file(a.csv, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                text.size()));
  }
  // Keeps the timed loops from being optimized away.
  if (sink == 0x5eed5eed5eed5eedULL) out << '\n';
  return ok;
}

// --- space -----------------------------------------------------------------

int cmd_space(const std::string& path, std::ostream& out) {
  const any_structure s = decode_structure(read_file(path));
  const space_report r = std::visit([](const auto& x) { return x.space(); }, s);
  out << describe(s) << '\n';
  for (const auto& [name, bits] : r.components)
    out << "  " << std::left << std::setw(16) << name << std::right << std::setw(14)
        << bits << " bits\n";
  out << std::left << std::setw(18) << "payload" << std::right << std::setw(14)
      << r.payload_bits << " bits\n"
      << std::left << std::setw(18) << "metadata" << std::right << std::setw(14)
      << r.metadata_bits << " bits\n"
      << std::left << std::setw(18) << "bound" << std::right << std::setw(14)
      << r.bound_bits << " bits  " << r.bound_formula << '\n';
  if (!r.bound_applies) {
    out << "result: n/a (word-aligned baseline, bound shown for reference)\n";
    return ok;
  }
  out << "result: " << (r.within_bound() ? "PASS" : "FAIL") << '\n';
  return r.within_bound() ? ok : failed;
}

// --- gen-array / gen-trace -------------------------------------------------

struct gen_array_args {
  std::optional<std::uint64_t> n;
  unsigned k = 8;
  std::uint64_t seed = 0;
  std::string values;
  std::string output;
};

std::vector<std::uint64_t> parse_values(const std::string& text) {
  std::vector<std::uint64_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::uint64_t x = 0;
    const char* first = item.data();
    const char* last = first + item.size();
    while (first != last && *first == ' ') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, x);
    if (ec != std::errc{} || ptr != last)
      throw invalid_parameter("bad value '" + item + "' in --values");
    v.push_back(x);
  }
  return v;
}

int cmd_gen_array(const gen_array_args& a, std::ostream& out) {
  if (a.k < 1 || a.k > 64) throw invalid_parameter("k must be in 1..64");
  array_file f;
  f.k = a.k;
  if (!a.values.empty()) {
    f.values = parse_values(a.values);
    for (std::uint64_t i = 0; i < f.values.size(); ++i)
      if (a.k < 64 && f.values[i] >> a.k)
        throw value_range_error("value " + std::to_string(f.values[i]) + " at position " +
                                std::to_string(i + 1) + " does not fit in " +
                                std::to_string(a.k) + " bits");
  } else if (a.n) {
    f.values = gen_values(*a.n, a.k, a.seed);
  } else {
    throw invalid_parameter("gen-array needs --n or --values");
  }
  write_file(a.output, encode_array(f));
  out << "wrote n=" << f.values.size() << " k=" << f.k << " -> " << a.output << '\n';
  return ok;
}

struct gen_trace_args {
  std::uint64_t n = 0;
  unsigned k = 8;
  std::uint64_t ops = 1000;
  std::uint64_t seed = 0;
  std::string mix = "1:1:1";
  unsigned delta_bits = 64;
  std::string output;
  std::string array;
};

int cmd_gen_trace(const gen_trace_args& a, std::ostream& out) {
  trace_options o;
  o.n = a.n;
  o.k = a.k;
  o.ops = a.ops;
  o.seed = a.seed;
  o.mix = op_mix::parse(a.mix);
  o.delta_bits = a.delta_bits;
  const op_trace t = gen_trace(o);
  std::string text = "# n=" + std::to_string(a.n) + " k=" + std::to_string(a.k) +
                     " seed=" + std::to_string(a.seed) + " mix=" + a.mix + "\n";
  text += format_trace_text(t.ops);
  write_file(a.output,
             std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  if (!a.array.empty()) write_file(a.array, encode_array({a.k, t.initial}));
  out << "wrote " << t.ops.size() << " ops -> " << a.output << '\n';
  return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Succinct partial sums: build, query, verify, benchmark", "psums"};
  app.require_subcommand(1);

  build_args ba;
  auto* build = app.add_subcommand("build", "build a structure from an array file");
  build->add_option("--input", ba.input, "array file (PSAR)")->required();
  build->add_option("--output", ba.output, "structure file to write")->required();
  add_structure_options(build, ba.s, false);

  query_args qa;
  auto* query = app.add_subcommand("query", "replay a text trace against a structure file");
  query->add_option("structure", qa.structure, "structure file")->required();
  query->add_option("--trace", qa.trace, "trace file")->required();
  query->add_option("--out", qa.out, "write outputs here instead of stdout");

  verify_args va;
  auto* verify = app.add_subcommand("verify", "differential test against the naive oracle");
  verify->add_option("--n", va.n, "array length")->required();
  verify->add_option("--k", va.k, "value width in bits")->capture_default_str();
  verify->add_option("--ops", va.ops, "trace length")->capture_default_str();
  verify->add_option("--seed", va.seed, "trace seed")->capture_default_str();
  verify->add_option("--mix", va.mix, "weights s:u:q[:a]")->capture_default_str();
  verify->add_flag("--fault", va.fault, "corrupt one entry first (checks the exit gate)");
  add_structure_options(verify, va.s, false);

  bench_args bea;
  auto* bench = app.add_subcommand("bench", "time operations, CSV output");
  bench->add_option("--n", bea.n, "array length")->required();
  bench->add_option("--k", bea.k, "value width in bits")->capture_default_str();
  bench->add_option("--ops", bea.ops, "ops per repetition")->capture_default_str();
  bench->add_option("--seed", bea.seed, "trace seed")->capture_default_str();
  bench->add_option("--reps", bea.reps, "repetitions (median reported, >= 5)")
      ->capture_default_str();
  bench->add_option("--mix", bea.mix, "weights s:u:q[:a]")->capture_default_str();
  bench->add_option("--csv", bea.csv, "output path (default stdout)");
  add_structure_options(bench, bea.s, true);

  std::string space_path;
  auto* space = app.add_subcommand("space", "itemized space report with bound check");
  space->add_option("structure", space_path, "structure file")->required();

  gen_array_args ga;
  auto* gen_array = app.add_subcommand("gen-array", "write an array file");
  auto* gn = gen_array->add_option("--n", ga.n, "random array of this length");
  auto* gv = gen_array->add_option("--values", ga.values, "explicit comma-separated values");
  gn->excludes(gv);
  gen_array->add_option("--k", ga.k, "value width in bits")->capture_default_str();
  gen_array->add_option("--seed", ga.seed, "seed")->capture_default_str();
  gen_array->add_option("--output", ga.output, "array file to write")->required();

  gen_trace_args gta;
  auto* gen_trace_cmd = app.add_subcommand("gen-trace", "write a random legal text trace");
  gen_trace_cmd->add_option("--n", gta.n, "array length")->required();
  gen_trace_cmd->add_option("--k", gta.k, "value width in bits")->capture_default_str();
  gen_trace_cmd->add_option("--ops", gta.ops, "trace length")->capture_default_str();
  gen_trace_cmd->add_option("--seed", gta.seed, "seed")->capture_default_str();
  gen_trace_cmd->add_option("--mix", gta.mix, "weights s:u:q[:a]")->capture_default_str();
  gen_trace_cmd->add_option("--delta-bits", gta.delta_bits, "|delta| < 2^bits")
      ->capture_default_str();
  gen_trace_cmd->add_option("--output", gta.output, "trace file to write")->required();
  gen_trace_cmd->add_option("--array", gta.array, "also write the initial array here");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }

  try {
    if (build->parsed()) return cmd_build(ba, out);
    if (query->parsed()) return cmd_query(qa, out);
    if (verify->parsed()) return cmd_verify(va, out);
    if (bench->parsed()) return cmd_bench(bea, out);
    if (space->parsed()) return cmd_space(space_path, out);
    if (gen_array->parsed()) return cmd_gen_array(ga, out);
    if (gen_trace_cmd->parsed()) return cmd_gen_trace(gta, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
  return usage;
}

}  // namespace psums::cli
