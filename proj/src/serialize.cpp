#include "psums/serialize.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>

#include "psums/errors.hpp"

namespace psums {

namespace {

constexpr std::uint8_t format_version = 1;
constexpr std::size_t header_bytes = 4 + 1 + 8 + 2;

class writer {
 public:
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u64(std::uint64_t v) { le(v, 8); }
  void words(std::span<const word_t> w) {
    for (word_t x : w) u64(x);
  }
  void buffer(std::span<const word_t> w) {
    u64(w.size());
    words(w);
  }
  bytes take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  bytes out_;
};

class reader {
 public:
  explicit reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }

  void magic(std::string_view m) {
    need(m.size(), "magic");
    for (std::size_t i = 0; i < m.size(); ++i)
      if (data_[pos_ + i] != static_cast<std::uint8_t>(m[i]))
        throw parse_error(pos_ + i, "bad magic, expected \"" + std::string(m) + "\"");
    pos_ += m.size();
  }
  std::uint8_t u8(const char* what) { return static_cast<std::uint8_t>(le(1, what)); }
  std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(le(2, what)); }
  std::uint64_t u64(const char* what) { return le(8, what); }

  std::vector<word_t> words(std::uint64_t count, const char* what) {
    if (count > remaining() / 8)
      throw parse_error(data_.size(), std::string("truncated ") + what + ": need " +
                                          std::to_string(count) + " words");
    std::vector<word_t> w(count);
    for (auto& x : w) x = le(8, what);
    return w;
  }
  std::vector<word_t> buffer(const char* what) {
    const std::uint64_t count = u64(what);
    return words(count, what);
  }
  void finish() {
    if (remaining() != 0) throw parse_error(pos_, "trailing bytes after payload");
  }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n)
      throw parse_error(data_.size(), std::string("truncated ") + what);
  }
  std::uint64_t le(int n, const char* what) {
    need(static_cast<std::size_t>(n), what);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

struct header {
  std::uint64_t n;
  unsigned k;
};

void write_header(writer& w, std::string_view magic, std::uint64_t n, unsigned k) {
  w.raw(magic);
  w.u8(format_version);
  w.u64(n);
  w.u16(static_cast<std::uint16_t>(k));
}

header read_header(reader& r, std::string_view magic) {
  r.magic(magic);
  const std::size_t at = r.offset();
  if (r.u8("version") != format_version)
    throw parse_error(at, "unsupported version (expected 1)");
  header h;
  h.n = r.u64("n");
  const std::size_t k_at = r.offset();
  h.k = r.u16("k");
  if (h.k < 1 || h.k > word_bits)
    throw parse_error(k_at, "k must be in 1..64, got " + std::to_string(h.k));
  return h;
}

// Runs a constructor on decoded buffers; rejections become parse errors
// pointing at where the structure body starts.
template <class F>
auto adopt(std::size_t at, F&& f) {
  try {
    return f();
  } catch (const parse_error&) {
    throw;
  } catch (const std::exception& e) {
    throw parse_error(at, std::string("inconsistent structure: ") + e.what());
  }
}

}  // namespace

bytes encode_array(const array_file& a) {
  packed_int_array packed(a.values.size(), a.k);
  for (std::uint64_t i = 0; i < a.values.size(); ++i) packed.set(i + 1, a.values[i]);
  writer w;
  write_header(w, "PSAR", a.values.size(), a.k);
  w.words(packed.words());
  return w.take();
}

array_file decode_array(std::span<const std::uint8_t> data) {
  reader r(data);
  const header h = read_header(r, "PSAR");
  const u128 bits = u128{h.n} * h.k;
  const u128 payload = (bits + 63) / 64 * 8;
  if (payload != r.remaining()) {
    if (payload > r.remaining())
      throw parse_error(data.size(), "truncated payload: expected " +
                                         std::to_string(static_cast<std::uint64_t>(
                                             payload > ~std::uint64_t{0} ? ~std::uint64_t{0}
                                                                         : payload)) +
                                         " bytes");
    throw parse_error(header_bytes + static_cast<std::size_t>(payload),
                      "trailing bytes after payload");
  }
  std::vector<word_t> words = r.words(static_cast<std::uint64_t>(payload / 8), "payload");
  const std::uint64_t used = static_cast<std::uint64_t>(bits);
  if (used % 64 != 0) {
    const word_t pad = words.back() & ~low_mask(static_cast<unsigned>(used % 64));
    if (pad != 0) {
      const std::uint64_t bit = (words.size() - 1) * 64 + std::countr_zero(pad);
      throw parse_error(header_bytes + bit / 8, "non-zero padding bits");
    }
  }
  const auto packed = packed_int_array::from_words(h.n, h.k, std::move(words));
  array_file a;
  a.k = h.k;
  a.values.resize(h.n);
  for (std::uint64_t i = 0; i < h.n; ++i) a.values[i] = packed[i];
  return a;
}

std::string_view to_string(structure_kind kind) noexcept {
  switch (kind) {
    case structure_kind::classic: return "classic";
    case structure_kind::layered: return "layered";
    case structure_kind::sampled: return "sampled";
    case structure_kind::packed: return "packed";
  }
  return "?";
}

std::optional<structure_kind> parse_structure_kind(std::string_view name) noexcept {
  for (auto k : {structure_kind::classic, structure_kind::layered,
                 structure_kind::sampled, structure_kind::packed})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

structure_kind kind_of(const any_structure& s) noexcept {
  return static_cast<structure_kind>(s.index());
}

any_structure build_structure(std::vector<std::uint64_t> values, unsigned k,
                              const build_options& o) {
  if (o.epsilon && o.d)
    throw invalid_parameter("--epsilon and --d are mutually exclusive");
  switch (o.kind) {
    case structure_kind::classic:
      return classic_fenwick(std::move(values), k);
    case structure_kind::layered:
      return layered_fenwick(std::move(values), k, o.b);
    case structure_kind::sampled: {
      if (o.d) return sampled_fenwick(std::move(values), k, o.b, *o.d);
      return sampled_fenwick::with_epsilon(std::move(values), k, o.b,
                                           o.epsilon.value_or(1.0));
    }
    case structure_kind::packed:
      if (o.epsilon)
        throw invalid_parameter("packed derives d from delta; use --d to override");
      return packed_fenwick(std::move(values), k, o.delta_bits, o.d);
  }
  throw invalid_parameter("unknown structure");
}

bytes encode_structure(const any_structure& s) {
  writer w;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        write_header(w, "PSST", x.size(), x.value_bits());
        w.u8(static_cast<std::uint8_t>(s.index()));
        if constexpr (std::is_same_v<T, classic_fenwick>) {
          w.buffer(x.layout());
        } else if constexpr (std::is_same_v<T, layered_fenwick>) {
          w.u64(x.geometry().b());
          w.buffer(x.words());
        } else if constexpr (std::is_same_v<T, sampled_fenwick>) {
          w.u64(x.tree().geometry().b());
          w.u64(x.sample_rate());
          w.buffer(x.base().words());
          w.buffer(x.tree().words());
        } else {
          const packed_params& p = x.params();
          w.u8(static_cast<std::uint8_t>(p.delta_bits));
          w.u64(p.b);
          w.u64(p.d);
          const auto parts = x.export_parts();
          w.u64(parts.layers.size());
          for (const auto& layer : parts.layers) w.buffer(layer);
          w.buffer(parts.pending);
          w.buffer(parts.base);
        }
      },
      s);
  return w.take();
}

any_structure decode_structure(std::span<const std::uint8_t> data) {
  reader r(data);
  const header h = read_header(r, "PSST");
  const std::size_t tag_at = r.offset();
  const std::uint8_t tag = r.u8("structure tag");
  if (tag > 3) throw parse_error(tag_at, "unknown structure tag " + std::to_string(tag));
  const std::size_t body_at = r.offset();
  any_structure out;
  switch (static_cast<structure_kind>(tag)) {
    case structure_kind::classic: {
      auto tree = r.buffer("classic tree");
      r.finish();
      if (tree.size() != h.n)
        throw parse_error(body_at, "classic tree has " + std::to_string(tree.size()) +
                                       " entries, header says n=" + std::to_string(h.n));
      out = adopt(body_at, [&] { return classic_fenwick::from_layout(std::move(tree), h.k); });
      break;
    }
    case structure_kind::layered: {
      const std::uint64_t b = r.u64("b");
      auto words = r.buffer("layers");
      r.finish();
      out = adopt(body_at, [&] {
        return layered_fenwick::from_words(layered_geometry(h.n, h.k, b), std::move(words));
      });
      break;
    }
    case structure_kind::sampled: {
      const std::uint64_t b = r.u64("b");
      const std::uint64_t d = r.u64("d");
      auto base = r.buffer("base");
      auto tree = r.buffer("group tree");
      r.finish();
      out = adopt(body_at, [&] {
        if (d < 1 || d > h.n) throw invalid_parameter("sample rate 1 <= d <= n violated");
        const std::uint64_t groups = ceil_div(h.n, d);
        return sampled_fenwick::from_parts(
            h.n, h.k, d, packed_int_array::from_words(h.n - groups, h.k, std::move(base)),
            layered_fenwick::from_words(layered_geometry(groups, h.k + ceil_log2(d), b),
                                        std::move(tree)));
      });
      break;
    }
    case structure_kind::packed: {
      packed_params p;
      p.delta_bits = r.u8("delta bits");
      p.b = r.u64("b");
      p.d = r.u64("d");
      const std::size_t count_at = r.offset();
      const std::uint64_t levels = r.u64("layer count");
      if (levels > 64) throw parse_error(count_at, "implausible layer count");
      packed_fenwick::parts parts;
      for (std::uint64_t j = 0; j < levels; ++j) parts.layers.push_back(r.buffer("layer"));
      parts.pending = r.buffer("pending words");
      parts.base = r.buffer("base");
      r.finish();
      out = adopt(body_at, [&] {
        const packed_params derived =
            packed_params::derive(h.n, h.k, p.delta_bits, word_bits, p.d);
        if (derived.b != p.b) throw invalid_parameter("stored b does not match delta");
        return packed_fenwick::from_parts(h.n, h.k, derived, std::move(parts));
      });
      break;
    }
  }
  return out;
}

std::vector<trace_line> parse_trace_text(std::string_view text) {
  std::vector<trace_line> out;
  std::uint64_t line_no = 0;
  std::size_t line_start = 0;
  while (line_start < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', line_start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(line_start, end - line_start);
    const std::size_t base = line_start;
    line_start = end + 1;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);

    std::vector<std::pair<std::string_view, std::size_t>> tokens;
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
      tokens.emplace_back(line.substr(i, j - i), base + i);
      i = j;
    }
    if (tokens.empty()) continue;

    const auto fail = [&](std::size_t at, const std::string& why) {
      throw parse_error(at, "line " + std::to_string(line_no) + ": " + why);
    };
    const auto number = [&](std::size_t t, auto& into) {
      const auto [tok, at] = tokens[t];
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), into);
      if (ec != std::errc{} || ptr != tok.data() + tok.size())
        fail(at, "bad number '" + std::string(tok) + "'");
    };

    trace_line tl;
    tl.line = line_no;
    const std::string_view verb = tokens[0].first;
    std::size_t arity = 1;
    if (verb == "sum") tl.op.kind = op_kind::sum;
    else if (verb == "search") tl.op.kind = op_kind::search;
    else if (verb == "access") tl.op.kind = op_kind::access;
    else if (verb == "update") tl.op.kind = op_kind::update, arity = 2;
    else fail(tokens[0].second, "unknown op '" + std::string(verb) + "'");
    if (tokens.size() != arity + 1)
      fail(tokens[0].second, std::string(verb) + " takes " + std::to_string(arity) +
                                 " argument" + (arity == 1 ? "" : "s"));
    number(1, tl.op.arg);
    if (arity == 2) number(2, tl.op.delta);
    out.push_back(tl);
  }
  return out;
}

std::string format_trace_text(const std::vector<trace_op>& ops) {
  std::string s;
  for (const auto& op : ops) {
    s += format_op(op);
    s += '\n';
  }
  return s;
}

bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace psums
